#include "bridgekit/data/dataset.hpp"

#include "bridgekit/error.hpp"

namespace bridgekit {

std::string to_string(Scenario s) {
  switch (s) {
    case Scenario::UD: return "UD";
    case Scenario::RDIntra: return "RD_intra";
    case Scenario::RDIntraInter: return "RD_intra_inter";
  }
  return "UD";
}

Scenario parse_scenario(const std::string& name) {
  if (name == "UD") return Scenario::UD;
  if (name == "RD_intra") return Scenario::RDIntra;
  if (name == "RD_intra_inter") return Scenario::RDIntraInter;
  throw ConfigError("unknown scenario '" + name + "' (expected UD, RD_intra or RD_intra_inter)");
}

std::string to_string(Split s) {
  switch (s) {
    case Split::Unassigned: return "unassigned";
    case Split::Train: return "train";
    case Split::Val: return "val";
    case Split::Test: return "test";
  }
  return "unassigned";
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::Train;
  if (name == "val") return Split::Val;
  if (name == "test") return Split::Test;
  if (name == "unassigned") return Split::Unassigned;
  throw DataError("unknown split tag '" + name + "'");
}

std::vector<int> DomainDataset::nodes(Domain d) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (domain[i] == d) out.push_back(i);
  }
  return out;
}

std::vector<int> DomainDataset::nodes(Domain d, Split s) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (domain[i] == d && split[i] == s) out.push_back(i);
  }
  return out;
}

std::vector<int> DomainDataset::nodes(Split s) const {
  std::vector<int> out;
  for (int i = 0; i < size(); ++i) {
    if (split[i] == s) out.push_back(i);
  }
  return out;
}

int DomainDataset::count(Domain d) const {
  int n = 0;
  for (Domain x : domain) n += x == d ? 1 : 0;
  return n;
}

bool DomainDataset::has_inter_domain_edges() const {
  for (const auto& [a, b] : edges) {
    if (domain[a] != domain[b]) return true;
  }
  return false;
}

bool DomainDataset::has_intra_domain_edges() const {
  for (const auto& [a, b] : edges) {
    if (domain[a] == domain[b]) return true;
  }
  return false;
}

void DomainDataset::validate() const {
  const auto n = static_cast<std::size_t>(size());
  if (labels.size() != n || domain.size() != n || split.size() != n) {
    throw DataError("dataset: labels/domain/split lengths do not match feature rows");
  }
  if (n_classes <= 0) throw DataError("dataset: n_classes must be positive");
  require_finite(features, "dataset features");
  for (std::size_t i = 0; i < n; ++i) {
    if (labels[i] == kUnlabeled) {
      if (domain[i] == Domain::Source) throw DataError("dataset: source sample " + std::to_string(i) + " is unlabeled");
      continue;
    }
    if (labels[i] < 0 || labels[i] >= n_classes) {
      throw DataError("dataset: label " + std::to_string(labels[i]) + " of sample " + std::to_string(i) + " out of range");
    }
  }
  for (const auto& [a, b] : edges) {
    if (a < 0 || b < 0 || a >= size() || b >= size()) {
      throw DataError("dataset: edge (" + std::to_string(a) + ", " + std::to_string(b) + ") has an invalid endpoint");
    }
    if (a == b) throw DataError("dataset: self-loop on node " + std::to_string(a));
  }
}

}  // namespace bridgekit
