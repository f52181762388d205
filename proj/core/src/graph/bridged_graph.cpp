#include "bridgekit/graph/bridged_graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "bridgekit/error.hpp"

namespace bridgekit {

namespace {

constexpr int kHomophilyBudget = 4;

void check_scenario(const DomainDataset& ds, Scenario scenario) {
  const bool intra = ds.has_intra_domain_edges();
  const bool inter = ds.has_inter_domain_edges();
  switch (scenario) {
    case Scenario::UD:
      if (intra || inter) throw ConfigError("scenario UD but the dataset carries edges");
      break;
    case Scenario::RDIntra:
      if (!intra) throw ConfigError("scenario RD_intra but the dataset has no intra-domain edges");
      if (inter) throw ConfigError("scenario RD_intra but the dataset has inter-domain edges");
      break;
    case Scenario::RDIntraInter:
      if (!inter) throw ConfigError("scenario RD_intra_inter but the dataset has no inter-domain edges");
      break;
  }
}

std::vector<int> draw(const std::vector<int>& stratum, int exclude, int count, Rng& rng, const char* what) {
  std::vector<int> pool;
  pool.reserve(stratum.size());
  for (int v : stratum) {
    if (v != exclude) pool.push_back(v);
  }
  if (static_cast<int>(pool.size()) < count) {
    throw DataError(std::string("synth_homophily_graph: ") + what + " stratum has " + std::to_string(pool.size()) +
                    " candidates, need " + std::to_string(count));
  }
  // Partial Fisher-Yates: the first `count` slots are a uniform sample.
  for (int i = 0; i < count; ++i) {
    const auto j = static_cast<std::size_t>(i) + uniform_index(rng, pool.size() - static_cast<std::size_t>(i));
    std::swap(pool[static_cast<std::size_t>(i)], pool[j]);
  }
  pool.resize(static_cast<std::size_t>(count));
  return pool;
}

}  // namespace

std::string to_string(EdgeProvenance p) {
  switch (p) {
    case EdgeProvenance::Knn: return "knn";
    case EdgeProvenance::ReusedIntra: return "reused-intra";
    case EdgeProvenance::ReusedInter: return "reused-inter";
  }
  return "knn";
}

EdgeProvenance parse_provenance(const std::string& name) {
  if (name == "knn") return EdgeProvenance::Knn;
  if (name == "reused-intra") return EdgeProvenance::ReusedIntra;
  if (name == "reused-inter") return EdgeProvenance::ReusedInter;
  throw DataError("unknown edge provenance '" + name + "'");
}

int BridgedGraph::count(EdgeProvenance p) const {
  return static_cast<int>(std::count_if(edges.begin(), edges.end(), [p](const GraphEdge& e) { return e.provenance == p; }));
}

BridgedGraph BridgedGraph::filtered(const std::function<bool(const GraphEdge&)>& keep) const {
  BridgedGraph g = *this;
  g.edges.clear();
  for (const auto& e : edges) {
    if (keep(e)) g.edges.push_back(e);
  }
  return g;
}

void BridgedGraph::validate() const {
  if (static_cast<int>(domain.size()) != n_nodes || features.rows() != n_nodes ||
      static_cast<int>(labels.size()) != n_nodes || static_cast<int>(split.size()) != n_nodes) {
    throw DataError("graph: node attribute sizes disagree");
  }
  for (const auto& e : edges) {
    if (e.src < 0 || e.dst < 0 || e.src >= n_nodes || e.dst >= n_nodes) throw DataError("graph: edge endpoint out of range");
    if (e.src == e.dst) throw DataError("graph: self-loop on node " + std::to_string(e.src));
  }
}

BridgedGraph empty_graph(const DomainDataset& ds) {
  BridgedGraph g;
  g.n_nodes = ds.size();
  g.domain = ds.domain;
  g.features = ds.features;
  g.labels = ds.labels;
  g.split = ds.split;
  g.n_classes = ds.n_classes;
  return g;
}

double nearest_rank_quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DataError("quantile of an empty set");
  if (!(q >= 0.0 && q <= 1.0)) throw ConfigError("quantile must lie in [0, 1]");
  const auto n = values.size();
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(n) - 1e-12));
  rank = std::clamp<std::size_t>(rank, 1, n);
  auto nth = values.begin() + static_cast<std::ptrdiff_t>(rank - 1);
  std::nth_element(values.begin(), nth, values.end());
  return *nth;
}

double similarity_quantile(const PairSimilarity& sim, double q, std::uint64_t seed) {
  const auto n = static_cast<std::size_t>(sim.size());
  if (n < 2) throw DataError("similarity quantile needs at least two nodes");
  std::vector<double> values;
  if (static_cast<double>(n) * static_cast<double>(n) > 1e8) {
    constexpr std::size_t kSamples = 1000000;
    Rng rng = make_rng(seed, 0x9a4e);
    values.reserve(kSamples);
    while (values.size() < kSamples) {
      const auto i = uniform_index(rng, n);
      const auto j = uniform_index(rng, n);
      if (i != j) values.push_back(sim.at(static_cast<int>(i), static_cast<int>(j)));
    }
  } else {
    values.reserve(n * (n - 1));
    std::vector<double> row(n);
    for (std::size_t i = 0; i < n; ++i) {
      sim.row(static_cast<int>(i), row);
      for (std::size_t j = 0; j < n; ++j) {
        if (j != i) values.push_back(row[j]);
      }
    }
  }
  return nearest_rank_quantile(std::move(values), q);
}

BridgedGraph build_bridged_graph(const DomainDataset& ds, const KnowledgeMap& map, Scenario scenario,
                                 const PairSimilarity& sim, double eps_quantile) {
  check_scenario(ds, scenario);
  const int n = ds.size();
  if (static_cast<int>(map.size()) != n) throw ConfigError("knowledge map does not cover every node");
  if (sim.size() != n) throw ConfigError("similarity size does not match the dataset");
  if (!(eps_quantile >= 0.0 && eps_quantile <= 1.0)) throw ConfigError("eps_quantile must lie in [0, 1]");

  BridgedGraph g = empty_graph(ds);
  std::set<std::pair<int, int>> seen;
  for (int dst = 0; dst < n; ++dst) {
    for (const auto& nb : map[static_cast<std::size_t>(dst)]) {
      if (nb.node < 0 || nb.node >= n || nb.node == dst) throw ConfigError("knowledge map entry out of range");
      if (ds.domain[dst] == Domain::Source && ds.domain[nb.node] != Domain::Source) {
        throw ConfigError("knowledge map links a target node into source node " + std::to_string(dst));
      }
      if (seen.insert({nb.node, dst}).second) g.edges.push_back(GraphEdge{nb.node, dst, EdgeProvenance::Knn});
    }
  }
  if (scenario != Scenario::UD) {
    const double eps = similarity_quantile(sim, eps_quantile);
    for (const auto& [i, j] : ds.edges) {
      const bool inter = ds.domain[i] != ds.domain[j];
      if (inter && scenario != Scenario::RDIntraInter) continue;
      if (sim.at(i, j) < eps) continue;
      const auto prov = inter ? EdgeProvenance::ReusedInter : EdgeProvenance::ReusedIntra;
      if (seen.insert({i, j}).second) g.edges.push_back(GraphEdge{i, j, prov});
      if (seen.insert({j, i}).second) g.edges.push_back(GraphEdge{j, i, prov});
    }
  }
  return g;
}

BridgedGraph synth_homophily_graph(const DomainDataset& ds, double r_intra, double r_inter, Rng& rng) {
  if (!(r_intra >= 0.0 && r_intra <= 1.0) || !(r_inter >= 0.0 && r_inter <= 1.0)) {
    throw ConfigError("homophily ratios must lie in [0, 1]");
  }
  const int c = ds.n_classes;
  // strata[domain][class], ascending node ids
  std::vector<std::vector<int>> strata[2] = {std::vector<std::vector<int>>(static_cast<std::size_t>(c)),
                                             std::vector<std::vector<int>>(static_cast<std::size_t>(c))};
  for (int v = 0; v < ds.size(); ++v) {
    if (ds.labels[v] == kUnlabeled) throw DataError("synth_homophily_graph: node " + std::to_string(v) + " is unlabeled");
    strata[static_cast<int>(ds.domain[v])][static_cast<std::size_t>(ds.labels[v])].push_back(v);
  }
  const int same_inter = static_cast<int>(std::lround(kHomophilyBudget * r_inter));
  const int same_intra = static_cast<int>(std::lround(kHomophilyBudget * r_intra));

  BridgedGraph g = empty_graph(ds);
  auto add_from = [&](int dst, Domain from, int n_same) {
    const auto& by_class = strata[static_cast<int>(from)];
    const int y = ds.labels[dst];
    for (int v : draw(by_class[static_cast<std::size_t>(y)], dst, n_same, rng, "same-class")) {
      g.edges.push_back(GraphEdge{v, dst, EdgeProvenance::Knn});
    }
    std::vector<int> other;
    for (int k = 0; k < c; ++k) {
      if (k != y) other.insert(other.end(), by_class[static_cast<std::size_t>(k)].begin(), by_class[static_cast<std::size_t>(k)].end());
    }
    std::sort(other.begin(), other.end());
    for (int v : draw(other, dst, kHomophilyBudget - n_same, rng, "different-class")) {
      g.edges.push_back(GraphEdge{v, dst, EdgeProvenance::Knn});
    }
  };
  for (int v = 0; v < ds.size(); ++v) {
    add_from(v, Domain::Source, same_inter);
    if (ds.domain[v] == Domain::Target) add_from(v, Domain::Target, same_intra);
  }
  return g;
}

void save_graph(const BridgedGraph& g, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  for (const auto& e : g.edges) out << e.src << '\t' << e.dst << '\t' << to_string(e.provenance) << '\n';
}

BridgedGraph load_graph(const std::filesystem::path& path, const DomainDataset& ds) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open graph '" + path.string() + "'");
  BridgedGraph g = empty_graph(ds);
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    GraphEdge e;
    std::string prov;
    if (!(ss >> e.src >> e.dst >> prov)) throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed edge row");
    try {
      e.provenance = parse_provenance(prov);
    } catch (const DataError& err) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": " + err.what());
    }
    g.edges.push_back(e);
  }
  g.validate();
  return g;
}

}  // namespace bridgekit
