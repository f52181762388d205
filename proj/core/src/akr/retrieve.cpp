#include "bridgekit/akr/retrieve.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "bridgekit/error.hpp"
#include "bridgekit/parallel.hpp"

namespace bridgekit {

KnowledgeMap retrieve_topk(const PairSimilarity& sim, const std::vector<Domain>& domain, int k) {
  const int n = sim.size();
  if (static_cast<int>(domain.size()) != n) throw ConfigError("retrieve_topk: domain tags do not match similarity size");
  if (k < 1) throw ConfigError("retrieve_topk: K must be >= 1");
  const int n_source = static_cast<int>(std::count(domain.begin(), domain.end(), Domain::Source));
  KnowledgeMap out(static_cast<std::size_t>(n));
  for (int q = 0; q < n; ++q) {
    const int pool = domain[q] == Domain::Source ? n_source - 1 : n - 1;
    if (k > pool) {
      throw ConfigError("retrieve_topk: K=" + std::to_string(k) + " exceeds the candidate pool (" +
                        std::to_string(pool) + ") of node " + std::to_string(q));
    }
  }
  parallel_for(static_cast<std::size_t>(n), [&](std::size_t qi) {
    const int q = static_cast<int>(qi);
    std::vector<double> row(static_cast<std::size_t>(n));
    sim.row(q, row);
    std::vector<int> candidates;
    candidates.reserve(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) {
      if (j == q) continue;
      if (domain[q] == Domain::Source && domain[j] != Domain::Source) continue;
      candidates.push_back(j);
    }
    auto better = [&](int a, int b) {
      const double sa = row[static_cast<std::size_t>(a)];
      const double sb = row[static_cast<std::size_t>(b)];
      return sa != sb ? sa > sb : a < b;
    };
    std::partial_sort(candidates.begin(), candidates.begin() + k, candidates.end(), better);
    auto& dst = out[qi];
    dst.reserve(static_cast<std::size_t>(k));
    for (int r = 0; r < k; ++r) dst.push_back(Neighbor{candidates[r], row[static_cast<std::size_t>(candidates[r])]});
  });
  return out;
}

KnowledgeMap retrieve_topk(const AkrState& state, const DomainDataset& ds, int k) {
  return retrieve_topk(similarity_index(state), ds.domain, k);
}

void save_knowledge_map(const KnowledgeMap& map, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw DataError("cannot open '" + path.string() + "' for writing");
  char buf[40];
  for (std::size_t q = 0; q < map.size(); ++q) {
    for (const auto& nb : map[q]) {
      std::snprintf(buf, sizeof(buf), "%.17g", nb.similarity);
      out << q << '\t' << nb.node << '\t' << buf << '\n';
    }
  }
}

KnowledgeMap load_knowledge_map(const std::filesystem::path& path, int n_nodes) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open knowledge map '" + path.string() + "'");
  KnowledgeMap map(static_cast<std::size_t>(n_nodes));
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);
    int q = -1;
    int b = -1;
    double s = 0.0;
    if (!(ss >> q >> b >> s) || q < 0 || b < 0 || q >= n_nodes || b >= n_nodes) {
      throw DataError(path.string() + ":" + std::to_string(line_no) + ": malformed knowledge map row");
    }
    map[static_cast<std::size_t>(q)].push_back(Neighbor{b, s});
  }
  return map;
}

}  // namespace bridgekit
