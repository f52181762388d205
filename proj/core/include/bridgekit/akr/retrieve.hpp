#pragma once

#include <filesystem>
#include <vector>

#include "bridgekit/akr/model.hpp"
#include "bridgekit/akr/similarity.hpp"
#include "bridgekit/data/dataset.hpp"

namespace bridgekit {

struct Neighbor {
  int node = 0;
  double similarity = 0.0;
};

/// For each benefited node, its K beneficial nodes in descending similarity.
using KnowledgeMap = std::vector<std::vector<Neighbor>>;

/// Exact top-K by full row scan. Source queries search source nodes only;
/// target queries search every node. A node never retrieves itself and ties
/// go to the lower node id. Throws ConfigError when K < 1 or K exceeds a
/// query's candidate pool.
KnowledgeMap retrieve_topk(const PairSimilarity& sim, const std::vector<Domain>& domain, int k);

KnowledgeMap retrieve_topk(const AkrState& state, const DomainDataset& ds, int k);

/// TSV rows "benefited<TAB>beneficial<TAB>similarity".
void save_knowledge_map(const KnowledgeMap& map, const std::filesystem::path& path);
KnowledgeMap load_knowledge_map(const std::filesystem::path& path, int n_nodes);

}  // namespace bridgekit
