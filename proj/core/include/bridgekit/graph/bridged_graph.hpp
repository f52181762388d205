#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <string>
#include <vector>

#include "bridgekit/akr/retrieve.hpp"
#include "bridgekit/akr/similarity.hpp"
#include "bridgekit/data/dataset.hpp"
#include "bridgekit/rng.hpp"

namespace bridgekit {

enum class EdgeProvenance : std::uint8_t { Knn, ReusedIntra, ReusedInter };

std::string to_string(EdgeProvenance p);
EdgeProvenance parse_provenance(const std::string& name);

/// Directed edge; knowledge flows from `src` (beneficial) to `dst` (benefited).
struct GraphEdge {
  int src = 0;
  int dst = 0;
  EdgeProvenance provenance = EdgeProvenance::Knn;

  bool operator==(const GraphEdge&) const = default;
};

/// Node features, labels and splits travel with the edge list so a graph is
/// self-contained input for the transfer stage.
struct BridgedGraph {
  int n_nodes = 0;
  std::vector<Domain> domain;
  std::vector<GraphEdge> edges;
  Matrix features;
  std::vector<int> labels;
  std::vector<Split> split;
  int n_classes = 0;

  int count(EdgeProvenance p) const;
  /// Copy keeping only the edges accepted by `keep`.
  BridgedGraph filtered(const std::function<bool(const GraphEdge&)>& keep) const;
  /// Throws DataError on self-loops or out-of-range endpoints.
  void validate() const;
};

/// Graph over the dataset's nodes with no edges.
BridgedGraph empty_graph(const DomainDataset& ds);

/// Nearest-rank quantile: the ceil(q n)-th smallest value (1-based, at least 1).
double nearest_rank_quantile(std::vector<double> values, double q);

/// Quantile of all off-diagonal similarity entries. When N^2 exceeds 1e8 the
/// quantile of 1e6 uniformly sampled off-diagonal entries is used instead.
double similarity_quantile(const PairSimilarity& sim, double q, std::uint64_t seed = 0);

/// Knowledge-map edges plus, for relational scenarios, the original edges
/// whose similarity reaches the eps_quantile threshold (both directions).
/// Duplicates are dropped, keeping the knn copy.
/// Throws ConfigError when the scenario disagrees with the dataset's edges,
/// the map does not cover every node, or a knn edge breaks retrieval scoping.
BridgedGraph build_bridged_graph(const DomainDataset& ds, const KnowledgeMap& map, Scenario scenario,
                                 const PairSimilarity& sim, double eps_quantile = 0.25);

/// Homophily-controlled graph. Every target node receives 4 source and 4
/// target in-neighbors, of which round(4 r_inter) and round(4 r_intra) share
/// its class; every source node receives 4 source in-neighbors with
/// round(4 r_inter) sharing its class. Neighbors are drawn uniformly without
/// replacement from the required class stratum; edges carry provenance knn.
/// Throws DataError when a stratum is too small.
BridgedGraph synth_homophily_graph(const DomainDataset& ds, double r_intra, double r_inter, Rng& rng);

/// TSV rows "src<TAB>dst<TAB>provenance".
void save_graph(const BridgedGraph& g, const std::filesystem::path& path);
/// Reads edges for the nodes of `ds`.
BridgedGraph load_graph(const std::filesystem::path& path, const DomainDataset& ds);

}  // namespace bridgekit
