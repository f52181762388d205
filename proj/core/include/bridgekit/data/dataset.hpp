#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "bridgekit/numerics/matrix.hpp"

namespace bridgekit {

enum class Domain : std::uint8_t { Source, Target };
enum class Split : std::uint8_t { Unassigned, Train, Val, Test };

/// Which relations the raw data carries: none, within-domain only, or both.
enum class Scenario { UD, RDIntra, RDIntraInter };

std::string to_string(Scenario s);
Scenario parse_scenario(const std::string& name);
std::string to_string(Split s);
Split parse_split(const std::string& name);

inline constexpr int kUnlabeled = -1;

using Edge = std::pair<int, int>;

/// Samples from two domains, stored row-wise in a single index space.
struct DomainDataset {
  Matrix features;               // N x D_in
  std::vector<int> labels;       // class id or kUnlabeled
  std::vector<Domain> domain;
  std::vector<Edge> edges;       // undirected original relations, i != j
  std::vector<Split> split;
  int n_classes = 0;

  int size() const { return static_cast<int>(features.rows()); }
  int dim() const { return static_cast<int>(features.cols()); }
  bool has_edges() const { return !edges.empty(); }

  /// Node ids of one domain in ascending order.
  std::vector<int> nodes(Domain d) const;
  /// Node ids of one domain within one split.
  std::vector<int> nodes(Domain d, Split s) const;
  /// All nodes in the given split, ascending.
  std::vector<int> nodes(Split s) const;
  int count(Domain d) const;

  bool has_inter_domain_edges() const;
  bool has_intra_domain_edges() const;

  /// Throws DataError on any invariant violation: shape agreement, labeled
  /// source samples, labels in [0, n_classes), valid edge endpoints, no self-loops.
  void validate() const;
};

}  // namespace bridgekit
