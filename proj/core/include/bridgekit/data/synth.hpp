#pragma once

#include <cstdint>
#include <vector>

#include "bridgekit/data/dataset.hpp"
#include "bridgekit/rng.hpp"

namespace bridgekit {

/// Parameters of the two-domain Gaussian generator.
struct SyncConfig {
  int n_src = 600;
  int n_tgt = 300;
  int dim = 64;
  int n_classes = 2;
  double class_sep = 2.0;
  double marginal_shift = 1.5;
  double conditional_shift = 1.0;
  /// Connection probability of a same-class pair within a domain.
  double edge_prob_intra = 0.0172;
  /// Same-class pairs are this many times likelier to be linked than cross-class pairs.
  double homophily_bias = 4.0;
  /// Number of source-target edges added in the RD_intra_inter scenario.
  int n_inter_edges = 1000;
  std::uint64_t seed = 0;
  Scenario scenario = Scenario::UD;

  void validate() const;
};

/// Sync-UD / Sync-RD_intra / Sync-RD_intra_inter presets sized like the
/// benchmark table (600 source, 300 target, 64 features, 2 classes).
SyncConfig sync_preset(Scenario scenario, std::uint64_t seed);

/// Draws source rows first, then target rows; class of row i is i mod C within
/// each domain. Every sample is labeled and every split is Unassigned.
///
/// Source class c ~ N(class_sep * e_c, I). Target means are the source
/// means rotated about their centroid, each class moving by exactly
/// conditional_shift toward its own random direction orthogonal to the class
/// axes, then offset by marginal_shift * u for one random unit vector u. Both
/// P(X) and P(Y|X) therefore differ between domains while within-domain class
/// separability is the same.
DomainDataset generate_sync(const SyncConfig& config);

struct SyncMeans {
  std::vector<RowVector> source;  // per class
  std::vector<RowVector> target;
};

/// Class means used by generate_sync for this config.
SyncMeans sync_class_means(const SyncConfig& config);
/// Same, drawing from `rng` (the generator's stream).
SyncMeans sync_class_means(const SyncConfig& config, Rng& rng);

}  // namespace bridgekit
