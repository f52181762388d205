#pragma once

#include <array>
#include <string>
#include <vector>

#include "bridgekit/data/dataset.hpp"
#include "bridgekit/rng.hpp"

namespace bridgekit {

enum class PairProvenance { SrcSrc, TgtTgt, SrcTgt };

std::string to_string(PairProvenance p);

struct SamplePair {
  int a = 0;
  int b = 0;
  int label = 0;  // 1 iff class(a) == class(b)
};

struct PairBatch {
  std::vector<SamplePair> pairs;
  PairProvenance provenance = PairProvenance::SrcSrc;

  int positives() const;
  int negatives() const;
};

/// Labeled samples addressed by dataset node id.
struct LabeledView {
  std::vector<int> nodes;
  std::vector<int> labels;  // parallel to nodes

  static LabeledView of(const DomainDataset& ds, const std::vector<int>& nodes);
};

/// Balanced pair-wise sampling. Picks M = min(max_class_num, #classes in
/// either view) classes uniformly at random; for every ordered class pair
/// (from, to) draws N_batch samples with replacement from `first` restricted to
/// `from` and from `second` restricted to `to`, zipped positionally, where
/// N_batch = floor(0.5 n_pair / M) when from == to and
/// floor(0.5 n_pair / (M (M - 1))) otherwise.
/// Throws DataError when a selected class is missing from one view.
PairBatch bps_sample(const LabeledView& first, const LabeledView& second, int n_pair, int max_class_num, Rng& rng,
                     PairProvenance provenance);

/// One src-src, one tgt-tgt (target Train only) and one src->tgt batch, each
/// of nominal size n_pair.
std::array<PairBatch, 3> sample_epoch(const DomainDataset& ds, int n_pair, int max_class_num, Rng& rng);

}  // namespace bridgekit
