#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "bridgekit/akr/similarity.hpp"
#include "bridgekit/akr/train.hpp"
#include "bridgekit/data/dataset.hpp"
#include "bridgekit/gkt/model.hpp"
#include "bridgekit/gkt/train.hpp"
#include "bridgekit/sampler/bps.hpp"

namespace bridgekit {

/// Feed-forward classifier used by the DNN baselines and the point-wise
/// similarity learner. `layers` counts linear layers including the head.
struct DnnConfig {
  int layers = 3;
  int hidden = 64;
  Activation activation = Activation::Relu;
  double dropout = 0.5;
  FitConfig fit;

  void validate() const;
};

/// Which labeled nodes a DNN baseline trains on.
enum class DnnStrategy {
  TargetOnly,         // DNN_T
  Joint,              // DNN_S+T
  PretrainFinetune,   // DNN_S->T: fit on source, then continue on target
};

std::string to_string(DnnStrategy s);

/// Trains an MLP under `strategy` with early stopping on target Val macro-F1
/// and returns predictions for every node.
Predictions dnn_predict(const DomainDataset& ds, DnnStrategy strategy, const DnnConfig& config, std::uint64_t seed);

/// Logits of a Joint-strategy MLP for every node.
Matrix dnn_logits(const DomainDataset& ds, const DnnConfig& config, std::uint64_t seed);

/// Cosine similarity of raw features.
std::unique_ptr<PairSimilarity> raw_feature_similarity(const DomainDataset& ds);

/// Cosine similarity of the logits of a classifier trained on all labeled nodes.
std::unique_ptr<PairSimilarity> pointwise_similarity(const DomainDataset& ds, const DnnConfig& config,
                                                     std::uint64_t seed);

/// Pair classifier on concatenated features [x_a | x_b], trained with BCE on
/// the same balanced pair batches as the retrieval model. Similarity is the
/// mean predicted same-class probability over both orderings; threshold 0.5.
std::unique_ptr<PairSimilarity> pairwise_similarity(const DomainDataset& ds, const AkrTrainConfig& pairs,
                                                    int hidden, std::uint64_t seed);

/// Held-out pairs for similarity evaluation: balanced target-target pairs
/// and source-target pairs over target nodes outside the Train split.
struct HeldOutPairs {
  PairBatch intra;
  PairBatch inter;
};

HeldOutPairs held_out_pairs(const DomainDataset& ds, int n_pair, int max_class_num, std::uint64_t seed);

/// Macro-F1 over pair labels with prediction sim >= decision_threshold().
double pair_macro_f1(const PairSimilarity& sim, const PairBatch& batch);

}  // namespace bridgekit
