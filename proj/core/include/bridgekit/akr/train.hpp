#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "bridgekit/akr/model.hpp"
#include "bridgekit/numerics/optim.hpp"
#include "bridgekit/rng.hpp"
#include "bridgekit/sampler/bps.hpp"

namespace bridgekit {

enum class LipschitzControl { WeightClip, GradientPenalty };

LipschitzControl parse_lipschitz(const std::string& name);
std::string to_string(LipschitzControl l);

struct AkrTrainConfig {
  int epochs = 200;
  int n_pair = 256;
  double lr = 1e-3;
  double weight_decay = 0.02;
  int critic_steps = 5;
  double clip_c = 0.01;
  LipschitzControl lipschitz = LipschitzControl::WeightClip;
  double gp_weight = 10.0;
  int max_class_num = 10;
  /// Pool the domain summaries over labeled Train rows during training
  /// (inference always pools over every row).
  bool pool_labeled = true;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Loss terms of one forward pass, recorded on the caller's tape.
struct AkrLosses {
  Var reconstruction;  // mean squared error of decode(target_tilde) against target features
  Var generator;       // -mean D(target_tilde)
  Var classification;  // mean BCE(label, sigmoid(S_ab)) over every pair of every batch
  Var critic;          // mean D(target_tilde) - mean D(source_h), both inputs detached
};

AkrLosses akr_losses(const AkrModel& model, Tape& tape, const AkrModel::Forward& forward, const AkrInputs& inputs,
                     std::span<const PairBatch> batches);

/// Cosine similarity logits S_ab for the listed pairs, N x 1.
Var pair_logits(const AkrModel& model, Tape& tape, Var stacked, const AkrInputs& inputs, std::span<const PairBatch> batches);

struct AkrEpochLog {
  int epoch = 0;
  double reconstruction = 0.0;
  double generator = 0.0;
  double classification = 0.0;
  double critic = 0.0;
};

struct AkrTrainResult {
  std::vector<AkrEpochLog> curves;
};

/// One alternating-optimization run, exposed phase by phase.
class AkrTrainer {
 public:
  AkrTrainer(AkrModel& model, const DomainDataset& ds, const AkrTrainConfig& config);

  /// Fresh src-src, tgt-tgt and src-tgt batches from the trainer's stream.
  std::array<PairBatch, 3> sample_batches();
  /// Step A: critic parameters only, `critic_steps` updates on the critic loss.
  void critic_phase(AkrEpochLog& log);
  /// Step B: every non-critic parameter on L_R + L_G + L_CLF.
  void generator_phase(std::span<const PairBatch> batches, AkrEpochLog& log);
  /// sample_batches, critic_phase, generator_phase.
  AkrEpochLog run_epoch();

  const AkrInputs& inputs() const { return inputs_; }

 private:
  AkrModel& model_;
  const DomainDataset& ds_;
  AkrTrainConfig config_;
  AkrInputs inputs_;
  Rng rng_;
  OptimizerConfig opt_;
  OptimizerConfig critic_opt_;
  std::vector<Parameter*> critic_;
  std::vector<Parameter*> generator_;
  int epoch_ = 0;
};

/// Alternating optimization. Each epoch draws fresh pair batches, then
/// (A) updates only critic parameters on the critic loss for `critic_steps`
/// steps, clipping or penalizing for Lipschitz control, and
/// (B) updates every non-critic parameter on L_R + L_G + L_CLF.
/// Throws NumericalError naming the loss component if any term is non-finite.
AkrTrainResult train_akr(AkrModel& model, const DomainDataset& ds, const AkrTrainConfig& config);

}  // namespace bridgekit
