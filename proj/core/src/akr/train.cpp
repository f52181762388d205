#include "bridgekit/akr/train.hpp"

#include <cmath>

#include "bridgekit/error.hpp"
#include "bridgekit/numerics/optim.hpp"
#include "bridgekit/rng.hpp"

namespace bridgekit {

namespace {

void require_finite_loss(double v, const char* component, int epoch) {
  if (!std::isfinite(v)) {
    throw NumericalError(std::string("akr: non-finite ") + component + " loss at epoch " + std::to_string(epoch));
  }
}

Var critic_objective(const AkrModel& model, Tape& tape, const Matrix& source_h, const Matrix& target_tilde,
                     const AkrTrainConfig& config, Rng& rng) {
  Var src = tape.constant(source_h);
  Var tgt = tape.constant(target_tilde);
  Var loss = sub(mean_all(model.critic(tape, tgt)), mean_all(model.critic(tape, src)));
  if (config.lipschitz == LipschitzControl::GradientPenalty) {
    // Interpolate random source/target row pairs.
    const Eigen::Index n = target_tilde.rows();
    Matrix mixed(n, target_tilde.cols());
    for (Eigen::Index i = 0; i < n; ++i) {
      const auto s = static_cast<Eigen::Index>(uniform_index(rng, static_cast<std::size_t>(source_h.rows())));
      const double alpha = uniform01(rng);
      mixed.row(i) = alpha * source_h.row(s) + (1.0 - alpha) * target_tilde.row(i);
    }
    loss = add(loss, scale(model.critic_gradient_penalty(tape, tape.constant(std::move(mixed))), config.gp_weight));
  }
  return loss;
}

}  // namespace

LipschitzControl parse_lipschitz(const std::string& name) {
  if (name == "clip") return LipschitzControl::WeightClip;
  if (name == "gradient_penalty") return LipschitzControl::GradientPenalty;
  throw ConfigError("unknown lipschitz control '" + name + "' (expected clip or gradient_penalty)");
}

std::string to_string(LipschitzControl l) { return l == LipschitzControl::WeightClip ? "clip" : "gradient_penalty"; }

void AkrTrainConfig::validate() const {
  if (epochs < 0) throw ConfigError("akr: epochs must be >= 0");
  if (n_pair <= 0) throw ConfigError("akr: n_pair must be positive");
  if (!(lr > 0.0)) throw ConfigError("akr: lr must be positive");
  if (critic_steps < 0) throw ConfigError("akr: critic_steps must be >= 0");
  if (!(clip_c > 0.0)) throw ConfigError("akr: clip_c must be positive");
  if (max_class_num < 1) throw ConfigError("akr: max_class_num must be >= 1");
}

Var pair_logits(const AkrModel& model, Tape& tape, Var stacked, const AkrInputs& inputs,
                std::span<const PairBatch> batches) {
  std::vector<int> rows_a, rows_b;
  for (const auto& batch : batches) {
    for (const auto& p : batch.pairs) {
      rows_a.push_back(inputs.row_of_node[static_cast<std::size_t>(p.a)]);
      rows_b.push_back(inputs.row_of_node[static_cast<std::size_t>(p.b)]);
    }
  }
  if (rows_a.empty()) throw DataError("akr: no training pairs");
  Var proj = model.project(tape, stacked);
  return row_cosine(gather_rows(proj, std::move(rows_a)), gather_rows(proj, std::move(rows_b)));
}

AkrLosses akr_losses(const AkrModel& model, Tape& tape, const AkrModel::Forward& f, const AkrInputs& inputs,
                     std::span<const PairBatch> batches) {
  AkrLosses l;
  l.reconstruction = mse(model.decode(tape, f.target_tilde), inputs.target_raw);
  l.generator = scale(mean_all(model.critic(tape, f.target_tilde)), -1.0);
  std::vector<double> labels;
  for (const auto& batch : batches) {
    for (const auto& p : batch.pairs) labels.push_back(static_cast<double>(p.label));
  }
  l.classification = bce_with_logits(pair_logits(model, tape, f.stacked, inputs, batches), labels);
  l.critic = sub(mean_all(model.critic(tape, detach(f.target_tilde))), mean_all(model.critic(tape, detach(f.source_h))));
  return l;
}

AkrTrainer::AkrTrainer(AkrModel& model, const DomainDataset& ds, const AkrTrainConfig& config)
    : model_(model), ds_(ds), config_(config) {
  config_.validate();
  if (ds.dim() != model.input_dim()) throw ConfigError("akr: dataset dimension does not match the model");
  inputs_ = AkrInputs::build(ds, model.config().graph_encoder, config_.pool_labeled);
  rng_ = make_rng(config_.seed, 0xa4b7);
  opt_.lr = config_.lr;
  opt_.weight_decay = config_.weight_decay;
  critic_opt_ = opt_;
  critic_opt_.weight_decay = 0.0;
  critic_ = model.critic_params();
  generator_ = model.generator_params();
}

void AkrTrainer::critic_phase(AkrEpochLog& log) {
  // Generator parameters are fixed during this phase, so one forward pass
  // supplies the critic inputs for every inner step.
  Matrix source_h, target_tilde;
  {
    Tape tape;
    auto f = model_.forward(tape, inputs_);
    source_h = f.source_h.value();
    target_tilde = f.target_tilde.value();
  }
  for (int s = 0; s < config_.critic_steps; ++s) {
    Tape tape;
    Var loss = critic_objective(model_, tape, source_h, target_tilde, config_, rng_);
    log.critic = loss.scalar();
    require_finite_loss(log.critic, "critic", log.epoch);
    tape.backward(loss);
    optimizer_step(model_.params(), critic_, critic_opt_);
    if (config_.lipschitz == LipschitzControl::WeightClip) clip_values(critic_, config_.clip_c);
  }
}

void AkrTrainer::generator_phase(std::span<const PairBatch> batches, AkrEpochLog& log) {
  Tape tape;
  auto f = model_.forward(tape, inputs_);
  AkrLosses l = akr_losses(model_, tape, f, inputs_, batches);
  log.reconstruction = l.reconstruction.scalar();
  log.generator = l.generator.scalar();
  log.classification = l.classification.scalar();
  if (config_.critic_steps == 0) log.critic = l.critic.scalar();
  require_finite_loss(log.reconstruction, "reconstruction", log.epoch);
  require_finite_loss(log.generator, "generator", log.epoch);
  require_finite_loss(log.classification, "classification", log.epoch);
  Var total = add(add(l.reconstruction, l.generator), l.classification);
  tape.backward(total);
  optimizer_step(model_.params(), generator_, opt_);
}

std::array<PairBatch, 3> AkrTrainer::sample_batches() {
  return sample_epoch(ds_, config_.n_pair, config_.max_class_num, rng_);
}

AkrEpochLog AkrTrainer::run_epoch() {
  AkrEpochLog log;
  log.epoch = epoch_++;
  const auto batches = sample_batches();
  critic_phase(log);
  generator_phase(batches, log);
  return log;
}

AkrTrainResult train_akr(AkrModel& model, const DomainDataset& ds, const AkrTrainConfig& config) {
  AkrTrainer trainer(model, ds, config);
  AkrTrainResult result;
  for (int epoch = 0; epoch < config.epochs; ++epoch) result.curves.push_back(trainer.run_epoch());
  return result;
}

}  // namespace bridgekit
