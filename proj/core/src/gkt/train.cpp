#include "bridgekit/gkt/train.hpp"

#include <cmath>

#include "bridgekit/error.hpp"
#include "bridgekit/eval/metrics.hpp"
#include "bridgekit/numerics/optim.hpp"

namespace bridgekit {

void FitConfig::validate() const {
  if (epochs < 0) throw ConfigError("fit: epochs must be >= 0");
  if (!(lr > 0.0)) throw ConfigError("fit: lr must be positive");
  if (weight_decay < 0.0) throw ConfigError("fit: weight_decay must be >= 0");
  if (patience < 1) throw ConfigError("fit: patience must be >= 1");
}

FitCurves fit_classifier(ParamStore& store, const LogitsFn& logits, const std::vector<int>& labels,
                         const std::vector<int>& train_rows, const std::vector<int>& val_rows, int n_classes,
                         const FitConfig& config) {
  config.validate();
  if (train_rows.empty()) throw DataError("no labeled training nodes");
  Rng rng = make_rng(config.seed, 0xf17);
  OptimizerConfig opt;
  opt.lr = config.lr;
  opt.weight_decay = config.weight_decay;

  std::vector<int> val_truth;
  for (int r : val_rows) val_truth.push_back(labels[static_cast<std::size_t>(r)]);

  FitCurves curves;
  std::vector<Matrix> best = store.snapshot();
  int since_best = 0;
  for (int epoch = 0; epoch < config.epochs; ++epoch) {
    {
      Tape tape;
      Var loss = softmax_cross_entropy(logits(tape, &rng), labels, train_rows);
      const double value = loss.scalar();
      if (!std::isfinite(value)) throw NumericalError("non-finite training loss at epoch " + std::to_string(epoch));
      curves.train_loss.push_back(value);
      tape.backward(loss);
      optimizer_step(store, opt);
    }
    if (val_rows.empty()) continue;
    Matrix z;
    {
      Tape tape;
      z = logits(tape, nullptr).value();
    }
    std::vector<int> pred;
    pred.reserve(val_rows.size());
    for (int r : val_rows) {
      Eigen::Index arg = 0;
      z.row(r).maxCoeff(&arg);
      pred.push_back(static_cast<int>(arg));
    }
    const double f1 = macro_f1(val_truth, pred, n_classes);
    curves.val_macro_f1.push_back(f1);
    if (curves.best_epoch < 0 || f1 > curves.best_val_macro_f1) {
      curves.best_epoch = epoch;
      curves.best_val_macro_f1 = f1;
      best = store.snapshot();
      since_best = 0;
    } else if (++since_best >= config.patience) {
      break;
    }
  }
  if (!val_rows.empty() && curves.best_epoch >= 0) store.restore(best);
  if (val_rows.empty() && !curves.train_loss.empty()) curves.best_epoch = static_cast<int>(curves.train_loss.size()) - 1;
  return curves;
}

FitCurves train_gkt(GnnModel& model, const BridgedGraph& g, const FitConfig& config) {
  g.validate();
  if (g.features.cols() != model.input_dim()) throw ConfigError("gkt: graph features do not match the model width");
  std::vector<int> train_rows;
  std::vector<int> val_rows;
  for (int v = 0; v < g.n_nodes; ++v) {
    const auto s = g.split[static_cast<std::size_t>(v)];
    if (g.labels[static_cast<std::size_t>(v)] == kUnlabeled) continue;
    if (s == Split::Train) train_rows.push_back(v);
    if (s == Split::Val && g.domain[static_cast<std::size_t>(v)] == Domain::Target) val_rows.push_back(v);
  }
  const auto adj = aggregation_matrix(g, model.config().aggregation);
  // Unlabeled rows never enter the loss; map them to class 0 for the label vector.
  std::vector<int> labels = g.labels;
  for (int& y : labels) y = y == kUnlabeled ? 0 : y;
  auto logits = [&](Tape& tape, Rng* rng) { return model.forward(tape, adj, tape.constant(g.features), rng); };
  return fit_classifier(model.params(), logits, labels, train_rows, val_rows, model.n_classes(), config);
}

}  // namespace bridgekit
