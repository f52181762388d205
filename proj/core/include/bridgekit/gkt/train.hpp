#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "bridgekit/gkt/model.hpp"

namespace bridgekit {

struct FitConfig {
  int epochs = 200;
  double lr = 0.01;
  double weight_decay = 5e-4;
  /// Epochs without a strict Val macro-F1 improvement before stopping.
  int patience = 50;
  std::uint64_t seed = 0;

  void validate() const;
};

struct FitCurves {
  std::vector<double> train_loss;
  std::vector<double> val_macro_f1;
  int best_epoch = -1;  // -1 when no epoch ran
  double best_val_macro_f1 = 0.0;
};

/// Produces N x C logits; `rng` is null in evaluation mode (no dropout).
using LogitsFn = std::function<Var(Tape& tape, Rng* rng)>;

/// Full-batch Adam on mean cross-entropy over `train_rows`. After each epoch
/// the model is scored on `val_rows` in evaluation mode; the best-scoring
/// parameters are restored on exit. Without validation rows the final
/// parameters are kept. Throws DataError when `train_rows` is empty.
FitCurves fit_classifier(ParamStore& store, const LogitsFn& logits, const std::vector<int>& labels,
                         const std::vector<int>& train_rows, const std::vector<int>& val_rows, int n_classes,
                         const FitConfig& config);

/// Trains on every labeled Train node (source and target) of the graph, with
/// early stopping on target Val macro-F1.
FitCurves train_gkt(GnnModel& model, const BridgedGraph& g, const FitConfig& config);

}  // namespace bridgekit
