#pragma once

#include <span>
#include <string>

#include "bridgekit/numerics/params.hpp"

namespace bridgekit {

struct OptimizerConfig {
  enum class Kind { Adam, Sgd };
  Kind kind = Kind::Adam;
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  /// L2 penalty folded into the gradient before the update.
  double weight_decay = 0.0;
};

OptimizerConfig::Kind parse_optimizer_kind(const std::string& name);

/// Updates `subset` from its gradients, then zeroes the gradients of every
/// parameter in `store`. Throws NumericalError naming the first parameter
/// whose gradient is not finite; nothing is updated in that case.
void optimizer_step(ParamStore& store, std::span<Parameter* const> subset, const OptimizerConfig& config);

/// Same, updating every parameter in the store.
void optimizer_step(ParamStore& store, const OptimizerConfig& config);

/// Clamps every entry of the listed parameters to [-c, c].
void clip_values(std::span<Parameter* const> params, double c);

}  // namespace bridgekit
