#pragma once

#include <functional>
#include <span>
#include <string>

#include "bridgekit/numerics/params.hpp"
#include "bridgekit/numerics/tape.hpp"

namespace bridgekit {

struct GradCheckResult {
  double max_rel_error = 0.0;
  std::string worst_param;
  Eigen::Index worst_index = -1;
  double analytic = 0.0;
  double numeric = 0.0;
  std::size_t entries_checked = 0;
};

/// Builds the scalar loss on the given tape. Must be deterministic and must
/// read parameters through `tape.param`.
using LossFn = std::function<Var(Tape&)>;

/// Compares backpropagated gradients with central differences
/// (f(x+eps) - f(x-eps)) / 2eps for every entry of `params`. The relative
/// error uses max(|analytic|, |numeric|, 1e-8) as denominator.
/// Parameter gradients are zeroed on return.
GradCheckResult check_gradients(const LossFn& loss, ParamStore& store, std::span<Parameter* const> params,
                                double eps = 1e-5);

GradCheckResult check_gradients(const LossFn& loss, ParamStore& store, double eps = 1e-5);

}  // namespace bridgekit
