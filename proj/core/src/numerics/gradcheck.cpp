#include "bridgekit/numerics/gradcheck.hpp"

#include <algorithm>
#include <cmath>

#include "bridgekit/error.hpp"

namespace bridgekit {

namespace {

double evaluate(const LossFn& loss) {
  Tape tape;
  return loss(tape).scalar();
}

}  // namespace

GradCheckResult check_gradients(const LossFn& loss, ParamStore& store, std::span<Parameter* const> params,
                                double eps) {
  if (!(eps > 0.0) || eps > 1e-3) throw ConfigError("check_gradients: eps must be in (0, 1e-3]");
  store.zero_grad();
  {
    Tape tape;
    Var l = loss(tape);
    tape.backward(l);
  }
  GradCheckResult result;
  for (Parameter* p : params) {
    const Matrix analytic = p->grad;
    for (Eigen::Index k = 0; k < p->value.size(); ++k) {
      double& x = p->value.data()[k];
      const double saved = x;
      x = saved + eps;
      const double up = evaluate(loss);
      x = saved - eps;
      const double down = evaluate(loss);
      x = saved;
      const double numeric = (up - down) / (2.0 * eps);
      const double a = analytic.data()[k];
      const double denom = std::max({std::abs(a), std::abs(numeric), 1e-8});
      const double rel = std::abs(a - numeric) / denom;
      ++result.entries_checked;
      if (rel > result.max_rel_error) {
        result.max_rel_error = rel;
        result.worst_param = p->name;
        result.worst_index = k;
        result.analytic = a;
        result.numeric = numeric;
      }
    }
  }
  store.zero_grad();
  return result;
}

GradCheckResult check_gradients(const LossFn& loss, ParamStore& store, double eps) {
  auto all = store.all();
  return check_gradients(loss, store, all, eps);
}

}  // namespace bridgekit
