#include "bridgekit/numerics/optim.hpp"

#include <cmath>

#include "bridgekit/error.hpp"

namespace bridgekit {

OptimizerConfig::Kind parse_optimizer_kind(const std::string& name) {
  if (name == "adam") return OptimizerConfig::Kind::Adam;
  if (name == "sgd") return OptimizerConfig::Kind::Sgd;
  throw ConfigError("unknown optimizer '" + name + "'");
}

void optimizer_step(ParamStore& store, std::span<Parameter* const> subset, const OptimizerConfig& config) {
  for (const Parameter* p : subset) {
    if (!p->grad.allFinite()) {
      throw NumericalError("non-finite gradient in parameter '" + p->name + "' (max |g| = " +
                           std::to_string(p->grad.cwiseAbs().maxCoeff()) + ")");
    }
  }
  for (Parameter* p : subset) {
    Matrix g = p->grad;
    if (config.weight_decay != 0.0) g += config.weight_decay * p->value;
    if (config.kind == OptimizerConfig::Kind::Sgd) {
      p->value -= config.lr * g;
      continue;
    }
    p->steps += 1;
    p->adam_m = config.beta1 * p->adam_m + (1.0 - config.beta1) * g;
    p->adam_v = config.beta2 * p->adam_v + (1.0 - config.beta2) * g.cwiseProduct(g);
    const double bc1 = 1.0 - std::pow(config.beta1, static_cast<double>(p->steps));
    const double bc2 = 1.0 - std::pow(config.beta2, static_cast<double>(p->steps));
    const double step = config.lr / bc1;
    p->value.array() -= step * p->adam_m.array() / ((p->adam_v.array() / bc2).sqrt() + config.eps);
  }
  store.zero_grad();
}

void optimizer_step(ParamStore& store, const OptimizerConfig& config) {
  auto all = store.all();
  optimizer_step(store, all, config);
}

void clip_values(std::span<Parameter* const> params, double c) {
  for (Parameter* p : params) p->value = p->value.cwiseMax(-c).cwiseMin(c);
}

}  // namespace bridgekit
