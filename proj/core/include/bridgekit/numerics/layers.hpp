#pragma once

#include <string>
#include <vector>

#include "bridgekit/numerics/params.hpp"
#include "bridgekit/numerics/tape.hpp"
#include "bridgekit/rng.hpp"

namespace bridgekit {

enum class Activation { Relu, Tanh, Identity };

Activation parse_activation(const std::string& name);
std::string to_string(Activation a);

Var activate(Var x, Activation act);

/// Affine map x*W + b with shape checking.
Var linear(Var input, Var weight, Var bias);

/// Inverted dropout; identity when `rng` is null or `rate` is 0.
Var dropout(Var x, double rate, Rng* rng);

/// Dense layer backed by two parameters `<name>.weight` (in x out) and `<name>.bias` (1 x out).
class Linear {
 public:
  Linear() = default;
  Linear(ParamStore& store, const std::string& name, int in_dim, int out_dim, Rng& rng);

  Var forward(Tape& tape, Var x) const;

  int in_dim() const { return in_dim_; }
  int out_dim() const { return out_dim_; }

 private:
  Parameter* weight_ = nullptr;
  Parameter* bias_ = nullptr;
  int in_dim_ = 0;
  int out_dim_ = 0;
};

/// Stack of Linear layers with an activation between consecutive layers and
/// none after the last. `dims` lists input width, hidden widths, output width.
class Mlp {
 public:
  Mlp() = default;
  Mlp(ParamStore& store, const std::string& name, const std::vector<int>& dims, Activation act, Rng& rng);

  /// Dropout, when requested, is applied after each hidden activation.
  Var forward(Tape& tape, Var x, double dropout_rate = 0.0, Rng* rng = nullptr) const;

  int in_dim() const { return layers_.empty() ? 0 : layers_.front().in_dim(); }
  int out_dim() const { return layers_.empty() ? 0 : layers_.back().out_dim(); }

 private:
  std::vector<Linear> layers_;
  Activation act_ = Activation::Relu;
};

}  // namespace bridgekit
