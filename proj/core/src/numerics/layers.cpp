#include "bridgekit/numerics/layers.hpp"

#include "bridgekit/error.hpp"

namespace bridgekit {

Activation parse_activation(const std::string& name) {
  if (name == "relu") return Activation::Relu;
  if (name == "tanh") return Activation::Tanh;
  if (name == "identity") return Activation::Identity;
  throw ConfigError("unknown activation '" + name + "'");
}

std::string to_string(Activation a) {
  switch (a) {
    case Activation::Relu: return "relu";
    case Activation::Tanh: return "tanh";
    case Activation::Identity: return "identity";
  }
  return "identity";
}

Var activate(Var x, Activation act) {
  switch (act) {
    case Activation::Relu: return relu(x);
    case Activation::Tanh: return tanh(x);
    case Activation::Identity: return x;
  }
  return x;
}

Var linear(Var input, Var weight, Var bias) {
  if (input.cols() != weight.rows()) {
    throw ConfigError("linear: input has " + std::to_string(input.cols()) + " columns but weight has " +
                      std::to_string(weight.rows()) + " rows");
  }
  if (bias.rows() != 1 || bias.cols() != weight.cols()) throw ConfigError("linear: bias width mismatch");
  return add_row(matmul(input, weight), bias);
}

Var dropout(Var x, double rate, Rng* rng) {
  if (rng == nullptr || rate <= 0.0) return x;
  if (rate >= 1.0) throw ConfigError("dropout rate must be < 1");
  const double keep = 1.0 - rate;
  Matrix mask(x.rows(), x.cols());
  for (Eigen::Index r = 0; r < mask.rows(); ++r) {
    for (Eigen::Index c = 0; c < mask.cols(); ++c) mask(r, c) = uniform01(*rng) < keep ? 1.0 / keep : 0.0;
  }
  return hadamard(x, x.tape()->constant(std::move(mask)));
}

Linear::Linear(ParamStore& store, const std::string& name, int in_dim, int out_dim, Rng& rng)
    : in_dim_(in_dim), out_dim_(out_dim) {
  weight_ = &store.add(name + ".weight", glorot_uniform(in_dim, out_dim, rng));
  bias_ = &store.add(name + ".bias", Matrix::Zero(1, out_dim));
}

Var Linear::forward(Tape& tape, Var x) const { return linear(x, tape.param(*weight_), tape.param(*bias_)); }

Mlp::Mlp(ParamStore& store, const std::string& name, const std::vector<int>& dims, Activation act, Rng& rng)
    : act_(act) {
  if (dims.size() < 2) throw ConfigError("Mlp '" + name + "' needs at least input and output widths");
  for (std::size_t i = 0; i + 1 < dims.size(); ++i) {
    layers_.emplace_back(store, name + "." + std::to_string(i), dims[i], dims[i + 1], rng);
  }
}

Var Mlp::forward(Tape& tape, Var x, double dropout_rate, Rng* rng) const {
  for (std::size_t i = 0; i < layers_.size(); ++i) {
    x = layers_[i].forward(tape, x);
    if (i + 1 < layers_.size()) {
      x = activate(x, act_);
      x = dropout(x, dropout_rate, rng);
    }
  }
  return x;
}

}  // namespace bridgekit
