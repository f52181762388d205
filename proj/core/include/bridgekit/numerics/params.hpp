#pragma once

#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "bridgekit/numerics/matrix.hpp"
#include "bridgekit/rng.hpp"

namespace bridgekit {

/// A named trainable matrix with its gradient slot and optimizer state.
struct Parameter {
  std::string name;
  Matrix value;
  Matrix grad;  // same shape as value; zeroed by the optimizer after each step
  Matrix adam_m;
  Matrix adam_v;
  long long steps = 0;
};

/// Owns parameters in insertion order. Addresses stay stable for the life of
/// the store, so layers may keep raw Parameter pointers.
class ParamStore {
 public:
  ParamStore() = default;
  ParamStore(ParamStore&&) noexcept = default;
  ParamStore& operator=(ParamStore&&) noexcept = default;
  ParamStore(const ParamStore&) = delete;
  ParamStore& operator=(const ParamStore&) = delete;

  /// Registers a parameter; names must be unique.
  Parameter& add(std::string name, Matrix init);

  Parameter& get(std::string_view name);
  const Parameter& get(std::string_view name) const;
  bool contains(std::string_view name) const;

  std::vector<Parameter*> all();
  std::vector<const Parameter*> all() const;
  std::vector<Parameter*> with_prefix(std::string_view prefix);
  std::vector<Parameter*> without_prefix(std::string_view prefix);

  std::size_t size() const { return params_.size(); }
  std::size_t scalar_count() const;

  void zero_grad();

  /// Copies of every parameter value, in store order.
  std::vector<Matrix> snapshot() const;
  void restore(const std::vector<Matrix>& values);

 private:
  std::vector<std::unique_ptr<Parameter>> params_;
};

/// Weights uniform in +-sqrt(6 / (fan_in + fan_out)).
Matrix glorot_uniform(int fan_in, int fan_out, Rng& rng);

}  // namespace bridgekit
