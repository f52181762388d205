#pragma once

#include <stdexcept>
#include <string>

namespace bridgekit {

// Error families map onto process exit codes in the CLI:
// ConfigError -> 2, DataError -> 3, NumericalError/RuntimeError -> 4.

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised when backpropagation reaches a node that has no gradient rule.
class UnsupportedOpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace bridgekit
