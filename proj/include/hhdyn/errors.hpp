#pragma once

#include <stdexcept>
#include <string>

namespace hhdyn {

/// Invalid input, bad grid/CAP layout, unknown config keys. CLI exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite amplitudes, failed convergence, I/O failure during a run. CLI exit code 1.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hhdyn
