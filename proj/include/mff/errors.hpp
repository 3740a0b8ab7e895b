#pragma once

#include <stdexcept>

namespace mff {

// Invalid physical or numerical parameters. CLI exit code 2.
struct parameter_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Numerically rank-deficient state: dt too large or the state is invalid.
// CLI exit code 3.
struct degeneracy_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Internal consistency violation (lost Hermiticity, desynchronized noise, ...).
struct consistency_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace mff
