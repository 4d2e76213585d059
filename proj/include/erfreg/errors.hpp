#pragma once

#include <stdexcept>
#include <string>

namespace erfreg {

// Exit-code classes of the CLI map onto these: ConfigError -> 2,
// NumericalError -> 3, ResourceError -> 4. Domain violations of individual
// functions use std::domain_error / std::invalid_argument.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ResourceError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace erfreg
