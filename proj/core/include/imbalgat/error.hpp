// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>

namespace imbalgat {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Shape or size mismatch between operands.
struct DimensionError : Error {
  using Error::Error;
};

// Malformed or inconsistent input data (dataset files, caches, checkpoints).
struct DataError : Error {
  using Error::Error;
};

// A forward op produced NaN/Inf, or training diverged.
struct NumericError : Error {
  using Error::Error;
};

// Invalid configuration value.
struct ConfigError : Error {
  using Error::Error;
};

}  // namespace imbalgat
