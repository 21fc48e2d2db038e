#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace annembed {

using real = float;

// Malformed or inconsistent input data. The CLI maps this to exit code 2.
struct DataError : std::runtime_error {
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

// Dense row-major matrix of learned parameters.
struct Matrix {
  int64_t rows = 0;
  int cols = 0;
  std::vector<real> data;

  Matrix() = default;
  Matrix(int64_t r, int c)
      : rows(r), cols(c), data(static_cast<size_t>(r) * static_cast<size_t>(c), 0.0f) {}

  real* row(int64_t r) { return data.data() + static_cast<size_t>(r) * cols; }
  const real* row(int64_t r) const { return data.data() + static_cast<size_t>(r) * cols; }

  bool all_finite() const;
};

}  // namespace annembed
