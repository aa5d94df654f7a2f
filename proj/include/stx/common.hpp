#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace stx {

// Tolerance for "is a probability distribution" checks. Overridable per call.
inline constexpr double kDefaultTol = 1e-9;
// Table entries below this are treated as exact zeros and pruned.
inline constexpr double kPruneEps = 1e-15;

// Thrown when an exhaustive-enumeration size guard trips. The CLI maps this
// to a distinct exit code.
struct GuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Dense row-major matrix. Small sizes only; no BLAS needed at desk scale.
struct Matrix {
  int rows = 0;
  int cols = 0;
  std::vector<double> a;

  Matrix() = default;
  Matrix(int r, int c) : rows(r), cols(c), a(static_cast<std::size_t>(r) * c, 0.0) {}

  double& at(int r, int c) { return a[static_cast<std::size_t>(r) * cols + c]; }
  double at(int r, int c) const { return a[static_cast<std::size_t>(r) * cols + c]; }

  // y = M * x
  std::vector<double> apply(std::span<const double> x) const {
    if (static_cast<int>(x.size()) != cols)
      throw std::invalid_argument("Matrix::apply: size mismatch");
    std::vector<double> y(rows, 0.0);
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) y[r] += at(r, c) * x[c];
    return y;
  }
};

// Mixed-radix packing with the first digit most significant.
inline std::size_t pack_index(std::span<const int> digits, std::span<const int> radices) {
  std::size_t idx = 0;
  for (std::size_t i = 0; i < digits.size(); ++i) idx = idx * radices[i] + digits[i];
  return idx;
}

inline std::vector<int> unpack_index(std::size_t idx, std::span<const int> radices) {
  std::vector<int> digits(radices.size(), 0);
  for (std::size_t i = radices.size(); i-- > 0;) {
    digits[i] = static_cast<int>(idx % radices[i]);
    idx /= radices[i];
  }
  return digits;
}

inline double vec_sum(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s;
}

inline std::vector<double> uniform_dist(int n) {
  return std::vector<double>(n, 1.0 / n);
}

// Deterministic 53-bit uniform draw. uniform_real_distribution is
// implementation-defined, so roll the mapping by hand to keep seeded
// fixtures byte-identical across compilers.
template <class Rng>
double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace stx
