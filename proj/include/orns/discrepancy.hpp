// Balanced +-1 colorings of complex matrix columns with small l-infinity
// discrepancy.
//
// The backend is the method of conditional expectations on the real
// embedding of the matrix: row 0 is all ones, followed by the real and
// imaginary parts of each complex row. With R real rows and n columns it
// uses lambda = sqrt(2 ln(2R) / n) and the pessimistic estimator
//
//   Phi = sum_r cosh(lambda u_r) prod_{k > i} cosh(lambda a_{r,k})
//
// where u is the partial signed sum. Phi never increases, which yields
// |u_r| <= sqrt(2 n ln(2R)) for every real row.

#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

namespace orns {

/// Dense complex matrix, row-major.
struct ComplexMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<std::complex<double>> data;

  ComplexMatrix() = default;
  ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
  std::complex<double>& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  const std::complex<double>& operator()(std::size_t r, std::size_t c) const {
    return data[r * cols + c];
  }
};

/// Dense real matrix, row-major.
struct RealMatrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;

  RealMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Constant such that ||Ax||_inf <= kDiscK * sqrt(n ln(4(2m+1))) for the
/// unbalanced coloring of an m-row complex matrix with entries of modulus
/// at most 1. Balancing at most doubles the bound.
inline constexpr double kDiscK = 2.0;

/// K * sqrt(n ln(4(2m+1))).
double disc_bound(std::size_t n, std::size_t m);
/// Twice disc_bound, the guarantee for balanced colorings.
double balanced_disc_bound(std::size_t n, std::size_t m);

/// (2m+1) x n real embedding. Throws std::invalid_argument if an entry has
/// modulus above 1.
RealMatrix real_embed(const ComplexMatrix& a);

struct SignVector {
  std::vector<std::int8_t> x;
  std::int64_t balance = 0;
  /// Signed row sums u = D x of the real embedding.
  std::vector<double> row_sums;
  /// max |u_r| over real rows.
  double real_disc = 0.0;
  /// ||A x||_inf in complex modulus (filled by the complex entry points).
  double disc = 0.0;
  double lambda = 0.0;
  /// Coordinates flipped while balancing.
  std::size_t flips = 0;
};

/// Fills the real column `col` (length rows) together with cosh and sinh of
/// lambda times each entry.
using ColumnFn = std::function<void(std::size_t col, double lambda, double* a, double* ch,
                                    double* sh)>;

/// Conditional-expectations coloring over a column oracle. Row 0 must be the
/// all-ones row when balancing is requested. Entries must lie in [-1, 1].
SignVector sign_partition(std::size_t rows, std::size_t n, const ColumnFn& column,
                          bool require_balance);

SignVector sign_partition(const RealMatrix& d, bool require_balance);

/// Coloring of the columns of a complex matrix. With require_balance the
/// column count must be even and sum(x) = 0.
SignVector balanced_sign_partition(const ComplexMatrix& a, bool require_balance);

/// Exhaustive minimum of ||A x||_inf over balanced sign vectors (n <= 20).
double optimal_balanced_disc(const ComplexMatrix& a);

}  // namespace orns
