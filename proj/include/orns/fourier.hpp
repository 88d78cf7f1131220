// Generating polynomials over Z/(N) and their evaluations at the N-th roots
// of unity.
//
// The Fourier vector of a distribution X is p_hat[j] = sum_k Pr(X=k) w^(jk)
// with w = exp(2 pi i / N). Sums of independent variables multiply their
// Fourier vectors coordinate-wise.

#pragma once

#include <complex>
#include <memory>
#include <vector>

#include "orns/core_model.hpp"

namespace orns {

/// cos and sin of 2 pi k / N for k in [0, N). Shared per N.
class RootTable {
 public:
  static std::shared_ptr<const RootTable> get(std::uint32_t n_nodes);

  explicit RootTable(std::uint32_t n_nodes);

  std::uint32_t n_nodes() const { return n_; }
  double re(std::uint64_t k) const { return re_[k]; }
  double im(std::uint64_t k) const { return im_[k]; }
  std::complex<double> operator[](std::uint64_t k) const { return {re_[k], im_[k]}; }
  /// w^(j*k) for arbitrary j, k.
  std::complex<double> power(std::uint64_t j, std::uint64_t k) const {
    return (*this)[static_cast<std::uint64_t>((static_cast<__uint128_t>(j) * k) % n_)];
  }
  const double* re_data() const { return re_.data(); }
  const double* im_data() const { return im_.data(); }

 private:
  std::uint32_t n_;
  std::vector<double> re_, im_;
};

/// Distribution of the shift picked uniformly from the window
/// [start, start+len) (cyclic). Backward negates each shift.
GroupDistribution dist_from_window(const ShiftSchedule& sched, std::uint64_t start,
                                   std::uint64_t len, Direction direction);

/// Shift multiplicities over a cyclic window; backward negates each shift.
std::vector<std::uint64_t> window_histogram(const ShiftSchedule& sched, std::uint64_t start,
                                            std::uint64_t len, Direction direction);

FourierVector fourier_of(const GroupDistribution& dist);

/// Plain DFT f_hat[j] = sum_k f[k] w^(jk) of an arbitrary complex vector.
std::vector<std::complex<double>> evaluate_at_roots(const std::vector<std::complex<double>>& f);

/// First index of the j-th phase (1-based) of a spray starting at t. The
/// forward spray covers phases 1..h; the backward one covers h+1..2h.
std::uint64_t phase_start(const SprayConfig& config, std::uint64_t t, std::uint32_t j);

/// Product of the h phase Fourier vectors with index 0 set to zero.
FourierVector spray_fourier_star(const ShiftSchedule& sched, const SprayConfig& config,
                                 std::uint64_t t);

/// Cyclic convolution of the h phase window distributions.
GroupDistribution spray_distribution(const ShiftSchedule& sched, const SprayConfig& config,
                                     std::uint64_t t);

/// Distribution of X + Y for independent X, Y.
GroupDistribution convolve(const GroupDistribution& x, const GroupDistribution& y);

double two_norm(const FourierVector& v);
double q_norm(const FourierVector& v, double q);

/// Sum over k of |mass[k] - 1/N|.
double tv_to_uniform(const GroupDistribution& dist);

/// Unnormalized window sums W[a] = sum_{k in window} w^(a s_k) for
/// a in [0, max_freq], slid one timestep at a time in O(max_freq).
class SlidingWindowSpectrum {
 public:
  SlidingWindowSpectrum(const ShiftSchedule& sched, std::uint64_t len, Direction direction,
                        std::uint32_t max_freq);

  /// Recompute from scratch for the window starting at `start`.
  void reset(std::uint64_t start);
  /// Move the window forward by one timestep.
  void slide();

  std::uint64_t start() const { return start_; }
  std::uint32_t max_freq() const { return max_freq_; }
  std::complex<double> sum(std::uint32_t a) const { return {re_[a], im_[a]}; }
  /// Normalized Fourier coefficient W[a] / len.
  std::complex<double> coeff(std::uint32_t a) const {
    return std::complex<double>(re_[a], im_[a]) / static_cast<double>(len_);
  }

 private:
  std::uint32_t exponent(std::uint64_t k) const;
  void add_column(std::uint32_t s, double sign);

  const ShiftSchedule* sched_;
  std::shared_ptr<const RootTable> roots_;
  std::uint64_t len_;
  Direction direction_;
  std::uint32_t max_freq_;
  std::uint64_t start_ = 0;
  std::vector<double> re_, im_;
};

}  // namespace orns
