#include "orns/fourier.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <map>
#include <mutex>
#include <numbers>

#include "orns/numeric.hpp"

namespace orns {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  if (const char* env = std::getenv("ORNS_THREADS")) {
    const long v = std::strtol(env, nullptr, 10);
    if (v > 0) return static_cast<unsigned>(v);
  }
  const unsigned hw = std::thread::hardware_concurrency();
  return hw > 0 ? hw : 1;
}

RootTable::RootTable(std::uint32_t n_nodes) : n_(n_nodes), re_(n_nodes), im_(n_nodes) {
  if (n_ == 0) throw std::invalid_argument("N must be positive");
  for (std::uint32_t k = 0; k < n_; ++k) {
    const long double angle =
        2.0L * std::numbers::pi_v<long double> * static_cast<long double>(k) / n_;
    re_[k] = static_cast<double>(std::cos(angle));
    im_[k] = static_cast<double>(std::sin(angle));
  }
  // Exact values at the quarter points keep symmetric cases exactly zero.
  if (n_ % 4 == 0) {
    re_[n_ / 4] = 0.0;
    im_[n_ / 4] = 1.0;
    re_[3 * (n_ / 4)] = 0.0;
    im_[3 * (n_ / 4)] = -1.0;
  }
  if (n_ % 2 == 0) {
    re_[n_ / 2] = -1.0;
    im_[n_ / 2] = 0.0;
  }
}

std::shared_ptr<const RootTable> RootTable::get(std::uint32_t n_nodes) {
  static std::mutex mu;
  static std::map<std::uint32_t, std::shared_ptr<const RootTable>> cache;
  std::lock_guard lock(mu);
  auto& slot = cache[n_nodes];
  if (!slot) slot = std::make_shared<const RootTable>(n_nodes);
  return slot;
}

std::vector<std::uint64_t> window_histogram(const ShiftSchedule& sched, std::uint64_t start,
                                            std::uint64_t len, Direction direction) {
  const auto n = sched.n_nodes();
  std::vector<std::uint64_t> counts(n, 0);
  const auto shifts = sched.shifts();
  const std::uint64_t period = shifts.size();
  std::uint64_t k = start % period;
  for (std::uint64_t i = 0; i < len; ++i) {
    const std::uint32_t s = shifts[k];
    ++counts[direction == Direction::forward ? s : (n - s) % n];
    if (++k == period) k = 0;
  }
  return counts;
}

GroupDistribution dist_from_window(const ShiftSchedule& sched, std::uint64_t start,
                                   std::uint64_t len, Direction direction) {
  if (len == 0) throw std::invalid_argument("window length must be >= 1");
  const auto counts = window_histogram(sched, start, len, direction);
  std::vector<double> mass(counts.size());
  for (std::size_t g = 0; g < counts.size(); ++g)
    mass[g] = static_cast<double>(counts[g]) / static_cast<double>(len);
  return GroupDistribution(std::move(mass));
}

namespace {

// Fourier vector of a sparse nonnegative weight vector given as (index, weight).
std::vector<std::complex<double>> sparse_dft(
    std::uint32_t n, const std::vector<std::pair<std::uint32_t, double>>& support) {
  std::vector<std::complex<double>> out(n);
  // Equal weight on every residue: every nonzero frequency vanishes exactly.
  const bool flat = support.size() == n &&
                    std::all_of(support.begin(), support.end(),
                                [&](const auto& e) { return e.second == support[0].second; });
  if (flat) {
    out[0] = pairwise_sum<double>(0, n, [&](std::size_t i) { return support[i].second; });
    return out;
  }
  const auto roots = RootTable::get(n);
  for (std::uint32_t j = 0; j < n; ++j) {
    out[j] = pairwise_sum<std::complex<double>>(0, support.size(), [&](std::size_t i) {
      const auto idx = static_cast<std::uint64_t>(j) * support[i].first % n;
      return support[i].second * (*roots)[idx];
    });
  }
  return out;
}

std::vector<std::pair<std::uint32_t, double>> support_of(std::span<const double> mass) {
  std::vector<std::pair<std::uint32_t, double>> s;
  for (std::uint32_t k = 0; k < mass.size(); ++k)
    if (mass[k] != 0.0) s.emplace_back(k, mass[k]);
  return s;
}

std::vector<std::pair<std::uint32_t, double>> support_of(const std::vector<std::uint64_t>& counts,
                                                         std::uint64_t len) {
  std::vector<std::pair<std::uint32_t, double>> s;
  for (std::uint32_t k = 0; k < counts.size(); ++k)
    if (counts[k] != 0) s.emplace_back(k, static_cast<double>(counts[k]) / static_cast<double>(len));
  return s;
}

}  // namespace

FourierVector fourier_of(const GroupDistribution& dist) {
  FourierVector v;
  v.values = sparse_dft(dist.n_nodes(), support_of(dist.mass()));
  return v;
}

std::vector<std::complex<double>> evaluate_at_roots(const std::vector<std::complex<double>>& f) {
  const auto n = static_cast<std::uint32_t>(f.size());
  if (n == 0) return {};
  const auto roots = RootTable::get(n);
  std::vector<std::complex<double>> out(n);
  for (std::uint32_t j = 0; j < n; ++j)
    out[j] = pairwise_sum<std::complex<double>>(0, n, [&](std::size_t k) {
      return f[k] * (*roots)[static_cast<std::uint64_t>(j) * k % n];
    });
  return out;
}

std::uint64_t phase_start(const SprayConfig& config, std::uint64_t t, std::uint32_t j) {
  const std::uint32_t offset = config.direction == Direction::forward ? 0 : config.hop_count;
  return t + std::uint64_t{offset + j - 1} * config.phase_len;
}

FourierVector spray_fourier_star(const ShiftSchedule& sched, const SprayConfig& config,
                                 std::uint64_t t) {
  config.validate(sched.period());
  const auto n = sched.n_nodes();
  FourierVector acc;
  acc.values.assign(n, std::complex<double>(1.0, 0.0));
  for (std::uint32_t j = 1; j <= config.hop_count; ++j) {
    const auto counts =
        window_histogram(sched, phase_start(config, t, j), config.phase_len, config.direction);
    const auto phase = sparse_dft(n, support_of(counts, config.phase_len));
    for (std::uint32_t a = 0; a < n; ++a) acc.values[a] *= phase[a];
  }
  return acc.star();
}

GroupDistribution spray_distribution(const ShiftSchedule& sched, const SprayConfig& config,
                                     std::uint64_t t) {
  config.validate(sched.period());
  GroupDistribution acc = GroupDistribution::point_mass(sched.n_nodes(), 0);
  for (std::uint32_t j = 1; j <= config.hop_count; ++j)
    acc = convolve(acc, dist_from_window(sched, phase_start(config, t, j), config.phase_len,
                                         config.direction));
  return acc;
}

GroupDistribution convolve(const GroupDistribution& x, const GroupDistribution& y) {
  const auto n = x.n_nodes();
  if (y.n_nodes() != n) throw std::invalid_argument("convolve: group size mismatch");
  const auto ys = support_of(y.mass());
  std::vector<double> out(n, 0.0);
  for (std::uint32_t c = 0; c < n; ++c) {
    out[c] = pairwise_sum<double>(0, ys.size(), [&](std::size_t i) {
      const auto [k, w] = ys[i];
      return w * x[(c + n - k) % n];
    });
  }
  // Rounding may leave the total a few ulps off; renormalization is not needed
  // because GroupDistribution allows 1e-9 slack.
  return GroupDistribution(std::move(out));
}

double two_norm(const FourierVector& v) {
  return std::sqrt(pairwise_sum<double>(0, v.values.size(),
                                        [&](std::size_t i) { return std::norm(v.values[i]); }));
}

double q_norm(const FourierVector& v, double q) {
  if (!(q >= 1.0)) throw std::invalid_argument("q must be >= 1");
  if (q == 2.0) return two_norm(v);
  double scale = 0.0;
  for (const auto& z : v.values) scale = std::max(scale, std::abs(z));
  if (scale == 0.0) return 0.0;
  const double s = pairwise_sum<double>(0, v.values.size(), [&](std::size_t i) {
    return std::pow(std::abs(v.values[i]) / scale, q);
  });
  return scale * std::pow(s, 1.0 / q);
}

double tv_to_uniform(const GroupDistribution& dist) {
  const double u = 1.0 / dist.n_nodes();
  return pairwise_sum<double>(0, dist.n_nodes(),
                              [&](std::size_t k) { return std::abs(dist.mass()[k] - u); });
}

SlidingWindowSpectrum::SlidingWindowSpectrum(const ShiftSchedule& sched, std::uint64_t len,
                                             Direction direction, std::uint32_t max_freq)
    : sched_(&sched),
      roots_(RootTable::get(sched.n_nodes())),
      len_(len),
      direction_(direction),
      max_freq_(max_freq),
      re_(max_freq + 1),
      im_(max_freq + 1) {
  if (len == 0) throw std::invalid_argument("window length must be >= 1");
  if (max_freq >= sched.n_nodes()) throw std::invalid_argument("max_freq must be < N");
  reset(0);
}

std::uint32_t SlidingWindowSpectrum::exponent(std::uint64_t k) const {
  const std::uint32_t s = sched_->shift_at(k);
  const std::uint32_t n = sched_->n_nodes();
  return direction_ == Direction::forward ? s : (n - s) % n;
}

void SlidingWindowSpectrum::add_column(std::uint32_t s, double sign) {
  const std::uint32_t n = sched_->n_nodes();
  std::uint32_t idx = 0;
  for (std::uint32_t a = 0; a <= max_freq_; ++a) {
    re_[a] += sign * roots_->re(idx);
    im_[a] += sign * roots_->im(idx);
    idx += s;
    if (idx >= n) idx -= n;
  }
}

void SlidingWindowSpectrum::reset(std::uint64_t start) {
  start_ = start;
  const auto counts = window_histogram(*sched_, start, len_, direction_);
  const std::uint32_t n = sched_->n_nodes();
  std::vector<std::uint32_t> support;
  for (std::uint32_t s = 0; s < n; ++s)
    if (counts[s]) support.push_back(s);
  for (std::uint32_t a = 0; a <= max_freq_; ++a) {
    const auto z = pairwise_sum<std::complex<double>>(0, support.size(), [&](std::size_t i) {
      const std::uint32_t s = support[i];
      return static_cast<double>(counts[s]) * (*roots_)[static_cast<std::uint64_t>(a) * s % n];
    });
    re_[a] = z.real();
    im_[a] = z.imag();
  }
}

void SlidingWindowSpectrum::slide() {
  add_column(exponent(start_), -1.0);
  add_column(exponent(start_ + len_), 1.0);
  ++start_;
}

}  // namespace orns
