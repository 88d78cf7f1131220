#include "orns/discrepancy.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace orns {

double disc_bound(std::size_t n, std::size_t m) {
  return kDiscK * std::sqrt(static_cast<double>(n) * std::log(4.0 * (2.0 * m + 1.0)));
}

double balanced_disc_bound(std::size_t n, std::size_t m) { return 2.0 * disc_bound(n, m); }

RealMatrix real_embed(const ComplexMatrix& a) {
  RealMatrix d(2 * a.rows + 1, a.cols);
  for (std::size_t c = 0; c < a.cols; ++c) d(0, c) = 1.0;
  for (std::size_t r = 0; r < a.rows; ++r)
    for (std::size_t c = 0; c < a.cols; ++c) {
      const auto z = a(r, c);
      if (std::abs(z) > 1.0 + 1e-12)
        throw std::invalid_argument("matrix entry has modulus above 1");
      d(2 * r + 1, c) = z.real();
      d(2 * r + 2, c) = z.imag();
    }
  return d;
}

SignVector sign_partition(std::size_t rows, std::size_t n, const ColumnFn& column,
                          bool require_balance) {
  if (n == 0) throw std::invalid_argument("need at least one column");
  if (rows == 0) throw std::invalid_argument("need at least one row");
  if (require_balance && n % 2 != 0) throw std::invalid_argument("balancing needs an even count");

  SignVector out;
  out.lambda = std::sqrt(2.0 * std::log(2.0 * static_cast<double>(rows)) / static_cast<double>(n));
  const double lambda = out.lambda;
  std::vector<double> a(rows), ch(rows), sh(rows);

  // suffix[r] starts as the product over all columns and loses one factor
  // per processed column. Each factor is at least 1 and the full product is
  // at most 2R, so no rescaling is needed.
  std::vector<double> suffix(rows, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    column(i, lambda, a.data(), ch.data(), sh.data());
    for (std::size_t r = 0; r < rows; ++r) suffix[r] *= ch[r];
  }

  std::vector<double> u(rows, 0.0), e(rows, 1.0), einv(rows, 1.0);
  out.x.assign(n, 1);
  for (std::size_t i = 0; i < n; ++i) {
    column(i, lambda, a.data(), ch.data(), sh.data());
    double score = 0.0;
    for (std::size_t r = 0; r < rows; ++r) {
      suffix[r] /= ch[r];
      score += suffix[r] * (e[r] - einv[r]) * sh[r];
    }
    const std::int8_t xi = score <= 0.0 ? 1 : -1;
    out.x[i] = xi;
    for (std::size_t r = 0; r < rows; ++r) {
      u[r] += xi * a[r];
      // exp(+-lambda a) = cosh(lambda a) +- sinh(lambda a)
      e[r] *= ch[r] + xi * sh[r];
      einv[r] *= ch[r] - xi * sh[r];
    }
  }

  std::int64_t alpha = 0;
  for (auto v : out.x) alpha += v;
  if (require_balance && alpha != 0) {
    const std::int8_t major = alpha > 0 ? 1 : -1;
    std::size_t need = static_cast<std::size_t>(std::llabs(alpha) / 2);
    std::vector<bool> flipped(n, false);
    while (need-- > 0) {
      std::size_t best = n;
      double best_phi = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < n; ++i) {
        if (out.x[i] != major || flipped[i]) continue;
        column(i, lambda, a.data(), ch.data(), sh.data());
        double phi = 0.0;
        for (std::size_t r = 0; r < rows; ++r) {
          // exp(-2 lambda x a) = (cosh - x sinh)^2
          const double f = ch[r] - major * sh[r];
          const double e2 = e[r] * f * f;
          const double i2 = einv[r] / (f * f);
          phi += 0.5 * (e2 + i2);
        }
        if (phi < best_phi) {
          best_phi = phi;
          best = i;
        }
      }
      column(best, lambda, a.data(), ch.data(), sh.data());
      for (std::size_t r = 0; r < rows; ++r) {
        const double f = ch[r] - major * sh[r];
        u[r] -= 2.0 * major * a[r];
        e[r] *= f * f;
        einv[r] /= f * f;
      }
      out.x[best] = static_cast<std::int8_t>(-major);
      flipped[best] = true;
      ++out.flips;
    }
    alpha = 0;
    for (auto v : out.x) alpha += v;
  }

  out.balance = alpha;
  out.row_sums = std::move(u);
  for (double v : out.row_sums) out.real_disc = std::max(out.real_disc, std::abs(v));
  return out;
}

SignVector sign_partition(const RealMatrix& d, bool require_balance) {
  return sign_partition(
      d.rows, d.cols,
      [&](std::size_t c, double lambda, double* a, double* ch, double* sh) {
        for (std::size_t r = 0; r < d.rows; ++r) {
          a[r] = d(r, c);
          ch[r] = std::cosh(lambda * a[r]);
          sh[r] = std::sinh(lambda * a[r]);
        }
      },
      require_balance);
}

namespace {

double complex_disc(const ComplexMatrix& a, const std::vector<std::int8_t>& x) {
  double worst = 0.0;
  for (std::size_t r = 0; r < a.rows; ++r) {
    std::complex<double> s = 0.0;
    for (std::size_t c = 0; c < a.cols; ++c) s += static_cast<double>(x[c]) * a(r, c);
    worst = std::max(worst, std::abs(s));
  }
  return worst;
}

}  // namespace

SignVector balanced_sign_partition(const ComplexMatrix& a, bool require_balance) {
  const RealMatrix d = real_embed(a);
  SignVector out = sign_partition(d, require_balance);
  out.disc = complex_disc(a, out.x);
  return out;
}

double optimal_balanced_disc(const ComplexMatrix& a) {
  const std::size_t n = a.cols;
  if (n > 20 || n % 2 != 0) throw std::invalid_argument("exhaustive search needs even n <= 20");
  double best = std::numeric_limits<double>::infinity();
  std::vector<std::int8_t> x(n);
  for (std::uint32_t mask = 0; mask < (1u << n); ++mask) {
    if (static_cast<std::size_t>(__builtin_popcount(mask)) != n / 2) continue;
    for (std::size_t c = 0; c < n; ++c) x[c] = (mask >> c & 1u) ? 1 : -1;
    best = std::min(best, complex_disc(a, x));
  }
  return best;
}

}  // namespace orns
