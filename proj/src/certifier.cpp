#include "orns/certifier.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "orns/fourier.hpp"
#include "orns/numeric.hpp"

namespace orns {

std::uint64_t lambda_for_h(double eps, std::uint32_t h, std::uint32_t n_nodes) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (h == 0) throw std::invalid_argument("h must be >= 1");
  if (n_nodes < 2) throw std::invalid_argument("N must be >= 2");
  const long double n = n_nodes;
  const long double v = 4.0L * std::pow(static_cast<long double>(eps) / 2.0L, -2.0L / h) *
                        std::pow(n, 1.0L / h) * std::log(static_cast<long double>(h) * n * n * n);
  return static_cast<std::uint64_t>(std::ceil(v));
}

LambdaMap resolve_lambdas(const ShiftSchedule& sched, double eps,
                          const std::vector<std::uint32_t>& h_list, const LambdaMap& lambda_map) {
  LambdaMap out;
  for (auto h : h_list) {
    if (h == 0) throw std::invalid_argument("h must be >= 1");
    const auto it = lambda_map.find(h);
    const std::uint64_t lambda =
        it != lambda_map.end() ? it->second : lambda_for_h(eps, h, sched.n_nodes());
    if (lambda == 0) throw std::invalid_argument("lambda must be >= 1 at h=" + std::to_string(h));
    if (lambda * h > sched.period())
      throw std::invalid_argument("lambda*h = " + std::to_string(lambda * h) +
                                  " exceeds period " + std::to_string(sched.period()) +
                                  " at h=" + std::to_string(h));
    out[h] = lambda;
  }
  return out;
}

namespace {

constexpr std::size_t kLanes = 8;

// Nonzero frequencies a in [1, N/2], with weight 2 for a paired with N - a
// and weight 1 for the self-paired a = N/2. Padded to a multiple of kLanes
// with weight-0 entries.
struct HalfSpectrum {
  std::vector<std::uint32_t> freq;
  std::vector<double> weight;
  std::size_t chunks() const { return freq.size() / kLanes; }
};

HalfSpectrum half_spectrum(std::uint32_t n) {
  HalfSpectrum hs;
  for (std::uint32_t a = 1; a <= n / 2; ++a) {
    hs.freq.push_back(a);
    hs.weight.push_back((n % 2 == 0 && a == n / 2) ? 1.0 : 2.0);
  }
  while (hs.freq.size() % kLanes != 0) {
    hs.freq.push_back(0);
    hs.weight.push_back(0.0);
  }
  return hs;
}

// zre[s*kLanes + l] = Re w^(freq[l] * s), likewise zim.
void build_lane_table(const RootTable& roots, const std::uint32_t* freq, double* zre,
                      double* zim) {
  const std::uint32_t n = roots.n_nodes();
  std::array<std::uint32_t, kLanes> idx{};
  for (std::uint32_t s = 0; s < n; ++s) {
    for (std::size_t l = 0; l < kLanes; ++l) {
      zre[s * kLanes + l] = roots.re(idx[l]);
      zim[s * kLanes + l] = roots.im(idx[l]);
      idx[l] += freq[l];
      if (idx[l] >= n) idx[l] -= n;
    }
  }
}

struct TileScratch {
  std::vector<double> zre, zim, r;
};

// Squared starred norms of the forward spray for starts t0 .. t0+len-1.
// `ext` holds the shifts unrolled past the period.
void tile_norms(const std::vector<std::uint32_t>& ext, const RootTable& roots,
                const HalfSpectrum& hs, std::uint32_t h, std::uint64_t lambda, std::uint64_t t0,
                std::uint64_t len, double* acc, TileScratch& sc) {
  const std::uint32_t n = roots.n_nodes();
  const std::uint64_t span = len + (h - 1) * lambda;
  sc.zre.resize(std::size_t{n} * kLanes);
  sc.zim.resize(std::size_t{n} * kLanes);
  sc.r.resize(span * kLanes);
  std::fill(acc, acc + len, 0.0);
  const double inv = 1.0 / (static_cast<double>(lambda) * static_cast<double>(lambda));
  const std::uint32_t* e = ext.data();
  double* zre = sc.zre.data();
  double* zim = sc.zim.data();
  double* r = sc.r.data();

  for (std::size_t c = 0; c < hs.chunks(); ++c) {
    build_lane_table(roots, hs.freq.data() + c * kLanes, zre, zim);
    const double* w = hs.weight.data() + c * kLanes;

    alignas(64) double wr[kLanes] = {};
    alignas(64) double wi[kLanes] = {};
    for (std::uint64_t k = t0; k < t0 + lambda; ++k) {
      const double* pr = zre + std::size_t{e[k]} * kLanes;
      const double* pi = zim + std::size_t{e[k]} * kLanes;
      for (std::size_t l = 0; l < kLanes; ++l) {
        wr[l] += pr[l];
        wi[l] += pi[l];
      }
    }
    for (std::uint64_t u = 0; u < span; ++u) {
      double* ru = r + u * kLanes;
      for (std::size_t l = 0; l < kLanes; ++l) ru[l] = (wr[l] * wr[l] + wi[l] * wi[l]) * inv;
      const std::size_t so = std::size_t{e[t0 + u]} * kLanes;
      const std::size_t si = std::size_t{e[t0 + u + lambda]} * kLanes;
      for (std::size_t l = 0; l < kLanes; ++l) {
        wr[l] += zre[si + l] - zre[so + l];
        wi[l] += zim[si + l] - zim[so + l];
      }
    }
    for (std::uint64_t u = 0; u < len; ++u) {
      alignas(64) double p[kLanes];
      const double* ru = r + u * kLanes;
      for (std::size_t l = 0; l < kLanes; ++l) p[l] = ru[l];
      for (std::uint32_t j = 1; j < h; ++j) {
        const double* rj = r + (u + j * lambda) * kLanes;
        for (std::size_t l = 0; l < kLanes; ++l) p[l] *= rj[l];
      }
      acc[u] += ((w[0] * p[0] + w[1] * p[1]) + (w[2] * p[2] + w[3] * p[3])) +
                ((w[4] * p[4] + w[5] * p[5]) + (w[6] * p[6] + w[7] * p[7]));
    }
  }
}

// |W[a]|^2 / lambda^2 for a window, over the half spectrum.
void window_power(const ShiftSchedule& sched, const RootTable& roots, const HalfSpectrum& hs,
                  std::uint64_t start, std::uint64_t lambda, std::vector<double>& out,
                  std::vector<double>& re, std::vector<double>& im) {
  const std::uint32_t n = sched.n_nodes();
  const std::size_t f = hs.freq.size();
  out.assign(f, 0.0);
  re.assign(f, 0.0);
  im.assign(f, 0.0);
  const auto counts = window_histogram(sched, start, lambda, Direction::forward);
  const bool flat = std::all_of(counts.begin(), counts.end(),
                                [&](std::uint64_t c) { return c == counts[0]; });
  if (flat) return;
  for (std::uint32_t s = 0; s < n; ++s) {
    if (!counts[s]) continue;
    const double c = static_cast<double>(counts[s]);
    std::uint32_t idx = 0;
    for (std::size_t i = 0; i < f; ++i) {
      if (hs.weight[i] == 0.0) break;
      idx += s;
      if (idx >= n) idx -= n;
      re[i] += c * roots.re(idx);
      im[i] += c * roots.im(idx);
    }
  }
  const double inv = 1.0 / (static_cast<double>(lambda) * static_cast<double>(lambda));
  for (std::size_t i = 0; i < f; ++i) out[i] = (re[i] * re[i] + im[i] * im[i]) * inv;
}

}  // namespace

std::vector<double> forward_norms_all_starts(const ShiftSchedule& sched, std::uint32_t h,
                                             std::uint64_t lambda, unsigned threads) {
  SprayConfig{h, lambda, Direction::forward, StartSet::all}.validate(sched.period());
  const std::uint64_t period = sched.period();
  const auto roots = RootTable::get(sched.n_nodes());
  const auto hs = half_spectrum(sched.n_nodes());
  std::vector<std::uint32_t> ext(period + h * lambda);
  for (std::uint64_t k = 0; k < ext.size(); ++k) ext[k] = sched.shift_at(k);

  const std::uint64_t tile = std::max<std::uint64_t>(65536, 4 * (h - 1) * lambda);
  const std::uint64_t n_tiles = (period + tile - 1) / tile;
  std::vector<double> norms(period);
  parallel_tasks(n_tiles, threads, [&](std::size_t i) {
    thread_local TileScratch sc;
    const std::uint64_t t0 = i * tile;
    const std::uint64_t len = std::min(tile, period - t0);
    tile_norms(ext, *roots, hs, h, lambda, t0, len, norms.data() + t0, sc);
    for (std::uint64_t u = 0; u < len; ++u) norms[t0 + u] = std::sqrt(norms[t0 + u]);
  });
  return norms;
}

std::vector<double> forward_norms_aligned(const ShiftSchedule& sched, std::uint32_t h,
                                          std::uint64_t lambda, unsigned threads) {
  SprayConfig{h, lambda, Direction::forward, StartSet::aligned}.validate(sched.period());
  const std::uint64_t block = h * lambda;
  const std::uint64_t n_starts = sched.period() / block;
  const auto roots = RootTable::get(sched.n_nodes());
  const auto hs = half_spectrum(sched.n_nodes());
  std::vector<double> norms(n_starts);
  parallel_tasks(n_starts, threads, [&](std::size_t b) {
    std::vector<double> prod(hs.freq.size(), 1.0), pw, re, im;
    for (std::uint32_t j = 0; j < h; ++j) {
      window_power(sched, *roots, hs, b * block + j * lambda, lambda, pw, re, im);
      for (std::size_t i = 0; i < prod.size(); ++i) prod[i] *= pw[i];
    }
    norms[b] = std::sqrt(pairwise_sum<double>(
        0, prod.size(), [&](std::size_t i) { return hs.weight[i] * prod[i]; }));
  });
  return norms;
}

CertSummary certify_stream(const ShiftSchedule& sched, double eps,
                           std::vector<std::uint32_t> h_list, const LambdaMap& lambda_map,
                           const RecordSink& sink, const CertOptions& options) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  std::sort(h_list.begin(), h_list.end());
  h_list.erase(std::unique(h_list.begin(), h_list.end()), h_list.end());
  const LambdaMap lambdas = resolve_lambdas(sched, eps, h_list, lambda_map);

  CertSummary summary;
  summary.digest = sched.digest();
  summary.eps = eps;
  const double n = sched.n_nodes();
  if (n >= 2) {
    const double upper = n * n / (8.0 * std::log2(n));
    if (static_cast<double>(sched.period()) > upper)
      summary.warnings.push_back("period " + std::to_string(sched.period()) +
                                 " exceeds N^2/(8 log2 N) = " + std::to_string(upper));
  }

  const double threshold = eps / 2.0;
  for (auto h : h_list) {
    const std::uint64_t lambda = lambdas.at(h);
    HCertSummary hs;
    hs.h = h;
    hs.lambda = lambda;
    hs.start_set = SprayConfig::natural_start_set(h, lambda, sched.period());
    const bool aligned = hs.start_set == StartSet::aligned;
    const std::vector<double> norms = aligned
                                          ? forward_norms_aligned(sched, h, lambda, options.threads)
                                          : forward_norms_all_starts(sched, h, lambda, options.threads);
    const std::uint64_t count = norms.size();
    const std::uint64_t step = aligned ? h * lambda : 1;
    hs.starts = count;
    double worst = -1.0;
    for (std::uint64_t i = 0; i < count; ++i) {
      CertRecord rec;
      rec.h = h;
      rec.lambda = lambda;
      rec.t = i * step;
      rec.norm_p = norms[i];
      // The backward vector at t is the conjugate of the forward vector h
      // phases later, so its norm is read off the forward table.
      rec.norm_q = aligned ? norms[(i + 1) % count] : norms[(i + h * lambda) % count];
      rec.pass = rec.norm_p <= threshold && rec.norm_q <= threshold;
      rec.marginal = std::abs(rec.norm_p - threshold) <= options.slack ||
                     std::abs(rec.norm_q - threshold) <= options.slack;
      if (!rec.pass) ++hs.failures;
      if (rec.marginal) ++hs.marginals;
      hs.max_norm_p = std::max(hs.max_norm_p, rec.norm_p);
      hs.max_norm_q = std::max(hs.max_norm_q, rec.norm_q);
      const double m = std::max(rec.norm_p, rec.norm_q);
      if (m > worst) {
        worst = m;
        hs.worst_t = rec.t;
      }
      if (sink) sink(rec);
    }
    if (hs.failures) summary.universal = false;
    summary.per_h.push_back(hs);
    if (!summary.universal && options.stop_on_failure) {
      summary.complete = h == h_list.back();
      break;
    }
  }
  return summary;
}

CertReport certify(const ShiftSchedule& sched, double eps, std::vector<std::uint32_t> h_list,
                   const LambdaMap& lambda_map, const CertOptions& options) {
  CertReport report;
  auto summary = certify_stream(
      sched, eps, h_list, lambda_map, [&](const CertRecord& r) { report.records.push_back(r); },
      options);
  report.digest = summary.digest;
  report.eps = eps;
  report.universal = summary.universal;
  report.warnings = std::move(summary.warnings);
  for (const auto& hs : summary.per_h) report.h_covered.push_back(hs.h);
  return report;
}

void write_report_header(std::ostream& out) { out << "h,lambda,t,norm_p,norm_q,pass,marginal\n"; }

void write_record_csv(std::ostream& out, const CertRecord& r) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "%u,%llu,%llu,%.17g,%.17g,%s,%s\n", r.h,
                static_cast<unsigned long long>(r.lambda), static_cast<unsigned long long>(r.t),
                r.norm_p, r.norm_q, r.pass ? "true" : "false", r.marginal ? "true" : "false");
  out << buf;
}

void write_report_footer(std::ostream& out, bool universal, double eps) {
  char buf[96];
  std::snprintf(buf, sizeof buf, "# universal=%s eps=%.17g\n", universal ? "true" : "false", eps);
  out << buf;
}

void write_report_csv(std::ostream& out, const CertReport& report) {
  write_report_header(out);
  for (const auto& r : report.records) write_record_csv(out, r);
  write_report_footer(out, report.universal, report.eps);
}

BaseCert certify_base(const ShiftSchedule& base, double eps, std::uint32_t big_h) {
  if (big_h == 0) throw std::invalid_argument("H must be >= 1");
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  const SprayConfig config{1, base.period(), Direction::forward, StartSet::aligned};
  const auto v = spray_fourier_star(base, config, 0);
  BaseCert out;
  out.norm = q_norm(v, 2.0 * big_h);
  out.threshold = std::pow(eps / 2.0, 1.0 / big_h);
  out.pass = out.norm <= out.threshold;
  return out;
}

double markov_test(const PermSchedule& sched, std::uint32_t h, std::uint64_t lambda,
                   std::uint64_t t) {
  const std::uint32_t n = sched.n_nodes();
  if (n > kMarkovMaxNodes)
    throw std::invalid_argument("markov test limited to N <= " + std::to_string(kMarkovMaxNodes));
  SprayConfig{h, lambda, Direction::forward, StartSet::all}.validate(sched.period());
  // Row i holds the distribution of the node reached from i.
  std::vector<double> cur(std::size_t{n} * n, 0.0), next(std::size_t{n} * n);
  for (std::uint32_t i = 0; i < n; ++i) cur[std::size_t{i} * n + i] = 1.0;
  for (std::uint32_t j = 0; j < h; ++j) {
    std::fill(next.begin(), next.end(), 0.0);
    for (std::uint64_t k = 0; k < lambda; ++k) {
      const auto& sigma = sched.perm_at(t + j * lambda + k);
      for (std::uint32_t i = 0; i < n; ++i) {
        const double* src = cur.data() + std::size_t{i} * n;
        double* dst = next.data() + std::size_t{i} * n;
        for (std::uint32_t c = 0; c < n; ++c) dst[sigma[c]] += src[c];
      }
    }
    const double l = static_cast<double>(lambda);
    for (auto& x : next) x /= l;
    std::swap(cur, next);
  }
  const double u = 1.0 / n;
  double worst = 0.0;
  for (std::uint32_t i = 0; i < n; ++i) {
    const double* row = cur.data() + std::size_t{i} * n;
    worst = std::max(worst, pairwise_sum<double>(0, n, [&](std::size_t c) {
                       return std::abs(row[c] - u);
                     }));
  }
  return worst;
}

}  // namespace orns
