#include "orns/generators.hpp"

#include <cmath>
#include <complex>
#include <functional>

#include "orns/discrepancy.hpp"
#include "orns/fourier.hpp"
#include "orns/rng.hpp"

namespace orns {

namespace {
constexpr std::uint64_t kRandomBlock = 1u << 16;
}

ShiftSchedule gen_random(std::uint32_t n_nodes, std::uint64_t period, std::uint64_t seed) {
  if (n_nodes == 0) throw std::invalid_argument("N must be positive");
  if (period == 0) throw std::invalid_argument("period must be positive");
  std::vector<std::uint32_t> shifts(period);
  // One stream per fixed-size block keeps the output independent of how the
  // blocks are scheduled.
  for (std::uint64_t b = 0; b * kRandomBlock < period; ++b) {
    CounterRng rng(seed, b);
    const std::uint64_t end = std::min(period, (b + 1) * kRandomBlock);
    for (std::uint64_t k = b * kRandomBlock; k < end; ++k)
      shifts[k] = static_cast<std::uint32_t>(rng.below(n_nodes));
  }
  return ShiftSchedule(n_nodes, std::move(shifts));
}

BaseResult gen_base_certified(std::uint32_t n_nodes, std::uint64_t lambda, std::uint32_t big_h,
                              double eps, std::uint64_t seed, std::uint32_t max_retries,
                              BaseSampling sampling) {
  if (max_retries == 0) throw std::invalid_argument("max_retries must be >= 1");
  if (lambda == 0) throw std::invalid_argument("lambda must be >= 1");
  if (sampling == BaseSampling::permutation && lambda % n_nodes != 0)
    throw std::invalid_argument("permutation sampling needs lambda to be a multiple of N");
  BaseCert last;
  for (std::uint32_t attempt = 0; attempt < max_retries; ++attempt) {
    CounterRng rng(seed, attempt);
    std::vector<std::uint32_t> shifts;
    shifts.reserve(lambda);
    if (sampling == BaseSampling::uniform) {
      for (std::uint64_t k = 0; k < lambda; ++k)
        shifts.push_back(static_cast<std::uint32_t>(rng.below(n_nodes)));
    } else {
      while (shifts.size() < lambda) {
        const auto p = random_permutation(n_nodes, rng);
        shifts.insert(shifts.end(), p.begin(), p.end());
      }
    }
    ShiftSchedule base(n_nodes, std::move(shifts));
    last = certify_base(base, eps, big_h);
    if (last.pass) return BaseResult{std::move(base), last, attempt + 1};
  }
  throw RetriesExhausted("no base window passed in " + std::to_string(max_retries) +
                         " attempts (last norm " + std::to_string(last.norm) + " > " +
                         std::to_string(last.threshold) + "); lambda is likely too small");
}

std::vector<std::uint64_t> to_digits(std::uint64_t t, std::uint64_t lambda, std::uint32_t big_h) {
  std::vector<std::uint64_t> d(big_h);
  for (std::uint32_t j = 0; j < big_h; ++j) {
    d[j] = t % lambda;
    t /= lambda;
  }
  return d;
}

std::uint64_t from_digits(const std::vector<std::uint64_t>& digits, std::uint64_t lambda) {
  std::uint64_t t = 0;
  for (std::size_t j = digits.size(); j-- > 0;) t = t * lambda + digits[j];
  return t;
}

ShiftSchedule gen_convolution(const std::vector<ShiftSchedule>& bases, std::uint64_t period_cap) {
  if (bases.empty()) throw std::invalid_argument("need at least one base");
  const std::uint32_t n = bases.front().n_nodes();
  const std::uint64_t lambda = bases.front().period();
  std::uint64_t period = 1;
  for (const auto& b : bases) {
    if (b.n_nodes() != n || b.period() != lambda)
      throw std::invalid_argument("bases must share N and length");
    if (period > period_cap / lambda)
      throw std::invalid_argument("lambda^H exceeds the period cap " + std::to_string(period_cap));
    period *= lambda;
  }
  // Digit j contributes bases[j][t_j]; extend one digit at a time.
  std::vector<std::uint32_t> shifts{0};
  shifts.reserve(period);
  std::uint64_t block = 1;
  for (const auto& b : bases) {
    shifts.resize(block * lambda);
    for (std::uint64_t d = lambda; d-- > 0;) {
      const std::uint32_t add = b.shifts()[d];
      for (std::uint64_t t = 0; t < block; ++t) {
        const std::uint64_t v = std::uint64_t{shifts[t]} + add;
        shifts[d * block + t] = static_cast<std::uint32_t>(v >= n ? v - n : v);
      }
    }
    block *= lambda;
  }
  return ShiftSchedule(n, std::move(shifts));
}

ShiftSchedule gen_convolution(const ShiftSchedule& base, std::uint32_t big_h,
                              std::uint64_t period_cap) {
  if (big_h == 0) throw std::invalid_argument("H must be >= 1");
  return gen_convolution(std::vector<ShiftSchedule>(big_h, base), period_cap);
}

// ---------------------------------------------------------------------------

double PartitionTree::level_bound(std::uint32_t level) const {
  return const_c * std::pow(2.0, -0.5 * level) *
         std::sqrt(static_cast<double>(n_nodes) * static_cast<double>(level));
}

double derand_constant(std::uint32_t n_nodes) {
  const std::size_t m = std::max<std::uint32_t>(1, n_nodes / 2);
  const double l = std::log(4.0 * (2.0 * m + 1.0));
  return 2.0 * kDiscK * std::sqrt(l) / (std::sqrt(2.0) - 1.0);
}

namespace {

struct LevelTables {
  double lambda = 0.0;
  double ch_one = 0.0, sh_one = 0.0;
  std::vector<double> ch_re, sh_re, ch_im, sh_im;
};

class DerandBuilder {
 public:
  DerandBuilder(std::uint32_t log2_n, PartitionTree& tree)
      : n_(1u << log2_n), m_(n_ / 2), roots_(RootTable::get(n_)), tree_(tree) {
    tree_.depth = log2_n;
    tree_.n_nodes = n_;
    tree_.rows = m_;
    tree_.k_impl = kDiscK;
    tree_.const_c = derand_constant(n_);
    tree_.blocks.resize(log2_n + 1);
    tree_.block_norms.resize(log2_n + 1);
    tree_.level_max.assign(log2_n + 1, 0.0);
    tree_.split_disc_max.assign(log2_n, 0.0);
    tree_.backend_lambda.assign(log2_n, 0.0);
    tables_.resize(log2_n);
  }

  void run() {
    std::vector<std::uint32_t> all(n_);
    for (std::uint32_t s = 0; s < n_; ++s) all[s] = s;
    // W* 1 vanishes at every nonzero frequency.
    std::vector<std::complex<double>> v(m_, 0.0);
    visit(std::move(all), std::move(v), 0, 0.0);

    tree_.recursion_bound.assign(tree_.depth + 1, 0.0);
    for (std::uint32_t l = 1; l <= tree_.depth; ++l) {
      const std::size_t parent = n_ >> (l - 1);
      tree_.recursion_bound[l] =
          0.5 * tree_.recursion_bound[l - 1] + 0.5 * balanced_disc_bound(parent, m_);
    }
  }

 private:
  const LevelTables& tables(std::uint32_t level, std::size_t block_size) {
    auto& t = tables_[level];
    if (t.ch_re.empty()) {
      const std::size_t rows = 2 * m_ + 1;
      t.lambda = std::sqrt(2.0 * std::log(2.0 * rows) / static_cast<double>(block_size));
      t.ch_one = std::cosh(t.lambda);
      t.sh_one = std::sinh(t.lambda);
      t.ch_re.resize(n_);
      t.sh_re.resize(n_);
      t.ch_im.resize(n_);
      t.sh_im.resize(n_);
      for (std::uint32_t k = 0; k < n_; ++k) {
        t.ch_re[k] = std::cosh(t.lambda * roots_->re(k));
        t.sh_re[k] = std::sinh(t.lambda * roots_->re(k));
        t.ch_im[k] = std::cosh(t.lambda * roots_->im(k));
        t.sh_im[k] = std::sinh(t.lambda * roots_->im(k));
      }
      tree_.backend_lambda[level] = t.lambda;
    }
    return t;
  }

  void visit(std::vector<std::uint32_t> block, std::vector<std::complex<double>> v,
             std::uint32_t level, double norm) {
    tree_.blocks[level].push_back(block);
    tree_.block_norms[level].push_back(norm);
    tree_.level_max[level] = std::max(tree_.level_max[level], norm);
    if (block.size() == 1) {
      tree_.leaf_order.push_back(block[0]);
      return;
    }

    const LevelTables& tab = tables(level, block.size());
    const std::size_t rows = 2 * m_ + 1;
    auto column = [&](std::size_t i, double lambda, double* a, double* ch, double* sh) {
      if (lambda != tab.lambda) throw std::logic_error("backend lambda mismatch");
      const std::uint32_t s = block[i];
      a[0] = 1.0;
      ch[0] = tab.ch_one;
      sh[0] = tab.sh_one;
      std::uint32_t idx = 0;
      for (std::uint32_t j = 1; j <= m_; ++j) {
        idx += s;
        if (idx >= n_) idx -= n_;
        a[2 * j - 1] = roots_->re(idx);
        ch[2 * j - 1] = tab.ch_re[idx];
        sh[2 * j - 1] = tab.sh_re[idx];
        a[2 * j] = roots_->im(idx);
        ch[2 * j] = tab.ch_im[idx];
        sh[2 * j] = tab.sh_im[idx];
      }
    };
    const SignVector x = sign_partition(rows, block.size(), column, true);
    if (x.balance != 0) throw std::logic_error("unbalanced split");

    std::vector<std::uint32_t> minus, plus;
    minus.reserve(block.size() / 2);
    plus.reserve(block.size() / 2);
    for (std::size_t i = 0; i < block.size(); ++i) (x.x[i] < 0 ? minus : plus).push_back(block[i]);

    std::vector<std::complex<double>> vm(m_), vp(m_);
    double split = 0.0, nm = 0.0, np = 0.0;
    for (std::uint32_t j = 1; j <= m_; ++j) {
      const std::complex<double> wx(x.row_sums[2 * j - 1], x.row_sums[2 * j]);
      split = std::max(split, std::abs(wx));
      vm[j - 1] = 0.5 * (v[j - 1] - wx);
      vp[j - 1] = 0.5 * (v[j - 1] + wx);
      nm = std::max(nm, std::abs(vm[j - 1]));
      np = std::max(np, std::abs(vp[j - 1]));
    }
    const double bound = balanced_disc_bound(block.size(), m_);
    if (split > bound)
      throw std::logic_error("coloring exceeded its guarantee at level " + std::to_string(level));
    tree_.split_disc_max[level] = std::max(tree_.split_disc_max[level], split);

    block.clear();
    block.shrink_to_fit();
    v.clear();
    v.shrink_to_fit();
    visit(std::move(minus), std::move(vm), level + 1, nm);
    visit(std::move(plus), std::move(vp), level + 1, np);
  }

  std::uint32_t n_, m_;
  std::shared_ptr<const RootTable> roots_;
  PartitionTree& tree_;
  std::vector<LevelTables> tables_;
};

}  // namespace

DerandResult gen_derand(std::uint32_t log2_n) {
  if (log2_n > 24) throw std::invalid_argument("log2 N must be <= 24");
  PartitionTree tree;
  if (log2_n == 0) {
    tree.n_nodes = 1;
    tree.blocks = {{{0}}};
    tree.block_norms = {{0.0}};
    tree.level_max = {0.0};
    tree.recursion_bound = {0.0};
    tree.leaf_order = {0};
    tree.k_impl = kDiscK;
    tree.const_c = derand_constant(1);
    return DerandResult{ShiftSchedule(1, {0}), std::move(tree)};
  }
  DerandBuilder(log2_n, tree).run();
  ShiftSchedule sched(1u << log2_n, tree.leaf_order);
  return DerandResult{std::move(sched), std::move(tree)};
}

std::uint64_t lambda_for_h_derand(double eps, std::uint32_t h, std::uint32_t n_nodes,
                                  double const_c) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("eps must lie in (0, 1)");
  if (h == 0) throw std::invalid_argument("h must be >= 1");
  if (n_nodes < 2 || (n_nodes & (n_nodes - 1)) != 0)
    throw std::invalid_argument("N must be a power of two >= 2");
  if (h == 1) return n_nodes;
  const long double n = n_nodes;
  const long double target = static_cast<long double>(const_c) * const_c *
                             std::pow(4.0L * n, 1.0L / h) *
                             std::pow(static_cast<long double>(eps), -2.0L / h) * std::log2(n);
  std::uint64_t lambda = 1;
  while (static_cast<long double>(lambda) < target) lambda <<= 1;
  if (lambda * h > n_nodes)
    throw std::invalid_argument("lambda*h = " + std::to_string(lambda * h) + " exceeds N = " +
                                std::to_string(n_nodes) + " at h=" + std::to_string(h));
  return lambda;
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t d = 2; d * d <= n; ++d)
    if (n % d == 0) return false;
  return true;
}

std::uint32_t least_primitive_root(std::uint32_t p) {
  if (!is_prime(p)) throw std::invalid_argument("N must be prime");
  if (p == 2) return 1;
  std::vector<std::uint64_t> factors;
  std::uint64_t r = p - 1;
  for (std::uint64_t d = 2; d * d <= r; ++d)
    if (r % d == 0) {
      factors.push_back(d);
      while (r % d == 0) r /= d;
    }
  if (r > 1) factors.push_back(r);
  auto pow_mod = [p](std::uint64_t b, std::uint64_t e) {
    std::uint64_t acc = 1;
    b %= p;
    while (e) {
      if (e & 1) acc = acc * b % p;
      b = b * b % p;
      e >>= 1;
    }
    return acc;
  };
  for (std::uint32_t g = 2; g < p; ++g) {
    bool ok = true;
    for (auto f : factors)
      if (pow_mod(g, (p - 1) / f) == 1) {
        ok = false;
        break;
      }
    if (ok) return g;
  }
  throw std::logic_error("no primitive root found");
}

ShiftSchedule gen_primitive_root(std::uint32_t n_nodes) {
  const std::uint32_t g = least_primitive_root(n_nodes);
  if (n_nodes == 2) return ShiftSchedule(2, {1});
  std::vector<std::uint32_t> shifts(n_nodes - 1);
  std::uint64_t v = 1;
  for (auto& s : shifts) {
    s = static_cast<std::uint32_t>(v);
    v = v * g % n_nodes;
  }
  return ShiftSchedule(n_nodes, std::move(shifts));
}

}  // namespace orns
