#include <doctest.h>

#include <algorithm>
#include <set>

#include "oracles.hpp"
#include "orns/certifier.hpp"
#include "orns/discrepancy.hpp"
#include "orns/fourier.hpp"
#include "orns/generators.hpp"

using namespace orns;

namespace {

std::vector<std::uint32_t> shifts_of(const ShiftSchedule& s) { return {s.shifts().begin(), s.shifts().end()}; }

}  // namespace

TEST_CASE("random schedules are reproducible") {
  CHECK(gen_random(50, 1000, 7) == gen_random(50, 1000, 7));
  CHECK_FALSE(gen_random(50, 1000, 7) == gen_random(50, 1000, 8));
  // Block boundaries do not change the prefix.
  const auto a = gen_random(16, 70000, 3), b = gen_random(16, 140000, 3);
  CHECK(std::equal(a.shifts().begin(), a.shifts().end(), b.shifts().begin()));
}

TEST_CASE("random schedule residue frequencies") {
  const auto s = gen_random(16, 1000000, 11);
  std::vector<std::uint64_t> count(16, 0);
  for (auto v : s.shifts()) ++count[v];
  const double band = 3.0 * std::sqrt(15.0) / (16.0 * 1000.0);
  for (auto c : count) CHECK(std::abs(c / 1e6 - 1.0 / 16) <= band);
}

TEST_CASE("digits") {
  CHECK(to_digits(11, 3, 3) == std::vector<std::uint64_t>{2, 0, 1});
  CHECK(from_digits({2, 0, 1}, 3) == 11);
  for (std::uint64_t t = 0; t < 64; ++t) CHECK(from_digits(to_digits(t, 4, 3), 4) == t);
}

TEST_CASE("convolution schedule examples") {
  const auto z = gen_convolution(ShiftSchedule(5, {0}), 4);
  CHECK(shifts_of(z) == std::vector<std::uint32_t>{0});
  const auto a = gen_convolution(ShiftSchedule(7, {5}), 3);
  CHECK(shifts_of(a) == std::vector<std::uint32_t>{15 % 7});
  const auto c = gen_convolution(ShiftSchedule(8, {1, 2}), 2);
  CHECK(shifts_of(c) == std::vector<std::uint32_t>{2, 3, 3, 4});
  CHECK_THROWS(gen_convolution(ShiftSchedule(8, {1, 2}), 30, 1 << 20));
}

TEST_CASE("convolution schedule matches the digit sum") {
  const auto b1 = gen_random(11, 3, 1), b2 = gen_random(11, 3, 2), b3 = gen_random(11, 3, 3);
  const auto s = gen_convolution(std::vector<ShiftSchedule>{b1, b2, b3});
  REQUIRE(s.period() == 27);
  for (std::uint64_t t = 0; t < 27; ++t) {
    const auto d = to_digits(t, 3, 3);
    CHECK(s.shift_at(t) == (b1.shift_at(d[0]) + b2.shift_at(d[1]) + b3.shift_at(d[2])) % 11);
  }
}

TEST_CASE("convolution window law is the self-convolution of the base law") {
  const auto base = gen_random(13, 5, 4);
  const std::uint32_t big_h = 3;
  const auto s = gen_convolution(base, big_h);
  const auto full = dist_from_window(s, 0, s.period(), Direction::forward);
  const auto b = dist_from_window(base, 0, base.period(), Direction::forward);
  auto want = b;
  for (std::uint32_t j = 1; j < big_h; ++j) want = convolve(want, b);
  for (std::uint32_t k = 0; k < 13; ++k) CHECK(full[k] == doctest::Approx(want[k]).epsilon(1e-13));
  // Hoelder chain: the full-window 2-norm is at most the 2H-norm to the H.
  const double lhs = two_norm(fourier_of(full).star());
  const double rhs = std::pow(certify_base(base, 0.5, big_h).norm, big_h);
  CHECK(lhs <= rhs * (1 + 1e-12));
}

TEST_CASE("certified base sampling") {
  const std::uint32_t n = 32;
  const auto p = gen_base_certified(n, n, 4, 0.5, 1, 3, BaseSampling::permutation);
  CHECK(p.attempts == 1);
  CHECK(p.cert.norm == 0.0);
  CHECK(p.cert.pass);
  CHECK_THROWS_AS(gen_base_certified(n, 1, 2, 0.5, 1, 5), RetriesExhausted);
  CHECK_THROWS(gen_base_certified(n, 33, 2, 0.5, 1, 5, BaseSampling::permutation));
  const auto r1 = gen_base_certified(64, 512, 2, 0.5, 9, 20);
  const auto r2 = gen_base_certified(64, 512, 2, 0.5, 9, 20);
  CHECK(r1.base == r2.base);
  CHECK(r1.attempts == r2.attempts);
  CHECK(r1.cert.pass);
}

TEST_CASE("derandomized partition, N=2") {
  const auto r = gen_derand(1);
  auto s = shifts_of(r.schedule);
  std::sort(s.begin(), s.end());
  CHECK(s == std::vector<std::uint32_t>{0, 1});
}

TEST_CASE("derandomized partition, N=256") {
  const auto r = gen_derand(8);
  const auto& tr = r.tree;
  CHECK(tr.n_nodes == 256);
  CHECK(tr.depth == 8);
  CHECK(tr.rows == 128);
  CHECK(tr.k_impl == kDiscK);
  CHECK(gen_derand(8).schedule == r.schedule);
  std::vector<std::uint32_t> sorted = shifts_of(r.schedule);
  std::sort(sorted.begin(), sorted.end());
  for (std::uint32_t i = 0; i < 256; ++i) CHECK(sorted[i] == i);
  CHECK(tr.leaf_order == shifts_of(r.schedule));
  // Level 0 is the whole group: its starred sum vanishes.
  CHECK(tr.level_max[0] < 1e-9);
  for (std::uint32_t l = 1; l <= tr.depth; ++l) {
    CHECK(tr.blocks[l].size() == (std::size_t{1} << l));
    CHECK(tr.level_max[l] <= tr.recursion_bound[l] + 1e-9);
    CHECK(tr.level_max[l] <= tr.level_bound(l) + 1e-9);
    CHECK(tr.recursion_bound[l] <= tr.level_bound(l) + 1e-9);
    // Blocks partition the parent blocks into halves.
    for (std::size_t b = 0; b < tr.blocks[l].size(); ++b) {
      const auto& blk = tr.blocks[l][b];
      CHECK(blk.size() == (256u >> l));
      const auto& parent = tr.blocks[l - 1][b / 2];
      for (auto v : blk) CHECK(std::find(parent.begin(), parent.end(), v) != parent.end());
      // Recorded block norm against the direct sum.
      double worst = 0;
      for (std::uint32_t j = 1; j < 256; ++j) {
        std::complex<double> acc = 0;
        for (auto v : blk) acc += oracle::root(256, std::uint64_t{j} * v);
        worst = std::max(worst, std::abs(acc));
      }
      CHECK(tr.block_norms[l][b] == doctest::Approx(worst).epsilon(1e-9).scale(1.0));
    }
  }
  // Singleton leaves have modulus-one sums.
  CHECK(tr.level_max[8] == doctest::Approx(1.0));
}

TEST_CASE("derand constant") {
  const double c = derand_constant(1024);
  CHECK(c == doctest::Approx(2 * kDiscK * std::sqrt(std::log(4.0 * 1025)) / (std::sqrt(2.0) - 1)));
  CHECK(gen_derand(6).tree.const_c == doctest::Approx(derand_constant(64)));
}

TEST_CASE("derand phase lengths") {
  CHECK(lambda_for_h_derand(0.5, 1, 1024, 5.0) == 1024);
  CHECK(lambda_for_h_derand(0.5, 2, 1u << 20, 1.0) == (1u << 17));
  for (std::uint32_t h = 2; h <= 6; ++h) {
    std::uint64_t prev = ~std::uint64_t{0};
    for (double eps = 0.1; eps < 1.0; eps += 0.1) {
      try {
        const auto l = lambda_for_h_derand(eps, h, 1u << 20, 1.0);
        CHECK(l <= prev);
        CHECK((l & (l - 1)) == 0);
        prev = l;
      } catch (const std::invalid_argument&) {
      }
    }
  }
  CHECK_THROWS_AS(lambda_for_h_derand(0.5, 2, 64, 28.0), std::invalid_argument);
}

TEST_CASE("primitive root schedule") {
  CHECK(is_prime(2));
  CHECK(is_prime(1009));
  CHECK_FALSE(is_prime(1));
  CHECK_FALSE(is_prime(1001));
  CHECK(least_primitive_root(7) == 3);
  CHECK(least_primitive_root(23) == 5);
  CHECK(shifts_of(gen_primitive_root(7)) == std::vector<std::uint32_t>{1, 3, 2, 6, 4, 5});
  CHECK(shifts_of(gen_primitive_root(2)) == std::vector<std::uint32_t>{1});
  const auto s = gen_primitive_root(101);
  CHECK(s.period() == 100);
  std::set<std::uint32_t> seen(s.shifts().begin(), s.shifts().end());
  CHECK(seen.size() == 100);
  CHECK(seen.count(0) == 0);
  CHECK_THROWS(gen_primitive_root(12));
}
