#include <doctest.h>

#include <sstream>

#include "oracles.hpp"
#include "orns/certifier.hpp"
#include "orns/fourier.hpp"
#include "orns/generators.hpp"

using namespace orns;

namespace {

double oracle_norm(const ShiftSchedule& s, std::uint32_t h, std::uint64_t lambda, std::uint64_t first,
                   bool backward) {
  return oracle::starred_norm(
      oracle::dft(oracle::to_doubles(oracle::spray_enumerated(s, h, lambda, first, backward))));
}

bool close(double got, double want) { return std::abs(got - want) <= 1e-12 + 1e-10 * std::abs(want); }

}  // namespace

TEST_CASE("lambda_for_h") {
  CHECK(lambda_for_h(0.5, 1, 1024) == 1362783);
  CHECK(lambda_for_h(0.5, 2, 1024) == 11002);
  for (std::uint32_t h = 1; h <= 10; ++h) {
    std::uint64_t prev = ~std::uint64_t{0};
    for (double eps = 0.05; eps < 1.0; eps += 0.05) {
      const auto l = lambda_for_h(eps, h, 1024);
      CHECK(l <= prev);
      prev = l;
    }
  }
}

TEST_CASE("resolve_lambdas") {
  const auto s = gen_random(16, 100, 1);
  const auto m = resolve_lambdas(s, 0.5, {1, 2}, {{1, 50}, {2, 10}});
  CHECK(m.at(1) == 50);
  CHECK(m.at(2) == 10);
  try {
    resolve_lambdas(s, 0.5, {3}, {{3, 40}});
    FAIL("expected overrun");
  } catch (const std::invalid_argument& e) {
    CHECK(std::string(e.what()) == "lambda*h = 120 exceeds period 100 at h=3");
  }
  CHECK_THROWS(resolve_lambdas(s, 0.5, {1}, {}));
}

TEST_CASE("identity schedule fails with norm sqrt(N-1)") {
  const std::uint32_t n = 32;
  const ShiftSchedule s(n, std::vector<std::uint32_t>(64, 0));
  for (std::uint32_t h : {1u, 2u, 4u}) {
    const auto r = certify(s, 0.5, {h}, {{h, 64 / (2 * h)}});
    CHECK_FALSE(r.universal);
    for (const auto& rec : r.records) {
      CHECK(rec.norm_p == doctest::Approx(std::sqrt(n - 1.0)));
      CHECK(rec.norm_q == doctest::Approx(std::sqrt(n - 1.0)));
      CHECK_FALSE(rec.pass);
    }
  }
}

TEST_CASE("permutation schedule passes with zero norms") {
  const std::uint32_t n = 64;
  const ShiftSchedule s(n, random_permutation(n, 3));
  const auto r = certify(s, 0.5, {1}, {{1, n}});
  CHECK(r.universal);
  REQUIRE(r.records.size() == 1);
  CHECK(r.records[0].norm_p == 0.0);
  CHECK(r.records[0].norm_q == 0.0);
  CHECK(r.records[0].pass);
}

TEST_CASE("all-start kernel matches the direct transform") {
  for (std::uint32_t n : {2u, 7u, 16u, 31u}) {
    const auto s = gen_random(n, 23, n);
    for (std::uint32_t h : {1u, 2u, 3u}) {
      for (std::uint64_t lambda : {1u, 2u, 5u}) {
        if (h * lambda > s.period()) continue;
        const auto got = forward_norms_all_starts(s, h, lambda, 1);
        REQUIRE(got.size() == s.period());
        for (std::uint64_t t = 0; t < s.period(); ++t)
          CHECK(close(got[t], oracle_norm(s, h, lambda, t, false)));
      }
    }
  }
}

TEST_CASE("aligned kernel matches the direct transform") {
  const auto s = gen_random(12, 36, 4);
  for (std::uint32_t h : {1u, 2u, 3u}) {
    const std::uint64_t lambda = 36 / (3 * h);
    const auto got = forward_norms_aligned(s, h, lambda, 1);
    REQUIRE(got.size() == 36 / (h * lambda));
    for (std::size_t i = 0; i < got.size(); ++i)
      CHECK(close(got[i], oracle_norm(s, h, lambda, i * h * lambda, false)));
  }
}

TEST_CASE("backward norms read from the shifted forward table") {
  const auto s = gen_random(11, 30, 8);
  for (auto [h, lambda] : {std::pair<std::uint32_t, std::uint64_t>{2, 4}, {3, 2}, {2, 5}}) {
    const auto r = certify(s, 0.9, {h}, {{h, lambda}});
    for (const auto& rec : r.records) {
      const std::uint64_t back_first = rec.t + h * lambda;
      CHECK(close(rec.norm_q, oracle_norm(s, h, lambda, back_first, true)));
      CHECK(close(rec.norm_p, oracle_norm(s, h, lambda, rec.t, false)));
    }
  }
}

TEST_CASE("certification is independent of the thread count") {
  const auto s = gen_random(64, 70000, 12);
  const auto a = forward_norms_all_starts(s, 2, 300, 1);
  const auto b = forward_norms_all_starts(s, 2, 300, 3);
  CHECK(a == b);
  const auto c = forward_norms_aligned(s, 2, 350, 1);
  const auto d = forward_norms_aligned(s, 2, 350, 4);
  CHECK(c == d);
}

TEST_CASE("pass and marginal flags") {
  const auto s = gen_random(16, 400, 2);
  const auto base = certify(s, 0.5, {2}, {{2, 100}});
  REQUIRE_FALSE(base.records.empty());
  const double v = std::max(base.records[0].norm_p, base.records[0].norm_q);
  // A threshold exactly at the record's norm passes and is marginal.
  CertOptions opt;
  opt.slack = 1e-6;
  const auto at = certify(s, 2 * v, {2}, {{2, 100}}, opt);
  CHECK(at.records[0].pass);
  CHECK(at.records[0].marginal);
  const auto below = certify(s, 2 * v * (1 - 1e-9), {2}, {{2, 100}}, opt);
  CHECK_FALSE(below.records[0].pass);
  CHECK(below.records[0].marginal);
}

TEST_CASE("csv report") {
  const ShiftSchedule s(4, {0, 1, 2, 3});
  const auto r = certify(s, 0.5, {1}, {{1, 4}});
  std::ostringstream os;
  write_report_csv(os, r);
  CHECK(os.str() == "h,lambda,t,norm_p,norm_q,pass,marginal\n1,4,0,0,0,true,false\n# universal=true eps=0.5\n");
}

TEST_CASE("stream and collect agree") {
  const auto s = gen_random(10, 60, 6);
  std::vector<CertRecord> seen;
  const auto sum = certify_stream(s, 0.8, {3, 1, 3}, {{1, 20}, {3, 3}},
                                  [&](const CertRecord& r) { seen.push_back(r); });
  const auto rep = certify(s, 0.8, {1, 3}, {{1, 20}, {3, 3}});
  REQUIRE(seen.size() == rep.records.size());
  CHECK(sum.per_h.size() == 2);
  CHECK(sum.per_h[0].h == 1);
  CHECK(sum.per_h[0].start_set == StartSet::aligned);
  CHECK(sum.per_h[1].start_set == StartSet::all);
  CHECK(sum.universal == rep.universal);
  CHECK(rep.h_covered == std::vector<std::uint32_t>{1, 3});
}

TEST_CASE("base certification") {
  const std::uint32_t n = 32;
  const ShiftSchedule perm(n, random_permutation(n, 1));
  const auto p = certify_base(perm, 0.5, 4);
  CHECK(p.norm == 0.0);
  CHECK(p.pass);
  CHECK(p.threshold == doctest::Approx(std::pow(0.25, 0.25)));
  const ShiftSchedule constant(n, std::vector<std::uint32_t>(8, 5));
  const auto c = certify_base(constant, 0.5, 3);
  CHECK(c.norm == doctest::Approx(std::pow(n - 1.0, 1.0 / 6)));
  CHECK_FALSE(c.pass);
  // Random window: compare to the direct 2H-norm.
  const auto w = gen_random(16, 40, 9);
  std::vector<double> m(16, 0.0);
  for (auto v : w.shifts()) m[v] += 1.0 / 40;
  const auto f = oracle::dft(m);
  long double acc = 0;
  for (std::size_t j = 1; j < 16; ++j) acc += std::pow(std::abs(f[j]), 6.0L);
  CHECK(certify_base(w, 0.5, 3).norm == doctest::Approx(static_cast<double>(std::pow(acc, 1.0L / 6))));
}

TEST_CASE("markov test") {
  const std::uint32_t n = 8;
  std::vector<std::vector<std::uint32_t>> id(5, std::vector<std::uint32_t>{0, 1, 2, 3, 4, 5, 6, 7});
  const PermSchedule ident(n, id);
  CHECK(markov_test(ident, 2, 2, 0) == doctest::Approx(2.0 * (n - 1) / n));
  std::vector<std::uint32_t> all(n);
  for (std::uint32_t i = 0; i < n; ++i) all[i] = i;
  const auto phase = PermSchedule::from_shift(ShiftSchedule(n, all));
  CHECK(markov_test(phase, 1, n, 0) == 0.0);
  // Shift schedules: equal to the spray distribution's distance to uniform.
  const auto s = gen_random(n, 30, 4);
  const auto ps = PermSchedule::from_shift(s);
  for (std::uint64_t t : {0u, 5u, 29u}) {
    const SprayConfig cfg{3, 3, Direction::forward, StartSet::all};
    const double want = tv_to_uniform(spray_distribution(s, cfg, t));
    CHECK(markov_test(ps, 3, 3, t) == doctest::Approx(want).epsilon(1e-12));
  }
  // General permutations: dense oracle.
  std::vector<std::vector<std::uint32_t>> rows;
  for (int k = 0; k < 12; ++k) rows.push_back(random_permutation(n, 100 + k));
  const PermSchedule gp(n, rows);
  for (std::uint64_t t : {0u, 7u})
    CHECK(markov_test(gp, 2, 3, t) == doctest::Approx(oracle::markov_dense(gp, 2, 3, t)).epsilon(1e-12));
}
