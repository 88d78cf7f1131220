#include <doctest.h>

#include "oracles.hpp"
#include "orns/fourier.hpp"
#include "orns/generators.hpp"

using namespace orns;

namespace {

std::vector<double> mass_of(const GroupDistribution& d) { return {d.mass().begin(), d.mass().end()}; }

}  // namespace

TEST_CASE("root table") {
  const auto r = RootTable::get(8);
  CHECK(r->re(0) == 1.0);
  CHECK(r->im(2) == 1.0);
  CHECK(r->re(2) == 0.0);
  CHECK(r->re(4) == -1.0);
  CHECK(r->im(4) == 0.0);
  CHECK(std::abs(r->power(3, 5) - oracle::root(8, 15)) < 1e-15);
  CHECK(RootTable::get(8) == r);
}

TEST_CASE("window distributions") {
  const ShiftSchedule s(4, {1, 3});
  auto f = dist_from_window(s, 0, 2, Direction::forward);
  CHECK(f[1] == 0.5);
  CHECK(f[3] == 0.5);
  auto b = dist_from_window(s, 0, 2, Direction::backward);
  CHECK(b[3] == 0.5);
  CHECK(b[1] == 0.5);
  const ShiftSchedule c(4, {2, 2, 2});
  CHECK(dist_from_window(c, 0, 3, Direction::forward)[2] == 1.0);
  // Windows wrap around the period.
  const ShiftSchedule w(5, {0, 1, 2});
  const auto hist = window_histogram(w, 2, 3, Direction::forward);
  CHECK(hist == std::vector<std::uint64_t>{1, 1, 1, 0, 0});
  const auto hb = window_histogram(w, 2, 2, Direction::backward);
  CHECK(hb == std::vector<std::uint64_t>{1, 0, 0, 1, 0});
}

TEST_CASE("fourier_of basic cases") {
  const auto p0 = fourier_of(GroupDistribution::point_mass(6, 0));
  for (auto v : p0.values) CHECK(std::abs(v - std::complex<double>(1, 0)) < 1e-15);
  const auto u = fourier_of(GroupDistribution::uniform(6));
  CHECK(std::abs(u.values[0] - std::complex<double>(1, 0)) < 1e-15);
  for (std::size_t j = 1; j < 6; ++j) CHECK(u.values[j] == std::complex<double>(0, 0));
  const auto pa = fourier_of(GroupDistribution::point_mass(7, 3));
  for (std::size_t j = 0; j < 7; ++j) {
    CHECK(std::abs(pa.values[j] - oracle::root(7, 3 * j)) < 1e-14);
    CHECK(std::abs(std::abs(pa.values[j]) - 1.0) < 1e-14);
  }
  const auto star = pa.star();
  CHECK(star.starred);
  CHECK(star.values[0] == std::complex<double>(0, 0));
  CHECK(two_norm(star) == doctest::Approx(std::sqrt(6.0)));
}

TEST_CASE("fourier_of matches the direct sum") {
  orns::CounterRng rng(11, 0);
  for (std::uint32_t n : {1u, 2u, 5u, 16u, 33u}) {
    const auto m = oracle::random_distribution(n, rng);
    const auto got = fourier_of(GroupDistribution(m)).values;
    const auto want = oracle::dft(m);
    for (std::uint32_t j = 0; j < n; ++j) CHECK(std::abs(got[j] - want[j]) < 1e-13);
  }
}

TEST_CASE("evaluate_at_roots") {
  std::vector<std::complex<double>> f{{1, 2}, {0, -1}, {3, 0}, {0.5, 0.5}, {-2, 1}};
  const auto got = evaluate_at_roots(f);
  for (std::size_t j = 0; j < f.size(); ++j) {
    std::complex<double> want = 0;
    for (std::size_t k = 0; k < f.size(); ++k) want += f[k] * oracle::root(f.size(), j * k);
    CHECK(std::abs(got[j] - want) < 1e-13);
  }
}

TEST_CASE("spray vector of a permutation phase is zero") {
  const std::uint32_t n = 16;
  const auto p = random_permutation(n, 5);
  const ShiftSchedule s(n, p);
  const SprayConfig cfg{1, n, Direction::forward, StartSet::aligned};
  const auto v = spray_fourier_star(s, cfg, 0);
  for (auto x : v.values) CHECK(x == std::complex<double>(0, 0));
  CHECK(two_norm(v) == 0.0);
}

TEST_CASE("spray vector for two phases") {
  const ShiftSchedule s(4, {0, 1, 0, 2});
  const SprayConfig cfg{2, 2, Direction::forward, StartSet::all};
  const auto v = spray_fourier_star(s, cfg, 0);
  const auto a = oracle::dft({0.5, 0.5, 0, 0});
  const auto b = oracle::dft({0.5, 0, 0.5, 0});
  CHECK(v.values[0] == std::complex<double>(0, 0));
  for (std::size_t j = 1; j < 4; ++j) CHECK(std::abs(v.values[j] - a[j] * b[j]) < 1e-15);
}

TEST_CASE("unstarred product has index 0 equal to 1") {
  const auto s = gen_random(12, 40, 3);
  const SprayConfig cfg{3, 5, Direction::forward, StartSet::all};
  for (std::uint64_t t = 0; t < 40; t += 7) {
    const auto d = spray_distribution(s, cfg, t);
    CHECK(fourier_of(d).values[0].real() == doctest::Approx(1.0).epsilon(1e-14));
  }
}

TEST_CASE("spray distribution matches enumeration") {
  const auto s = gen_random(7, 19, 9);
  for (std::uint32_t h : {1u, 2u, 3u})
    for (std::uint64_t lambda : {1u, 2u, 3u})
      for (auto dir : {Direction::forward, Direction::backward})
        for (std::uint64_t t : {0u, 4u, 17u}) {
          const SprayConfig cfg{h, lambda, dir, StartSet::all};
          const auto got = mass_of(spray_distribution(s, cfg, t));
          const auto first = phase_start(cfg, t, 1);
          const auto want = oracle::to_doubles(
              oracle::spray_enumerated(s, h, lambda, first, dir == Direction::backward));
          for (std::size_t k = 0; k < got.size(); ++k) CHECK(got[k] == doctest::Approx(want[k]).epsilon(1e-14));
          // The Fourier path agrees with the direct transform of the law.
          const auto fv = spray_fourier_star(s, cfg, t);
          const auto direct = oracle::dft(want);
          for (std::size_t j = 1; j < direct.size(); ++j) CHECK(std::abs(fv.values[j] - direct[j]) < 1e-13);
        }
}

TEST_CASE("phase starts") {
  SprayConfig cfg{3, 4, Direction::forward, StartSet::all};
  CHECK(phase_start(cfg, 10, 1) == 10);
  CHECK(phase_start(cfg, 10, 3) == 18);
  cfg.direction = Direction::backward;
  CHECK(phase_start(cfg, 10, 1) == 22);
  CHECK(phase_start(cfg, 10, 3) == 30);
}

TEST_CASE("convolution") {
  const auto a = GroupDistribution::point_mass(9, 4);
  const auto b = GroupDistribution::point_mass(9, 7);
  CHECK(convolve(a, b)[2] == 1.0);
  const GroupDistribution w({0, 0.5, 0, 0.5});
  const auto c = convolve(w, w);
  CHECK(c[2] == doctest::Approx(0.5));
  CHECK(c[0] == doctest::Approx(0.5));
  CHECK(c[1] == 0.0);
  const ShiftSchedule s(4, {1, 3});
  const SprayConfig one{1, 2, Direction::forward, StartSet::all};
  CHECK(mass_of(spray_distribution(s, one, 0)) == mass_of(dist_from_window(s, 0, 2, Direction::forward)));
}

TEST_CASE("norms") {
  FourierVector z{std::vector<std::complex<double>>(5), true};
  CHECK(two_norm(z) == 0.0);
  CHECK(q_norm(z, 8) == 0.0);
  const auto e1 = fourier_of(GroupDistribution::uniform(5));
  CHECK(q_norm(e1, 2) == 1.0);
  CHECK(q_norm(e1, 8) == 1.0);
  CHECK(two_norm(e1) == 1.0);
  FourierVector c{{0, {0.3, 0}, {0, 0.3}, {-0.3, 0}, {0, -0.3}}, true};
  CHECK(q_norm(c, 6) == doctest::Approx(0.3 * std::pow(4.0, 1.0 / 6)));
  CHECK(two_norm(c) == doctest::Approx(0.6));
  // Tiny magnitudes do not underflow.
  FourierVector tiny{{0, {1e-200, 0}, {1e-200, 0}}, true};
  CHECK(q_norm(tiny, 8) == doctest::Approx(1e-200 * std::pow(2.0, 1.0 / 8)));
}

TEST_CASE("total variation to uniform") {
  CHECK(tv_to_uniform(GroupDistribution::uniform(8)) == doctest::Approx(0).epsilon(1e-15));
  CHECK(tv_to_uniform(GroupDistribution::point_mass(4, 1)) == doctest::Approx(1.5));
}

TEST_CASE("sliding window spectrum tracks direct sums") {
  const auto s = gen_random(13, 50, 21);
  for (auto dir : {Direction::forward, Direction::backward}) {
    SlidingWindowSpectrum w(s, 7, dir, 6);
    w.reset(45);
    for (int step = 0; step < 60; ++step) {
      const std::uint64_t start = 45 + step;
      for (std::uint32_t a = 0; a <= 6; ++a) {
        std::complex<double> want = 0;
        for (std::uint64_t k = 0; k < 7; ++k)
          want += oracle::root(13, a * oracle::step(s, start + k, dir == Direction::backward));
        CHECK(std::abs(w.sum(a) - want) < 1e-12);
        CHECK(std::abs(w.coeff(a) - want / 7.0) < 1e-12);
      }
      w.slide();
    }
  }
}

TEST_CASE("convolution theorem and Parseval") {
  orns::CounterRng rng(77, 1);
  for (std::uint32_t n : {16u, 64u}) {
    for (int rep = 0; rep < 5; ++rep) {
      const auto x = oracle::random_distribution(n, rng);
      const auto y = oracle::random_distribution(n, rng);
      const auto px = fourier_of(GroupDistribution(x)).values;
      const auto py = fourier_of(GroupDistribution(y)).values;
      const auto pxy = fourier_of(convolve(GroupDistribution(x), GroupDistribution(y))).values;
      const auto naive = oracle::cyclic_convolve(x, y);
      const auto conv = convolve(GroupDistribution(x), GroupDistribution(y));
      double energy = 0, mass2 = 0;
      for (std::uint32_t j = 0; j < n; ++j) {
        CHECK(std::abs(pxy[j] - px[j] * py[j]) < 1e-12);
        CHECK(conv[j] == doctest::Approx(naive[j]).epsilon(1e-13));
        energy += std::norm(px[j]);
        mass2 += x[j] * x[j];
      }
      CHECK(energy == doctest::Approx(n * mass2).epsilon(1e-12));
    }
  }
}

TEST_CASE("tv is bounded by the starred 2-norm") {
  orns::CounterRng rng(5, 5);
  for (int rep = 0; rep < 50; ++rep) {
    const auto m = oracle::random_distribution(8 + rep % 9, rng);
    const GroupDistribution d(m);
    CHECK(tv_to_uniform(d) <= two_norm(fourier_of(d).star()) + 1e-15);
  }
}
