#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zoll/circle.hpp"

using namespace zoll;

namespace {

std::int64_t brute_divisor_count(std::int64_t k, std::int64_t b, std::int64_t N) {
  std::int64_t c = 0;
  for (std::int64_t n1 = 1; n1 <= N; ++n1)
    for (std::int64_t n2 = 1; n2 <= N; ++n2) c += n1 * (n2 + b) == k ? 1 : 0;
  return c;
}

WindowedSum constant_windowed(std::int64_t b, std::int64_t N) {
  WindowSequence w(b, N);
  return WindowedSum(w, std::vector<cplx>(w.size(), 1.0 / std::sqrt(static_cast<double>(w.size()))));
}

}  // namespace

TEST(Divisors, Examples) {
  EXPECT_EQ(divisor_count(12, 0, 12), 6);
  EXPECT_EQ(divisor_count(1, 0, 1), 1);
  EXPECT_LE(divisor_count(12, 100, 12), 1);
  EXPECT_EQ(divisor_count(12, 100, 12), brute_divisor_count(12, 100, 12));
}

TEST(Divisors, MatchesBruteForce) {
  for (std::int64_t k = 1; k <= 600; ++k) {
    for (std::int64_t b : {0, 1, 3, 17}) {
      for (std::int64_t N : {1, 5, 24}) {
        ASSERT_EQ(divisor_count(k, b, N), brute_divisor_count(k, b, N)) << k << " " << b << " " << N;
      }
    }
    EXPECT_LE(divisor_count(k, 0, 30), divisor_function(k));
    EXPECT_EQ(divisor_count(k, 0, k), divisor_function(k));
  }
  EXPECT_EQ(divisor_function(360), 24);
}

TEST(Window, Shape) {
  for (std::int64_t N : {1, 4, 16}) {
    WindowSequence w(10, N);
    EXPECT_EQ(w(9 - N), 0.0);
    EXPECT_EQ(w(11 + 2 * N), 0.0);
    for (std::int64_t n = 10; n <= 10 + N; ++n) EXPECT_EQ(w(n), 1.0);
    for (std::int64_t n = w.first() - 3; n <= w.last() + 3; ++n) {
      EXPECT_GE(w(n), 0.0);
      EXPECT_LE(w(n), 1.0);
    }
    EXPECT_LE(w.max_step(), 1.0 / N + 1e-15);
    EXPECT_NEAR(w.difference_variation(), 4.0 / N, 1e-12);
    EXPECT_NEAR(w.sum(), 2.0 * N, 1e-12);
  }
}

TEST(Weyl, Examples) {
  WindowSequence w(0, 16);
  const cplx f0 = weyl_window_sum(w, 0.0);
  EXPECT_NEAR(f0.imag(), 0.0, 1e-12);
  EXPECT_GE(f0.real(), 16.0);
  EXPECT_LE(f0.real(), 48.0);
  cplx brute{};
  for (std::int64_t n = -16; n <= 32; ++n) brute += w(n) * std::exp(cplx(0, 2 * kPi * 0.5 * n * n));
  EXPECT_NEAR(std::abs(weyl_window_sum(w, 0.5) - brute), 0.0, 1e-11);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 100; ++i) EXPECT_LE(std::abs(weyl_window_sum(w, u(rng))), w.sum() + 1e-12);
}

TEST(Weyl, GridMatchesPointwise) {
  WindowSequence w(5, 12);
  const std::int64_t G = 997;
  const auto g = weyl_grid(w, G);
  for (std::int64_t j : {0, 1, 17, 500, 996}) {
    EXPECT_NEAR(std::abs(g[j] - weyl_window_sum(w, double(j) / G)), 0.0, 1e-10);
  }
  WindowedSum ws(w, std::vector<cplx>(w.size(), cplx(0.3, 0.1)));
  for (double t : {0.0, 0.123, 0.77}) {
    EXPECT_NEAR(std::abs(windowed_eval(ws, t) - cplx(0.3, 0.1) * weyl_window_sum(w, t)), 0.0, 1e-11);
  }
}

TEST(Dirichlet, Examples) {
  EXPECT_EQ(dirichlet_approx(1.0 / 3.0, 10), (Fraction{1, 3}));
  EXPECT_EQ(dirichlet_approx(0.3333, 10), (Fraction{1, 3}));
  EXPECT_EQ(dirichlet_approx(0.0, 5), (Fraction{0, 1}));
  EXPECT_EQ(dirichlet_approx(1.0, 5), (Fraction{1, 1}));
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0, 1);
  for (int i = 0; i < 2000; ++i) {
    const double t = u(rng);
    const std::int64_t Q = 1 + static_cast<std::int64_t>(u(rng) * 5000);
    const auto f = dirichlet_approx(t, Q);
    EXPECT_GE(f.q, 1);
    EXPECT_LE(f.q, Q);
    EXPECT_EQ(detail::gcd64(f.a, f.q), 1);
    EXPECT_LE(std::abs(t - double(f.a) / f.q), (1.0 + 1e-12) / (double(f.q) * Q));
  }
  EXPECT_THROW(dirichlet_approx(1.5, 3), std::invalid_argument);
  EXPECT_THROW(dirichlet_approx(0.5, 0), std::invalid_argument);
}

TEST(MajorArc, Checks) {
  WindowSequence w(0, 64);
  const auto exact = major_arc_check(w, 1, 3, 1.0 / 3.0);
  EXPECT_NEAR(exact.bound, 64.0 / std::sqrt(3.0), 1e-9);
  const auto half = major_arc_check(w, 1, 2, 0.5);
  EXPECT_GT(half.ratio, 0.0);
  EXPECT_TRUE(std::isfinite(half.ratio));
  EXPECT_THROW(major_arc_check(w, 2, 4, 0.5), std::invalid_argument);
  EXPECT_THROW(major_arc_check(w, 1, 3, 0.5), std::invalid_argument);
  EXPECT_THROW(major_arc_check(w, 1, 64, 1.0 / 64), std::invalid_argument);
}

TEST(MinorArc, ScanExcludesMajorArcs) {
  WindowSequence w(0, 16);
  const auto s = minor_arc_scan(w, 0.5, 4096);
  EXPECT_EQ(s.scanned + s.excluded, 4096);
  EXPECT_GT(s.excluded, 0);
  EXPECT_EQ(s.dirichlet_violations, 0);
  EXPECT_FALSE(in_major_arcs(s.t_at_max, 16, 0.5));
  EXPECT_TRUE(in_major_arcs(0.0, 16, 0.5));
  EXPECT_TRUE(in_major_arcs(0.999, 16, 0.5));
  EXPECT_TRUE(in_major_arcs(0.25, 16, 0.5));
  EXPECT_FALSE(in_major_arcs(0.1, 16, 0.5));
  // refining the grid cannot lower the maximum much below the coarse value
  const auto fine = minor_arc_scan(w, 0.5, 4 * 4096);
  EXPECT_GE(fine.max_ratio, s.max_ratio - 1e-12);
}

TEST(Superlevel, TrivialLevels) {
  const auto ws = constant_windowed(0, 32);
  EXPECT_EQ(superlevel_measure(ws, ws.weight_l1() + 1e-9, 2000).measure, 0.0);
  EXPECT_EQ(superlevel_measure(ws, 0.0, 2000).measure, 1.0);
}

TEST(Superlevel, MatchesDenseGrid) {
  const auto ws = constant_windowed(0, 64);
  const double lambda = std::pow(64.0, 0.4);
  const auto mc = superlevel_measure(ws, lambda, 100000, 7);
  const auto dense = superlevel_measure_dense(ws, lambda, 1 << 20);
  EXPECT_GT(dense.crossings, 0);
  EXPECT_LE(std::abs(mc.measure - dense.measure), dense.error_bound + 2.0 * dense.crossings / 100000.0);
  EXPECT_LE(std::abs(mc.measure - dense.measure), 4.0 * mc.std_error + dense.error_bound);
}

TEST(WindowedL4, ExactNormMatchesGrid) {
  const auto ws = constant_windowed(3, 10);
  const auto f = detail::quadratic_grid(ws.weights(), ws.window.first(), 4096);
  double acc = 0.0;
  for (auto z : f) acc += std::pow(std::abs(z), 4);
  EXPECT_NEAR(windowed_l4_norm(ws), std::pow(acc / 4096, 0.25), 1e-12);
}
