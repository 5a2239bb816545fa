#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zoll/expsum.hpp"

using namespace zoll;

namespace {

ExpSumSpec random_spec(std::int64_t b, std::int64_t N, std::int64_t alpha, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  return {b, N, alpha, make_coefficients(CoeffFamily::gaussian, static_cast<std::size_t>(N + 1), rng)};
}

// Trapezoid rule on [0, 32 pi) from direct pointwise evaluation.
double brute_lp(const ExpSumSpec& s, int p, int samples) {
  double acc = 0.0;
  for (int i = 0; i < samples; ++i) {
    acc += std::pow(std::abs(eval_sum(s, kBasePeriod * i / samples)), p);
  }
  return std::pow(kBasePeriod * acc / samples, 1.0 / p);
}

// #{(j1..j4) in [0,N]^4 : j1^2 + j2^2 = j3^2 + j4^2}
long long count_two_squares(int N) {
  std::vector<long long> r(2 * N * N + 1, 0);
  for (int a = 0; a <= N; ++a)
    for (int b = 0; b <= N; ++b) ++r[a * a + b * b];
  long long s = 0;
  for (auto v : r) s += v * v;
  return s;
}

}  // namespace

TEST(EvalSum, Examples) {
  ExpSumSpec one{5, 1, 3, {1.0, 0.0}};
  EXPECT_NEAR(std::abs(eval_sum(one, 12.345)), 1.0, 1e-15);
  const auto s = random_spec(7, 9, 2, 1);
  cplx total{};
  for (auto c : s.coeffs) total += c;
  EXPECT_NEAR(std::abs(eval_sum(s, 0.0) - total), 0.0, 1e-15);
  ExpSumSpec pair{0, 1, 0, {1.0, 1.0}};
  EXPECT_NEAR(std::abs(eval_sum(pair, kPi)), 0.0, 1e-15);
  EXPECT_THROW(eval_sum(ExpSumSpec{0, 2, 0, {1.0}}, 0.0), std::invalid_argument);
}

TEST(EvalSum, PeriodicOnBaseInterval) {
  for (std::int64_t alpha : {0, 1, 3, 4}) {
    const auto s = random_spec(10, 20, alpha, 2 + alpha);
    for (double t : {0.1, 3.7, 55.0}) {
      EXPECT_NEAR(std::abs(eval_sum(s, t + kBasePeriod) - eval_sum(s, t)), 0.0, 1e-10);
    }
    // Large frequencies: use t on a coarse dyadic lattice so t + period is exact.
    const auto big = random_spec(1000000, 20, alpha, 3 + alpha);
    for (double t : {0.1, 3.7, 55.0}) {
      const double tl = std::ldexp(std::round(std::ldexp(t, 40)), -40);
      EXPECT_NEAR(std::abs(eval_sum(big, tl + kBasePeriod) - eval_sum(big, tl)), 0.0, 1e-10);
    }
  }
}

TEST(LpNorm, SingleModeAndParseval) {
  for (int p : {2, 4, 6, 8}) {
    ExpSumSpec one{3, 1, 1, {cplx(0.6, 0.8), 0.0}};
    EXPECT_NEAR(lp_norm(one, p), std::pow(kBasePeriod, 1.0 / p), 1e-13);
  }
  for (std::int64_t b : {0, 1000, 1000000}) {
    const auto s = random_spec(b, 33, 1, 9);
    EXPECT_NEAR(std::pow(lp_norm(s, 2), 2), kBasePeriod * std::pow(s.l2(), 2), 1e-10);
  }
  EXPECT_THROW(lp_norm(random_spec(0, 3, 0, 1), 3), std::invalid_argument);
}

TEST(LpNorm, MatchesBruteForceQuadrature) {
  ExpSumSpec s{0, 2, 0, {1.0, 1.0, 1.0}};
  // highest t-frequency of |S|^4 is 2 * (8^2)/16 = 8; 10x oversampling of 17 points
  EXPECT_NEAR(lp_norm(s, 4), brute_lp(s, 4, 170), 1e-10);
  const auto r = random_spec(3, 5, 1, 4);
  EXPECT_NEAR(lp_norm(r, 6), brute_lp(r, 6, 20000), 1e-10);
}

TEST(LpNorm, CountsRepresentationsAsSumsOfTwoSquares) {
  for (int N : {1, 2, 5, 12, 20}) {
    ExpSumSpec s{0, N, 0, std::vector<cplx>(static_cast<std::size_t>(N + 1), 1.0)};
    const double expected = kBasePeriod * static_cast<double>(count_two_squares(N));
    EXPECT_NEAR(std::pow(lp_norm(s, 4), 4) / expected, 1.0, 1e-12) << N;
  }
}

TEST(Moment, RoutesAgree) {
  std::mt19937_64 rng(5);
  for (int q : {1, 2, 3}) {
    for (std::int64_t K : {3, 8, 15}) {
      QuadraticFamily f{2, 2 * q * K * K + 7, make_coefficients(CoeffFamily::gaussian, K + 1, rng)};
      const double a = moment(f, q, MomentRoute::fft);
      const double b = moment(f, q, MomentRoute::direct);
      const double c = moment(f, q, MomentRoute::torus);
      EXPECT_NEAR(a, b, 1e-12 * b) << q << " " << K;
      EXPECT_NEAR(a, c, 1e-12 * b) << q << " " << K;
    }
  }
  QuadraticFamily small{1, -5, make_coefficients(CoeffFamily::random_phase, 12, rng)};
  EXPECT_NEAR(moment(small, 3, MomentRoute::fft), moment(small, 3, MomentRoute::direct), 1e-12);
  EXPECT_THROW(moment(small, 2, MomentRoute::torus), std::invalid_argument);
}

TEST(Moment, TorusRegimeIsIndependentOfShift) {
  std::mt19937_64 rng(8);
  const auto a = make_coefficients(CoeffFamily::gaussian, 30, rng);
  const double m1 = moment(QuadraticFamily{2, 4000001, a}, 3);
  const double m2 = moment(QuadraticFamily{2, 40000, a}, 3, MomentRoute::fft);
  EXPECT_NEAR(m1, m2, 1e-12 * m1);
}

TEST(LpNorm, AlphaReductionByTimeDilation) {
  for (std::int64_t alpha : {1, 2, 3, 5}) {
    const auto s = random_spec(6, 10, alpha, 20 + alpha);
    ExpSumSpec d{4 * s.b + alpha, 4 * s.N, 0, std::vector<cplx>(4 * s.N + 1)};
    for (std::int64_t j = 0; j <= s.N; ++j) d.coeffs[4 * j] = s.coeffs[j];
    for (int p : {2, 4, 6}) {
      EXPECT_NEAR(lp_norm(s, p), lp_norm(d, p), 1e-10) << alpha << " " << p;
    }
  }
}

TEST(LpNormApprox, AgreesWithExact) {
  const auto s = random_spec(1000, 16, 1, 3);
  for (int p : {2, 4, 6}) {
    const auto a = lp_norm_approx(s, p, 1000000);
    EXPECT_NEAR(a.value, lp_norm(s, p), 1e-6);
    EXPECT_LT(a.refinement_delta, 1e-6);
  }
  double prev = 0.0;
  for (double p : {2.5, 3.0, 4.5, 7.0, 10.0}) {
    const double v = lp_norm_approx(s, p, 200000).value / std::pow(kBasePeriod, 1.0 / p);
    EXPECT_GE(v, prev - 1e-12);
    prev = v;
  }
  EXPECT_THROW(lp_norm_approx(s, 3.0, 100), std::invalid_argument);
}

TEST(LemmaLp, SmallSweep) {
  LemmaLpOptions o;
  o.p = 2;
  o.Ns = {8, 16, 32, 64};
  const auto r2 = verify_lemma_lp(o);
  EXPECT_NEAR(r2.slope, 0.0, 1e-10);
  o.p = 6;
  o.trials = 2;
  const auto r6 = verify_lemma_lp(o);
  EXPECT_LE(r6.slope, lemma_lp_exponent(6) + 0.1);
  const auto again = verify_lemma_lp(o);
  EXPECT_EQ(r6.slope, again.slope);
}

TEST(Scaling, FitAndJudge) {
  std::vector<ScalingSample> s;
  for (double n : {8.0, 16.0, 32.0, 64.0}) s.push_back({n, 3.0 * std::pow(n, 0.15)});
  const auto r = fit_scaling(s);
  EXPECT_NEAR(r.slope, 0.15, 1e-12);
  EXPECT_NEAR(r.constant, 3.0, 1e-12);
  EXPECT_TRUE(fit_and_judge(r, 1.0 / 6, 0.1).pass);
  for (auto& x : s) x.value = 3.0 * std::pow(x.size, 0.4);
  EXPECT_FALSE(fit_and_judge(fit_scaling(s), 1.0 / 6, 0.1).pass);
  for (auto& x : s) x.value = 2.0;
  EXPECT_TRUE(fit_and_judge(fit_scaling(s), 0.3, 0.0).pass);
  s.pop_back();
  EXPECT_THROW(fit_and_judge(fit_scaling(s), 0.3, 0.1), std::invalid_argument);
}
