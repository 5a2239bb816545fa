#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zoll/flow.hpp"
#include "zoll/variation.hpp"

namespace {

using namespace zoll;

ZonalField random_field(std::mt19937_64& rng, std::int64_t cutoff) {
  std::normal_distribution<double> g;
  ZonalField f(cutoff);
  for (auto& c : f.coeffs) c = {g(rng), g(rng)};
  return f;
}

StepPath random_path(std::mt19937_64& rng, std::size_t pieces, std::int64_t cutoff, bool infinite_tail) {
  StepPath p;
  double t = 0.0;
  std::uniform_real_distribution<double> dt(0.1, 1.0);
  for (std::size_t i = 0; i < pieces; ++i) {
    p.times.push_back(t);
    p.values.push_back(random_field(rng, cutoff));
    t += dt(rng);
  }
  p.times.push_back(infinite_tail ? INFINITY : t);
  return p;
}

// Supremum over every sub-sequence of the jump points (0, v_0, ..., v_{K-1}, 0).
double brute_vp(const StepPath& path, double p) {
  std::vector<ZonalField> w{ZonalField(0)};
  for (const auto& v : path.values) w.push_back(v);
  w.emplace_back(0);
  const std::size_t n = w.size();
  double best = 0.0;
  for (std::uint64_t mask = 1; mask < (1ULL << n); ++mask) {
    double s = 0.0;
    int prev = -1;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      if (prev >= 0) s += std::pow(l2_distance(w[i], w[static_cast<std::size_t>(prev)]), p);
      prev = static_cast<int>(i);
    }
    best = std::max(best, s);
  }
  return std::pow(best, 1.0 / p);
}

TEST(Variation, DynamicProgramMatchesBruteForce) {
  std::mt19937_64 rng(7);
  for (std::size_t K = 1; K <= 12; ++K) {
    for (double p : {1.0, 1.5, 2.0, 3.0, 6.0}) {
      const auto path = random_path(rng, K, 2, K % 2 == 0);
      EXPECT_NEAR(vp_norm(path, p), brute_vp(path, p), 1e-12 * brute_vp(path, p)) << K << " " << p;
    }
  }
}

TEST(Variation, SingleStepExamples) {
  const auto phi = ZonalField::mode(1, 3, 1.0);
  EXPECT_NEAR(vp_norm(single_step(0.0, 1.0, phi), 2.0), std::sqrt(2.0), 1e-15);
  const auto psi = ZonalField::mode(2, 3, cplx(0.0, 3.0));
  for (double p : {1.0, 2.0, 4.0}) {
    EXPECT_NEAR(vp_norm(single_step(0.0, INFINITY, psi), p), std::pow(2.0, 1.0 / p) * 3.0, 1e-14);
  }
}

TEST(Variation, BracketPinchesOnOneAtom) {
  const auto phi = ZonalField::mode(1, 3, cplx(0.6, 0.8));
  for (double b : {1.0, static_cast<double>(INFINITY)}) {
    const auto br = up_norm_bracket(single_step(0.5, b, phi), 2.0);
    EXPECT_DOUBLE_EQ(br.lower, 1.0);
    EXPECT_DOUBLE_EQ(br.upper, 1.0);
  }
  const auto zero = up_norm_bracket(StepPath{}, 2.0);
  EXPECT_EQ(zero.lower, 0.0);
  EXPECT_EQ(zero.upper, 0.0);
}

TEST(Variation, BracketIsOrderedAndHomogeneous) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    auto path = random_path(rng, 1 + trial % 9, 4, trial % 3 == 0);
    const auto br = up_norm_bracket(path, 2.0);
    EXPECT_LE(br.lower, br.upper * (1 + 1e-14));
    EXPECT_LE(br.vp, br.upper * 2 * (1 + 1e-14));  // ||u||_{V^2} <= 2 ||u||_{U^2}
    const double v = vp_norm(path, 2.0);
    for (auto& x : path.values) x *= cplx(0.0, -2.5);
    EXPECT_NEAR(vp_norm(path, 2.0), 2.5 * v, 1e-13 * v);
  }
}

TEST(Variation, MonotoneInExponent) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 20; ++trial) {
    const auto path = random_path(rng, 8, 3, false);
    double prev = INFINITY;
    for (double p : {1.0, 1.25, 2.0, 3.0, 5.0, 10.0}) {
      const double v = vp_norm(path, p);
      EXPECT_LE(v, prev * (1 + 1e-14));
      prev = v;
    }
  }
}

TEST(Variation, TriangleInequality) {
  std::mt19937_64 rng(17);
  for (int trial = 0; trial < 30; ++trial) {
    const auto a = random_path(rng, 6, 3, false);
    auto b = a;
    for (auto& x : b.values) x = random_field(rng, 3);
    auto s = a;
    for (std::size_t i = 0; i < s.values.size(); ++i) s.values[i] += b.values[i];
    for (double p : {1.0, 2.0, 4.0}) {
      EXPECT_LE(vp_norm(s, p), (vp_norm(a, p) + vp_norm(b, p)) * (1 + 1e-14));
    }
  }
}

TEST(Variation, AtomNormalization) {
  const auto half = ZonalField::mode(0, 2, std::sqrt(0.5));
  EXPECT_TRUE(up_atom({0.0, 1.0, 2.0}, {half, half}, 2.0).valid);
  EXPECT_FALSE(up_atom({0.0, 1.0, 2.0}, {half, half}, 4.0).valid);
  EXPECT_THROW(up_atom({0.0, 1.0}, {half, half}, 2.0), std::invalid_argument);
  EXPECT_THROW(up_atom({1.0, 0.0, 2.0}, {half, half}, 2.0), std::invalid_argument);
}

TEST(Flow, ModifiedDiffersFromLaplacianByUnitPhase) {
  std::mt19937_64 rng(3);
  const auto f = random_field(rng, 40);
  for (double t : {0.3, 2.0, 17.5, 90.0}) {
    const auto a = linear_propagate(f, t, Flow::laplacian);
    const auto b = linear_propagate(f, t, Flow::modified);
    EXPECT_NEAR(std::abs(b[0] - a[0]), 0.0, 1e-15);
    for (std::int64_t k = 1; k <= 40; ++k) {
      EXPECT_NEAR(std::abs(b[k] - a[k] * std::exp(cplx(0.0, -t))), 0.0, 1e-13 * std::abs(a[k]));
    }
  }
}

TEST(Conjugation, OwnFlowIsExact) {
  std::mt19937_64 rng(5);
  auto path = random_path(rng, 5, 6, true);
  path.evolving = Flow::modified;
  const auto c = conjugate_by_flow(path, -1, Flow::modified);
  EXPECT_FALSE(c.path.evolving.has_value());
  EXPECT_EQ(c.refinement_error_bound, 0.0);
  EXPECT_EQ(c.path.values, path.values);

  auto st = path;
  st.evolving.reset();
  const auto up = conjugate_by_flow(st, +1, Flow::laplacian);
  EXPECT_EQ(up.path.evolving, Flow::laplacian);
  EXPECT_EQ(up.refinement_error_bound, 0.0);
}

TEST(Conjugation, ResampledPathStaysWithinBound) {
  std::mt19937_64 rng(9);
  auto path = random_path(rng, 4, 12, false);
  path.evolving = Flow::modified;
  // Laplacian frame: the residual phase is e^{-it} on k >= 1.
  const auto c = conjugate_by_flow(path, -1, Flow::laplacian);
  EXPECT_GT(c.refinement_error_bound, 0.0);
  std::uniform_real_distribution<double> u(path.times.front(), path.times.back());
  for (int i = 0; i < 200; ++i) {
    const double t = u(rng);
    const auto truth = linear_propagate(path.value_at(t), -t, Flow::laplacian);
    EXPECT_LE(l2_distance(truth, c.path.value_at(t)), c.refinement_error_bound * (1 + 1e-12));
  }
  ConjugateOptions fine;
  fine.density = 64.0;
  EXPECT_LT(conjugate_by_flow(path, -1, Flow::laplacian, ClusterScheme(), fine).refinement_error_bound,
            c.refinement_error_bound / 4.0);
}

TEST(BlockNorms, YBoundedByTwiceX) {
  std::mt19937_64 rng(21);
  const ClusterScheme scheme;
  for (int trial = 0; trial < 10; ++trial) {
    auto path = random_path(rng, 6, 20, trial % 2 == 0);
    path.evolving = Flow::modified;
    const auto bp = split_into_blocks(path, scheme);
    EXPECT_EQ(bp.blocks.size(), 6u);  // blocks 0, 1, 2, 4, 8, 16
    for (double s : {0.0, 0.5, 1.0}) {
      const auto x = xs_ys_norm(bp, BlockSpace::X, s, Flow::modified, scheme);
      const auto y = xs_ys_norm(bp, BlockSpace::Y, s, Flow::modified, scheme);
      EXPECT_LE(x.lower, x.upper);
      EXPECT_LE(y.value, 2.0 * x.upper * (1 + 1e-14));
    }
  }
}

TEST(BlockNorms, RejectsOffBlockSupport) {
  BlockPath bp;
  bp.blocks.emplace(2, single_step(0.0, 1.0, ZonalField::mode(7, 8)));
  EXPECT_THROW(xs_ys_norm(bp, BlockSpace::Y, 0.0), std::invalid_argument);
}

}  // namespace
