#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "zoll/solver.hpp"

namespace {

using namespace zoll;

ZonalField random_field(std::uint64_t seed, std::int64_t K, std::int64_t top, double scale) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g;
  ZonalField f(K);
  for (std::int64_t k = 0; k <= top; ++k) {
    const double re = g(rng);
    f.coeffs[static_cast<std::size_t>(k)] = cplx(re, g(rng)) * scale / (1.0 + static_cast<double>(k * k));
  }
  return f;
}

double sup_h1_distance(const std::vector<ZonalField>& a, const std::vector<ZonalField>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, sobolev_norm(a[i] - b[i], 1.0));
  return m;
}

TEST(Invariants, MassAndEnergyExamples) {
  const cplx c(0.3, -0.4);
  const auto u = ZonalField::mode(0, 4, c);
  const double V2 = kSphereVolume * kSphereVolume;
  EXPECT_NEAR(mass(u), 0.125, 1e-16);
  EXPECT_NEAR(energy(u, 1), std::pow(0.5, 6) / (6.0 * V2), 1e-18);
  EXPECT_NEAR(energy(u, -1), -std::pow(0.5, 6) / (6.0 * V2), 1e-18);
  const auto e = ZonalField::mode(7, 7, 1.0);
  EXPECT_DOUBLE_EQ(mass(e), 0.5);
  EXPECT_DOUBLE_EQ(kinetic_energy(e), 63.0 / 2.0);
  const auto f = random_field(1, 10, 10, 1.0);
  auto g = f;
  g *= 1.7;
  const double kin = kinetic_energy(f), pot = energy(f, 1) - kin;
  EXPECT_NEAR(energy(g, 1), 1.7 * 1.7 * kin + std::pow(1.7, 6) * pot, 1e-12 * energy(g, 1));
}

TEST(Quintic, SignSupportAndZero) {
  EXPECT_EQ(l2_norm(quintic_rhs(ZonalField(6), 1)), 0.0);
  const auto u = random_field(2, 6, 6, 1.0);
  const auto a = quintic_rhs(u, 1, Truncation::none), b = quintic_rhs(u, -1, Truncation::none);
  EXPECT_EQ(a.cutoff(), 30);
  EXPECT_LT(l2_distance(a, b * -1.0), 1e-15 * l2_norm(a));
  EXPECT_GT(std::abs(a[30]), 1e-12 * l2_norm(a));
  // independent check of one coefficient by a fine trapezoid in theta
  const int G = 2000;
  cplx c = 0.0;
  for (int i = 1; i < G; ++i) {
    const double th = kPi * i / G;
    const cplx v = synthesize_at(u, th);
    c += 4.0 * kPi * std::sin(th) * std::sin(th) * std::norm(v) * std::norm(v) * v * basis_value(11, th);
  }
  c *= kPi / G;
  EXPECT_LT(std::abs(c - a[11]), 1e-12 * l2_norm(a));
}

TEST(Strang, ConstantFieldIsExact) {
  const cplx c(0.8, 0.6);
  const auto u = ZonalField::mode(0, 8, c);
  for (int sign : {1, -1}) {
    const double dt = 0.37;
    const auto v = step_strang(u, dt, sign);
    const double w = std::pow(std::abs(c), 4) / (kSphereVolume * kSphereVolume);
    EXPECT_LT(std::abs(v[0] - c * std::exp(cplx(0.0, -sign * w * dt))), 1e-14);
    for (std::int64_t k = 1; k <= 8; ++k) EXPECT_LT(std::abs(v[k]), 1e-15);
  }
  const auto f = random_field(3, 8, 8, 1.0);
  EXPECT_EQ(step_strang(f, 0.0, 1), f);
}

TEST(Strang, SecondOrderSelfConvergence) {
  const auto phi = random_field(4, 16, 12, 2.0);
  auto run = [&](double dt) {
    SolverConfig c;
    c.K = 16;
    c.dt = dt;
    c.T = 1.0;
    c.store_every = 1 << 30;
    return evolve(c, phi).states.back();
  };
  const auto ref = run(0.01 / 16);
  const double e1 = l2_distance(run(0.01), ref), e2 = l2_distance(run(0.005), ref);
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
}

TEST(Evolve, ZeroAndLinearRegime) {
  SolverConfig c;
  c.K = 24;
  c.dt = 1e-2;
  const auto zero = evolve(c, ZonalField(24));
  for (const auto& s : zero.states) EXPECT_EQ(l2_norm(s), 0.0);
  const auto phi = random_field(5, 24, 20, 1e-6);
  const auto tr = evolve(c, phi);
  for (std::size_t n = 0; n < tr.states.size(); ++n) {
    const auto lin = linear_propagate(phi, tr.times[n]);
    EXPECT_LT(l2_distance(tr.states[n], lin), 1e-10 * l2_norm(phi));
  }
}

TEST(Evolve, ConservationAtSmallData) {
  SolverConfig c;  // K = 64, dt = 1e-3, T = 1, defocusing
  const auto phi = make_initial_data(64, 0.1, 1);
  EXPECT_NEAR(sobolev_norm(phi, 1.0), 0.1, 1e-15);
  EXPECT_EQ(phi[54], cplx{});  // 20% spectral margin
  const auto tr = evolve(c, phi);
  EXPECT_EQ(tr.mass.size(), 1001u);
  EXPECT_NEAR(tr.times.back(), 1.0, 1e-12);
  EXPECT_LT(tr.mass_drift(), 1e-10);
  EXPECT_LT(tr.energy_drift(), 1e-5);
  for (double loss : tr.truncation_loss) EXPECT_LT(loss, 1e-12 * tr.mass.front());
}

TEST(Evolve, EnergyDriftIsSecondOrder) {
  SolverConfig c;
  c.store_every = 1 << 30;
  const auto phi = make_initial_data(64, 0.1, 1);
  const double a = evolve(c, phi).energy_drift();
  c.dt /= 2.0;
  const double b = evolve(c, phi).energy_drift();
  EXPECT_GT(a / b, 3.0);
  EXPECT_LT(a / b, 5.0);
}

TEST(Evolve, MassDriftAborts) {
  SolverConfig c;
  c.K = 8;
  c.dt = 0.05;
  c.max_mass_drift = 0.0;
  c.truncate = false;
  try {
    evolve(c, random_field(6, 8, 8, 3.0));
    FAIL() << "expected abort";
  } catch (const std::runtime_error& e) {
    EXPECT_NE(std::string(e.what()).find("mass drift"), std::string::npos);
  }
}

TEST(Evolve, TimeReversalAndGauge) {
  SolverConfig c;
  c.K = 32;
  c.dt = 1e-3;
  c.T = 0.5;
  c.store_every = 1 << 30;
  const auto phi = make_initial_data(32, 0.3, 9);
  ZonalField u = evolve(c, phi).states.back();
  StrangStepper back(32, -c.dt, c.sign);
  for (std::int64_t n = 0; n < c.steps(); ++n) back.step(u);
  EXPECT_LT(l2_distance(u, phi), 1e-7);

  const cplx g = std::exp(cplx(0.0, 0.7));
  auto rotated = phi;
  rotated *= g;
  const auto a = evolve(c, rotated).states.back();
  auto b = evolve(c, phi).states.back();
  b *= g;
  EXPECT_LT(l2_distance(a, b), 1e-14);
}

TEST(Duhamel, ClosedFormsAndConventions) {
  const std::int64_t K = 6;
  Forcing zero{0.0, 0.1, std::vector<ZonalField>(11, ZonalField(K))};
  EXPECT_EQ(l2_norm(duhamel(zero, 0.55)), 0.0);

  for (std::int64_t k : {0, 1, 5}) {
    Forcing f{0.5, 0.1, std::vector<ZonalField>(21, ZonalField::mode(k, K, 1.0))};
    for (double t : {0.5, 0.73, 1.2, 2.5}) {
      const double lam = static_cast<double>(eigenvalue(k));
      const cplx expect = k == 0 ? cplx(t - 0.5) : (1.0 - std::exp(cplx(0.0, -lam * (t - 0.5)))) / cplx(0.0, lam);
      EXPECT_LT(std::abs(duhamel(f, t)[k] - expect), 1e-12) << k << " " << t;
    }
    EXPECT_EQ(l2_norm(duhamel(f, 0.2)), 0.0);
    const auto Ib = duhamel(f, f.b());
    EXPECT_LT(l2_distance(duhamel(f, 3.7), linear_propagate(Ib, 3.7 - f.b())), 1e-14);
  }
  EXPECT_THROW(duhamel(zero, NAN), std::invalid_argument);
  Forcing bad{0.0, 0.0, std::vector<ZonalField>(3, ZonalField(K))};
  EXPECT_THROW(duhamel(bad, 0.1), std::invalid_argument);
}

TEST(Duhamel, GridAgreesWithPointwiseAndIsSecondOrder) {
  const std::int64_t K = 4;
  auto forcing = [&](double s) {
    ZonalField f(K);
    for (std::int64_t k = 0; k <= K; ++k) f.coeffs[static_cast<std::size_t>(k)] = std::exp(cplx(std::sin(3.0 * s), s * s * (k + 1)));
    return f;
  };
  auto make = [&](double h) {
    Forcing f{0.0, h, {}};
    for (int n = 0; n * h <= 1.0 + 1e-12; ++n) f.samples.push_back(forcing(n * h));
    return f;
  };
  // reference: composite Simpson on a very fine grid of the exact integrand
  ZonalField exact(K);
  const int G = 200000;
  for (std::int64_t k = 0; k <= K; ++k) {
    const double lam = static_cast<double>(eigenvalue(k));
    cplx s = 0.0;
    for (int i = 0; i <= G; ++i) {
      const double x = static_cast<double>(i) / G;
      const double w = (i == 0 || i == G) ? 1.0 : (i % 2 ? 4.0 : 2.0);
      s += w * std::exp(cplx(0.0, -lam * (1.0 - x))) * forcing(x)[k];
    }
    exact.coeffs[static_cast<std::size_t>(k)] = s / (3.0 * G);
  }
  const auto f1 = make(0.02), f2 = make(0.01);
  const auto g1 = duhamel_on_grid(f1);
  EXPECT_LT(l2_distance(g1[25], duhamel(f1, 0.5)), 1e-14);
  const double e1 = l2_distance(g1.back(), exact), e2 = l2_distance(duhamel_on_grid(f2).back(), exact);
  EXPECT_GT(e1 / e2, 3.5);
  EXPECT_LT(e1 / e2, 4.5);
}

TEST(Picard, ZeroDataAndContraction) {
  SolverConfig c;
  c.K = 16;
  c.dt = 1e-2;
  const auto z = picard_iterate(ZonalField(16), c);
  for (double d : z.distance_h1) EXPECT_EQ(d, 0.0);

  const auto phi = make_initial_data(16, 0.05, 2);
  const auto r = picard_iterate(phi, c);
  ASSERT_GE(r.ratios.size(), 5u);
  for (std::size_t m = 0; m < 5; ++m) EXPECT_LT(r.ratios[m], 0.5);
  EXPECT_FALSE(r.diverged);
  for (std::size_t m = 0; m < r.distance_y1.size(); ++m) EXPECT_GT(r.distance_y1[m], 0.0);
  const auto tr = evolve(c, phi);
  EXPECT_LT(sup_h1_distance(r.limit, tr.states), 1e-6);
}

TEST(Picard, LargeFocusingDataDiverges) {
  SolverConfig c;
  c.K = 8;
  c.dt = 1e-2;
  c.sign = -1;
  PicardOptions opt;
  opt.max_iterations = 12;
  opt.y1_distances = false;
  const auto r = picard_iterate(make_initial_data(8, 30.0, 3), c, opt);
  EXPECT_TRUE(r.diverged);
}

TEST(Lipschitz, DegenerateLinearAndSmall) {
  SolverConfig c;
  c.K = 16;
  c.dt = 1e-2;
  const auto phi = make_initial_data(16, 0.1, 4);
  const auto same = lipschitz_probe(phi, phi, c);
  EXPECT_TRUE(same.degenerate);
  EXPECT_EQ(same.ratio, 0.0);
  auto a = phi, b = make_initial_data(16, 0.1, 5);
  a *= 1e-6;
  b *= 1e-6;
  EXPECT_NEAR(lipschitz_probe(a, b, c).ratio, 1.0, 1e-6);
  const double r = lipschitz_probe(phi, make_initial_data(16, 0.1, 5), c).ratio;
  EXPECT_GE(r, 1.0 - 1e-9);
  EXPECT_LE(r, 2.0);
}

}  // namespace
