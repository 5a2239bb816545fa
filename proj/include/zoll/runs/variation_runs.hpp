#pragma once

// Variation-norm experiments and the modified-flow phase identity.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "zoll/detail/random.hpp"
#include "zoll/flow.hpp"
#include "zoll/report.hpp"
#include "zoll/variation.hpp"

namespace zoll {

/// V^p norm by enumerating every sub-sequence of (0, v_0, ..., v_{K-1}, 0)
/// (the value at +infinity counts as 0). Exponential in K; the reference for
/// the dynamic program.
inline double vp_norm_exhaustive(const StepPath& path, double p) {
  path.validate();
  std::vector<ZonalField> w{ZonalField(0)};
  for (const auto& v : path.values) w.push_back(v);
  w.emplace_back(0);
  const std::size_t n = w.size();
  if (n > 24) throw std::invalid_argument("vp_norm_exhaustive: too many pieces");
  double best = 0.0;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    double s = 0.0;
    std::size_t prev = n;
    for (std::size_t i = 0; i < n; ++i) {
      if (!(mask >> i & 1)) continue;
      if (prev != n) s += std::pow(l2_distance(w[i], w[prev]), p);
      prev = i;
    }
    best = std::max(best, s);
  }
  return std::pow(best, 1.0 / p);
}

struct VnormSettings {
  int paths = 200;
  std::int64_t max_pieces = 12;
  std::int64_t cutoff = 3;
  std::vector<double> ps{1.0, 1.5, 2.0, 3.0, 4.0, 6.0};
  double dp_tol = 0.0;  ///< allowed relative difference
  int atoms = 50;
  double bracket_tol = 1e-14;
  std::int64_t phase_degree_max = 256;
  int phase_times = 100;
  double phase_tol = 1e-14;
  std::uint64_t seed = 1;
};

namespace detail {
inline ZonalField gaussian_field(std::mt19937_64& rng, std::int64_t cutoff) {
  std::normal_distribution<double> g;
  ZonalField f(cutoff);
  for (auto& c : f.coeffs) {
    const double re = g(rng);
    c = {re, g(rng)};
  }
  return f;
}
}  // namespace detail

inline Report run_vnorm_dp(const VnormSettings& s) {
  Report r;
  r.id = "vnorm-dp";
  r.tag = "def:uv";
  r.param("paths", static_cast<double>(s.paths));
  r.param("max_pieces", static_cast<double>(s.max_pieces));
  r.param("seed", static_cast<double>(s.seed));
  r.columns = {"path", "pieces", "p", "infinite_tail", "dynamic_program", "exhaustive", "rel_diff"};
  double worst = 0.0;
  for (int i = 0; i < s.paths; ++i) {
    auto rng = detail::make_rng(s.seed, {static_cast<std::uint64_t>(i), 0x7a});
    const auto K = static_cast<std::size_t>(1 + i % s.max_pieces);
    StepPath path;
    std::uniform_real_distribution<double> gap(0.05, 1.0);
    double t = 0.0;
    for (std::size_t k = 0; k < K; ++k) {
      path.times.push_back(t);
      // occasional repeats and returns exercise non-monotone optimal partitions
      if (k > 1 && rng() % 5 == 0) {
        path.values.push_back(path.values[k - 2]);
      } else {
        path.values.push_back(detail::gaussian_field(rng, s.cutoff));
      }
      t += gap(rng);
    }
    const bool tail = i % 2 == 1;
    path.times.push_back(tail ? INFINITY : t);
    const double p = s.ps[static_cast<std::size_t>(i) % s.ps.size()];
    const double dp = vp_norm(path, p), ex = vp_norm_exhaustive(path, p);
    const double rel = std::abs(dp - ex) / std::max(ex, 1e-300);
    worst = std::max(worst, rel);
    r.add_row("def:uv", {static_cast<double>(i), static_cast<double>(K), p, tail ? 1.0 : 0.0, dp, ex, rel});
  }
  r.footer = {{"max_rel_diff", worst}};
  r.checks.push_back(make_check("max_rel_diff", worst, "<=", s.dp_tol));
  return r;
}

/// Single-piece flow-adapted paths e^{itA} phi on [a, b): the exact U^2_A norm is ||phi||.
inline Report run_vnorm_bracket(const VnormSettings& s) {
  Report r;
  r.id = "vnorm-bracket";
  r.tag = "def:uv";
  r.param("atoms", static_cast<double>(s.atoms));
  r.columns = {"atom", "flow", "norm", "lower", "upper"};
  double worst = 0.0;
  for (int i = 0; i < s.atoms; ++i) {
    auto rng = detail::make_rng(s.seed, {static_cast<std::uint64_t>(i), 0x7b});
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    const double a = u(rng);
    const double b = i % 3 == 0 ? INFINITY : a + 0.01 + std::abs(u(rng));
    const Flow flow = i % 2 == 0 ? Flow::laplacian : Flow::modified;
    const auto phi = detail::gaussian_field(rng, 1 + i % 40);
    const auto adapted = conjugate_by_flow(single_step(a, b, phi, flow), -1, flow);
    const auto br = up_norm_bracket(adapted.path, 2.0);
    const double norm = l2_norm(phi);
    const double miss = std::max(br.lower - norm, norm - br.upper) / norm;
    worst = std::max(worst, miss);
    r.add_row("def:uv", {static_cast<double>(i), flow == Flow::laplacian ? 0.0 : 1.0, norm, br.lower, br.upper});
  }
  r.footer = {{"max_relative_miss", worst}};
  r.checks.push_back(make_check("max_relative_miss", worst, "<=", s.bracket_tol));
  r.notes.push_back("max_relative_miss <= 0 means every bracket contains the exact norm");
  return r;
}

/// e^{it Delta~} e_k = e^{-it} e^{it Delta} e_k for k >= 1, and equality at k = 0.
inline Report run_flow_phase(const VnormSettings& s) {
  Report r;
  r.id = "vnorm-flow-phase";
  r.tag = "lem:mod_sp";
  r.param("degree_max", static_cast<double>(s.phase_degree_max));
  r.param("times", static_cast<double>(s.phase_times));
  r.columns = {"t", "max_abs_error"};
  ZonalField ones(s.phase_degree_max);
  for (auto& c : ones.coeffs) c = 1.0;
  auto rng = detail::make_rng(s.seed, {0x7c});
  std::uniform_real_distribution<double> u(0.0, kBasePeriod);
  double worst = 0.0;
  for (int i = 0; i < s.phase_times; ++i) {
    const double t = u(rng);
    const auto lap = linear_propagate(ones, t, Flow::laplacian);
    const auto mod = linear_propagate(ones, t, Flow::modified);
    const cplx g = detail::unit_phase(1, t);
    double err = std::abs(mod[0] - lap[0]);
    for (std::int64_t k = 1; k <= s.phase_degree_max; ++k) err = std::max(err, std::abs(mod[k] - lap[k] * g));
    worst = std::max(worst, err);
    r.add_row("lem:mod_sp", {t, err});
  }
  r.footer = {{"max_abs_error", worst}};
  r.checks.push_back(make_check("max_abs_error", worst, "<=", s.phase_tol));
  return r;
}

}  // namespace zoll
