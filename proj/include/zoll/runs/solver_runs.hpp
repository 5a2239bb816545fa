#pragma once

// Solver experiments: conservation, Picard contraction, Lipschitz probe.

#include <algorithm>
#include <cmath>
#include <random>
#include <string>
#include <vector>

#include "zoll/detail/random.hpp"
#include "zoll/report.hpp"
#include "zoll/solver.hpp"

namespace zoll {

namespace detail {
inline void add_solver_params(Report& r, const SolverConfig& c) {
  r.param("K", static_cast<double>(c.K));
  r.param("dt", c.dt);
  r.param("T", c.T);
  r.param("sign", static_cast<double>(c.sign));
  r.param("truncate", c.truncate ? "true" : "false");
  r.param("seed", static_cast<double>(c.seed));
}
}  // namespace detail

struct SimulateSettings {
  SolverConfig cfg;
  double h1 = 0.1;
  double margin = 1.2;
  double mass_tol = 1e-10;
  double energy_tol = 1e-5;
  bool order_check = false;  ///< rerun at dt/2 and judge the drift ratio
  double order_low = 3.0;
  double order_high = 5.0;
};

inline ZonalField simulate_data(const SimulateSettings& s) {
  return make_initial_data(s.cfg.K, s.h1, s.cfg.seed, s.margin);
}

/// Conservation report for a finished trajectory; rows at the stored frames.
inline Report conservation_report(const Trajectory& tr, const SimulateSettings& s) {
  Report r;
  r.id = "simulate";
  r.tag = "eq:l2,eq:e";
  detail::add_solver_params(r, tr.config);
  r.param("h1", s.h1);
  r.param("margin", s.margin);
  r.columns = {"t", "mass", "energy", "mass_dev", "energy_dev", "truncation_loss"};
  const double m0 = tr.mass.front(), e0 = tr.energy.front();
  const std::int64_t first = static_cast<std::int64_t>(std::llround(tr.times.front() / tr.config.dt));
  for (std::size_t f = 0; f < tr.times.size(); ++f) {
    const auto i = static_cast<std::size_t>(std::llround(tr.times[f] / tr.config.dt) - first);
    r.add_row("eq:l2,eq:e", {tr.times[f], tr.mass[i], tr.energy[i], m0 > 0 ? (tr.mass[i] - m0) / m0 : 0.0,
                             e0 != 0 ? (tr.energy[i] - e0) / std::abs(e0) : 0.0, tr.truncation_loss[i]});
  }
  double loss = 0.0;
  for (double l : tr.truncation_loss) loss = std::max(loss, l);
  r.footer = {{"steps", static_cast<double>(tr.mass.size() - 1)},
              {"mass_drift", tr.mass_drift()},
              {"energy_drift", tr.energy_drift()},
              {"max_truncation_loss", loss}};
  r.checks.push_back(make_check("mass_drift", tr.mass_drift(), "<", s.mass_tol));
  r.checks.push_back(make_check("energy_drift", tr.energy_drift(), "<", s.energy_tol));
  r.notes.push_back("energy = 1/2 int |grad u|^2 + sign/6 int |u|^6; drifts are max relative deviations");
  return r;
}

/// Energy drift at dt and dt/2 from the same data.
struct OrderStudy {
  double drift = 0.0;
  double drift_half = 0.0;
  [[nodiscard]] double ratio() const { return drift_half > 0.0 ? drift / drift_half : INFINITY; }
};

inline OrderStudy splitting_order(const SolverConfig& cfg, const ZonalField& phi) {
  SolverConfig half = cfg;
  half.dt = cfg.dt / 2.0;
  half.store_every = std::max<std::int64_t>(1, cfg.store_every * 2);
  return {evolve(cfg, phi).energy_drift(), evolve(half, phi).energy_drift()};
}

inline void add_order_study(Report& r, const OrderStudy& o, const SimulateSettings& s) {
  r.footer.emplace_back("energy_drift_half_dt", o.drift_half);
  r.footer.emplace_back("order_ratio", o.ratio());
  r.checks.push_back(make_check("order_ratio_low", o.ratio(), ">=", s.order_low));
  r.checks.push_back(make_check("order_ratio_high", o.ratio(), "<=", s.order_high));
}

struct SimulateResult {
  Report report;
  Trajectory trajectory;
};

inline SimulateResult run_simulate(const SimulateSettings& s) {
  const ZonalField phi = simulate_data(s);
  SimulateResult out;
  out.trajectory = evolve(s.cfg, phi);
  out.report = conservation_report(out.trajectory, s);
  if (s.order_check) add_order_study(out.report, splitting_order(s.cfg, phi), s);
  return out;
}

// ---------------------------------------------------------------------------

struct PicardSettings {
  SolverConfig cfg;
  double h1 = 0.05;
  int iterations = 6;
  int checked_ratios = 5;
  double ratio_limit = 0.5;
  bool y1 = true;
  bool compare = true;  ///< compare the limit with the split-step solution
  double agreement_tol = 1e-6;
  double margin = 1.2;
};

/// Duhamel integral of the constant forcing e_k on [0, T] against its closed form.
inline double duhamel_closed_form_error(std::int64_t k, std::int64_t K, double T, std::int64_t samples) {
  Forcing f{0.0, T / static_cast<double>(samples - 1), std::vector<ZonalField>(static_cast<std::size_t>(samples),
                                                                              ZonalField::mode(k, K, 1.0))};
  const cplx got = duhamel(f, T)[k];
  const double l2 = static_cast<double>(eigenvalue(k));
  const cplx want = l2 == 0.0 ? cplx(T) : (std::exp(cplx(0.0, -l2 * T)) - 1.0) / cplx(0.0, -l2);
  return std::abs(got - want);
}

inline Report run_picard(const PicardSettings& s) {
  const ZonalField phi = make_initial_data(s.cfg.K, s.h1, s.cfg.seed, s.margin);
  SolverConfig cfg = s.cfg;
  const auto res = picard_iterate(phi, cfg, {s.iterations, s.y1});
  Report r;
  r.id = "picard";
  r.tag = "eq:int-nls";
  detail::add_solver_params(r, cfg);
  r.param("h1", s.h1);
  r.param("iterations", static_cast<double>(s.iterations));
  r.columns = {"m", "distance_h1", "distance_y1", "ratio_h1"};
  for (std::size_t m = 0; m < res.distance_h1.size(); ++m) {
    r.add_row("eq:int-nls,eq:six-est",
              {static_cast<double>(m), res.distance_h1[m], s.y1 ? res.distance_y1[m] : NAN,
               m == 0 ? NAN : res.ratios[m - 1]});
  }
  double worst = 0.0;
  const auto n = std::min<std::size_t>(res.ratios.size(), static_cast<std::size_t>(s.checked_ratios));
  for (std::size_t m = 0; m < n; ++m) worst = std::max(worst, res.ratios[m]);
  r.footer.emplace_back("max_ratio", worst);
  r.footer.emplace_back("diverged", res.diverged ? 1.0 : 0.0);
  r.checks.push_back(make_check("ratios_available", static_cast<double>(res.ratios.size()), ">=",
                                static_cast<double>(s.checked_ratios)));
  r.checks.push_back(make_check("max_ratio", worst, "<", s.ratio_limit));
  if (s.compare) {
    const auto tr = evolve(cfg, phi);
    double d = 0.0;
    for (std::size_t i = 0; i < tr.states.size(); ++i) d = std::max(d, sobolev_norm(res.limit[i] - tr.states[i], 1.0));
    r.footer.emplace_back("limit_vs_split_step_h1", d);
    r.checks.push_back(make_check("limit_vs_split_step_h1", d, "<=", s.agreement_tol));
  }
  const double duhamel_err = duhamel_closed_form_error(3, cfg.K, cfg.T, cfg.steps() + 1);
  r.footer.emplace_back("duhamel_closed_form_error", duhamel_err);
  r.add_row("eq:duhamel", {NAN, duhamel_err, NAN, NAN});
  r.notes.push_back("distance_y1 is the Y^1 norm (exact V^2) of the sampled difference path; the duhamel row "
                    "holds the error of constant forcing e_3 against the closed form");
  return r;
}

// ---------------------------------------------------------------------------

struct LipschitzSettings {
  SolverConfig cfg;
  int pairs = 20;
  double h1 = 0.1;
  double ratio_limit = 2.0;
  double margin = 1.2;
};

inline Report run_lipschitz(const LipschitzSettings& s) {
  Report r;
  r.id = "lipschitz";
  r.tag = "thm:main-tech";
  detail::add_solver_params(r, s.cfg);
  r.param("pairs", static_cast<double>(s.pairs));
  r.param("h1", s.h1);
  r.columns = {"pair", "h1_first", "h1_second", "initial_distance", "ratio"};
  double worst = 0.0;
  for (int i = 0; i < s.pairs; ++i) {
    auto rng = detail::make_rng(s.cfg.seed, {static_cast<std::uint64_t>(i), 0x11b});
    std::uniform_real_distribution<double> u(0.5, 1.0);
    const double a = s.h1 * u(rng), b = s.h1 * u(rng);
    const auto phi1 = make_initial_data(s.cfg.K, a, rng(), s.margin);
    const auto phi2 = make_initial_data(s.cfg.K, b, rng(), s.margin);
    const auto res = lipschitz_probe(phi1, phi2, s.cfg);
    worst = std::max(worst, res.ratio);
    r.add_row("thm:main-tech", {static_cast<double>(i), a, b, sobolev_norm(phi1 - phi2, 1.0), res.ratio});
  }
  r.footer.emplace_back("max_ratio", worst);
  r.checks.push_back(make_check("max_ratio", worst, "<=", s.ratio_limit));
  return r;
}

}  // namespace zoll
