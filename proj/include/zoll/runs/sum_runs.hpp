#pragma once

// Exponential-sum and circle-method experiments.

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "zoll/circle.hpp"
#include "zoll/detail/random.hpp"
#include "zoll/expsum.hpp"
#include "zoll/parallel.hpp"
#include "zoll/report.hpp"
#include "zoll/scaling.hpp"

namespace zoll {

namespace detail {
inline std::string join_ints(const std::vector<std::int64_t>& v) {
  std::string s;
  for (auto x : v) s += (s.empty() ? "" : ",") + std::to_string(x);
  return s;
}

/// Rows N, measured, fit and the slope footer of a scaling sweep.
inline void add_scaling(Report& r, const ScalingReport& sr, const std::string& row_tag) {
  r.columns = {"N", "measured", "fit"};
  for (const auto& s : sr.samples) r.add_row(row_tag, {s.size, s.value, sr.predicted(s.size)});
  r.footer = {{"slope", sr.slope}, {"constant", sr.constant}, {"residual", sr.residual}};
}
}  // namespace detail

struct ExpsumSettings {
  LemmaLpOptions lp;
  double slack = 0.1;
};

inline Report run_expsum(const ExpsumSettings& s) {
  Report r;
  r.id = "expsum";
  r.tag = "eq:lp";
  r.param("p", static_cast<double>(s.lp.p));
  r.param("Ns", detail::join_ints(s.lp.Ns));
  std::string fams;
  for (auto f : s.lp.families) fams += (fams.empty() ? "" : ",") + std::string(to_string(f));
  r.param("families", fams);
  r.param("bs", detail::join_ints(s.lp.bs));
  r.param("trials", static_cast<double>(s.lp.trials));
  r.param("alpha", static_cast<double>(s.lp.alpha));
  r.param("seed", static_cast<double>(s.lp.seed));
  const auto sr = verify_lemma_lp(s.lp);
  detail::add_scaling(r, sr, "eq:lp");
  const double predicted = lemma_lp_exponent(s.lp.p);
  r.footer.emplace_back("predicted_exponent", predicted);
  const auto v = fit_and_judge(sr, predicted, s.slack);
  r.checks.push_back(make_check("slope", v.slope, "<=", predicted + s.slack));
  r.notes.push_back("measured = max over families, b and trials of the exact L^p(0,32pi) norm, "
                    "l2-normalized coefficients");
  return r;
}

// ---------------------------------------------------------------------------

struct CircleSettings {
  std::int64_t k_max = 10000;
  std::vector<std::int64_t> l4_Ns{8, 16, 32, 64, 128, 256, 512};
  std::vector<CoeffFamily> l4_families{CoeffFamily::constant, CoeffFamily::random_phase, CoeffFamily::gaussian};
  std::vector<std::int64_t> l4_bs{0, 1000, 1000000};
  int l4_trials = 1;
  double l4_slope_limit = 0.1;
  std::vector<std::int64_t> major_Ns{16, 32, 64, 128, 256};
  std::vector<std::int64_t> major_bs{0, 37};
  std::int64_t q_max = 32;
  std::vector<double> offsets{0.0, 0.1, -0.3, 0.5, 0.9, -0.99};  ///< in units of 1/(qN)
  double major_slope_limit = 0.1;
  std::vector<std::int64_t> minor_Ns{16, 32, 64, 128};
  std::vector<std::int64_t> minor_bs{0, 1, 37};
  double nu = 0.5;
  std::int64_t minor_grid_factor = 16;  ///< grid = factor (b + 2N)^2
  std::vector<std::int64_t> level_Ns{16, 32, 64, 128};
  int level_count = 9;
  std::int64_t level_grid_factor = 64;  ///< grid = factor (2N)^2
  std::int64_t mc_samples = 100000;
  double level_exponent = 0.05;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// divisor_count against a histogram of all pairs n1, n2 <= N with n1 (n2 + b) <= k_max.
inline Report run_divisor_check(const CircleSettings& s) {
  Report r;
  r.id = "circle-divisor";
  r.tag = "app:divisor";
  r.param("k_max", static_cast<double>(s.k_max));
  r.columns = {"b", "N", "checked", "mismatches", "max_count"};
  const std::vector<std::pair<std::int64_t, std::int64_t>> cases{
      {0, s.k_max}, {0, 100}, {0, 12}, {1, 1000}, {7, 60}, {100, 12}, {999, 5000}};
  double total = 0.0;
  for (auto [b, N] : cases) {
    std::vector<std::int64_t> hist(static_cast<std::size_t>(s.k_max + 1), 0);
    for (std::int64_t n1 = 1; n1 <= N && n1 * (1 + b) <= s.k_max; ++n1) {
      for (std::int64_t n2 = 1; n2 <= N && n1 * (n2 + b) <= s.k_max; ++n2) ++hist[static_cast<std::size_t>(n1 * (n2 + b))];
    }
    double bad = 0.0, mx = 0.0;
    for (std::int64_t k = 1; k <= s.k_max; ++k) {
      const auto c = divisor_count(k, b, N);
      bad += c != hist[static_cast<std::size_t>(k)] ? 1.0 : 0.0;
      mx = std::max(mx, static_cast<double>(c));
    }
    total += bad;
    r.add_row("app:divisor", {static_cast<double>(b), static_cast<double>(N), static_cast<double>(s.k_max), bad, mx});
  }
  r.footer.emplace_back("mismatches", total);
  r.checks.push_back(make_check("mismatches", total, "==", 0.0));
  return r;
}

/// Exact L^4(0,1) norms of l2-normalized windowed sums; slope of the per-N maximum.
inline Report run_l4_check(const CircleSettings& s) {
  Report r;
  r.id = "circle-l4";
  r.tag = "eq:l4";
  r.param("Ns", detail::join_ints(s.l4_Ns));
  r.param("bs", detail::join_ints(s.l4_bs));
  r.param("trials", static_cast<double>(s.l4_trials));
  struct Job {
    std::size_t n;
    std::int64_t b;
    CoeffFamily fam;
    int trial;
  };
  std::vector<Job> jobs;
  for (std::size_t n = 0; n < s.l4_Ns.size(); ++n)
    for (auto fam : s.l4_families)
      for (auto b : s.l4_bs)
        for (int t = 0; t < (fam == CoeffFamily::constant ? 1 : s.l4_trials); ++t) jobs.push_back({n, b, fam, t});
  std::vector<double> val(jobs.size());
  parallel_for(jobs.size(), s.threads, [&](std::size_t i) {
    const auto& j = jobs[i];
    const auto N = s.l4_Ns[j.n];
    auto rng = detail::make_rng(s.seed, {static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(j.fam),
                                         static_cast<std::uint64_t>(j.b), static_cast<std::uint64_t>(j.trial), 4});
    const WindowSequence w(j.b, N);
    val[i] = windowed_l4_norm(WindowedSum(w, make_coefficients(j.fam, w.size(), rng)));
  });
  std::vector<ScalingSample> samples;
  for (std::size_t n = 0; n < s.l4_Ns.size(); ++n) {
    double best = 0.0;
    for (std::size_t i = 0; i < jobs.size(); ++i) {
      if (jobs[i].n == n) best = std::max(best, val[i]);
    }
    samples.push_back({static_cast<double>(s.l4_Ns[n]), best});
  }
  const auto sr = fit_scaling(std::move(samples));
  detail::add_scaling(r, sr, "eq:l4");
  r.checks.push_back(make_check("slope", sr.slope, "<=", s.l4_slope_limit));
  return r;
}

/// Per-N maximum of |f(t)| / (q^{-1/2} (|t - a/q| + N^{-2})^{-1/2}) over reduced a/q,
/// q <= q_max, and offsets t - a/q = c / (qN).
inline Report run_major_arcs(const CircleSettings& s) {
  Report r;
  r.id = "circle-major";
  r.tag = "eq:lem318-alt";
  r.param("Ns", detail::join_ints(s.major_Ns));
  r.param("bs", detail::join_ints(s.major_bs));
  r.param("q_max", static_cast<double>(s.q_max));
  r.columns = {"N", "max_ratio", "points"};
  std::vector<double> best(s.major_Ns.size(), 0.0), count(s.major_Ns.size(), 0.0);
  parallel_for(s.major_Ns.size(), s.threads, [&](std::size_t i) {
    const auto N = s.major_Ns[i];
    for (auto b : s.major_bs) {
      const WindowSequence w(b, N);
      for (std::int64_t q = 2; q <= std::min(s.q_max, N - 1); ++q) {
        for (std::int64_t a = 1; a < q; ++a) {
          if (detail::gcd64(a, q) != 1) continue;
          for (double c : s.offsets) {
            const double t = static_cast<double>(a) / static_cast<double>(q) +
                             c / (static_cast<double>(q) * static_cast<double>(N));
            best[i] = std::max(best[i], major_arc_check(w, a, q, t).ratio);
            count[i] += 1.0;
          }
        }
      }
    }
  });
  std::vector<ScalingSample> samples;
  for (std::size_t i = 0; i < s.major_Ns.size(); ++i) {
    r.add_row("eq:lem318-alt", {static_cast<double>(s.major_Ns[i]), best[i], count[i]});
    samples.push_back({static_cast<double>(s.major_Ns[i]), best[i]});
  }
  const auto sr = fit_scaling(std::move(samples));
  r.footer = {{"slope", sr.slope}, {"major_constant", *std::max_element(best.begin(), best.end())}};
  r.checks.push_back(make_check("slope", sr.slope, "<=", s.major_slope_limit));
  r.notes.push_back("uniform boundedness is judged by the log-log slope of the per-N maximum");
  return r;
}

/// Minor-arc maxima |f(t)| / N^{1 - nu/2}, judged against the major-arc constant.
inline Report run_minor_arcs(const CircleSettings& s, double major_constant) {
  Report r;
  r.id = "circle-minor";
  r.tag = "eq:outsidemj";
  r.param("Ns", detail::join_ints(s.minor_Ns));
  r.param("bs", detail::join_ints(s.minor_bs));
  r.param("nu", s.nu);
  r.param("grid_factor", static_cast<double>(s.minor_grid_factor));
  r.columns = {"N", "b", "max_ratio", "t_at_max", "scanned", "excluded", "dirichlet_violations"};
  struct Job {
    std::int64_t N, b;
  };
  std::vector<Job> jobs;
  for (auto N : s.minor_Ns)
    for (auto b : s.minor_bs) jobs.push_back({N, b});
  std::vector<MinorArcScan> out(jobs.size());
  parallel_for(jobs.size(), s.threads, [&](std::size_t i) {
    const auto [N, b] = jobs[i];
    out[i] = minor_arc_scan(WindowSequence(b, N), s.nu, s.minor_grid_factor * (b + 2 * N) * (b + 2 * N));
  });
  double worst = 0.0;
  for (std::size_t i = 0; i < jobs.size(); ++i) {
    const auto& m = out[i];
    worst = std::max(worst, m.max_ratio);
    r.add_row("eq:outsidemj", {static_cast<double>(jobs[i].N), static_cast<double>(jobs[i].b), m.max_ratio,
                               m.t_at_max, static_cast<double>(m.scanned), static_cast<double>(m.excluded),
                               static_cast<double>(m.dirichlet_violations)});
  }
  r.footer = {{"max_ratio", worst}, {"major_constant", major_constant}};
  r.checks.push_back(make_check("max_ratio", worst, "<=", major_constant));
  r.notes.push_back("the minor-arc bound inherits the constant measured on the major arcs");
  return r;
}

/// Superlevel measures on a dense grid; C is fitted at the smallest N and every
/// larger N must satisfy m <= C N^e lambda^-4 up to the grid error bound.
inline Report run_superlevel(const CircleSettings& s) {
  Report r;
  r.id = "circle-superlevel";
  r.tag = "eq:distr";
  r.param("Ns", detail::join_ints(s.level_Ns));
  r.param("levels", static_cast<double>(s.level_count));
  r.param("grid_factor", static_cast<double>(s.level_grid_factor));
  r.param("exponent", s.level_exponent);
  r.columns = {"N", "lambda", "measure", "grid_error", "mc_measure", "mc_std_error", "bound", "ratio"};
  struct Cell {
    double lambda, measure, error, mc, mc_err;
  };
  std::vector<std::vector<Cell>> cells(s.level_Ns.size());
  parallel_for(s.level_Ns.size(), s.threads, [&](std::size_t i) {
    const auto N = s.level_Ns[i];
    const WindowSequence w(0, N);
    std::vector<double> lambdas;
    for (int l = 0; l < s.level_count; ++l) {
      const double frac = s.level_count > 1 ? static_cast<double>(l) / (s.level_count - 1) : 0.0;
      lambdas.push_back(std::pow(static_cast<double>(N), 0.25 + 0.25 * frac));
    }
    cells[i].assign(lambdas.size(), {0.0, 0.0, 0.0, 0.0, 0.0});
    for (auto fam : {CoeffFamily::constant, CoeffFamily::random_phase}) {
      auto rng = detail::make_rng(s.seed, {static_cast<std::uint64_t>(N), static_cast<std::uint64_t>(fam), 0xd1});
      const WindowedSum ws(w, make_coefficients(fam, w.size(), rng));
      const auto mc = superlevel_measures(ws, lambdas, s.mc_samples, rng());
      for (std::size_t l = 0; l < lambdas.size(); ++l) {
        const auto d = superlevel_measure_dense(ws, lambdas[l], s.level_grid_factor * 4 * N * N);
        auto& c = cells[i][l];
        c.lambda = lambdas[l];
        if (d.measure >= c.measure) {
          c.measure = d.measure;
          c.error = d.error_bound;
        }
        if (mc[l].measure >= c.mc) {
          c.mc = mc[l].measure;
          c.mc_err = mc[l].std_error;
        }
      }
    }
  });
  const double N0 = static_cast<double>(s.level_Ns.front());
  double C = 0.0;
  for (const auto& c : cells.front()) C = std::max(C, c.measure * std::pow(c.lambda, 4) / std::pow(N0, s.level_exponent));
  double worst = 0.0;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const double N = static_cast<double>(s.level_Ns[i]);
    for (const auto& c : cells[i]) {
      const double bound = C * std::pow(N, s.level_exponent) / std::pow(c.lambda, 4);
      const double excess = std::max(0.0, c.measure - c.error) / bound;
      if (i > 0) worst = std::max(worst, excess);
      r.add_row("eq:distr", {N, c.lambda, c.measure, c.error, c.mc, c.mc_err, bound, c.measure / bound});
    }
  }
  r.footer = {{"fitted_constant", C}, {"max_excess", worst}};
  r.checks.push_back(make_check("max_excess", worst, "<=", 1.0));
  r.notes.push_back("max_excess = max over N > N_min of (measure - grid_error) / bound; families: constant, "
                    "random_phase (max taken)");
  return r;
}

}  // namespace zoll
