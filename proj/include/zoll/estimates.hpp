#pragma once

// Checks of the multilinear space-time estimates on zonal data: Strichartz,
// trilinear cluster, trilinear Strichartz, phase integrals, decay, crude bounds.
//
// Space integrals use the zonal quadrature with enough nodes for the product
// degree, so they carry no sampling error. Time integrals over tau_0 = [0, 32 pi]
// are exact for even powers: |u|^{2q} is a trigonometric polynomial with
// integer frequencies, so a uniform grid finer than its bandwidth is exact.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <random>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

#include "zoll/detail/fft.hpp"
#include "zoll/detail/numeric.hpp"
#include "zoll/detail/random.hpp"
#include "zoll/flow.hpp"
#include "zoll/parallel.hpp"
#include "zoll/scaling.hpp"
#include "zoll/sphere.hpp"

namespace zoll {

struct SpaceTimeFactor {
  const ZonalField* field = nullptr;
  double power = 2.0;
};

namespace detail {

struct FactorPlan {
  const ZonalField* field;
  double power;
  int half_power;  ///< power/2 when power is an even integer, else -1
  std::int64_t kmin, kmax;
};

inline int even_half(double p) {
  const double h = p / 2.0;
  return (h == std::floor(h) && h >= 1.0 && h <= 64.0) ? static_cast<int>(h) : -1;
}

inline double abs_pow(double norm2, const FactorPlan& f) {
  if (f.half_power > 0) {
    double r = norm2;
    for (int i = 1; i < f.half_power; ++i) r *= norm2;
    return r;
  }
  return std::pow(norm2, f.power / 2.0);
}

}  // namespace detail

/// Integral over tau_0 x S^3 of prod_j |e^{itA} f_j|^{p_j}.
///
/// Each factor is evolved by the Laplacian flow. The modified flow is accepted
/// for fields supported in k = 0 alone or in k >= 1 alone: under the round
/// scheme it differs from the Laplacian flow there by a global phase, which no
/// modulus sees. Times t and t + pi give mirror-image profiles, so only half
/// the period is sampled; with real coefficients |u(-t)| = |u(t)| as well and
/// a quarter period suffices.
inline double spacetime_integral(const std::vector<SpaceTimeFactor>& factors, Flow flow = Flow::laplacian,
                                 const ClusterScheme& scheme = ClusterScheme(), unsigned threads = 1) {
  if (factors.empty()) throw std::invalid_argument("spacetime_integral: no factors");
  std::vector<detail::FactorPlan> plan;
  std::int64_t bandwidth = 0, degree = 0;
  bool real = true;
  for (const auto& f : factors) {
    if (f.field == nullptr) throw std::invalid_argument("spacetime_integral: null field");
    if (!(f.power > 0.0)) throw std::invalid_argument("spacetime_integral: powers must be positive");
    std::int64_t lo = -1, hi = -1;
    for (std::int64_t k = 0; k <= f.field->cutoff(); ++k) {
      if ((*f.field)[k] != cplx{}) {
        if (lo < 0) lo = k;
        hi = k;
      }
    }
    if (lo < 0) return 0.0;
    for (const auto& c : f.field->coeffs) real = real && c.imag() == 0.0;
    if (flow == Flow::modified) {
      if (lo == 0 && hi > 0) {
        throw std::invalid_argument("spacetime_integral: modified flow field mixes k = 0 and k >= 1");
      }
      for (std::int64_t k = std::max<std::int64_t>(lo, 1); k <= hi; ++k) {
        if (flow_rate16(Flow::modified, k, scheme) != 16 * (eigenvalue(k) + 1)) {
          throw std::invalid_argument("spacetime_integral: modified flow needs the round cluster scheme");
        }
      }
    }
    const auto q = static_cast<std::int64_t>(std::ceil(f.power / 2.0));
    bandwidth += q * (eigenvalue(hi) - eigenvalue(lo));
    degree += q * hi;
    plan.push_back({f.field, f.power, detail::even_half(f.power), lo, hi});
  }
  // Time grid t_m = 2 pi m / L with L > bandwidth a multiple of 2 (4 if real);
  // nodes with M + 1 smooth.
  const std::int64_t grain = real ? 4 : 2;
  const std::int64_t L = (bandwidth + grain) / grain * grain;
  const std::int64_t M = std::max<std::int64_t>(detail::smooth_size_at_least(degree + 2) - 1,
                                                plan.front().kmax + 1);
  std::int64_t kcap = 0;
  for (const auto& f : plan) kcap = std::max(kcap, f.kmax);
  if (kcap + 1 > M) throw std::logic_error("spacetime_integral: node count below degree");
  const auto rule = quadrature_rule(M);
  // Node value = (F_j - F_{P-j}) * scale_j; the scales of all factors go into one weight.
  std::vector<double> weight(rule.weights);
  for (std::size_t j = 0; j < weight.size(); ++j) {
    const double scale = 1.0 / (2.0 * std::sin(rule.nodes[j]) * std::sqrt(kSphereVolume));
    for (const auto& f : plan) weight[j] *= std::pow(scale, f.power);
  }
  // Sampled m and their multiplicity in the full period.
  const std::int64_t half = real ? L / 4 + 1 : L / 2;
  auto multiplicity = [&](std::int64_t m) { return real && m != 0 && m != L / 4 ? 4.0 : 2.0; };
  constexpr std::int64_t kChunk = 1 << 15;
  const auto chunks = static_cast<std::size_t>((half + kChunk - 1) / kChunk);
  std::vector<double> partial(chunks, 0.0);
  const auto Mz = static_cast<std::size_t>(M);

  parallel_for(chunks, threads, [&](std::size_t c) {
    const std::int64_t m0 = static_cast<std::int64_t>(c) * kChunk;
    const std::int64_t m1 = std::min(half, m0 + kChunk);
    // Node values as sine sums: with F_j = sum_k a_k exp(i pi (k+1) j / (M+1)),
    // sum_k a_k sin((k+1) theta_j) = (F_j - F_{2(M+1)-j}) / 2i.
    const std::size_t P = 2 * (Mz + 1);
    detail::ComplexFft fft(P, +1, true, true);
    auto buf = fft.data();
    const auto res = fft.output();
    std::vector<std::vector<cplx>> phase(plan.size()), step(plan.size());
    auto grid_phase = [&](std::int64_t m, std::int64_t k) {
      const std::int64_t idx = static_cast<std::int64_t>((static_cast<__int128>(m) * eigenvalue(k)) % L);
      const double a = -2.0 * kPi * static_cast<double>(idx) / static_cast<double>(L);
      return cplx(std::cos(a), std::sin(a));
    };
    for (std::size_t f = 0; f < plan.size(); ++f) {
      for (std::int64_t k = plan[f].kmin; k <= plan[f].kmax; ++k) step[f].push_back(grid_phase(1, k));
      phase[f].resize(step[f].size());
    }
    std::vector<double> prod(Mz);
    detail::CompensatedSum acc;
    for (std::int64_t m = m0; m < m1; ++m) {
      double sum = 0.0;
      for (std::size_t f = 0; f < plan.size(); ++f) {
        const auto& fp = plan[f];
        auto& ph = phase[f];
        const bool resync = (m - m0) % 64 == 0;
        if (plan.size() > 1 || m == m0) std::fill(buf.begin(), buf.end(), cplx{});
        for (std::int64_t k = fp.kmin; k <= fp.kmax; ++k) {
          const auto i = static_cast<std::size_t>(k - fp.kmin);
          ph[i] = resync ? grid_phase(m, k) : detail::cmul(ph[i], step[f][i]);
          buf[static_cast<std::size_t>(k) + 1] = detail::cmul((*fp.field)[k], ph[i]);
        }
        fft.execute();
        const bool first = f == 0, last = f + 1 == plan.size();
        if (plan.size() == 1 && fp.half_power == 3) {
          for (std::size_t j = 0; j < Mz; ++j) {
            const cplx d = res[j + 1] - res[P - j - 1];
            const double a = d.real() * d.real() + d.imag() * d.imag();
            sum += weight[j] * (a * a * a);
          }
          continue;
        }
        for (std::size_t j = 0; j < Mz; ++j) {
          const cplx d = res[j + 1] - res[P - j - 1];
          double v = detail::abs_pow(d.real() * d.real() + d.imag() * d.imag(), fp);
          if (!first) v *= prod[j];
          if (last) {
            sum += weight[j] * v;
          } else {
            prod[j] = v;
          }
        }
      }
      acc.add(multiplicity(m) * sum);
    }
    partial[c] = acc.value().real();
  });
  double total = 0.0;
  for (double p : partial) total += p;
  // 16 periods of length 2 pi in tau_0; grid spacing 2 pi / L.
  return 16.0 * (2.0 * kPi / static_cast<double>(L)) * total;
}

/// ||e^{itA} phi||_{L^p(tau_0 x S^3)}.
inline double spacetime_lp_norm(const ZonalField& phi, double p, Flow flow = Flow::laplacian,
                                const ClusterScheme& scheme = ClusterScheme(), unsigned threads = 1) {
  return std::pow(spacetime_integral({{&phi, p}}, flow, scheme, threads), 1.0 / p);
}

/// Gaussian coefficients (complex, or real if `real`) on the degrees whose
/// cluster lies in the block and in the cluster window [first, second) if
/// given; L2-normalized.
inline ZonalField random_block_field(std::mt19937_64& rng, DyadicBlock block,
                                     const ClusterScheme& scheme = ClusterScheme(),
                                     std::optional<std::pair<std::int64_t, std::int64_t>> window = {},
                                     bool real = false) {
  std::vector<std::int64_t> degrees;
  for (auto k : degrees_in_block(scheme, block, block.last() + 2)) {
    const auto n = cluster_of_degree(scheme, k);
    if (!window || (n >= window->first && n < window->second)) degrees.push_back(k);
  }
  if (degrees.empty()) throw std::invalid_argument("random_block_field: block or window holds no degree");
  ZonalField f(degrees.back());
  std::normal_distribution<double> g;
  for (auto k : degrees) {
    const double re = g(rng);
    f.coeffs[static_cast<std::size_t>(k)] = {re, real ? 0.0 : g(rng)};
  }
  f *= 1.0 / l2_norm(f);
  return f;
}

// ---------------------------------------------------------------------------
// Strichartz

struct StrichartzOptions {
  double p = 6.0;
  std::vector<std::int64_t> Ns{4, 8, 16, 32, 64, 128, 256};
  int trials = 32;
  bool real_data = true;  ///< real coefficients halve the time grid
  Flow flow = Flow::laplacian;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

inline double strichartz_exponent(double p) { return 1.5 - 5.0 / p; }

/// Per N, the largest ||P_N e^{itA} phi||_{L^p} over random normalized phi in the block.
inline ScalingReport strichartz_check(const StrichartzOptions& opt, const ClusterScheme& scheme = ClusterScheme()) {
  if (!(opt.p > 4.0)) throw std::invalid_argument("strichartz_check: need p > 4");
  if (opt.trials < 1) throw std::invalid_argument("strichartz_check: need trials >= 1");
  std::vector<double> value(opt.Ns.size() * static_cast<std::size_t>(opt.trials));
  parallel_for(value.size(), opt.threads, [&](std::size_t i) {
    const auto n = i / static_cast<std::size_t>(opt.trials);
    const auto trial = i % static_cast<std::size_t>(opt.trials);
    auto rng = detail::make_rng(opt.seed, {static_cast<std::uint64_t>(opt.Ns[n]), trial});
    const auto phi = random_block_field(rng, DyadicBlock(opt.Ns[n]), scheme, std::nullopt, opt.real_data);
    value[i] = spacetime_lp_norm(phi, opt.p, opt.flow, scheme);
  });
  std::vector<ScalingSample> samples;
  for (std::size_t n = 0; n < opt.Ns.size(); ++n) {
    double best = 0.0;
    for (int t = 0; t < opt.trials; ++t) best = std::max(best, value[n * static_cast<std::size_t>(opt.trials) + static_cast<std::size_t>(t)]);
    samples.push_back({static_cast<double>(opt.Ns[n]), best});
  }
  return fit_scaling(std::move(samples));
}

// ---------------------------------------------------------------------------
// Trilinear estimates

struct TrilinearSample {
  std::array<std::int64_t, 3> n{};  ///< degrees or dyadic blocks, non-increasing
  double measured = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
  std::string tag;
};

namespace detail {
inline void require_ordered(std::int64_t a, std::int64_t b, std::int64_t c, const char* who) {
  if (!(a >= b && b >= c && c >= 0)) throw std::invalid_argument(std::string(who) + ": need n1 >= n2 >= n3 >= 0");
}
}  // namespace detail

/// integral over S^3 of prod_j e_{n_j}, exact.
inline double zonal_product_integral(const std::vector<std::int64_t>& degrees) {
  std::int64_t total = 0;
  for (auto n : degrees) {
    if (n < 0) throw std::invalid_argument("zonal_product_integral: negative degree");
    total += n;
  }
  const auto rule = quadrature_rule(total / 2 + 1);
  double s = 0.0;
  for (std::size_t j = 0; j < rule.nodes.size(); ++j) {
    double v = rule.weights[j];
    for (auto n : degrees) v *= basis_value(n, rule.nodes[j]);
    s += v;
  }
  return s;
}

/// ||e_{n1} e_{n2} e_{n3}||_{L^2(S^3)} against <n2>^{1/2+eps} <n3>^{1-eps}.
inline TrilinearSample trilinear_cluster_check(std::int64_t n1, std::int64_t n2, std::int64_t n3, double eps = 0.1) {
  detail::require_ordered(n1, n2, n3, "trilinear_cluster_check");
  TrilinearSample s{{n1, n2, n3}, 0.0, 0.0, 0.0, "eq:tri-sogge"};
  s.measured = std::sqrt(zonal_product_integral({n1, n1, n2, n2, n3, n3}));
  s.bound = std::pow(bracket(static_cast<double>(n2)), 0.5 + eps) * std::pow(bracket(static_cast<double>(n3)), 1.0 - eps);
  s.ratio = s.measured / s.bound;
  return s;
}

struct TrilinearStrichartzOptions {
  std::optional<std::pair<std::int64_t, std::int64_t>> window;  ///< J in cluster indices; whole N1 block if empty
  double delta = 0.25;
  double eta = 0.1;
  int trials = 4;
  std::uint64_t seed = 1;
  Flow flow = Flow::modified;
};

/// ||prod_j P_{N_j} e^{itA} phi_j||_{L^2(tau_0 x S^3)}, phi_1 restricted to J,
/// against |J|^delta max(N2,1)^{1/2+eta} <N3>^{3/2-eta-delta}; largest ratio over trials.
inline TrilinearSample trilinear_strichartz_check(std::int64_t N1, std::int64_t N2, std::int64_t N3,
                                                  const TrilinearStrichartzOptions& opt = {},
                                                  const ClusterScheme& scheme = ClusterScheme()) {
  detail::require_ordered(N1, N2, N3, "trilinear_strichartz_check");
  const DyadicBlock b1(N1), b2(N2), b3(N3);
  auto window = opt.window.value_or(std::pair{b1.first(), b1.last() + 1});
  if (window.first < b1.first() || window.second > b1.last() + 1 || window.first >= window.second) {
    throw std::invalid_argument("trilinear_strichartz_check: window must be a non-empty part of the N1 block");
  }
  TrilinearSample s{{N1, N2, N3}, 0.0, 0.0, 0.0, "eq:lin-tri-str"};
  const double J = static_cast<double>(window.second - window.first);
  s.bound = std::pow(J, opt.delta) * std::pow(static_cast<double>(std::max<std::int64_t>(N2, 1)), 0.5 + opt.eta) *
            std::pow(bracket(static_cast<double>(N3)), 1.5 - opt.eta - opt.delta);
  for (int t = 0; t < opt.trials; ++t) {
    auto rng = detail::make_rng(opt.seed, {static_cast<std::uint64_t>(N1), static_cast<std::uint64_t>(N2),
                                           static_cast<std::uint64_t>(N3), static_cast<std::uint64_t>(t)});
    const auto f1 = random_block_field(rng, b1, scheme, window);
    const auto f2 = random_block_field(rng, b2, scheme);
    const auto f3 = random_block_field(rng, b3, scheme);
    const double m = std::sqrt(spacetime_integral({{&f1, 2.0}, {&f2, 2.0}, {&f3, 2.0}}, opt.flow, scheme));
    if (m / s.bound > s.ratio) {
      s.measured = m;
      s.ratio = m / s.bound;
    }
  }
  return s;
}

/// Time-constant block fields on an interval of length tau: |tau|^{1/2} ||f1 f2 f3||_{L^2}
/// against |tau|^{1/2} max(N2,1)^{3/2} max(N3,1)^{3/2}; largest ratio over trials.
inline TrilinearSample crude_bound_check(std::int64_t N1, std::int64_t N2, std::int64_t N3, double tau = 1.0,
                                         int trials = 4, std::uint64_t seed = 1,
                                         const ClusterScheme& scheme = ClusterScheme()) {
  detail::require_ordered(N1, N2, N3, "crude_bound_check");
  if (!(tau > 0.0)) throw std::invalid_argument("crude_bound_check: tau must be positive");
  TrilinearSample s{{N1, N2, N3}, 0.0, 0.0, 0.0, "eq:crude"};
  s.bound = std::sqrt(tau) * std::pow(static_cast<double>(std::max<std::int64_t>(N2, 1)), 1.5) *
            std::pow(static_cast<double>(std::max<std::int64_t>(N3, 1)), 1.5);
  for (int t = 0; t < trials; ++t) {
    auto rng = detail::make_rng(seed, {static_cast<std::uint64_t>(N1), static_cast<std::uint64_t>(N2),
                                       static_cast<std::uint64_t>(N3), static_cast<std::uint64_t>(t), 7});
    const auto f1 = random_block_field(rng, DyadicBlock(N1), scheme);
    const auto f2 = random_block_field(rng, DyadicBlock(N2), scheme);
    const auto f3 = random_block_field(rng, DyadicBlock(N3), scheme);
    const std::int64_t M = f1.cutoff() + f2.cutoff() + f3.cutoff() + 1;
    const auto rule = quadrature_rule(M);
    const auto v1 = synthesize(f1, rule.nodes), v2 = synthesize(f2, rule.nodes), v3 = synthesize(f3, rule.nodes);
    double acc = 0.0;
    for (std::size_t j = 0; j < rule.nodes.size(); ++j) acc += rule.weights[j] * std::norm(v1[j] * v2[j] * v3[j]);
    const double m = std::sqrt(tau * acc);
    if (m / s.bound > s.ratio) {
      s.measured = m;
      s.ratio = m / s.bound;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Phase integrals

/// 16 sigma = sum_j 16 (mu_{n'_j}^2 - mu_{n_j}^2), an integer.
inline std::int64_t phase_sigma16(const std::array<std::int64_t, 3>& n, const std::array<std::int64_t, 3>& np,
                                  const ClusterScheme& scheme = ClusterScheme()) {
  std::int64_t s = 0;
  for (int j = 0; j < 3; ++j) s += scheme.mu_sq_times16(np[static_cast<std::size_t>(j)]) - scheme.mu_sq_times16(n[static_cast<std::size_t>(j)]);
  return s;
}

/// integral_0^T exp(i sigma t) dt for sigma = sigma16/16. On the base interval
/// T = 32 pi the phase 2 pi sigma16 is a whole number of turns and the value is exact.
inline cplx phase_integral_sigma16(std::int64_t sigma16, std::optional<double> T = std::nullopt) {
  const double len = T.value_or(kBasePeriod);
  if (sigma16 == 0) return len;
  if (!T) return 0.0;
  const double sigma = static_cast<double>(sigma16) / 16.0;
  const double x = sigma * len;
  if (std::abs(x) < 1e-4) return len * cplx(1.0 - x * x / 6.0, x / 2.0 - x * x * x / 24.0);
  // exp(i sigma T) = unit_phase(-sigma16, T/16)
  return (detail::unit_phase(-sigma16, len / 16.0) - 1.0) / cplx(0.0, sigma);
}

inline cplx phase_integral(const std::array<std::int64_t, 3>& n, const std::array<std::int64_t, 3>& np,
                           const ClusterScheme& scheme = ClusterScheme(), std::optional<double> T = std::nullopt) {
  return phase_integral_sigma16(phase_sigma16(n, np, scheme), T);
}

struct OrthogonalityScan {
  double max_abs = 0.0;            ///< max |I| over separated pairs
  double max_envelope_ratio = 0.0; ///< max |I| |sigma| / 2; at most 1
  double min_sigma = 0.0;          ///< min |sigma| over separated pairs
  double sigma_floor = 0.0;        ///< (min_sep - 8) N2^2
  std::int64_t pairs = 0;
};

/// Over n1 in J_m, n1' in J_m' (J_m = [m N2^2/N1, (m+1) N2^2/N1) inside the N1
/// block, |m - m'| >= min_sep) and n2, n3, n2', n3' in the N2 block.
inline OrthogonalityScan block_orthogonality_scan(std::int64_t N1, std::int64_t N2,
                                                  const ClusterScheme& scheme = ClusterScheme(),
                                                  std::optional<double> T = std::nullopt, std::int64_t min_sep = 10) {
  const DyadicBlock b1(N1), b2(N2);
  if (N2 < 1 || N2 > N1 || N2 * N2 < N1) {
    throw std::invalid_argument("block_orthogonality_scan: need 1 <= N2 <= N1 <= N2^2");
  }
  std::set<std::int64_t> pair_diffs;
  for (auto a = b2.first(); a <= b2.last(); ++a)
    for (auto b = b2.first(); b <= b2.last(); ++b)
      for (auto c = b2.first(); c <= b2.last(); ++c)
        for (auto d = b2.first(); d <= b2.last(); ++d)
          pair_diffs.insert(scheme.mu_sq_times16(c) + scheme.mu_sq_times16(d) - scheme.mu_sq_times16(a) -
                            scheme.mu_sq_times16(b));
  OrthogonalityScan r;
  r.min_sigma = INFINITY;
  r.sigma_floor = static_cast<double>((min_sep - 8) * N2 * N2);
  auto cell = [&](std::int64_t n) { return (n * N1) / (N2 * N2); };
  for (auto n1 = b1.first(); n1 <= b1.last(); ++n1) {
    for (auto n1p = b1.first(); n1p <= b1.last(); ++n1p) {
      if (std::abs(cell(n1) - cell(n1p)) < min_sep) continue;
      const std::int64_t base = scheme.mu_sq_times16(n1p) - scheme.mu_sq_times16(n1);
      for (auto d : pair_diffs) {
        const std::int64_t s16 = base + d;
        const double mag = std::abs(phase_integral_sigma16(s16, T));
        const double sigma = std::abs(static_cast<double>(s16)) / 16.0;
        r.max_abs = std::max(r.max_abs, mag);
        r.max_envelope_ratio = std::max(r.max_envelope_ratio, mag * sigma / 2.0);
        r.min_sigma = std::min(r.min_sigma, sigma);
        ++r.pairs;
      }
    }
  }
  return r;
}

// ---------------------------------------------------------------------------
// Decay

/// |integral e_{n0} e_{n1} e_{n2} e_{n3} dV|; exactly zero when n0 > n1 + n2 + n3.
inline double decay_check(std::int64_t n0, std::int64_t n1, std::int64_t n2, std::int64_t n3) {
  return std::abs(zonal_product_integral({n0, n1, n2, n3}));
}

}  // namespace zoll
