#pragma once

// Zonal quintic NLS  i u_t + Delta u = sign |u|^4 u  on S^3.
//
// Strang splitting, the Duhamel operator by an exponential integrator,
// Picard iteration of the integral equation
//   u(t) = e^{it Delta} phi - i I(sign |u|^4 u)(t),
// and conservation / Lipschitz diagnostics.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zoll/detail/numeric.hpp"
#include "zoll/detail/random.hpp"
#include "zoll/flow.hpp"
#include "zoll/sphere.hpp"
#include "zoll/variation.hpp"

namespace zoll {

inline double mass(const ZonalField& u) {
  double s = 0.0;
  for (const auto& c : u.coeffs) s += c.real() * c.real() + c.imag() * c.imag();
  return 0.5 * s;
}

inline double kinetic_energy(const ZonalField& u) {
  double s = 0.0;
  for (std::int64_t k = 0; k <= u.cutoff(); ++k) s += static_cast<double>(eigenvalue(k)) * std::norm(u[k]);
  return 0.5 * s;
}

/// (1/6) integral |u|^6, exact on 3K+1 nodes. With this factor the energy is
/// the Hamiltonian of the flow (its gradient is |u|^4 u); a factor 1/3 would
/// not be conserved.
inline double potential_energy(const ZonalField& u, const ZonalTransform& tr) {
  if (tr.nodes() < 3 * u.cutoff() + 1) throw std::invalid_argument("potential_energy: too few nodes");
  const auto v = tr.synthesize(u);
  double s = 0.0;
  for (std::size_t j = 0; j < v.size(); ++j) {
    const double a = std::norm(v[j]);
    s += tr.rule().weights[j] * a * a * a;
  }
  return s / 6.0;
}

/// Kinetic energy plus sign times the potential energy.
inline double energy(const ZonalField& u, int sign) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("energy: sign must be +-1");
  return kinetic_energy(u) + sign * potential_energy(u, ZonalTransform(3 * u.cutoff() + 1, u.cutoff()));
}

/// sign |u|^4 u.
inline ZonalField quintic_rhs(const ZonalField& u, int sign, Truncation truncation = Truncation::to_cutoff) {
  return pointwise_quintic(u, sign, truncation);
}

// ---------------------------------------------------------------------------
// Strang splitting

/// One Strang step: half linear step, the exact nonlinear phase
/// u -> u exp(-i sign |u|^4 dt) on the nodes, half linear step. Negative dt
/// steps backwards.
class StrangStepper {
 public:
  /// `dealias` uses 3K+1 nodes so the quintic part of the phase is projected
  /// exactly; otherwise K+1 collocation nodes.
  StrangStepper(std::int64_t K, double dt, int sign, bool dealias = true)
      : K_(K), dt_(dt), sign_(sign), tr_(dealias ? 3 * K + 1 : K + 1, K) {
    if (K < 0) throw std::invalid_argument("StrangStepper: negative cutoff");
    if (sign != 1 && sign != -1) throw std::invalid_argument("StrangStepper: sign must be +-1");
    if (!std::isfinite(dt)) throw std::invalid_argument("StrangStepper: dt must be finite");
    half_.resize(static_cast<std::size_t>(K + 1));
    for (std::int64_t k = 0; k <= K; ++k) {
      half_[static_cast<std::size_t>(k)] = detail::unit_phase(eigenvalue(k), dt / 2.0);
    }
    values_.resize(static_cast<std::size_t>(tr_.nodes()));
  }

  [[nodiscard]] double dt() const { return dt_; }

  /// Advances u in place; returns the mass removed by truncating to degree K.
  double step(ZonalField& u) {
    if (u.cutoff() != K_) throw std::invalid_argument("StrangStepper: field cutoff mismatch");
    if (dt_ == 0.0) return 0.0;
    linear_half(u);
    tr_.synthesize(u, values_);
    double grid_mass = 0.0;
    for (std::size_t j = 0; j < values_.size(); ++j) {
      const double a2 = std::norm(values_[j]);
      grid_mass += tr_.rule().weights[j] * a2;
      values_[j] = detail::cmul(values_[j], detail::unit_phase(1, static_cast<double>(sign_) * a2 * a2 * dt_));
    }
    tr_.analyze(values_, u);
    const double loss = std::max(0.0, 0.5 * grid_mass - mass(u));
    linear_half(u);
    return loss;
  }

 private:
  void linear_half(ZonalField& u) const {
    for (std::size_t k = 0; k < half_.size(); ++k) u.coeffs[k] = detail::cmul(u.coeffs[k], half_[k]);
  }

  std::int64_t K_;
  double dt_;
  int sign_;
  ZonalTransform tr_;
  std::vector<cplx> half_;
  std::vector<cplx> values_;
};

inline ZonalField step_strang(const ZonalField& u, double dt, int sign, bool dealias = true) {
  ZonalField v = u;
  StrangStepper(u.cutoff(), dt, sign, dealias).step(v);
  return v;
}

struct SolverConfig {
  std::int64_t K = 64;
  double dt = 1e-3;
  double T = 1.0;
  int sign = 1;          ///< +1 defocusing, -1 focusing
  bool truncate = true;  ///< dealiased 3K+1 node grid
  std::uint64_t seed = 1;
  double max_mass_drift = 1e-6;
  std::int64_t store_every = 1;

  void validate() const {
    if (K < 1) throw std::invalid_argument("SolverConfig: K must be >= 1");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw std::invalid_argument("SolverConfig: dt must be positive");
    if (!(T >= dt) || !std::isfinite(T)) throw std::invalid_argument("SolverConfig: need T >= dt");
    if (sign != 1 && sign != -1) throw std::invalid_argument("SolverConfig: sign must be +-1");
    if (store_every < 1) throw std::invalid_argument("SolverConfig: store_every must be >= 1");
  }
  /// ceil(T/dt), forgiving roundoff in the quotient.
  [[nodiscard]] std::int64_t steps() const {
    return static_cast<std::int64_t>(std::ceil(T / dt * (1.0 - 1e-12)));
  }
};

struct Trajectory {
  SolverConfig config;
  std::vector<double> times;            ///< stored times
  std::vector<ZonalField> states;       ///< stored states
  std::vector<double> mass;             ///< every step, index 0 = initial
  std::vector<double> energy;           ///< every step
  std::vector<double> truncation_loss;  ///< every step, index 0 = 0

  [[nodiscard]] double mass_drift() const {
    double d = 0.0;
    for (double m : mass) d = std::max(d, std::abs(m - mass.front()));
    return mass.front() > 0.0 ? d / mass.front() : d;
  }
  [[nodiscard]] double energy_drift() const {
    double d = 0.0;
    for (double e : energy) d = std::max(d, std::abs(e - energy.front()));
    return energy.front() != 0.0 ? d / std::abs(energy.front()) : d;
  }
};

/// Strang evolution of phi over ceil(T/dt) steps, starting at step `first_step`
/// (for resumption; the time origin is first_step * dt).
inline Trajectory evolve(const SolverConfig& cfg, const ZonalField& phi, std::int64_t first_step = 0) {
  cfg.validate();
  if (phi.cutoff() > cfg.K) throw std::invalid_argument("evolve: data exceeds the cutoff");
  Trajectory tr;
  tr.config = cfg;
  ZonalField u = phi.with_cutoff(cfg.K);
  StrangStepper stepper(cfg.K, cfg.dt, cfg.sign, cfg.truncate);
  const ZonalTransform energy_grid(3 * cfg.K + 1, cfg.K);
  auto record = [&](std::int64_t n, double loss) {
    tr.mass.push_back(mass(u));
    tr.energy.push_back(kinetic_energy(u) + cfg.sign * potential_energy(u, energy_grid));
    tr.truncation_loss.push_back(loss);
    if (n % cfg.store_every == 0 || n == cfg.steps()) {
      tr.times.push_back(static_cast<double>(n) * cfg.dt);
      tr.states.push_back(u);
    }
  };
  record(first_step, 0.0);
  const double m0 = tr.mass.front();
  for (std::int64_t n = first_step + 1; n <= cfg.steps(); ++n) {
    const double loss = stepper.step(u);
    record(n, loss);
    const double drift = std::abs(tr.mass.back() - m0) / (m0 > 0.0 ? m0 : 1.0);
    if (drift > cfg.max_mass_drift) {
      std::ostringstream msg;
      msg << "evolve: relative mass drift " << drift << " at step " << n << " (t = " << n * cfg.dt
          << ") exceeds " << cfg.max_mass_drift << "; reduce dt or raise K";
      throw std::runtime_error(msg.str());
    }
  }
  return tr;
}

/// Gaussian coefficients weighted by <lambda_k>^{-2} on degrees k <= K/margin,
/// scaled to the given H^1 norm.
inline ZonalField make_initial_data(std::int64_t K, double h1_norm, std::uint64_t seed, double margin = 1.2) {
  if (K < 1 || !(margin >= 1.0)) throw std::invalid_argument("make_initial_data: need K >= 1, margin >= 1");
  auto rng = detail::make_rng(seed, {static_cast<std::uint64_t>(K), 0x1d});
  std::normal_distribution<double> g;
  ZonalField f(K);
  const auto top = static_cast<std::int64_t>(std::floor(static_cast<double>(K) / margin));
  for (std::int64_t k = 0; k <= top; ++k) {
    const double w = 1.0 / (1.0 + static_cast<double>(eigenvalue(k)));
    const double re = g(rng);
    f.coeffs[static_cast<std::size_t>(k)] = cplx(re, g(rng)) * w;
  }
  const double n = sobolev_norm(f, 1.0);
  if (n > 0.0) f *= h1_norm / n;
  return f;
}

// ---------------------------------------------------------------------------
// Duhamel operator

/// Forcing sampled at a + n h, n = 0..S-1, linearly interpolated in between.
struct Forcing {
  double a = 0.0;
  double h = 0.0;
  std::vector<ZonalField> samples;

  [[nodiscard]] double b() const { return a + h * static_cast<double>(samples.size() - 1); }
  void validate() const {
    if (samples.empty()) throw std::invalid_argument("Forcing: no samples");
    if (samples.size() > 1 && !(h > 0.0)) throw std::invalid_argument("Forcing: step must be positive");
    for (const auto& s : samples) {
      if (s.cutoff() != samples.front().cutoff()) throw std::invalid_argument("Forcing: cutoff mismatch");
    }
  }
};

namespace detail {

/// phi_1(z) = (e^z - 1)/z and phi_2(z) = (e^z - 1 - z)/z^2, given ez = e^z.
inline std::pair<cplx, cplx> phi12(cplx z, cplx ez) {
  if (std::abs(z) < 1.0) {
    cplx p1 = 0.0, p2 = 0.0, term = 1.0;  // term = z^j / j!
    for (int j = 0; j < 24; ++j) {
      p1 += term / static_cast<double>(j + 1);
      p2 += term / static_cast<double>((j + 1) * (j + 2));
      term *= z / static_cast<double>(j + 1);
    }
    return {p1, p2};
  }
  return {(ez - 1.0) / z, (ez - 1.0 - z) / (z * z)};
}

/// Per-mode propagation over tau and the two interpolation weights.
struct KernelWeights {
  cplx decay, w0, w1;  ///< I <- decay I + w0 f_left + w1 (f_right - f_left)
};

inline KernelWeights kernel_weights(std::int64_t rate16, double tau, double h) {
  const cplx e = unit_phase(rate16, tau / 16.0);  // e^{-i omega tau}
  const cplx z(0.0, -static_cast<double>(rate16) / 16.0 * tau);
  const auto [p1, p2] = phi12(z, e);
  return {e, tau * p1, tau * tau / h * p2};
}

}  // namespace detail

/// Values I(f)(t_n) at every sample time, I(f)(t) = int_a^t e^{i(t-s)A} f(s) ds.
inline std::vector<ZonalField> duhamel_on_grid(const Forcing& f, Flow flow = Flow::laplacian,
                                               const ClusterScheme& scheme = ClusterScheme()) {
  f.validate();
  const std::int64_t K = f.samples.front().cutoff();
  std::vector<ZonalField> out;
  out.reserve(f.samples.size());
  out.emplace_back(K);
  if (f.samples.size() == 1) return out;
  std::vector<detail::KernelWeights> w(static_cast<std::size_t>(K + 1));
  for (std::int64_t k = 0; k <= K; ++k) w[static_cast<std::size_t>(k)] = detail::kernel_weights(flow_rate16(flow, k, scheme), f.h, f.h);
  for (std::size_t n = 0; n + 1 < f.samples.size(); ++n) {
    ZonalField next(K);
    for (std::size_t k = 0; k <= static_cast<std::size_t>(K); ++k) {
      const cplx l = f.samples[n].coeffs[k], r = f.samples[n + 1].coeffs[k];
      next.coeffs[k] = detail::cmul(w[k].decay, out.back().coeffs[k]) + detail::cmul(w[k].w0, l) +
                       detail::cmul(w[k].w1, r - l);
    }
    out.push_back(std::move(next));
  }
  return out;
}

/// I(f)(t). Zero for t < a; for t > b the flow-frame profile e^{-itA} I(t) is
/// frozen, i.e. I(t) = e^{i(t-b)A} I(b).
inline ZonalField duhamel(const Forcing& f, double t, Flow flow = Flow::laplacian,
                          const ClusterScheme& scheme = ClusterScheme()) {
  f.validate();
  if (!std::isfinite(t)) throw std::invalid_argument("duhamel: t must be finite");
  const std::int64_t K = f.samples.front().cutoff();
  if (t <= f.a || f.samples.size() == 1) return ZonalField(K);
  const double b = f.b();
  const double tt = std::min(t, b);
  auto J = static_cast<std::size_t>(std::floor((tt - f.a) / f.h));
  J = std::min(J, f.samples.size() - 1);
  Forcing head{f.a, f.h, {f.samples.begin(), f.samples.begin() + static_cast<std::ptrdiff_t>(J) + 1}};
  ZonalField I = duhamel_on_grid(head, flow, scheme).back();
  const double tau = tt - (f.a + f.h * static_cast<double>(J));
  if (tau > 0.0 && J + 1 < f.samples.size()) {
    for (std::int64_t k = 0; k <= K; ++k) {
      const auto i = static_cast<std::size_t>(k);
      const auto w = detail::kernel_weights(flow_rate16(flow, k, scheme), tau, f.h);
      const cplx l = f.samples[J].coeffs[i], r = f.samples[J + 1].coeffs[i];
      I.coeffs[i] = detail::cmul(w.decay, I.coeffs[i]) + detail::cmul(w.w0, l) + detail::cmul(w.w1, r - l);
    }
  }
  if (t > b) I = linear_propagate(I, t - b, flow, scheme);
  return I;
}

// ---------------------------------------------------------------------------
// Picard iteration

/// Y^1 norm of the time-sampled path t_n -> u_n (piecewise constant in the
/// flow frame on [t_n, t_{n+1}), the last piece of length t_1 - t_0).
inline double y1_proxy(const std::vector<double>& times, const std::vector<ZonalField>& u,
                       Flow flow = Flow::laplacian, const ClusterScheme& scheme = ClusterScheme()) {
  if (times.size() != u.size() || times.empty()) throw std::invalid_argument("y1_proxy: size mismatch");
  StepPath path;
  path.evolving = flow;
  path.times = times;
  path.times.push_back(times.back() + (times.size() > 1 ? times[1] - times[0] : 1.0));
  for (std::size_t n = 0; n < u.size(); ++n) path.values.push_back(linear_propagate(u[n], -times[n], flow, scheme));
  return xs_ys_norm(split_into_blocks(path, scheme), BlockSpace::Y, 1.0, flow, scheme).value;
}

inline double sup_h1(const std::vector<ZonalField>& u) {
  double m = 0.0;
  for (const auto& f : u) m = std::max(m, sobolev_norm(f, 1.0));
  return m;
}

struct PicardOptions {
  int max_iterations = 8;
  bool y1_distances = true;  ///< also report distances in the Y^1 proxy (slower)
};

struct PicardResult {
  std::vector<double> times;
  std::vector<ZonalField> limit;      ///< last iterate on the time grid
  std::vector<double> distance_h1;    ///< sup_t ||u^{m+1} - u^m||_{H^1}, m = 0, 1, ...
  std::vector<double> distance_y1;    ///< same in the Y^1 proxy
  std::vector<double> ratios;         ///< distance_h1[m+1] / distance_h1[m]
  bool diverged = false;              ///< distances grew three times in a row
  int iterations = 0;
};

/// u^0 = e^{it Delta} phi, u^{m+1} = e^{it Delta} phi - i I(sign |u^m|^4 u^m).
/// Successive differences are propagated directly,
///   u^{m+2} - u^{m+1} = -i I(sign (|u^{m+1}|^4 u^{m+1} - |u^m|^4 u^m)),
/// with the nonlinear difference expanded in the increment, so distances keep
/// full relative precision far below the size of the iterates.
inline PicardResult picard_iterate(const ZonalField& phi, const SolverConfig& cfg, const PicardOptions& opt = {}) {
  cfg.validate();
  if (phi.cutoff() > cfg.K) throw std::invalid_argument("picard_iterate: data exceeds the cutoff");
  const std::int64_t S = cfg.steps() + 1;
  const ZonalTransform tr(cfg.truncate ? 3 * cfg.K + 1 : cfg.K + 1, cfg.K);
  PicardResult r;
  const auto Sz = static_cast<std::size_t>(S);
  r.times.resize(Sz);
  std::vector<ZonalField> u(Sz), delta(Sz);
  std::vector<std::vector<cplx>> nodes_u(Sz);
  const ZonalField data = phi.with_cutoff(cfg.K);
  for (std::size_t n = 0; n < Sz; ++n) {
    r.times[n] = static_cast<double>(n) * cfg.dt;
    u[n] = linear_propagate(data, r.times[n]);
    nodes_u[n] = tr.synthesize(u[n]);
  }
  auto apply_duhamel = [&](std::vector<ZonalField> forcing) {
    Forcing f{0.0, cfg.dt, std::move(forcing)};
    auto I = duhamel_on_grid(f);
    for (auto& x : I) x *= cplx(0.0, -1.0);
    return I;
  };
  // delta^0 = u^1 - u^0 = -i I(N(u^0))
  {
    std::vector<ZonalField> forcing(Sz);
    for (std::size_t n = 0; n < Sz; ++n) {
      auto v = nodes_u[n];
      for (auto& z : v) {
        const double a2 = std::norm(z);
        z *= static_cast<double>(cfg.sign) * a2 * a2;
      }
      forcing[n] = tr.analyze(v);
    }
    delta = apply_duhamel(std::move(forcing));
  }
  int growth = 0;
  for (int m = 0; m < opt.max_iterations; ++m) {
    r.distance_h1.push_back(sup_h1(delta));
    if (opt.y1_distances) r.distance_y1.push_back(y1_proxy(r.times, delta));
    if (m > 0) {
      const double prev = r.distance_h1[static_cast<std::size_t>(m - 1)];
      r.ratios.push_back(prev > 0.0 ? r.distance_h1.back() / prev : 0.0);
      growth = r.distance_h1.back() > prev ? growth + 1 : 0;
      if (growth >= 3) r.diverged = true;
    }
    // u^{m+1} = u^m + delta^m and the next difference
    std::vector<ZonalField> forcing(Sz);
    for (std::size_t n = 0; n < Sz; ++n) {
      const auto d = tr.synthesize(delta[n]);
      std::vector<cplx> diff(d.size());
      for (std::size_t j = 0; j < d.size(); ++j) {
        const cplx b = nodes_u[n][j], e = d[j];
        const cplx a = b + e;
        const double b2 = std::norm(b), a2 = std::norm(a);
        const double d2 = 2.0 * (b.real() * e.real() + b.imag() * e.imag()) + std::norm(e);  // |a|^2 - |b|^2
        // |a|^4 a - |b|^4 b = (|a|^2 - |b|^2)(|a|^2 + |b|^2) a + |b|^4 e
        diff[j] = static_cast<double>(cfg.sign) * (d2 * (a2 + b2) * a + b2 * b2 * e);
        nodes_u[n][j] = a;
      }
      u[n] += delta[n];
      forcing[n] = tr.analyze(diff);
    }
    ++r.iterations;
    delta = apply_duhamel(std::move(forcing));
    if (r.diverged) break;
  }
  r.limit = std::move(u);
  return r;
}

// ---------------------------------------------------------------------------
// Lipschitz probe

struct LipschitzResult {
  double ratio = 0.0;  ///< sup_t ||u1 - u2||_{H^1} / ||phi1 - phi2||_{H^1}
  bool degenerate = false;
};

inline LipschitzResult lipschitz_probe(const ZonalField& phi1, const ZonalField& phi2, const SolverConfig& cfg) {
  LipschitzResult r;
  const double d0 = sobolev_norm(phi1.with_cutoff(cfg.K) - phi2.with_cutoff(cfg.K), 1.0);
  if (d0 == 0.0) {
    r.degenerate = true;
    return r;
  }
  const auto a = evolve(cfg, phi1), b = evolve(cfg, phi2);
  double best = 0.0;
  for (std::size_t n = 0; n < a.states.size(); ++n) best = std::max(best, sobolev_norm(a.states[n] - b.states[n], 1.0));
  r.ratio = best / d0;
  return r;
}

}  // namespace zoll
