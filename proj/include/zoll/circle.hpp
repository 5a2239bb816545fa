#pragma once

// Circle-method tools for the 1-periodic windowed Weyl sums
//
//     f(t) = sum_n sigma_n e(t n^2),   e(x) = exp(2 pi i x),
//
// the time convention obtained from exp(-i t mu_n^2) by t -> -t and a
// dilation; moduli and L^p norms are unchanged by the switch.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <vector>

#include "zoll/detail/fft.hpp"
#include "zoll/detail/numeric.hpp"
#include "zoll/expsum.hpp"

namespace zoll {

// ---------------------------------------------------------------------------
// Divisor counting

/// #{(n1, n2) : 1 <= n1, n2 <= N, n1 (n2 + b) = k}.
inline std::int64_t divisor_count(std::int64_t k, std::int64_t b, std::int64_t N) {
  if (k < 1 || b < 0 || N < 1) throw std::invalid_argument("divisor_count: need k, N >= 1, b >= 0");
  std::int64_t count = 0;
  auto consider = [&](std::int64_t n1) {
    const std::int64_t n2 = k / n1 - b;
    if (n1 <= N && n2 >= 1 && n2 <= N) ++count;
  };
  for (std::int64_t d = 1; d * d <= k; ++d) {
    if (k % d != 0) continue;
    consider(d);
    if (d * d != k) consider(k / d);
  }
  return count;
}

/// Number of positive divisors of k.
inline std::int64_t divisor_function(std::int64_t k) {
  if (k < 1) throw std::invalid_argument("divisor_function: need k >= 1");
  std::int64_t count = 0;
  for (std::int64_t d = 1; d * d <= k; ++d) {
    if (k % d == 0) count += (d * d == k) ? 1 : 2;
  }
  return count;
}

// ---------------------------------------------------------------------------
// Windows

/// Trapezoidal cutoff: ramps up on [b-N, b], equals 1 on [b, b+N], ramps down
/// on [b+N, b+2N]. Steps are at most 1/N; the difference sequence has total
/// variation exactly 4/N.
class WindowSequence {
 public:
  WindowSequence(std::int64_t b, std::int64_t N) : b_(b), N_(N) {
    if (N < 1) throw std::invalid_argument("WindowSequence: N must be >= 1");
    if (b < 0) throw std::invalid_argument("WindowSequence: b must be >= 0");
  }
  [[nodiscard]] std::int64_t b() const { return b_; }
  [[nodiscard]] std::int64_t N() const { return N_; }
  [[nodiscard]] std::int64_t first() const { return b_ - N_; }
  [[nodiscard]] std::int64_t last() const { return b_ + 2 * N_; }
  [[nodiscard]] std::size_t size() const { return static_cast<std::size_t>(3 * N_ + 1); }

  [[nodiscard]] double operator()(std::int64_t n) const {
    const double inv = 1.0 / static_cast<double>(N_);
    if (n < first() || n > last()) return 0.0;
    if (n < b_) return static_cast<double>(n - first()) * inv;
    if (n <= b_ + N_) return 1.0;
    return static_cast<double>(last() - n) * inv;
  }

  [[nodiscard]] std::vector<double> values() const {
    std::vector<double> v;
    for (std::int64_t n = first(); n <= last(); ++n) v.push_back((*this)(n));
    return v;
  }
  [[nodiscard]] double sum() const {
    double s = 0.0;
    for (std::int64_t n = first(); n <= last(); ++n) s += (*this)(n);
    return s;
  }
  [[nodiscard]] double max_step() const {
    double m = 0.0;
    for (std::int64_t n = first() - 1; n <= last(); ++n) {
      m = std::max(m, std::abs((*this)(n + 1) - (*this)(n)));
    }
    return m;
  }
  [[nodiscard]] double difference_variation() const {
    double v = 0.0;
    for (std::int64_t n = first() - 2; n <= last(); ++n) {
      const double d0 = (*this)(n + 1) - (*this)(n);
      const double d1 = (*this)(n + 2) - (*this)(n + 1);
      v += std::abs(d1 - d0);
    }
    return v;
  }

 private:
  std::int64_t b_, N_;
};

namespace detail {

/// e(m t) with m t reduced modulo 1 in double-double arithmetic.
inline cplx turn_phase(std::int64_t m, double t) {
  const double md = static_cast<double>(m);
  const double hi = md * t;
  const double lo = std::fma(md, t, -hi);
  const double r = (hi - std::nearbyint(hi)) + lo;
  return {std::cos(2.0 * kPi * r), std::sin(2.0 * kPi * r)};
}

/// sum_n w[n - n0] e(t n^2) by a phase recurrence, resynchronized every 64 terms.
inline cplx quadratic_sum(const std::vector<cplx>& w, std::int64_t n0, double t) {
  cplx acc{}, ph{}, ratio{};
  const cplx twice = turn_phase(2, t);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::int64_t n = n0 + static_cast<std::int64_t>(i);
    if (i % 64 == 0) {
      ph = turn_phase(n * n, t);
      ratio = turn_phase(2 * n + 1, t);
    }
    acc += cmul(w[i], ph);
    ph = cmul(ph, ratio);
    ratio = cmul(ratio, twice);
  }
  return acc;
}

/// Values of sum_n w[n - n0] e(t n^2) at t = j/G, j = 0..G-1.
inline std::vector<cplx> quadratic_grid(const std::vector<cplx>& w, std::int64_t n0, std::int64_t G) {
  if (G < 1) throw std::invalid_argument("grid: need at least one point");
  ComplexFft fft(static_cast<std::size_t>(G), +1);
  auto d = fft.data();
  std::fill(d.begin(), d.end(), cplx{});
  for (std::size_t i = 0; i < w.size(); ++i) {
    const std::int64_t n = n0 + static_cast<std::int64_t>(i);
    d[static_cast<std::size_t>((n * n) % G)] += w[i];
  }
  fft.execute();
  return {d.begin(), d.end()};
}

inline std::vector<cplx> window_weights(const WindowSequence& w) {
  std::vector<cplx> v;
  for (std::int64_t n = w.first(); n <= w.last(); ++n) v.emplace_back(w(n));
  return v;
}

}  // namespace detail

/// f(t) = sum_n sigma_n e(t n^2), evaluated term by term.
inline cplx weyl_window_sum(const WindowSequence& w, double t) {
  detail::CompensatedSum acc;
  for (std::int64_t n = w.first(); n <= w.last(); ++n) {
    const double s = w(n);
    if (s != 0.0) acc.add(s * detail::turn_phase(n * n, t));
  }
  return acc.value();
}

/// f(j/G) for j = 0..G-1 by one FFT.
inline std::vector<cplx> weyl_grid(const WindowSequence& w, std::int64_t G) {
  return detail::quadratic_grid(detail::window_weights(w), w.first(), G);
}

// ---------------------------------------------------------------------------
// Rational approximation and arcs

struct Fraction {
  std::int64_t a = 0;
  std::int64_t q = 1;
  friend bool operator==(const Fraction&, const Fraction&) = default;
};

/// Reduced a/q with 1 <= q <= Q and |t - a/q| <= 1/(qQ), from the continued fraction of t.
inline Fraction dirichlet_approx(double t, std::int64_t Q) {
  if (!(t >= 0.0 && t <= 1.0)) throw std::invalid_argument("dirichlet_approx: t must lie in [0, 1]");
  if (Q < 1) throw std::invalid_argument("dirichlet_approx: Q must be >= 1");
  auto ok = [&](const Fraction& f) {
    const double err = std::abs(t - static_cast<double>(f.a) / static_cast<double>(f.q));
    return err <= 1.0 / (static_cast<double>(f.q) * static_cast<double>(Q)) * (1.0 + 1e-12);
  };
  std::int64_t p0 = 0, q0 = 1, p1 = 1, q1 = 0;
  Fraction best{static_cast<std::int64_t>(std::nearbyint(t)), 1};
  double x = t;
  for (int depth = 0; depth < 64; ++depth) {
    const double ai = std::floor(x);
    if (ai > 9e15) break;
    const auto a = static_cast<std::int64_t>(ai);
    const std::int64_t p2 = a * p1 + p0, q2 = a * q1 + q0;
    if (q2 > Q || q2 <= 0) break;
    best = {p2, q2};
    const double frac = x - ai;
    if (frac < 1e-15) break;
    x = 1.0 / frac;
    p0 = p1;
    q0 = q1;
    p1 = p2;
    q1 = q2;
  }
  if (ok(best)) return best;
  for (std::int64_t q = 1; q <= Q; ++q) {
    const Fraction f{static_cast<std::int64_t>(std::nearbyint(t * static_cast<double>(q))), q};
    if (detail::gcd64(f.a, f.q) == 1 && ok(f)) return f;
  }
  throw std::runtime_error("dirichlet_approx: no approximation found");
}

/// Distance on R/Z.
inline double circle_distance(double x, double y) {
  const double d = std::abs(x - y);
  const double r = d - std::floor(d);
  return std::min(r, 1.0 - r);
}

/// t lies within N^{nu-2} (on R/Z) of some a/q with q <= N^nu.
inline bool in_major_arcs(double t, std::int64_t N, double nu) {
  const auto Qmax = static_cast<std::int64_t>(std::floor(std::pow(static_cast<double>(N), nu) + 1e-9));
  const double width = std::pow(static_cast<double>(N), nu - 2.0);
  for (std::int64_t q = 1; q <= Qmax; ++q) {
    const double a = std::nearbyint(t * static_cast<double>(q));
    if (circle_distance(t, a / static_cast<double>(q)) <= width) return true;
  }
  return false;
}

struct ArcRatio {
  double measured = 0.0;
  double bound = 0.0;
  double ratio = 0.0;
};

/// |f(t)| against q^{-1/2} (|t - a/q| + N^{-2})^{-1/2}.
inline ArcRatio major_arc_check(const WindowSequence& w, std::int64_t a, std::int64_t q, double t) {
  const std::int64_t N = w.N();
  if (!(1 <= a && a < q && q < N)) throw std::invalid_argument("major_arc_check: need 1 <= a < q < N");
  if (detail::gcd64(a, q) != 1) throw std::invalid_argument("major_arc_check: a/q must be reduced");
  const double dist = std::abs(t - static_cast<double>(a) / static_cast<double>(q));
  if (!(dist < 1.0 / (static_cast<double>(q) * static_cast<double>(N)))) {
    throw std::invalid_argument("major_arc_check: t is not within 1/(qN) of a/q");
  }
  ArcRatio r;
  r.measured = std::abs(weyl_window_sum(w, t));
  const double inv_n2 = 1.0 / (static_cast<double>(N) * static_cast<double>(N));
  r.bound = 1.0 / std::sqrt(static_cast<double>(q) * (dist + inv_n2));
  r.ratio = r.measured / r.bound;
  return r;
}

struct MinorArcScan {
  double max_ratio = 0.0;      ///< max |f(t)| / N^{1 - nu/2} over scanned points
  double t_at_max = 0.0;
  std::int64_t scanned = 0;    ///< grid points outside the major arcs
  std::int64_t excluded = 0;   ///< grid points inside
  std::int64_t dirichlet_violations = 0;  ///< scanned points whose Q = N^{2-nu} approximation has q <= N^nu
};

/// Scans t = j/G outside the major arcs.
inline MinorArcScan minor_arc_scan(const WindowSequence& w, double nu, std::int64_t grid_points) {
  if (!(nu > 0.0 && nu < 1.0)) throw std::invalid_argument("minor_arc_scan: nu must lie in (0, 1)");
  const auto f = weyl_grid(w, grid_points);
  const double N = static_cast<double>(w.N());
  const double scale = std::pow(N, 1.0 - nu / 2.0);
  const double q_major = std::pow(N, nu);
  const auto Q = static_cast<std::int64_t>(std::floor(std::pow(N, 2.0 - nu)));
  MinorArcScan s;
  for (std::int64_t j = 0; j < grid_points; ++j) {
    const double t = static_cast<double>(j) / static_cast<double>(grid_points);
    if (in_major_arcs(t, w.N(), nu)) {
      ++s.excluded;
      continue;
    }
    ++s.scanned;
    if (static_cast<double>(dirichlet_approx(t, Q).q) <= q_major) ++s.dirichlet_violations;
    const double r = std::abs(f[static_cast<std::size_t>(j)]) / scale;
    if (r > s.max_ratio) {
      s.max_ratio = r;
      s.t_at_max = t;
    }
  }
  return s;
}

// ---------------------------------------------------------------------------
// Windowed sums with coefficients

/// sum_n c_n sigma_n e(t n^2) with c indexed over the window support [b-N, b+2N].
struct WindowedSum {
  WindowSequence window;
  std::vector<cplx> c;

  WindowedSum(WindowSequence w, std::vector<cplx> coeffs) : window(w), c(std::move(coeffs)) {
    if (c.size() != window.size()) throw std::invalid_argument("WindowedSum: need 3N+1 coefficients");
  }
  [[nodiscard]] std::vector<cplx> weights() const {
    std::vector<cplx> v(c.size());
    for (std::size_t i = 0; i < c.size(); ++i) {
      v[i] = c[i] * window(window.first() + static_cast<std::int64_t>(i));
    }
    return v;
  }
  [[nodiscard]] double weight_l1() const {
    double s = 0.0;
    for (const auto& z : weights()) s += std::abs(z);
    return s;
  }
};

inline cplx windowed_eval(const WindowedSum& ws, double t) {
  return detail::quadratic_sum(ws.weights(), ws.window.first(), t);
}

/// n = first + j gives n^2 = j^2 + 2 first j + const.
inline QuadraticFamily windowed_family(const WindowedSum& ws) {
  return {1, 2 * ws.window.first(), ws.weights()};
}

/// ||f||_{L^4(0,1)}, exact.
inline double windowed_l4_norm(const WindowedSum& ws) {
  return std::pow(moment(windowed_family(ws), 2), 0.25);
}

struct SuperlevelEstimate {
  double measure = 0.0;
  double std_error = 0.0;
  std::int64_t samples = 0;
};

/// |{t in [0,1] : |f(t)| > lambda}| for each lambda, from one stratified
/// sample (one uniform point per cell of width 1/samples).
inline std::vector<SuperlevelEstimate> superlevel_measures(const WindowedSum& ws,
                                                           const std::vector<double>& lambdas,
                                                           std::int64_t samples, std::uint64_t seed) {
  if (samples < 1) throw std::invalid_argument("superlevel_measure: need samples >= 1");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const auto w = ws.weights();
  std::vector<std::int64_t> hits(lambdas.size(), 0);
  for (std::int64_t i = 0; i < samples; ++i) {
    const double t = (static_cast<double>(i) + u(rng)) / static_cast<double>(samples);
    const double v = std::abs(detail::quadratic_sum(w, ws.window.first(), t));
    for (std::size_t l = 0; l < lambdas.size(); ++l) hits[l] += v > lambdas[l] ? 1 : 0;
  }
  std::vector<SuperlevelEstimate> out;
  for (auto h : hits) {
    const double m = static_cast<double>(h) / static_cast<double>(samples);
    out.push_back({m, std::sqrt(m * (1.0 - m) / static_cast<double>(samples)), samples});
  }
  return out;
}

inline SuperlevelEstimate superlevel_measure(const WindowedSum& ws, double lambda,
                                             std::int64_t samples = 100000, std::uint64_t seed = 1) {
  return superlevel_measures(ws, {lambda}, samples, seed).front();
}

struct DenseSuperlevel {
  double measure = 0.0;
  std::int64_t crossings = 0;  ///< level crossings between neighbouring grid points (cyclic)
  double error_bound = 0.0;    ///< 2 h crossings
};

/// Superlevel measure from a uniform grid of G points.
inline DenseSuperlevel superlevel_measure_dense(const WindowedSum& ws, double lambda, std::int64_t G) {
  const auto f = detail::quadratic_grid(ws.weights(), ws.window.first(), G);
  DenseSuperlevel d;
  std::int64_t above = 0;
  for (std::int64_t j = 0; j < G; ++j) {
    const bool in = std::abs(f[static_cast<std::size_t>(j)]) > lambda;
    const bool next = std::abs(f[static_cast<std::size_t>((j + 1) % G)]) > lambda;
    above += in ? 1 : 0;
    d.crossings += in != next ? 1 : 0;
  }
  d.measure = static_cast<double>(above) / static_cast<double>(G);
  d.error_bound = 2.0 * static_cast<double>(d.crossings) / static_cast<double>(G);
  return d;
}

}  // namespace zoll
