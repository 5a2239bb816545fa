#pragma once

// Quadratic exponential sums
//
//     S(t) = sum_{n=b}^{b+N} c_n exp(-i t (n + alpha/4)^2),   t in [0, 32 pi],
//
// and exact even moments of such sums. With s = t/(32 pi) the phases become
// integer frequencies, so int |S|^{2q} over the base interval is 32 pi times
// the mean of |P(s)|^{2q} over [0, 1] for a trigonometric polynomial P.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <random>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "zoll/detail/fft.hpp"
#include "zoll/detail/numeric.hpp"
#include "zoll/detail/random.hpp"
#include "zoll/parallel.hpp"
#include "zoll/scaling.hpp"

namespace zoll {

/// Window J = [b, b+N] with coefficients c_n, n = b..b+N (coeffs[j] is c_{b+j}).
struct ExpSumSpec {
  std::int64_t b = 0;
  std::int64_t N = 1;
  std::int64_t alpha = 0;
  std::vector<cplx> coeffs;

  void validate() const {
    if (b < 0 || alpha < 0) throw std::invalid_argument("ExpSumSpec: b and alpha must be >= 0");
    if (N < 1) throw std::invalid_argument("ExpSumSpec: N must be >= 1");
    if (static_cast<std::int64_t>(coeffs.size()) != N + 1) {
      throw std::invalid_argument("ExpSumSpec: expected N+1 coefficients");
    }
  }
  [[nodiscard]] double l2() const {
    double s = 0.0;
    for (const auto& c : coeffs) s += std::norm(c);
    return std::sqrt(s);
  }
};

/// sum_n c_n exp(-i t (n + alpha/4)^2), compensated. t is first reduced
/// modulo the (rounded) base period, so the result is exactly periodic in it;
/// rounding of t itself is amplified by the largest frequency (4(b+N)+alpha)^2/16.
inline cplx eval_sum(const ExpSumSpec& spec, double t) {
  spec.validate();
  detail::CompensatedSum acc;
  const double t16 = std::fmod(t, kBasePeriod) / 16.0;
  for (std::int64_t j = 0; j <= spec.N; ++j) {
    const std::int64_t m = 4 * (spec.b + j) + spec.alpha;
    acc.add(spec.coeffs[static_cast<std::size_t>(j)] * detail::unit_phase(m * m, t16));
  }
  return acc.value();
}

// ---------------------------------------------------------------------------
// Exact moments

/// P(s) = sum_j a_j e((A j^2 + C j) s), j = 0..K, with e(x) = exp(2 pi i x).
struct QuadraticFamily {
  std::int64_t A = 1;
  std::int64_t C = 0;
  std::vector<cplx> a;

  [[nodiscard]] std::int64_t K() const { return static_cast<std::int64_t>(a.size()) - 1; }
  [[nodiscard]] std::int64_t frequency(std::int64_t j) const { return A * j * j + C * j; }
};

/// How an even moment is evaluated; all routes are exact up to roundoff.
enum class MomentRoute {
  automatic,
  fft,     ///< dense trapezoid rule on the reduced 1-D frequency set
  torus,   ///< large |C|: the moment decouples onto the 2-torus
  direct,  ///< enumerate q-multisets of frequencies and sum |coefficient|^2
};

inline const char* to_string(MomentRoute r) {
  switch (r) {
    case MomentRoute::automatic: return "automatic";
    case MomentRoute::fft: return "fft";
    case MomentRoute::torus: return "torus";
    case MomentRoute::direct: return "direct";
  }
  return "?";
}

namespace detail {

inline double pow_int(double x, int q) {
  double r = 1.0;
  for (int i = 0; i < q; ++i) r *= x;
  return r;
}

/// Real Neumaier accumulator.
class RealSum {
 public:
  void add(double x) {
    const double t = s_ + x;
    c_ += std::abs(s_) >= std::abs(x) ? (s_ - t) + x : (x - t) + s_;
    s_ = t;
  }
  [[nodiscard]] double value() const { return s_ + c_; }

 private:
  double s_ = 0.0, c_ = 0.0;
};

struct ReducedFrequencies {
  std::vector<std::int64_t> h;  // reduced, >= 0
  std::vector<cplx> c;
  std::int64_t H = 0;           // max h
};

inline ReducedFrequencies reduce(const QuadraticFamily& f) {
  ReducedFrequencies r;
  std::int64_t hmin = std::numeric_limits<std::int64_t>::max();
  for (std::int64_t j = 0; j <= f.K(); ++j) {
    if (f.a[static_cast<std::size_t>(j)] == cplx{}) continue;
    r.h.push_back(f.frequency(j));
    r.c.push_back(f.a[static_cast<std::size_t>(j)]);
    hmin = std::min(hmin, r.h.back());
  }
  std::int64_t g = 0;
  for (auto& h : r.h) {
    h -= hmin;
    g = gcd64(g, h);
  }
  if (g > 1) {
    for (auto& h : r.h) h /= g;
  }
  for (auto h : r.h) r.H = std::max(r.H, h);
  return r;
}

inline bool torus_applies(const QuadraticFamily& f, int q) {
  const double K = static_cast<double>(f.K());
  return f.A != 0 && std::abs(static_cast<double>(f.C)) > q * std::abs(static_cast<double>(f.A)) * K * K;
}

inline std::int64_t torus_time_samples(std::int64_t K, int q) { return q * K * K / 2 + 1; }

inline double multiset_count(double m, int q) {
  double c = 1.0;
  for (int i = 0; i < q; ++i) c = c * (m + i) / (i + 1);
  return c;
}

inline double moment_fft(const QuadraticFamily& f, int q) {
  const auto r = reduce(f);
  if (r.h.empty()) return 0.0;
  if (r.H == 0) {
    cplx s{};
    for (const auto& c : r.c) s += c;
    return pow_int(std::norm(s), q);
  }
  const std::int64_t L = smooth_size_at_least(q * r.H + 1);
  if (L > (std::int64_t{1} << 28)) {
    throw std::runtime_error("moment: dense grid of " + std::to_string(L) + " points is too large");
  }
  ComplexFft fft(static_cast<std::size_t>(L), -1);
  auto d = fft.data();
  std::fill(d.begin(), d.end(), cplx{});
  for (std::size_t i = 0; i < r.h.size(); ++i) d[static_cast<std::size_t>(r.h[i])] += r.c[i];
  fft.execute();
  RealSum acc;
  for (const auto& v : d) acc.add(pow_int(std::norm(v), q));
  return acc.value() / static_cast<double>(L);
}

inline double moment_torus(const QuadraticFamily& f, int q) {
  if (!torus_applies(f, q)) {
    throw std::invalid_argument("moment: torus route needs |C| > q |A| K^2");
  }
  const std::int64_t K = f.K();
  // The torus integrand has period 1/2 in x (j^2 = j mod 2 moves into a
  // y-shift), so its x-frequencies are even and bounded by q K^2.
  const std::int64_t Lu = torus_time_samples(K, q);
  const std::int64_t period = 2 * Lu;
  // y-frequencies of |Q|^{2q} lie in [-qK, qK]. With exactly qK samples only
  // the two extreme frequencies alias onto 0, and their coefficients are
  // known in closed form, so that length is used whenever it is FFT-friendly.
  const bool alias = q >= 2 && K >= 1 && smooth_size_at_least(q * K) == q * K;
  const auto My = static_cast<std::size_t>(alias ? q * K : smooth_size_at_least(q * K + 1));
  const cplx a0q = std::pow(std::conj(f.a.front()), q);
  const cplx aKq = std::pow(f.a.back(), q);
  std::vector<cplx> table(static_cast<std::size_t>(period));
  for (std::int64_t r = 0; r < period; ++r) {
    const double ang = kPi * static_cast<double>(r) / static_cast<double>(Lu);
    table[static_cast<std::size_t>(r)] = {std::cos(ang), std::sin(ang)};
  }
  const auto n = static_cast<std::size_t>(K + 1);
  auto tab = [&](std::int64_t r) { return table[static_cast<std::size_t>(r % period)]; };
  ComplexFft fft(My, -1, Lu > 64);
  auto d = fft.data();
  RealSum total;
  for (std::int64_t k = 0; k < Lu; ++k) {
    // e(x j^2) by the recurrence ph_{j+1} = ph_j e(x(2j+1)), resynchronized
    // from the table every 32 steps to keep drift at roundoff level.
    const cplx twice = tab(2 * k);
    cplx ph{1.0}, ratio = tab(k);
    for (std::size_t j = 0; j < n; ++j) {
      if (j % 32 == 0) {
        const auto jj = static_cast<std::int64_t>(j);
        ph = tab(k * jj * jj);
        ratio = tab(k * (2 * jj + 1));
      }
      d[j] = cmul(f.a[j], ph);
      ph = cmul(ph, ratio);
      ratio = cmul(ratio, twice);
    }
    std::fill(d.begin() + static_cast<std::ptrdiff_t>(n), d.end(), cplx{});
    fft.execute();
    double row = 0.0;
    for (const auto& v : d) row += pow_int(v.real() * v.real() + v.imag() * v.imag(), q);
    row /= static_cast<double>(My);
    if (alias) row -= 2.0 * (aKq * tab(k * q * K * K) * a0q).real();
    total.add(row);
  }
  return total.value() / static_cast<double>(Lu);
}

inline double moment_direct(const QuadraticFamily& f, int q) {
  std::vector<std::int64_t> h;
  std::vector<cplx> c;
  for (std::int64_t j = 0; j <= f.K(); ++j) {
    if (f.a[static_cast<std::size_t>(j)] == cplx{}) continue;
    h.push_back(f.frequency(j));
    c.push_back(f.a[static_cast<std::size_t>(j)]);
  }
  if (h.empty()) return 0.0;
  const double count = multiset_count(static_cast<double>(h.size()), q);
  if (count > 6e7) throw std::runtime_error("moment: direct enumeration too large");
  std::vector<std::pair<std::int64_t, cplx>> terms;
  terms.reserve(static_cast<std::size_t>(count));
  double qfact = 1.0;
  for (int i = 2; i <= q; ++i) qfact *= i;
  std::vector<std::size_t> pick(static_cast<std::size_t>(q), 0);
  // Odometer over nondecreasing index tuples.
  for (;;) {
    std::int64_t key = 0;
    cplx prod = 1.0;
    double denom = 1.0;
    std::size_t run = 1;
    for (int i = 0; i < q; ++i) {
      key += h[pick[i]];
      prod *= c[pick[i]];
      if (i > 0 && pick[i] == pick[i - 1]) {
        ++run;
        denom *= static_cast<double>(run);
      } else {
        run = 1;
      }
    }
    terms.emplace_back(key, prod * (qfact / denom));
    int i = q - 1;
    while (i >= 0 && pick[i] == h.size() - 1) --i;
    if (i < 0) break;
    ++pick[i];
    for (int k = i + 1; k < q; ++k) pick[k] = pick[i];
  }
  std::sort(terms.begin(), terms.end(),
            [](const auto& x, const auto& y) { return x.first < y.first; });
  RealSum acc;
  for (std::size_t i = 0; i < terms.size();) {
    cplx g{};
    std::size_t k = i;
    for (; k < terms.size() && terms[k].first == terms[i].first; ++k) g += terms[k].second;
    acc.add(std::norm(g));
    i = k;
  }
  return acc.value();
}

}  // namespace detail

/// Rough operation counts used to pick a route; +inf when a route is unavailable.
struct MomentCosts {
  double fft = 0.0;
  double torus = 0.0;
  double direct = 0.0;
};

inline MomentCosts moment_costs(const QuadraticFamily& f, int q) {
  constexpr double inf = std::numeric_limits<double>::infinity();
  MomentCosts c;
  const auto r = detail::reduce(f);
  const double L = static_cast<double>(q) * static_cast<double>(r.H) + 1.0;
  c.fft = L > double(1 << 28) ? inf : L * (5.0 * std::log2(L + 1.0) + q);
  if (detail::torus_applies(f, q)) {
    const double K = static_cast<double>(f.K());
    const double My = q * K + 1.0;  // upper estimate of the y-transform length
    c.torus = static_cast<double>(detail::torus_time_samples(f.K(), q)) *
              (K + 1.0 + My * (5.0 * std::log2(My + 1.0) + q));
  } else {
    c.torus = inf;
  }
  const double m = detail::multiset_count(static_cast<double>(r.h.size()), q);
  c.direct = m > 6e7 ? inf : m * (std::log2(m + 1.0) + q) * 4.0;
  return c;
}

inline MomentRoute choose_route(const QuadraticFamily& f, int q) {
  const auto c = moment_costs(f, q);
  if (c.direct <= c.fft && c.direct <= c.torus) return MomentRoute::direct;
  return c.torus < c.fft ? MomentRoute::torus : MomentRoute::fft;
}

/// Mean of |P(s)|^{2q} over s in [0, 1].
inline double moment(const QuadraticFamily& f, int q, MomentRoute route = MomentRoute::automatic) {
  if (q < 1) throw std::invalid_argument("moment: q must be >= 1");
  if (f.a.empty()) throw std::invalid_argument("moment: empty coefficient vector");
  if (route == MomentRoute::automatic) route = choose_route(f, q);
  switch (route) {
    case MomentRoute::fft: return detail::moment_fft(f, q);
    case MomentRoute::torus: return detail::moment_torus(f, q);
    case MomentRoute::direct: return detail::moment_direct(f, q);
    case MomentRoute::automatic: break;
  }
  throw std::logic_error("moment: unreachable");
}

/// The s-frequencies of the sum: (4n + alpha)^2 = 16 (2 j^2 + (4b + alpha) j) + const.
inline QuadraticFamily family_of(const ExpSumSpec& spec) {
  spec.validate();
  return {2, 4 * spec.b + spec.alpha, spec.coeffs};
}

/// Exact L^p(tau_0) norm of S for even p.
inline double lp_norm(const ExpSumSpec& spec, int p, MomentRoute route = MomentRoute::automatic) {
  if (p < 2 || p % 2 != 0) {
    throw std::invalid_argument("lp_norm: p must be an even integer >= 2 (use lp_norm_approx)");
  }
  const double m = moment(family_of(spec), p / 2, route);
  return std::pow(kBasePeriod * m, 1.0 / p);
}

struct LpApprox {
  double value = 0.0;
  double refinement_delta = 0.0;  ///< |estimate(samples) - estimate(samples/2)|
  std::int64_t samples = 0;
};

/// Riemann sum of |S|^p on a uniform t-grid of [0, 32 pi).
inline LpApprox lp_norm_approx(const ExpSumSpec& spec, double p, std::int64_t samples) {
  spec.validate();
  if (!(p >= 1.0)) throw std::invalid_argument("lp_norm_approx: p must be >= 1");
  if (samples < 10000) throw std::invalid_argument("lp_norm_approx: need at least 1e4 samples");
  samples += samples % 2;
  const std::int64_t c = 4 * spec.b + spec.alpha;
  detail::ComplexFft fft(static_cast<std::size_t>(samples), -1);
  auto d = fft.data();
  std::fill(d.begin(), d.end(), cplx{});
  for (std::int64_t j = 0; j <= spec.N; ++j) {
    // exact s-frequency relative to j = 0 is 16 (2 j^2 + c j)
    const auto h = static_cast<unsigned __int128>(16) * static_cast<unsigned __int128>(2 * j * j + c * j);
    d[static_cast<std::size_t>(h % static_cast<unsigned __int128>(samples))] +=
        spec.coeffs[static_cast<std::size_t>(j)];
  }
  fft.execute();
  detail::RealSum all, even;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const double v = std::pow(std::abs(d[i]), p);
    all.add(v);
    if (i % 2 == 0) even.add(v);
  }
  const double fine = std::pow(kBasePeriod * all.value() / static_cast<double>(samples), 1.0 / p);
  const double coarse =
      std::pow(kBasePeriod * even.value() / static_cast<double>(samples / 2), 1.0 / p);
  return {fine, std::abs(fine - coarse), samples};
}

// ---------------------------------------------------------------------------
// Random coefficient families and the scaling sweep

enum class CoeffFamily { constant, random_phase, gaussian };

inline const char* to_string(CoeffFamily f) {
  switch (f) {
    case CoeffFamily::constant: return "constant";
    case CoeffFamily::random_phase: return "random_phase";
    case CoeffFamily::gaussian: return "gaussian";
  }
  return "?";
}

inline CoeffFamily coeff_family_from_string(const std::string& s) {
  if (s == "constant") return CoeffFamily::constant;
  if (s == "random_phase") return CoeffFamily::random_phase;
  if (s == "gaussian") return CoeffFamily::gaussian;
  throw std::invalid_argument("unknown coefficient family '" + s + "'");
}

/// `count` l2-normalized coefficients.
template <typename Rng>
std::vector<cplx> make_coefficients(CoeffFamily family, std::size_t count, Rng& rng) {
  std::vector<cplx> c(count);
  const double inv = 1.0 / std::sqrt(static_cast<double>(count));
  switch (family) {
    case CoeffFamily::constant:
      std::fill(c.begin(), c.end(), cplx(inv));
      return c;
    case CoeffFamily::random_phase: {
      std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
      for (auto& z : c) z = std::polar(inv, u(rng));
      return c;
    }
    case CoeffFamily::gaussian: {
      std::normal_distribution<double> g;
      double s = 0.0;
      for (auto& z : c) {
        z = {g(rng), g(rng)};
        s += std::norm(z);
      }
      for (auto& z : c) z /= std::sqrt(s);
      return c;
    }
  }
  return c;
}

struct LemmaLpOptions {
  int p = 6;
  std::vector<std::int64_t> Ns{8, 16, 32, 64, 128, 256, 512};
  std::vector<CoeffFamily> families{CoeffFamily::constant, CoeffFamily::random_phase,
                                    CoeffFamily::gaussian};
  std::vector<std::int64_t> bs{0, 1000, 1000000};
  int trials = 1;  ///< per (family, b); the constant family always runs once
  std::int64_t alpha = 0;
  std::uint64_t seed = 1;
  unsigned threads = 1;
};

/// Per N, the largest lp_norm over all trials; slope is fitted against N.
inline ScalingReport verify_lemma_lp(const LemmaLpOptions& opt) {
  struct Job {
    std::size_t n_index;
    std::int64_t N, b;
    CoeffFamily family;
    int trial;
  };
  std::vector<Job> jobs;
  for (std::size_t i = 0; i < opt.Ns.size(); ++i) {
    for (auto fam : opt.families) {
      for (auto b : opt.bs) {
        const int trials = fam == CoeffFamily::constant ? 1 : opt.trials;
        for (int t = 0; t < trials; ++t) jobs.push_back({i, opt.Ns[i], b, fam, t});
      }
    }
  }
  std::vector<double> value(jobs.size());
  parallel_for(jobs.size(), opt.threads, [&](std::size_t k) {
    const auto& jb = jobs[k];
    auto rng = detail::make_rng(opt.seed, {static_cast<std::uint64_t>(jb.N),
                                           static_cast<std::uint64_t>(jb.family),
                                           static_cast<std::uint64_t>(jb.b),
                                           static_cast<std::uint64_t>(jb.trial)});
    ExpSumSpec spec{jb.b, jb.N, opt.alpha,
                    make_coefficients(jb.family, static_cast<std::size_t>(jb.N + 1), rng)};
    value[k] = lp_norm(spec, opt.p);
  });
  std::vector<ScalingSample> samples;
  for (std::size_t i = 0; i < opt.Ns.size(); ++i) {
    double best = 0.0;
    for (std::size_t k = 0; k < jobs.size(); ++k) {
      if (jobs[k].n_index == i) best = std::max(best, value[k]);
    }
    samples.push_back({static_cast<double>(opt.Ns[i]), best});
  }
  return fit_scaling(std::move(samples));
}

/// The exponent 1/2 - 2/p of N in the L^p bound.
inline double lemma_lp_exponent(double p) { return 0.5 - 2.0 / p; }

}  // namespace zoll
