#pragma once

// Zonal spectral geometry of the round unit 3-sphere.
//
// Zonal functions depend only on the polar angle theta. The L2-normalized
// zonal eigenfunction of degree k is
//
//     e_k(theta) = U_k(cos theta) / sqrt(2 pi^2),
//
// U_k the Chebyshev polynomial of the second kind, with -Delta e_k = k(k+2) e_k.
// The volume element restricted to zonal functions is 4 pi sin^2(theta) dtheta.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "zoll/detail/numeric.hpp"

namespace zoll {

/// Laplace eigenvalue lambda_k^2 = (k+1)^2 - 1 of the degree-k spherical harmonics.
constexpr std::int64_t eigenvalue(std::int64_t k) { return k * (k + 2); }

/// Dimension (k+1)^2 of the degree-k eigenspace (all harmonics, not only zonal).
constexpr std::int64_t multiplicity(std::int64_t k) { return (k + 1) * (k + 1); }

/// Japanese bracket <x> = sqrt(1 + x^2).
inline double bracket(double x) { return std::sqrt(1.0 + x * x); }

// ---------------------------------------------------------------------------
// Spectral clustering

/// Windows I_0 = [-B, B] and I_n = [mu_n^2 - E, mu_n^2 + E], mu_n = n + alpha/4.
class ClusterScheme {
 public:
  /// The round S^3 values: every lambda_k^2 sits in the window I_k.
  ClusterScheme() : ClusterScheme(4, 1.0, 1.0) {}

  ClusterScheme(std::int64_t alpha, double E, double B) : alpha_(alpha), E_(E), B_(B) {
    if (alpha < 0) throw std::invalid_argument("ClusterScheme: alpha must be >= 0");
    if (!(E > 0.0) || !(B > 0.0)) {
      throw std::invalid_argument("ClusterScheme: E and B must be positive");
    }
    // Gaps mu_{n+1}^2 - mu_n^2 = 2 mu_n + 1 grow with n, so n = 1 is the
    // tightest pair; I_0 only borders I_1.
    if (!(B < mu_sq(1) - E)) {
      throw std::invalid_argument("ClusterScheme: I_0 overlaps I_1");
    }
    if (!(mu_sq(1) + E < mu_sq(2) - E)) {
      throw std::invalid_argument("ClusterScheme: I_1 overlaps I_2");
    }
  }

  [[nodiscard]] std::int64_t alpha() const { return alpha_; }
  [[nodiscard]] double E() const { return E_; }
  [[nodiscard]] double B() const { return B_; }

  /// mu_n = n + alpha/4 for n >= 1, mu_0 = 0.
  [[nodiscard]] double mu(std::int64_t n) const {
    return n == 0 ? 0.0 : static_cast<double>(n) + static_cast<double>(alpha_) / 4.0;
  }
  [[nodiscard]] double mu_sq(std::int64_t n) const { return mu(n) * mu(n); }

  /// 16 mu_n^2 = (4n + alpha)^2 (n >= 1), always an integer.
  [[nodiscard]] std::int64_t mu_sq_times16(std::int64_t n) const {
    if (n == 0) return 0;
    const std::int64_t m = 4 * n + alpha_;
    return m * m;
  }

  [[nodiscard]] bool in_window(std::int64_t n, double lambda_sq) const {
    if (n == 0) return std::abs(lambda_sq) <= B_;
    return std::abs(lambda_sq - mu_sq(n)) <= E_;
  }

 private:
  std::int64_t alpha_;
  double E_;
  double B_;
};

/// Index n of the window I_n containing lambda_sq, if any.
inline std::optional<std::int64_t> cluster_of(const ClusterScheme& scheme, double lambda_sq) {
  if (scheme.in_window(0, lambda_sq)) return 0;
  if (lambda_sq < 0.0) return std::nullopt;
  const auto guess = static_cast<std::int64_t>(
      std::llround(std::sqrt(lambda_sq) - static_cast<double>(scheme.alpha()) / 4.0));
  for (std::int64_t n = std::max<std::int64_t>(1, guess - 1); n <= guess + 1; ++n) {
    if (scheme.in_window(n, lambda_sq)) return n;
  }
  return std::nullopt;
}

/// Cluster index of the degree-k eigenvalue; throws if k falls in no window.
inline std::int64_t cluster_of_degree(const ClusterScheme& scheme, std::int64_t k) {
  const auto n = cluster_of(scheme, static_cast<double>(eigenvalue(k)));
  if (!n) {
    throw std::domain_error("degree " + std::to_string(k) + " lies outside every cluster window");
  }
  return *n;
}

/// Dyadic block of cluster indices: {0} for N = 0, otherwise [N, 2N).
struct DyadicBlock {
  std::int64_t N = 0;

  explicit DyadicBlock(std::int64_t n) : N(n) {
    if (n < 0 || (n > 0 && (n & (n - 1)) != 0)) {
      throw std::invalid_argument("DyadicBlock: N must be 0 or a power of two");
    }
  }
  [[nodiscard]] bool contains(std::int64_t n) const {
    return N == 0 ? n == 0 : (n >= N && n < 2 * N);
  }
  [[nodiscard]] std::int64_t first() const { return N; }
  [[nodiscard]] std::int64_t last() const { return N == 0 ? 0 : 2 * N - 1; }

  friend bool operator==(const DyadicBlock&, const DyadicBlock&) = default;
};

/// The dyadic block that contains cluster index n.
inline DyadicBlock block_of(std::int64_t n) {
  if (n <= 0) return DyadicBlock(0);
  std::int64_t N = 1;
  while (2 * N <= n) N *= 2;
  return DyadicBlock(N);
}

/// Blocks 0, 1, 2, 4, ... covering cluster indices 0..n_max.
inline std::vector<DyadicBlock> blocks_up_to(std::int64_t n_max) {
  std::vector<DyadicBlock> out{DyadicBlock(0)};
  for (std::int64_t N = 1; N <= n_max; N *= 2) out.emplace_back(N);
  return out;
}

// ---------------------------------------------------------------------------
// Zonal fields

/// Coefficients c_0..c_K of sum_k c_k e_k.
struct ZonalField {
  std::vector<cplx> coeffs;

  ZonalField() : coeffs(1) {}
  explicit ZonalField(std::int64_t cutoff) : coeffs(static_cast<std::size_t>(cutoff + 1)) {
    if (cutoff < 0) throw std::invalid_argument("ZonalField: negative cutoff");
  }
  explicit ZonalField(std::vector<cplx> c) : coeffs(std::move(c)) {
    if (coeffs.empty()) throw std::invalid_argument("ZonalField: empty coefficient vector");
  }

  /// The unit eigenfunction e_k inside a field of the given cutoff.
  static ZonalField mode(std::int64_t k, std::int64_t cutoff, cplx value = 1.0) {
    ZonalField f(std::max(k, cutoff));
    f.coeffs[static_cast<std::size_t>(k)] = value;
    return f;
  }

  [[nodiscard]] std::int64_t cutoff() const { return static_cast<std::int64_t>(coeffs.size()) - 1; }
  [[nodiscard]] cplx operator[](std::int64_t k) const {
    return k <= cutoff() ? coeffs[static_cast<std::size_t>(k)] : cplx{};
  }

  /// Copy with cutoff changed (zero-padded or truncated).
  [[nodiscard]] ZonalField with_cutoff(std::int64_t K) const {
    ZonalField out(K);
    const auto n = std::min(coeffs.size(), out.coeffs.size());
    std::copy_n(coeffs.begin(), n, out.coeffs.begin());
    return out;
  }

  /// Highest degree carrying a nonzero coefficient (0 for the zero field).
  [[nodiscard]] std::int64_t degree() const {
    for (std::int64_t k = cutoff(); k > 0; --k) {
      if (coeffs[static_cast<std::size_t>(k)] != cplx{}) return k;
    }
    return 0;
  }

  ZonalField& operator+=(const ZonalField& o) {
    if (o.cutoff() > cutoff()) coeffs.resize(o.coeffs.size());
    for (std::size_t k = 0; k < o.coeffs.size(); ++k) coeffs[k] += o.coeffs[k];
    return *this;
  }
  ZonalField& operator-=(const ZonalField& o) {
    if (o.cutoff() > cutoff()) coeffs.resize(o.coeffs.size());
    for (std::size_t k = 0; k < o.coeffs.size(); ++k) coeffs[k] -= o.coeffs[k];
    return *this;
  }
  ZonalField& operator*=(cplx s) {
    for (auto& c : coeffs) c *= s;
    return *this;
  }
  friend ZonalField operator+(ZonalField a, const ZonalField& b) { return a += b; }
  friend ZonalField operator-(ZonalField a, const ZonalField& b) { return a -= b; }
  friend ZonalField operator*(cplx s, ZonalField a) { return a *= s; }
  friend ZonalField operator*(ZonalField a, cplx s) { return a *= s; }
  friend bool operator==(const ZonalField&, const ZonalField&) = default;
};

/// L2(S^3) norm; equals the Euclidean norm of the coefficients.
inline double l2_norm(const ZonalField& f) {
  double s = 0.0;
  for (const auto& c : f.coeffs) s += std::norm(c);
  return std::sqrt(s);
}

/// L2 distance between two fields of possibly different cutoffs.
inline double l2_distance(const ZonalField& a, const ZonalField& b) {
  const auto K = std::max(a.cutoff(), b.cutoff());
  double s = 0.0;
  for (std::int64_t k = 0; k <= K; ++k) s += std::norm(a[k] - b[k]);
  return std::sqrt(s);
}

/// (sum_k (1 + lambda_k^2)^s |c_k|^2)^{1/2}.
inline double sobolev_norm(const ZonalField& f, double s) {
  double acc = 0.0;
  for (std::int64_t k = 0; k <= f.cutoff(); ++k) {
    acc += std::pow(1.0 + static_cast<double>(eigenvalue(k)), s) * std::norm(f[k]);
  }
  return std::sqrt(acc);
}

/// e_k(theta) for a single degree, via U_k(cos theta) = sin((k+1) theta) / sin theta.
inline double basis_value(std::int64_t k, double theta) {
  const double s = std::sin(theta);
  double u;
  if (std::abs(s) < 1e-8) {
    // U_k(+-1) = (+-1)^k (k+1)
    const double sign = (std::cos(theta) < 0.0 && (k % 2 != 0)) ? -1.0 : 1.0;
    u = sign * static_cast<double>(k + 1);
  } else {
    u = std::sin(static_cast<double>(k + 1) * theta) / s;
  }
  return u / std::sqrt(kSphereVolume);
}

/// Pointwise values of sum_k c_k e_k(theta) by Clenshaw's backward recurrence.
inline cplx synthesize_at(const ZonalField& f, double theta) {
  const double x2 = 2.0 * std::cos(theta);
  cplx b1{}, b2{};
  for (std::int64_t k = f.cutoff(); k >= 0; --k) {
    const cplx b0 = f.coeffs[static_cast<std::size_t>(k)] + x2 * b1 - b2;
    b2 = b1;
    b1 = b0;
  }
  return b1 / std::sqrt(kSphereVolume);
}

inline std::vector<cplx> synthesize(const ZonalField& f, std::span<const double> thetas) {
  std::vector<cplx> out;
  out.reserve(thetas.size());
  for (double th : thetas) out.push_back(synthesize_at(f, th));
  return out;
}

// ---------------------------------------------------------------------------
// Quadrature and transforms

/// Gauss rule for the zonal measure 4 pi sin^2(theta) dtheta.
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};

/// theta_j = j pi/(M+1), w_j = 4 pi (pi/(M+1)) sin^2 theta_j for j = 1..M.
/// Exact for polynomials in cos(theta) of degree <= 2M - 1.
inline QuadratureRule quadrature_rule(std::int64_t M) {
  if (M < 1) throw std::invalid_argument("quadrature_rule: need M >= 1");
  QuadratureRule q;
  q.nodes.resize(static_cast<std::size_t>(M));
  q.weights.resize(static_cast<std::size_t>(M));
  const double h = kPi / static_cast<double>(M + 1);
  for (std::int64_t j = 1; j <= M; ++j) {
    const double th = static_cast<double>(j) * h;
    const double s = std::sin(th);
    q.nodes[static_cast<std::size_t>(j - 1)] = th;
    q.weights[static_cast<std::size_t>(j - 1)] = 4.0 * kPi * h * s * s;
  }
  return q;
}

/// Precomputed grid transform between degree-<=K coefficients and M node values.
class ZonalTransform {
 public:
  ZonalTransform(std::int64_t M, std::int64_t K) : M_(M), K_(K), rule_(quadrature_rule(M)) {
    if (K < 0) throw std::invalid_argument("ZonalTransform: negative cutoff");
    const auto rows = static_cast<std::size_t>(M);
    const auto cols = static_cast<std::size_t>(K + 1);
    table_.resize(rows * cols);
    for (std::size_t j = 0; j < rows; ++j) {
      for (std::size_t k = 0; k < cols; ++k) {
        table_[j * cols + k] = basis_value(static_cast<std::int64_t>(k), rule_.nodes[j]);
      }
    }
  }

  [[nodiscard]] std::int64_t nodes() const { return M_; }
  [[nodiscard]] std::int64_t cutoff() const { return K_; }
  [[nodiscard]] const QuadratureRule& rule() const { return rule_; }

  /// Node values of f; coefficients above the transform cutoff are ignored.
  void synthesize(const ZonalField& f, std::span<cplx> values) const {
    const auto cols = static_cast<std::size_t>(K_ + 1);
    const auto kmax = static_cast<std::size_t>(std::min(f.cutoff(), K_)) + 1;
    for (std::size_t j = 0; j < static_cast<std::size_t>(M_); ++j) {
      const double* row = &table_[j * cols];
      double re = 0.0, im = 0.0;
      for (std::size_t k = 0; k < kmax; ++k) {
        re += row[k] * f.coeffs[k].real();
        im += row[k] * f.coeffs[k].imag();
      }
      values[j] = {re, im};
    }
  }
  [[nodiscard]] std::vector<cplx> synthesize(const ZonalField& f) const {
    std::vector<cplx> v(static_cast<std::size_t>(M_));
    synthesize(f, v);
    return v;
  }

  /// c_k = sum_j w_j v_j e_k(theta_j), k = 0..K.
  void analyze(std::span<const cplx> values, ZonalField& out) const {
    const auto cols = static_cast<std::size_t>(K_ + 1);
    out.coeffs.assign(cols, cplx{});
    std::vector<double> re(cols, 0.0), im(cols, 0.0);
    for (std::size_t j = 0; j < static_cast<std::size_t>(M_); ++j) {
      const double* row = &table_[j * cols];
      const double wr = rule_.weights[j] * values[j].real();
      const double wi = rule_.weights[j] * values[j].imag();
      for (std::size_t k = 0; k < cols; ++k) {
        re[k] += wr * row[k];
        im[k] += wi * row[k];
      }
    }
    for (std::size_t k = 0; k < cols; ++k) out.coeffs[k] = {re[k], im[k]};
  }
  [[nodiscard]] ZonalField analyze(std::span<const cplx> values) const {
    ZonalField out(K_);
    analyze(values, out);
    return out;
  }

  /// Quadrature of a function given by its node values.
  [[nodiscard]] double integrate(std::span<const double> values) const {
    double s = 0.0;
    for (std::size_t j = 0; j < values.size(); ++j) s += rule_.weights[j] * values[j];
    return s;
  }

 private:
  std::int64_t M_;
  std::int64_t K_;
  QuadratureRule rule_;
  std::vector<double> table_;  // row-major M x (K+1)
};

/// Discrete zonal transform of node values on the M-point rule, truncated at degree K.
inline ZonalField analyze(std::span<const cplx> values, std::int64_t M, std::int64_t K) {
  if (M < 1) throw std::invalid_argument("analyze: need M >= 1");
  if (static_cast<std::int64_t>(values.size()) != M) {
    throw std::invalid_argument("analyze: expected one value per quadrature node");
  }
  return ZonalTransform(M, K).analyze(values);
}

// ---------------------------------------------------------------------------
// Projectors

/// Keep only degrees whose eigenvalue lies in window I_n.
inline ZonalField project(const ZonalField& f, const ClusterScheme& scheme, std::int64_t n) {
  ZonalField out(f.cutoff());
  for (std::int64_t k = 0; k <= f.cutoff(); ++k) {
    if (scheme.in_window(n, static_cast<double>(eigenvalue(k)))) {
      out.coeffs[static_cast<std::size_t>(k)] = f[k];
    }
  }
  return out;
}

/// Keep only degrees whose cluster index lies in the dyadic block.
inline ZonalField project(const ZonalField& f, const ClusterScheme& scheme, DyadicBlock block) {
  ZonalField out(f.cutoff());
  for (std::int64_t k = 0; k <= f.cutoff(); ++k) {
    const auto n = cluster_of(scheme, static_cast<double>(eigenvalue(k)));
    if (n && block.contains(*n)) out.coeffs[static_cast<std::size_t>(k)] = f[k];
  }
  return out;
}

/// Degrees k whose cluster index falls in the block, restricted to k <= K.
inline std::vector<std::int64_t> degrees_in_block(const ClusterScheme& scheme, DyadicBlock block,
                                                  std::int64_t K) {
  std::vector<std::int64_t> out;
  for (std::int64_t k = 0; k <= K; ++k) {
    const auto n = cluster_of(scheme, static_cast<double>(eigenvalue(k)));
    if (n && block.contains(*n)) out.push_back(k);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Pointwise quantities

/// max_theta |f(theta)| on a 16(K+1)-point grid, each local maximum polished
/// by a few finite-difference Newton steps. Never exceeds the true supremum.
inline double sup_norm(const ZonalField& f) {
  const std::int64_t G = 16 * (f.cutoff() + 1) + 1;
  const double h = kPi / static_cast<double>(G - 1);
  std::vector<double> g(static_cast<std::size_t>(G));
  for (std::int64_t i = 0; i < G; ++i) {
    g[static_cast<std::size_t>(i)] = std::norm(synthesize_at(f, static_cast<double>(i) * h));
  }
  double best = *std::max_element(g.begin(), g.end());
  auto mod2 = [&](double th) { return std::norm(synthesize_at(f, th)); };
  for (std::int64_t i = 1; i + 1 < G; ++i) {
    const auto u = static_cast<std::size_t>(i);
    if (!(g[u] >= g[u - 1] && g[u] >= g[u + 1])) continue;
    double th = static_cast<double>(i) * h;
    double gth = g[u];
    double d = h / 4.0;
    for (int it = 0; it < 3; ++it, d /= 16.0) {
      const double gp = mod2(th + d), gm = mod2(th - d);
      const double d1 = (gp - gm) / (2.0 * d);
      const double d2 = (gp - 2.0 * gth + gm) / (d * d);
      if (!(d2 < 0.0)) break;
      const double step = -d1 / d2;
      if (std::abs(step) > h) break;
      th += step;
      gth = mod2(th);
      best = std::max(best, gth);
    }
  }
  return std::sqrt(best);
}

enum class Truncation {
  to_cutoff,  ///< project the product back to degree <= K (nodes M = 3K+1)
  none,       ///< keep the full degree-5K product (nodes M = 5K+1)
};

/// Node count that makes the quintic product exact under the chosen truncation.
constexpr std::int64_t quintic_nodes(std::int64_t K, Truncation t) {
  return t == Truncation::to_cutoff ? 3 * K + 1 : 5 * K + 1;
}

/// sign * |u|^4 u computed on the quadrature grid.
inline ZonalField pointwise_quintic(const ZonalField& u, int sign,
                                    Truncation truncation = Truncation::to_cutoff) {
  if (sign != 1 && sign != -1) throw std::invalid_argument("pointwise_quintic: sign must be +-1");
  const std::int64_t K = u.cutoff();
  const std::int64_t M = quintic_nodes(K, truncation);
  const std::int64_t out_cutoff = truncation == Truncation::to_cutoff ? K : 5 * K;
  ZonalTransform in(M, K);
  auto v = in.synthesize(u);
  for (auto& z : v) {
    const double a2 = std::norm(z);
    z *= static_cast<double>(sign) * a2 * a2;
  }
  if (out_cutoff == K) return in.analyze(v);
  return ZonalTransform(M, out_cutoff).analyze(v);
}

}  // namespace zoll
