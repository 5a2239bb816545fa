#pragma once

// Step paths and the variation norms V^p, U^p (bracketed), X^s, Y^s.
//
// A StepPath has breakpoints t_0 < ... < t_K (t_K may be +inf) and values
// v_0..v_{K-1}, v_k on [t_k, t_{k+1}); it is 0 before t_0 and after t_K.
// When `evolving` names a flow A, the path is t -> e^{itA} v_k on piece k,
// so norms computed from the values are the flow-adapted norms.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <stdexcept>
#include <vector>

#include "zoll/flow.hpp"
#include "zoll/sphere.hpp"

namespace zoll {

struct StepPath {
  std::vector<double> times;
  std::vector<ZonalField> values;
  std::optional<Flow> evolving;

  [[nodiscard]] std::size_t pieces() const { return values.size(); }
  [[nodiscard]] bool infinite_tail() const { return !times.empty() && std::isinf(times.back()); }

  void validate() const {
    if (values.empty()) {
      if (times.size() > 1) throw std::invalid_argument("StepPath: breakpoints without values");
      return;
    }
    if (times.size() != values.size() + 1) {
      throw std::invalid_argument("StepPath: need one more breakpoint than values");
    }
    for (std::size_t i = 0; i + 1 < times.size(); ++i) {
      if (!std::isfinite(times[i])) throw std::invalid_argument("StepPath: only the last breakpoint may be infinite");
      if (!(times[i] < times[i + 1])) throw std::invalid_argument("StepPath: breakpoints must increase");
    }
    if (std::isinf(times.back()) && times.back() < 0) {
      throw std::invalid_argument("StepPath: last breakpoint cannot be -inf");
    }
  }

  /// Value at time t (right-continuous).
  [[nodiscard]] ZonalField value_at(double t, const ClusterScheme& scheme = ClusterScheme()) const {
    validate();
    for (std::size_t k = 0; k < values.size(); ++k) {
      if (t >= times[k] && t < times[k + 1]) {
        return evolving ? linear_propagate(values[k], t, *evolving, scheme) : values[k];
      }
    }
    return ZonalField(values.empty() ? 0 : values.front().cutoff());
  }

  [[nodiscard]] double sup_norm() const {
    double m = 0.0;
    for (const auto& v : values) m = std::max(m, l2_norm(v));
    return m;
  }
};

/// chi_[a,b) phi.
inline StepPath single_step(double a, double b, ZonalField phi, std::optional<Flow> evolving = {}) {
  StepPath p{{a, b}, {std::move(phi)}, evolving};
  p.validate();
  return p;
}

namespace detail {
/// The jump sequence (0, v_0, ..., v_{K-1}, 0) the variation norms act on.
inline std::vector<const ZonalField*> jump_points(const StepPath& path, const ZonalField& zero) {
  std::vector<const ZonalField*> w{&zero};
  for (const auto& v : path.values) w.push_back(&v);
  w.push_back(&zero);
  return w;
}
}  // namespace detail

/// Exact V^p norm of the step function, v(infinity) = 0: the supremum over
/// partitions is attained on one point per piece, found by O(K^2) dynamic programming.
inline double vp_norm(const StepPath& path, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("vp_norm: p must be >= 1");
  path.validate();
  if (path.values.empty()) return 0.0;
  const ZonalField zero(0);
  const auto w = detail::jump_points(path, zero);
  const std::size_t n = w.size();
  std::vector<double> best(n, 0.0);
  for (std::size_t i = 1; i < n; ++i) {
    double b = 0.0;
    for (std::size_t j = 0; j < i; ++j) {
      b = std::max(b, best[j] + std::pow(l2_distance(*w[i], *w[j]), p));
    }
    best[i] = b;
  }
  return std::pow(best.back(), 1.0 / p);
}

struct AtomCheck {
  StepPath path;
  bool valid = false;
  double mass = 0.0;  ///< sum_k ||phi_k||^p
};

/// Builds the step path and checks the U^p-atom normalization sum ||phi_k||^p = 1.
inline AtomCheck up_atom(std::vector<double> times, std::vector<ZonalField> values, double p) {
  AtomCheck a;
  a.path = StepPath{std::move(times), std::move(values), std::nullopt};
  a.path.validate();
  for (const auto& v : a.path.values) a.mass += std::pow(l2_norm(v), p);
  a.valid = std::abs(a.mass - 1.0) <= 1e-12;
  return a;
}

/// lower <= ||path||_{U^p} <= upper.
struct UpBracket {
  double lower = 0.0;
  double upper = 0.0;
  double telescoping = 0.0;  ///< sum of jump sizes (one-jump atoms chi_[t,inf) psi)
  double direct = 0.0;       ///< (sum ||v_k||^p)^{1/p}: the path as a multiple of one atom
  double sup = 0.0;          ///< max ||v_k||
  double vp = 0.0;           ///< V^p norm
  [[nodiscard]] double midpoint() const { return 0.5 * (lower + upper); }
  [[nodiscard]] double width() const { return upper - lower; }
};

inline UpBracket up_norm_bracket(const StepPath& path, double p) {
  if (!(p >= 1.0)) throw std::invalid_argument("up_norm_bracket: p must be >= 1");
  path.validate();
  UpBracket r;
  if (path.values.empty()) return r;
  double direct = 0.0;
  for (std::size_t k = 0; k < path.values.size(); ++k) {
    r.telescoping += k == 0 ? l2_norm(path.values[0]) : l2_distance(path.values[k], path.values[k - 1]);
    direct += std::pow(l2_norm(path.values[k]), p);
  }
  // An infinite last piece needs no closing atom.
  if (!path.infinite_tail()) r.telescoping += l2_norm(path.values.back());
  r.direct = std::pow(direct, 1.0 / p);
  r.sup = path.sup_norm();
  r.vp = vp_norm(path, p);
  r.upper = std::min(r.telescoping, r.direct);
  r.lower = std::max(r.sup, r.vp / 2.0);
  return r;
}

struct ConjugateOptions {
  bool refine = true;                  ///< sub-sample pieces where the combined phase moves
  double density = 8.0;                ///< sub-pieces per unit (rate x length)
  double merge_tol = 1e-13;            ///< merge neighbours closer than merge_tol * sup norm
  std::int64_t max_subpieces = 1 << 22;
};

struct ConjugatedPath {
  StepPath path;
  double refinement_error_bound = 0.0;  ///< sup_t distance between the true conjugate and `path`
  std::int64_t subpieces = 0;
};

/// t -> e^{i direction t A} u(t). Exact when the phases cancel (an evolving
/// path conjugated back by its own flow) or when a static path is pushed
/// forward; otherwise re-sampled at sub-piece left endpoints.
inline ConjugatedPath conjugate_by_flow(const StepPath& path, int direction, Flow flow,
                                        const ClusterScheme& scheme = ClusterScheme(),
                                        const ConjugateOptions& opt = {}) {
  if (direction != 1 && direction != -1) throw std::invalid_argument("conjugate_by_flow: direction must be +-1");
  path.validate();
  ConjugatedPath out;
  if (path.values.empty()) {
    out.path = path;
    out.path.evolving.reset();
    return out;
  }
  if (!path.evolving && direction == 1) {
    out.path = path;
    out.path.evolving = flow;
    out.subpieces = static_cast<std::int64_t>(path.pieces());
    return out;
  }
  const std::int64_t K = path.values.front().cutoff();
  // 16 x combined rate: w(t) = sum_k exp(-i t omega_k) v_k[k] e_k
  std::vector<std::int64_t> omega16(static_cast<std::size_t>(K + 1));
  double max_rate = 0.0;
  for (std::int64_t k = 0; k <= K; ++k) {
    const std::int64_t in = path.evolving ? flow_rate16(*path.evolving, k, scheme) : 0;
    omega16[static_cast<std::size_t>(k)] = in + direction * flow_rate16(flow, k, scheme);
    max_rate = std::max(max_rate, std::abs(static_cast<double>(omega16[static_cast<std::size_t>(k)])) / 16.0);
  }
  auto phase_at = [&](const ZonalField& v, double t) {
    ZonalField r(v.cutoff());
    for (std::int64_t k = 0; k <= v.cutoff(); ++k) {
      const auto i = static_cast<std::size_t>(k);
      r.coeffs[i] = omega16[i] == 0 ? v.coeffs[i] : detail::cmul(v.coeffs[i], detail::unit_phase(omega16[i], t / 16.0));
    }
    return r;
  };
  std::vector<double> times;
  std::vector<ZonalField> values;
  const double scale = path.sup_norm();
  for (std::size_t piece = 0; piece < path.pieces(); ++piece) {
    const double a = path.times[piece], b = path.times[piece + 1];
    const auto& v = path.values[piece];
    if (max_rate == 0.0) {
      times.push_back(a);
      values.push_back(v);
      continue;
    }
    const double vn = l2_norm(v);
    std::int64_t nsub = 1;
    if (std::isinf(b)) {
      out.refinement_error_bound = std::max(out.refinement_error_bound, vn == 0.0 ? 0.0 : 2.0 * vn);
    } else {
      if (opt.refine) {
        nsub = std::max<std::int64_t>(1, static_cast<std::int64_t>(std::ceil(opt.density * max_rate * (b - a))));
      }
      const double h = (b - a) / static_cast<double>(nsub);
      out.refinement_error_bound = std::max(out.refinement_error_bound, std::min(h * max_rate, 2.0) * vn);
    }
    out.subpieces += nsub;
    if (out.subpieces > opt.max_subpieces) {
      throw std::runtime_error("conjugate_by_flow: refinement exceeds max_subpieces");
    }
    for (std::int64_t j = 0; j < nsub; ++j) {
      const double t = std::isinf(b) ? a : a + (b - a) * static_cast<double>(j) / static_cast<double>(nsub);
      auto w = phase_at(v, t);
      if (!values.empty() && l2_distance(values.back(), w) <= opt.merge_tol * std::max(scale, 1e-300)) continue;
      times.push_back(t);
      values.push_back(std::move(w));
    }
  }
  times.push_back(path.times.back());
  out.path = StepPath{std::move(times), std::move(values), std::nullopt};
  if (max_rate == 0.0) out.subpieces = static_cast<std::int64_t>(out.path.pieces());
  return out;
}

// ---------------------------------------------------------------------------
// Block norms

enum class BlockSpace { X, Y };

/// Per-block paths of P_N u, dyadic N -> path.
struct BlockPath {
  std::map<std::int64_t, StepPath> blocks;
};

struct BlockNorm {
  double value = 0.0;
  double lower = 0.0;  ///< X: l2 combination of bracket lower ends (Y: = value)
  double upper = 0.0;
  [[nodiscard]] double width() const { return upper - lower; }
};

/// (sum_N <N>^{2s} ||P_N u||^2)^{1/2} with flow-adapted U^2 (bracket midpoint) or V^2 norms.
inline BlockNorm xs_ys_norm(const BlockPath& bp, BlockSpace space, double s, Flow flow = Flow::laplacian,
                            const ClusterScheme& scheme = ClusterScheme(), const ConjugateOptions& opt = {}) {
  double lo2 = 0.0, hi2 = 0.0;
  for (const auto& [N, path] : bp.blocks) {
    const DyadicBlock block(N);
    for (const auto& v : path.values) {
      for (std::int64_t k = 0; k <= v.cutoff(); ++k) {
        if (v[k] != cplx{} && !block.contains(cluster_of_degree(scheme, k))) {
          throw std::invalid_argument("xs_ys_norm: block path has support outside its block");
        }
      }
    }
    const auto c = conjugate_by_flow(path, -1, flow, scheme, opt);
    const double w = std::pow(bracket(static_cast<double>(N)), 2.0 * s);
    if (space == BlockSpace::X) {
      const auto br = up_norm_bracket(c.path, 2.0);
      lo2 += w * br.lower * br.lower;
      hi2 += w * br.upper * br.upper;
    } else {
      const double v = vp_norm(c.path, 2.0);
      lo2 += w * v * v;
      hi2 += w * v * v;
    }
  }
  BlockNorm r;
  r.lower = std::sqrt(lo2);
  r.upper = std::sqrt(hi2);
  r.value = space == BlockSpace::X ? 0.5 * (r.lower + r.upper) : r.lower;
  return r;
}

/// Splits a path into its dyadic block components.
inline BlockPath split_into_blocks(const StepPath& path, const ClusterScheme& scheme = ClusterScheme()) {
  BlockPath bp;
  if (path.values.empty()) return bp;
  const std::int64_t K = path.values.front().cutoff();
  const std::int64_t nmax = cluster_of_degree(scheme, K);
  for (auto block : blocks_up_to(nmax)) {
    StepPath p{path.times, {}, path.evolving};
    bool any = false;
    for (const auto& v : path.values) {
      p.values.push_back(project(v, scheme, block));
      any = any || l2_norm(p.values.back()) > 0.0;
    }
    if (any) bp.blocks.emplace(block.N, std::move(p));
  }
  return bp;
}

}  // namespace zoll
