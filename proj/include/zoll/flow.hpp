#pragma once

// Linear Schrodinger flows on zonal fields.
//
//   laplacian: e^{itDelta}  e_k = exp(-i t lambda_k^2) e_k
//   modified : e^{itDelta~} e_k = exp(-i t mu_{n(k)}^2) e_k, n(k) the cluster of degree k
//
// Rates are kept as 16x integers so that every phase is exp(-i m t/16) with
// integer m, evaluated by the accurate reduction in unit_phase.

#include <cstdint>
#include <stdexcept>
#include <string>

#include "zoll/detail/numeric.hpp"
#include "zoll/sphere.hpp"

namespace zoll {

enum class Flow { laplacian, modified };

inline const char* to_string(Flow f) { return f == Flow::laplacian ? "laplacian" : "modified"; }

inline Flow flow_from_string(const std::string& s) {
  if (s == "laplacian" || s == "delta") return Flow::laplacian;
  if (s == "modified" || s == "delta_tilde") return Flow::modified;
  throw std::invalid_argument("unknown flow '" + s + "'");
}

/// 16 times the rate of e_k under the flow: 16 lambda_k^2 or (4n + alpha)^2.
inline std::int64_t flow_rate16(Flow flow, std::int64_t k, const ClusterScheme& scheme) {
  if (flow == Flow::laplacian) return 16 * eigenvalue(k);
  return scheme.mu_sq_times16(cluster_of_degree(scheme, k));
}

inline double flow_rate(Flow flow, std::int64_t k, const ClusterScheme& scheme) {
  return static_cast<double>(flow_rate16(flow, k, scheme)) / 16.0;
}

/// e^{itA} f for A = Delta or Delta~; unitary.
inline ZonalField linear_propagate(const ZonalField& f, double t, Flow flow = Flow::laplacian,
                                   const ClusterScheme& scheme = ClusterScheme()) {
  ZonalField out(f.cutoff());
  const double t16 = t / 16.0;
  for (std::int64_t k = 0; k <= f.cutoff(); ++k) {
    const auto i = static_cast<std::size_t>(k);
    out.coeffs[i] = detail::cmul(f.coeffs[i], detail::unit_phase(flow_rate16(flow, k, scheme), t16));
  }
  return out;
}

}  // namespace zoll
