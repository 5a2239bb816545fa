#pragma once

// Log-log regression of (size, measured) samples.

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "zoll/detail/numeric.hpp"

namespace zoll {

struct ScalingSample {
  double size = 0.0;
  double value = 0.0;
};

/// Samples with the OLS fit log(value) = slope * log(size) + log(constant).
struct ScalingReport {
  std::vector<ScalingSample> samples;
  double slope = 0.0;
  double constant = 0.0;
  double residual = 0.0;  ///< rms residual of the log-log fit

  [[nodiscard]] double predicted(double size) const { return constant * std::pow(size, slope); }
};

/// Fits the report; needs at least two distinct sizes and positive values.
inline ScalingReport fit_scaling(std::vector<ScalingSample> samples) {
  if (samples.size() < 2) throw std::invalid_argument("fit_scaling: need at least two samples");
  std::vector<double> xs, ys;
  for (const auto& s : samples) {
    if (!(s.size > 0.0) || !(s.value > 0.0)) {
      throw std::invalid_argument("fit_scaling: sizes and values must be positive");
    }
    xs.push_back(std::log(s.size));
    ys.push_back(std::log(s.value));
  }
  const auto fit = detail::least_squares(xs, ys);
  ScalingReport r;
  r.samples = std::move(samples);
  r.slope = fit.slope;
  r.constant = std::exp(fit.intercept);
  r.residual = fit.rms_residual;
  return r;
}

struct Verdict {
  bool pass = false;
  double slope = 0.0;
  double predicted = 0.0;
  double slack = 0.0;
};

/// pass iff slope <= predicted + slack.
inline Verdict fit_and_judge(const ScalingReport& report, double predicted, double slack) {
  if (report.samples.size() < 4) throw std::invalid_argument("fit_and_judge: need at least 4 samples");
  return {report.slope <= predicted + slack, report.slope, predicted, slack};
}

}  // namespace zoll
