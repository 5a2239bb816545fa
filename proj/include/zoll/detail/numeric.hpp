#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>

namespace zoll {

using cplx = std::complex<double>;

inline constexpr double kPi = std::numbers::pi;
/// Volume of the unit round 3-sphere.
inline constexpr double kSphereVolume = 2.0 * kPi * kPi;
/// Length of the base time interval [0, 32 pi]; a joint period of exp(-i t mu_n^2).
inline constexpr double kBasePeriod = 32.0 * kPi;

namespace detail {

/// exp(-i m t) for integer m, accurate to a few ulp even when |m t| is large.
///
/// The product m*t is carried as an exact double-double via fma and reduced
/// modulo 2 pi with a two-term Cody-Waite split, so that two algebraically
/// equal phases (e.g. m t and (m-1) t + t) agree to roundoff.
inline cplx unit_phase(std::int64_t m, double t) {
  constexpr double kTwoPiHi = 6.28318530717958623199592693709;  // double(2 pi)
  constexpr double kTwoPiLo = 2.44929359829470635445e-16;       // 2 pi - hi
  const double md = static_cast<double>(m);
  const double hi = md * t;
  const double lo = std::fma(md, t, -hi);
  const double k = std::nearbyint(hi / kTwoPiHi);
  double r = std::fma(-k, kTwoPiHi, hi);
  r -= k * kTwoPiLo;
  r += lo;
  return {std::cos(r), -std::sin(r)};
}

/// Complex product without the C99 Annex G inf/nan recovery path.
inline cplx cmul(cplx a, cplx b) {
  return {a.real() * b.real() - a.imag() * b.imag(), a.real() * b.imag() + a.imag() * b.real()};
}

/// Neumaier-compensated accumulator for complex sums.
class CompensatedSum {
 public:
  void add(cplx x) {
    add_part(x.real(), re_, re_c_);
    add_part(x.imag(), im_, im_c_);
  }
  [[nodiscard]] cplx value() const { return {re_ + re_c_, im_ + im_c_}; }

 private:
  static void add_part(double x, double& sum, double& comp) {
    const double t = sum + x;
    if (std::abs(sum) >= std::abs(x)) {
      comp += (sum - t) + x;
    } else {
      comp += (x - t) + sum;
    }
    sum = t;
  }
  double re_ = 0.0, re_c_ = 0.0, im_ = 0.0, im_c_ = 0.0;
};

inline std::int64_t gcd64(std::int64_t a, std::int64_t b) {
  a = a < 0 ? -a : a;
  b = b < 0 ? -b : b;
  while (b != 0) {
    const std::int64_t r = a % b;
    a = b;
    b = r;
  }
  return a;
}

/// Smallest n >= lo whose prime factors are all in {2, 3, 5, 7}.
inline std::int64_t smooth_size_at_least(std::int64_t lo) {
  if (lo <= 1) return 1;
  for (std::int64_t n = lo;; ++n) {
    std::int64_t m = n;
    for (std::int64_t p : {2, 3, 5, 7}) {
      while (m % p == 0) m /= p;
    }
    if (m == 1) return n;
  }
}

/// Ordinary least squares of y on x; returns (slope, intercept, rms residual).
struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rms_residual = 0.0;
};

template <typename XRange, typename YRange>
LineFit least_squares(const XRange& xs, const YRange& ys) {
  const auto n = static_cast<double>(std::size(xs));
  double mx = 0.0, my = 0.0;
  auto yi = std::begin(ys);
  for (double x : xs) {
    mx += x;
    my += *yi++;
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  yi = std::begin(ys);
  for (double x : xs) {
    sxx += (x - mx) * (x - mx);
    sxy += (x - mx) * (*yi++ - my);
  }
  LineFit fit;
  fit.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  fit.intercept = my - fit.slope * mx;
  double ss = 0.0;
  yi = std::begin(ys);
  for (double x : xs) {
    const double r = *yi++ - (fit.intercept + fit.slope * x);
    ss += r * r;
  }
  fit.rms_residual = std::sqrt(ss / n);
  return fit;
}

}  // namespace detail
}  // namespace zoll
