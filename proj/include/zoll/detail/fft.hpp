#pragma once

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <memory>
#include <mutex>
#include <span>
#include <stdexcept>

namespace zoll::detail {

// FFTW's planner is not re-entrant; execution of distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

struct FftwDeleter {
  void operator()(void* p) const { fftw_free(p); }
};

/// In-place complex DFT of fixed length:
///   sign = -1: X_j = sum_m x_m exp(-2 pi i j m / n)
///   sign = +1: X_j = sum_m x_m exp(+2 pi i j m / n)
class ComplexFft {
 public:
  /// `measure` spends planning time for faster repeated execution (the buffers
  /// are clobbered while planning). With `out_of_place` the result goes to
  /// output() and data() keeps its contents.
  ComplexFft(std::size_t n, int sign, bool measure = false, bool out_of_place = false) : n_(n) {
    if (n == 0) throw std::invalid_argument("ComplexFft: zero length");
    buf_.reset(fftw_alloc_complex(n));
    if (out_of_place) out_.reset(fftw_alloc_complex(n));
    if (!buf_ || (out_of_place && !out_)) throw std::bad_alloc();
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_dft_1d(static_cast<int>(n), buf_.get(), out_of_place ? out_.get() : buf_.get(),
                             sign < 0 ? FFTW_FORWARD : FFTW_BACKWARD,
                             (measure ? FFTW_MEASURE : FFTW_ESTIMATE) | (out_of_place ? FFTW_PRESERVE_INPUT : 0));
  }
  ComplexFft(const ComplexFft&) = delete;
  ComplexFft& operator=(const ComplexFft&) = delete;
  ~ComplexFft() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }

  [[nodiscard]] std::size_t size() const { return n_; }
  std::span<std::complex<double>> data() {
    return {reinterpret_cast<std::complex<double>*>(buf_.get()), n_};
  }
  std::span<const std::complex<double>> output() const {
    return {reinterpret_cast<const std::complex<double>*>(out_ ? out_.get() : buf_.get()), n_};
  }
  void execute() { fftw_execute(plan_); }

 private:
  std::size_t n_;
  std::unique_ptr<fftw_complex, FftwDeleter> buf_;
  std::unique_ptr<fftw_complex, FftwDeleter> out_;
  fftw_plan plan_ = nullptr;
};

/// Type-I discrete sine transform (FFTW RODFT00) of length n:
///   y_j = 2 sum_{m=0}^{n-1} x_m sin(pi (m+1)(j+1) / (n+1)).
/// `howmany` contiguous rows of length n are transformed per execute().
class SineTransform {
 public:
  explicit SineTransform(std::size_t n, std::size_t howmany = 1) : n_(n), howmany_(howmany) {
    if (n == 0 || howmany == 0) throw std::invalid_argument("SineTransform: zero length");
    in_.reset(fftw_alloc_real(n * howmany));
    out_.reset(fftw_alloc_real(n * howmany));
    if (!in_ || !out_) throw std::bad_alloc();
    const int len = static_cast<int>(n);
    const fftw_r2r_kind kind = FFTW_RODFT00;
    std::lock_guard lock(fftw_planner_mutex());
    plan_ = fftw_plan_many_r2r(1, &len, static_cast<int>(howmany), in_.get(), nullptr, 1, len,
                               out_.get(), nullptr, 1, len, &kind, FFTW_ESTIMATE);
  }
  SineTransform(const SineTransform&) = delete;
  SineTransform& operator=(const SineTransform&) = delete;
  ~SineTransform() {
    std::lock_guard lock(fftw_planner_mutex());
    fftw_destroy_plan(plan_);
  }

  [[nodiscard]] std::size_t size() const { return n_; }
  std::span<double> input() { return {in_.get(), n_ * howmany_}; }
  std::span<const double> output() const { return {out_.get(), n_ * howmany_}; }
  void execute() { fftw_execute(plan_); }

 private:
  std::size_t n_;
  std::size_t howmany_;
  std::unique_ptr<double, FftwDeleter> in_;
  std::unique_ptr<double, FftwDeleter> out_;
  fftw_plan plan_ = nullptr;
};

}  // namespace zoll::detail
