#include "effmass/fft.hpp"

#include "effmass/errors.hpp"

#include <fftw3.h>

#include <mutex>
#include <utility>

namespace effmass {

namespace {
// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

FftPlan::FftPlan(int dim, std::size_t n) : dim_(dim), n_(n), total_(dim == 1 ? n : n * n) {
  if (dim < 1 || dim > 2 || n == 0) throw DimensionMismatch("FFT supports d in {1, 2} and N > 0");
  std::lock_guard lock(planner_mutex());
  buffer_ = reinterpret_cast<std::complex<double>*>(fftw_alloc_complex(total_));
  if (buffer_ == nullptr) throw Error("fftw_alloc_complex failed");
  auto* buf = reinterpret_cast<fftw_complex*>(buffer_);
  const int ni = static_cast<int>(n);
  if (dim == 1) {
    forward_ = fftw_plan_dft_1d(ni, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_1d(ni, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  } else {
    forward_ = fftw_plan_dft_2d(ni, ni, buf, buf, FFTW_FORWARD, FFTW_ESTIMATE);
    backward_ = fftw_plan_dft_2d(ni, ni, buf, buf, FFTW_BACKWARD, FFTW_ESTIMATE);
  }
  for (std::size_t i = 0; i < total_; ++i) buffer_[i] = 0.0;
}

FftPlan::~FftPlan() { release(); }

FftPlan::FftPlan(FftPlan&& other) noexcept
    : dim_(other.dim_),
      n_(other.n_),
      total_(other.total_),
      buffer_(std::exchange(other.buffer_, nullptr)),
      forward_(std::exchange(other.forward_, nullptr)),
      backward_(std::exchange(other.backward_, nullptr)) {}

FftPlan& FftPlan::operator=(FftPlan&& other) noexcept {
  if (this != &other) {
    release();
    dim_ = other.dim_;
    n_ = other.n_;
    total_ = other.total_;
    buffer_ = std::exchange(other.buffer_, nullptr);
    forward_ = std::exchange(other.forward_, nullptr);
    backward_ = std::exchange(other.backward_, nullptr);
  }
  return *this;
}

void FftPlan::release() noexcept {
  std::lock_guard lock(planner_mutex());
  if (forward_) fftw_destroy_plan(static_cast<fftw_plan>(forward_));
  if (backward_) fftw_destroy_plan(static_cast<fftw_plan>(backward_));
  if (buffer_) fftw_free(buffer_);
  forward_ = backward_ = nullptr;
  buffer_ = nullptr;
}

void FftPlan::forward() { fftw_execute(static_cast<fftw_plan>(forward_)); }
void FftPlan::backward() { fftw_execute(static_cast<fftw_plan>(backward_)); }

}  // namespace effmass
