#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace effmass {

/**
 * In-place complex FFT over a d-dimensional N^d grid (row-major, axis 0 slowest).
 *
 * Owns an FFTW-aligned work buffer; plans are built with FFTW_ESTIMATE so that
 * results are bitwise reproducible. Transforms are unnormalized.
 */
class FftPlan {
 public:
  FftPlan(int dim, std::size_t n);
  ~FftPlan();
  FftPlan(const FftPlan&) = delete;
  FftPlan& operator=(const FftPlan&) = delete;
  FftPlan(FftPlan&& other) noexcept;
  FftPlan& operator=(FftPlan&& other) noexcept;

  int dim() const noexcept { return dim_; }
  std::size_t extent() const noexcept { return n_; }
  std::size_t size() const noexcept { return total_; }

  std::span<std::complex<double>> data() noexcept { return {buffer_, total_}; }
  std::span<const std::complex<double>> data() const noexcept { return {buffer_, total_}; }

  void forward();
  void backward();

 private:
  void release() noexcept;

  int dim_ = 0;
  std::size_t n_ = 0;
  std::size_t total_ = 0;
  std::complex<double>* buffer_ = nullptr;
  void* forward_ = nullptr;
  void* backward_ = nullptr;
};

}  // namespace effmass
