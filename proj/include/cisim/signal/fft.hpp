#pragma once

#include <complex>
#include <cstddef>
#include <span>

namespace cisim {

/// Real-input FFT of a fixed length backed by FFTW. Each instance owns its
/// plan and scratch buffers, so one instance must not be shared across
/// threads; separate instances are independent.
class RealFft {
 public:
  explicit RealFft(std::size_t size);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&& other) noexcept;
  RealFft& operator=(RealFft&& other) noexcept;

  std::size_t size() const { return size_; }
  std::size_t bins() const { return size_ / 2 + 1; }

  /// `in` may be shorter than size(); the remainder is zero-filled.
  /// `out` must hold bins() values.
  void forward(std::span<const double> in, std::span<std::complex<double>> out);

  /// Unnormalized inverse: forward then inverse scales by size().
  void inverse(std::span<const std::complex<double>> in, std::span<double> out);

 private:
  void release() noexcept;

  std::size_t size_ = 0;
  double* real_ = nullptr;
  void* spectrum_ = nullptr;
  void* forward_plan_ = nullptr;
  void* inverse_plan_ = nullptr;
};

}  // namespace cisim
