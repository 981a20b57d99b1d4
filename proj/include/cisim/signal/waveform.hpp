#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "cisim/common/error.hpp"

namespace cisim {

/// Default processing rate. At 16 kHz an 8 ms frame is 128 samples and a
/// 2 ms shift is 32 samples.
inline constexpr int kProcessingRateHz = 16000;

/// Mono audio at full scale +-1.0. Samples are always finite and the rate is
/// always positive; the constructor enforces both.
class Waveform {
 public:
  Waveform(std::vector<double> samples, int sample_rate_hz);

  static Waveform silence(std::size_t length, int sample_rate_hz);

  std::span<const double> samples() const { return samples_; }
  int sample_rate_hz() const { return sample_rate_hz_; }
  std::size_t size() const { return samples_.size(); }
  bool empty() const { return samples_.empty(); }
  double duration_s() const {
    return static_cast<double>(samples_.size()) / sample_rate_hz_;
  }
  double operator[](std::size_t i) const { return samples_[i]; }

  /// Moves the sample buffer out, leaving this waveform empty.
  std::vector<double> release() && { return std::move(samples_); }

 private:
  std::vector<double> samples_;
  int sample_rate_hz_;
};

}  // namespace cisim
