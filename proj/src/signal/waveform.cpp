#include "cisim/signal/waveform.hpp"

#include <cmath>
#include <string>

namespace cisim {

Waveform::Waveform(std::vector<double> samples, int sample_rate_hz)
    : samples_(std::move(samples)), sample_rate_hz_(sample_rate_hz) {
  if (sample_rate_hz_ <= 0) {
    throw SignalError("sample rate must be positive, got " + std::to_string(sample_rate_hz_));
  }
  for (std::size_t i = 0; i < samples_.size(); ++i) {
    if (!std::isfinite(samples_[i])) {
      throw SignalError("non-finite sample at index " + std::to_string(i));
    }
  }
}

Waveform Waveform::silence(std::size_t length, int sample_rate_hz) {
  return Waveform(std::vector<double>(length, 0.0), sample_rate_hz);
}

}  // namespace cisim
