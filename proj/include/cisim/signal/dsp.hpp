#pragma once

#include "cisim/signal/waveform.hpp"

namespace cisim {

/// Full linear convolution: output length is len(x) + len(h) - 1 and the
/// rate is preserved. No gain normalization is applied.
Waveform convolve(const Waveform& x, const Waveform& h);

/// Taps in the windowed-sinc interpolation kernel.
inline constexpr int kResampleTaps = 64;

/// Band-limited resampling with a Kaiser-windowed sinc kernel of
/// kResampleTaps taps. The cutoff follows the lower of the two Nyquist
/// frequencies. Output length is round(len * target / source); a same-rate
/// call returns the input unchanged.
Waveform resample(const Waveform& x, int target_rate_hz);

double rms(const Waveform& x);

/// Scales `x` so its RMS equals `target_rms`.
Waveform equalize_rms(const Waveform& x, double target_rms);

/// Default stimulus level (full-scale RMS) when none is configured.
inline constexpr double kDefaultTargetRms = 0.08;

}  // namespace cisim
