#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cisim/signal/waveform.hpp"

namespace cisim {

enum class AnalysisWindow { Hann, Rect };
enum class EnvelopeInterpolation { Linear, Hold };
enum class SynthesisPhase { Zero, Random };

/// One electrode channel's share of the analysis spectrum.
struct Band {
  std::vector<int> bins;
  std::vector<double> weights;
  double center_hz = 0.0;
};

/// Parameters of the ACE-style analysis and the sine-carrier resynthesis.
/// Defaults describe a 22-channel map at 16 kHz with 8 ms frames and a 2 ms
/// stimulation cycle.
struct VocoderConfig {
  int sample_rate_hz = kProcessingRateHz;
  double frame_ms = 8.0;
  double shift_ms = 2.0;
  int num_channels = 22;
  int num_selected = 8;
  std::vector<Band> bands;
  std::vector<double> threshold;  // T, per channel, envelope scale
  std::vector<double> comfort;    // C, per channel, envelope scale
  AnalysisWindow window = AnalysisWindow::Hann;
  EnvelopeInterpolation interpolation = EnvelopeInterpolation::Linear;
  SynthesisPhase phase = SynthesisPhase::Zero;
  std::uint64_t phase_seed = 0;
  bool pre_emphasis = false;
  double pre_emphasis_coeff = 0.95;
  /// Input RMS the analysis sees. Speech is scaled to this level before
  /// framing so that its envelopes land inside [T, C]. Zero or negative
  /// disables the scaling.
  double input_rms = 0.005;

  /// Config with the default band table and T/C vectors filled in.
  static VocoderConfig defaults();

  int fft_size() const;
  int hop_size() const;
  int num_bins() const { return fft_size() / 2 + 1; }

  /// Throws ConfigError describing the first violated invariant.
  void validate() const;
};

/// 22 contiguous, non-overlapping bin groups over bins 2..fft/2 with widths
/// growing from single bins upward; unit weights; centers at the weighted
/// mean bin frequency. Only defined for the 128-point, 22-channel layout.
std::vector<Band> default_band_table(int sample_rate_hz, int fft_size);

VocoderConfig load_vocoder_config(const std::string& path);
VocoderConfig parse_vocoder_config(const std::string& json_text);
std::string to_json(const VocoderConfig& config);

}  // namespace cisim
