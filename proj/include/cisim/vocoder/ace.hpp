#pragma once

// ACE-style cochlear-implant simulation: short-time spectrum, weighted
// filterbank to electrode channels, N-of-M selection per stimulation cycle,
// threshold/comfort mapping, and sine-carrier resynthesis.

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

#include "cisim/signal/waveform.hpp"
#include "cisim/vocoder/config.hpp"

namespace cisim {

/// Windowed analysis frames stored contiguously, one per stimulation cycle.
class FrameMatrix {
 public:
  FrameMatrix(std::size_t frame_length, std::size_t count)
      : frame_length_(frame_length), count_(count), data_(frame_length * count, 0.0) {}

  std::size_t frame_length() const { return frame_length_; }
  std::size_t count() const { return count_; }
  std::span<const double> frame(std::size_t i) const {
    return {data_.data() + i * frame_length_, frame_length_};
  }
  std::span<double> frame(std::size_t i) { return {data_.data() + i * frame_length_, frame_length_}; }

 private:
  std::size_t frame_length_;
  std::size_t count_;
  std::vector<double> data_;
};

/// Channel x cycle envelope matrix. After dynamic-range mapping every entry
/// lies in [0, C[i]] and each cycle has at most num_selected nonzero entries.
class Electrodogram {
 public:
  Electrodogram(int num_channels, std::size_t num_cycles, double cycle_period_ms,
                std::size_t signal_length, int sample_rate_hz);

  int num_channels() const { return num_channels_; }
  std::size_t num_cycles() const { return num_cycles_; }
  double cycle_period_ms() const { return cycle_period_ms_; }
  /// Length of the analyzed signal, which is also the synthesis length.
  std::size_t signal_length() const { return signal_length_; }
  int sample_rate_hz() const { return sample_rate_hz_; }

  double at(int channel, std::size_t cycle) const { return data_[index(channel, cycle)]; }
  double& at(int channel, std::size_t cycle) { return data_[index(channel, cycle)]; }
  std::span<const double> cycle(std::size_t c) const {
    return {data_.data() + c * static_cast<std::size_t>(num_channels_), static_cast<std::size_t>(num_channels_)};
  }
  std::span<double> cycle(std::size_t c) {
    return {data_.data() + c * static_cast<std::size_t>(num_channels_), static_cast<std::size_t>(num_channels_)};
  }
  std::size_t nonzero_in_cycle(std::size_t c) const;

 private:
  std::size_t index(int channel, std::size_t cycle) const {
    return cycle * static_cast<std::size_t>(num_channels_) + static_cast<std::size_t>(channel);
  }

  int num_channels_;
  std::size_t num_cycles_;
  double cycle_period_ms_;
  std::size_t signal_length_;
  int sample_rate_hz_;
  std::vector<double> data_;
};

/// Frames of fft_size samples every hop_size samples, ceil(len / hop) of
/// them; frames running past the end are zero-padded. The analysis window
/// is applied.
FrameMatrix frame_signal(const Waveform& x, const VocoderConfig& config);

std::vector<double> analysis_window(AnalysisWindow kind, std::size_t length);

/// DFT bins 0..N/2 of one frame of length N.
std::vector<std::complex<double>> analyze_spectrum(std::span<const double> frame);

/// Reusable spectrum analysis for a fixed frame length. Not thread-safe;
/// use one per thread.
class SpectrumAnalyzer {
 public:
  explicit SpectrumAnalyzer(std::size_t frame_length);
  ~SpectrumAnalyzer();
  SpectrumAnalyzer(SpectrumAnalyzer&&) noexcept;
  SpectrumAnalyzer& operator=(SpectrumAnalyzer&&) noexcept;

  std::size_t frame_length() const;
  void analyze(std::span<const double> frame, std::span<std::complex<double>> bins);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

/// envelope[i] = sqrt(sum_j weight_ij * magnitude[bin_ij]^2).
std::vector<double> apply_filterbank(std::span<const double> magnitudes, const VocoderConfig& config);

/// Marks the n largest envelopes; ties go to the lower channel index.
std::vector<bool> select_maxima(std::span<const double> envelopes, int n);

/// Unselected channels become 0; selected ones are zeroed below T[i],
/// clipped to C[i] above it, and passed through otherwise.
std::vector<double> map_dynamic_range(std::span<const double> envelopes, const std::vector<bool>& selected,
                                      const VocoderConfig& config);

/// Analysis half of the chain: input level, optional pre-emphasis, framing,
/// spectrum, filterbank, selection and mapping. Throws on silent input.
Electrodogram compute_electrodogram(const Waveform& speech, const VocoderConfig& config);

/// Sum over channels of a_i(t) * sin(2 pi f_i t / fs + phi_i), with a_i(t)
/// interpolated between cycle values anchored at frame centers.
Waveform synthesize_sine(const Electrodogram& egram, const VocoderConfig& config);

/// Full chain followed by RMS equalization to `target_rms`.
Waveform vocode(const Waveform& speech, const VocoderConfig& config, double target_rms);

}  // namespace cisim
