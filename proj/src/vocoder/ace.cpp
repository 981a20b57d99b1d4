#include "cisim/vocoder/ace.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <random>

#include "cisim/signal/dsp.hpp"
#include "cisim/signal/fft.hpp"

namespace cisim {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

void require_rate(const Waveform& x, const VocoderConfig& config) {
  if (x.sample_rate_hz() != config.sample_rate_hz) {
    throw SignalError("vocoder expects " + std::to_string(config.sample_rate_hz) + " Hz input, got " +
                      std::to_string(x.sample_rate_hz()) + " Hz; resample first");
  }
}

std::vector<double> channel_phases(const VocoderConfig& config) {
  std::vector<double> phases(static_cast<std::size_t>(config.num_channels), 0.0);
  if (config.phase == SynthesisPhase::Random) {
    std::mt19937_64 rng(config.phase_seed);
    for (double& p : phases) p = kTwoPi * static_cast<double>(rng() >> 11) * 0x1.0p-53;
  }
  return phases;
}

// Level calibration and optional first-order pre-emphasis.
Waveform condition_input(const Waveform& speech, const VocoderConfig& config) {
  Waveform x = config.input_rms > 0.0 ? equalize_rms(speech, config.input_rms) : speech;
  if (!config.pre_emphasis) return x;
  std::vector<double> y(x.size());
  double previous = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = x[i] - config.pre_emphasis_coeff * previous;
    previous = x[i];
  }
  return Waveform(std::move(y), x.sample_rate_hz());
}

}  // namespace

Electrodogram::Electrodogram(int num_channels, std::size_t num_cycles, double cycle_period_ms,
                             std::size_t signal_length, int sample_rate_hz)
    : num_channels_(num_channels),
      num_cycles_(num_cycles),
      cycle_period_ms_(cycle_period_ms),
      signal_length_(signal_length),
      sample_rate_hz_(sample_rate_hz),
      data_(static_cast<std::size_t>(num_channels) * num_cycles, 0.0) {}

std::size_t Electrodogram::nonzero_in_cycle(std::size_t c) const {
  const auto values = cycle(c);
  return static_cast<std::size_t>(std::count_if(values.begin(), values.end(), [](double v) { return v != 0.0; }));
}

std::vector<double> analysis_window(AnalysisWindow kind, std::size_t length) {
  std::vector<double> w(length, 1.0);
  if (kind == AnalysisWindow::Hann) {
    for (std::size_t n = 0; n < length; ++n) {
      w[n] = 0.5 - 0.5 * std::cos(kTwoPi * static_cast<double>(n) / static_cast<double>(length));
    }
  }
  return w;
}

FrameMatrix frame_signal(const Waveform& x, const VocoderConfig& config) {
  require_rate(x, config);
  const auto frame = static_cast<std::size_t>(config.fft_size());
  const auto hop = static_cast<std::size_t>(config.hop_size());
  const std::size_t count = (x.size() + hop - 1) / hop;
  const auto window = analysis_window(config.window, frame);
  FrameMatrix frames(frame, count);
  const auto in = x.samples();
  for (std::size_t f = 0; f < count; ++f) {
    auto out = frames.frame(f);
    const std::size_t start = f * hop;
    const std::size_t available = std::min(frame, in.size() - start);
    for (std::size_t n = 0; n < available; ++n) out[n] = in[start + n] * window[n];
  }
  return frames;
}

struct SpectrumAnalyzer::Impl {
  explicit Impl(std::size_t n) : fft(n) {}
  RealFft fft;
};

SpectrumAnalyzer::SpectrumAnalyzer(std::size_t frame_length)
    : impl_(std::make_unique<Impl>(frame_length)) {}
SpectrumAnalyzer::~SpectrumAnalyzer() = default;
SpectrumAnalyzer::SpectrumAnalyzer(SpectrumAnalyzer&&) noexcept = default;
SpectrumAnalyzer& SpectrumAnalyzer::operator=(SpectrumAnalyzer&&) noexcept = default;

std::size_t SpectrumAnalyzer::frame_length() const { return impl_->fft.size(); }

void SpectrumAnalyzer::analyze(std::span<const double> frame, std::span<std::complex<double>> bins) {
  if (frame.size() != impl_->fft.size()) {
    throw SignalError("analyze_spectrum: frame has " + std::to_string(frame.size()) + " samples, expected " +
                      std::to_string(impl_->fft.size()));
  }
  impl_->fft.forward(frame, bins);
}

std::vector<std::complex<double>> analyze_spectrum(std::span<const double> frame) {
  if (frame.size() < 2 || frame.size() % 2 != 0) {
    throw SignalError("analyze_spectrum: frame length must be even and at least 2");
  }
  SpectrumAnalyzer analyzer(frame.size());
  std::vector<std::complex<double>> bins(frame.size() / 2 + 1);
  analyzer.analyze(frame, bins);
  return bins;
}

std::vector<double> apply_filterbank(std::span<const double> magnitudes, const VocoderConfig& config) {
  if (magnitudes.size() != static_cast<std::size_t>(config.num_bins())) {
    throw SignalError("apply_filterbank: expected " + std::to_string(config.num_bins()) + " magnitudes");
  }
  std::vector<double> envelopes(config.bands.size(), 0.0);
  for (std::size_t i = 0; i < config.bands.size(); ++i) {
    const auto& band = config.bands[i];
    double power = 0.0;
    for (std::size_t j = 0; j < band.bins.size(); ++j) {
      const double m = magnitudes[static_cast<std::size_t>(band.bins[j])];
      power += band.weights[j] * m * m;
    }
    envelopes[i] = std::sqrt(power);
  }
  return envelopes;
}

std::vector<bool> select_maxima(std::span<const double> envelopes, int n) {
  if (n < 1 || static_cast<std::size_t>(n) > envelopes.size()) {
    throw ConfigError("select_maxima: n = " + std::to_string(n) + " outside [1, " +
                      std::to_string(envelopes.size()) + "]");
  }
  std::vector<std::size_t> order(envelopes.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return envelopes[a] > envelopes[b]; });
  std::vector<bool> mask(envelopes.size(), false);
  for (int k = 0; k < n; ++k) mask[order[static_cast<std::size_t>(k)]] = true;
  return mask;
}

std::vector<double> map_dynamic_range(std::span<const double> envelopes, const std::vector<bool>& selected,
                                      const VocoderConfig& config) {
  if (envelopes.size() != selected.size() || envelopes.size() != config.threshold.size()) {
    throw SignalError("map_dynamic_range: size mismatch");
  }
  std::vector<double> out(envelopes.size(), 0.0);
  for (std::size_t i = 0; i < envelopes.size(); ++i) {
    if (!selected[i]) continue;
    const double env = envelopes[i];
    if (env < config.threshold[i]) {
      out[i] = 0.0;
    } else if (env > config.comfort[i]) {
      out[i] = config.comfort[i];
    } else {
      out[i] = env;
    }
  }
  return out;
}

Electrodogram compute_electrodogram(const Waveform& speech, const VocoderConfig& config) {
  config.validate();
  require_rate(speech, config);
  if (speech.empty() || rms(speech) == 0.0) throw SignalError("vocoder: silent input");

  const Waveform x = condition_input(speech, config);
  const FrameMatrix frames = frame_signal(x, config);
  Electrodogram egram(config.num_channels, frames.count(), config.shift_ms, speech.size(),
                      config.sample_rate_hz);

  SpectrumAnalyzer analyzer(frames.frame_length());
  std::vector<std::complex<double>> bins(static_cast<std::size_t>(config.num_bins()));
  std::vector<double> magnitudes(bins.size());
  for (std::size_t c = 0; c < frames.count(); ++c) {
    analyzer.analyze(frames.frame(c), bins);
    for (std::size_t k = 0; k < bins.size(); ++k) magnitudes[k] = std::abs(bins[k]);
    const auto envelopes = apply_filterbank(magnitudes, config);
    const auto mask = select_maxima(envelopes, config.num_selected);
    const auto mapped = map_dynamic_range(envelopes, mask, config);
    std::copy(mapped.begin(), mapped.end(), egram.cycle(c).begin());
  }
  return egram;
}

Waveform synthesize_sine(const Electrodogram& egram, const VocoderConfig& config) {
  if (static_cast<std::size_t>(egram.num_channels()) != config.bands.size()) {
    throw SignalError("synthesize_sine: electrodogram channels do not match the band table");
  }
  const std::size_t length = egram.signal_length();
  const double fs = egram.sample_rate_hz();
  const double hop = egram.cycle_period_ms() * 1e-3 * fs;
  const double anchor0 = config.fft_size() / 2.0;
  const auto phases = channel_phases(config);
  std::vector<double> out(length, 0.0);
  std::vector<double> envelope(length);

  for (int ch = 0; ch < egram.num_channels(); ++ch) {
    bool any = false;
    for (std::size_t c = 0; c < egram.num_cycles() && !any; ++c) any = egram.at(ch, c) != 0.0;
    if (!any) continue;

    // Cycle c is anchored at the center of its analysis frame.
    for (std::size_t t = 0; t < length; ++t) {
      const double pos = (static_cast<double>(t) - anchor0) / hop;
      if (pos <= 0.0) {
        envelope[t] = egram.at(ch, 0);
        continue;
      }
      const auto c = static_cast<std::size_t>(pos);
      if (c + 1 >= egram.num_cycles()) {
        envelope[t] = egram.at(ch, egram.num_cycles() - 1);
        continue;
      }
      if (config.interpolation == EnvelopeInterpolation::Hold) {
        envelope[t] = egram.at(ch, c);
      } else {
        const double frac = pos - static_cast<double>(c);
        envelope[t] = egram.at(ch, c) + frac * (egram.at(ch, c + 1) - egram.at(ch, c));
      }
    }

    const double omega = kTwoPi * config.bands[static_cast<std::size_t>(ch)].center_hz / fs;
    const double phi = phases[static_cast<std::size_t>(ch)];
    for (std::size_t t = 0; t < length; ++t) {
      if (envelope[t] != 0.0) out[t] += envelope[t] * std::sin(omega * static_cast<double>(t) + phi);
    }
  }
  return Waveform(std::move(out), egram.sample_rate_hz());
}

Waveform vocode(const Waveform& speech, const VocoderConfig& config, double target_rms) {
  const auto egram = compute_electrodogram(speech, config);
  const auto synthesized = synthesize_sine(egram, config);
  if (rms(synthesized) == 0.0) {
    throw SignalError("vocoder: every cycle fell below threshold; output is silent");
  }
  return equalize_rms(synthesized, target_rms);
}

}  // namespace cisim
