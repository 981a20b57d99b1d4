#include "cisim/vocoder/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "json.hpp"

namespace cisim {

namespace {

using nlohmann::json;

constexpr double kDefaultThreshold = 1e-4;
constexpr double kDefaultComfort = 1.0;

// Bin-group widths for 22 channels over bins 2..64 of a 128-point FFT.
constexpr int kDefaultWidths[22] = {1, 1, 1, 1, 1, 1, 1, 1, 1, 2, 2,
                                    2, 2, 3, 3, 4, 4, 5, 5, 6, 7, 9};

double weighted_center(const Band& band, int sample_rate_hz, int fft_size) {
  double num = 0.0, den = 0.0;
  for (std::size_t j = 0; j < band.bins.size(); ++j) {
    const double freq = static_cast<double>(band.bins[j]) * sample_rate_hz / fft_size;
    num += band.weights[j] * freq;
    den += band.weights[j];
  }
  return den > 0.0 ? num / den : 0.0;
}

template <typename Enum>
Enum parse_enum(const json& j, const char* key, std::initializer_list<std::pair<const char*, Enum>> options,
                Enum fallback) {
  if (!j.contains(key)) return fallback;
  const auto text = j.at(key).get<std::string>();
  for (const auto& [name, value] : options) {
    if (text == name) return value;
  }
  throw ConfigError(std::string("vocoder config: invalid ") + key + " '" + text + "'");
}

std::vector<double> per_channel(const json& j, const char* key, int channels, double fallback) {
  if (!j.contains(key)) return std::vector<double>(static_cast<std::size_t>(channels), fallback);
  const auto& v = j.at(key);
  if (v.is_number()) return std::vector<double>(static_cast<std::size_t>(channels), v.get<double>());
  return v.get<std::vector<double>>();
}

}  // namespace

std::vector<Band> default_band_table(int sample_rate_hz, int fft_size) {
  if (fft_size != 128) {
    throw ConfigError("default band table needs a 128-point FFT; supply an explicit table for " +
                      std::to_string(fft_size));
  }
  std::vector<Band> bands;
  int bin = 2;
  for (int width : kDefaultWidths) {
    Band band;
    for (int k = 0; k < width; ++k) {
      band.bins.push_back(bin++);
      band.weights.push_back(1.0);
    }
    band.center_hz = weighted_center(band, sample_rate_hz, fft_size);
    bands.push_back(std::move(band));
  }
  return bands;
}

VocoderConfig VocoderConfig::defaults() {
  VocoderConfig c;
  c.bands = default_band_table(c.sample_rate_hz, c.fft_size());
  c.threshold.assign(static_cast<std::size_t>(c.num_channels), kDefaultThreshold);
  c.comfort.assign(static_cast<std::size_t>(c.num_channels), kDefaultComfort);
  return c;
}

int VocoderConfig::fft_size() const {
  return static_cast<int>(std::lround(frame_ms * sample_rate_hz / 1000.0));
}

int VocoderConfig::hop_size() const {
  return static_cast<int>(std::lround(shift_ms * sample_rate_hz / 1000.0));
}

void VocoderConfig::validate() const {
  auto fail = [](const std::string& what) { throw ConfigError("vocoder config: " + what); };
  if (sample_rate_hz <= 0) fail("sample rate must be positive");
  const double frame = frame_ms * sample_rate_hz / 1000.0;
  const double hop = shift_ms * sample_rate_hz / 1000.0;
  if (frame < 2 || std::abs(frame - std::round(frame)) > 1e-9) fail("frame length is not a whole number of samples");
  if (hop < 1 || std::abs(hop - std::round(hop)) > 1e-9) fail("shift is not a whole number of samples");
  if (fft_size() % 2 != 0) fail("frame length must be even");
  if (num_channels < 1) fail("need at least one channel");
  if (num_selected < 1 || num_selected > num_channels) {
    fail("num_selected " + std::to_string(num_selected) + " outside [1, " + std::to_string(num_channels) + "]");
  }
  const auto channels = static_cast<std::size_t>(num_channels);
  if (bands.size() != channels) fail("band table has " + std::to_string(bands.size()) + " entries");
  if (threshold.size() != channels || comfort.size() != channels) fail("T/C vectors must have one entry per channel");
  const int max_bin = fft_size() / 2;
  int previous_bin = 0;
  double previous_center = 0.0;
  for (std::size_t i = 0; i < channels; ++i) {
    const auto& band = bands[i];
    const auto label = "band " + std::to_string(i + 1) + ": ";
    if (band.bins.empty()) fail(label + "no bins");
    if (band.weights.size() != band.bins.size()) fail(label + "weights and bins differ in length");
    for (std::size_t j = 0; j < band.bins.size(); ++j) {
      if (band.bins[j] < 1 || band.bins[j] > max_bin) fail(label + "bin outside [1, " + std::to_string(max_bin) + "]");
      if (band.bins[j] <= previous_bin) fail(label + "bins overlap or are out of order");
      if (!(band.weights[j] >= 0.0) || !std::isfinite(band.weights[j])) fail(label + "weights must be finite and non-negative");
      previous_bin = band.bins[j];
    }
    if (!(band.center_hz > previous_center)) fail(label + "center frequencies must increase");
    if (!(band.center_hz < sample_rate_hz / 2.0)) fail(label + "center frequency at or above Nyquist");
    previous_center = band.center_hz;
    if (!(threshold[i] >= 0.0) || !(threshold[i] < comfort[i])) fail(label + "need 0 <= T < C");
  }
  if (pre_emphasis && !(std::abs(pre_emphasis_coeff) < 1.0)) fail("pre-emphasis coefficient must lie in (-1, 1)");
}

VocoderConfig parse_vocoder_config(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text, nullptr, true, true);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("vocoder config: ") + e.what());
  }
  try {
    VocoderConfig c;
    c.sample_rate_hz = j.value("sample_rate_hz", c.sample_rate_hz);
    c.frame_ms = j.value("frame_ms", c.frame_ms);
    c.shift_ms = j.value("shift_ms", c.shift_ms);
    c.num_channels = j.value("num_channels", c.num_channels);
    c.num_selected = j.value("num_selected", c.num_selected);
    c.window = parse_enum(j, "window", {{"hann", AnalysisWindow::Hann}, {"rect", AnalysisWindow::Rect}}, c.window);
    c.interpolation = parse_enum(j, "interpolation",
                                 {{"linear", EnvelopeInterpolation::Linear}, {"hold", EnvelopeInterpolation::Hold}},
                                 c.interpolation);
    c.phase = parse_enum(j, "phase", {{"zero", SynthesisPhase::Zero}, {"random", SynthesisPhase::Random}}, c.phase);
    c.phase_seed = j.value("phase_seed", c.phase_seed);
    c.pre_emphasis = j.value("pre_emphasis", c.pre_emphasis);
    c.pre_emphasis_coeff = j.value("pre_emphasis_coeff", c.pre_emphasis_coeff);
    c.input_rms = j.value("input_rms", c.input_rms);
    if (j.contains("bands")) {
      for (const auto& jb : j.at("bands")) {
        Band band;
        band.bins = jb.at("bins").get<std::vector<int>>();
        band.weights = jb.contains("weights") ? jb.at("weights").get<std::vector<double>>()
                                              : std::vector<double>(band.bins.size(), 1.0);
        band.center_hz = jb.contains("center_hz")
                             ? jb.at("center_hz").get<double>()
                             : (band.weights.size() == band.bins.size()
                                    ? weighted_center(band, c.sample_rate_hz, c.fft_size())
                                    : 0.0);
        c.bands.push_back(std::move(band));
      }
    } else {
      c.bands = default_band_table(c.sample_rate_hz, c.fft_size());
    }
    c.threshold = per_channel(j, "threshold", c.num_channels, kDefaultThreshold);
    c.comfort = per_channel(j, "comfort", c.num_channels, kDefaultComfort);
    c.validate();
    return c;
  } catch (const json::exception& e) {
    throw ConfigError(std::string("vocoder config: ") + e.what());
  }
}

VocoderConfig load_vocoder_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open vocoder config: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  try {
    return parse_vocoder_config(buf.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

std::string to_json(const VocoderConfig& c) {
  json j;
  j["sample_rate_hz"] = c.sample_rate_hz;
  j["frame_ms"] = c.frame_ms;
  j["shift_ms"] = c.shift_ms;
  j["num_channels"] = c.num_channels;
  j["num_selected"] = c.num_selected;
  j["window"] = c.window == AnalysisWindow::Hann ? "hann" : "rect";
  j["interpolation"] = c.interpolation == EnvelopeInterpolation::Linear ? "linear" : "hold";
  j["phase"] = c.phase == SynthesisPhase::Zero ? "zero" : "random";
  j["phase_seed"] = c.phase_seed;
  j["pre_emphasis"] = c.pre_emphasis;
  j["pre_emphasis_coeff"] = c.pre_emphasis_coeff;
  j["input_rms"] = c.input_rms;
  j["threshold"] = c.threshold;
  j["comfort"] = c.comfort;
  json bands = json::array();
  for (const auto& b : c.bands) {
    bands.push_back({{"bins", b.bins}, {"weights", b.weights}, {"center_hz", b.center_hz}});
  }
  j["bands"] = std::move(bands);
  return j.dump(2);
}

}  // namespace cisim
