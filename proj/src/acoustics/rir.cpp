#include "cisim/acoustics/rir.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "cisim/signal/dsp.hpp"
#include "cisim/signal/wav_io.hpp"

namespace cisim {

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  return out;
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

double parse_number(std::string_view text, std::string_view key) {
  const std::string s(trim(text));
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(s, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != s.size()) {
    throw ConfigError("sidecar key '" + std::string(key) + "': not a number: '" + s + "'");
  }
  return value;
}

}  // namespace

std::string_view to_string(RirChannel channel) {
  return channel == RirChannel::Left ? "left" : "right";
}

RirChannel parse_rir_channel(std::string_view text) {
  const auto s = lower(trim(text));
  if (s == "left" || s == "l" || s == "0") return RirChannel::Left;
  if (s == "right" || s == "r" || s == "1") return RirChannel::Right;
  throw ConfigError("unknown RIR channel '" + std::string(text) + "'");
}

RoomImpulseResponse::RoomImpulseResponse(std::vector<double> coefficients, int sample_rate_hz,
                                         RirChannel channel, RirMeta meta)
    : coefficients_(std::move(coefficients)),
      sample_rate_hz_(sample_rate_hz),
      channel_(channel),
      meta_(std::move(meta)) {
  if (sample_rate_hz_ <= 0) throw SignalError("RIR sample rate must be positive");
  bool any_nonzero = false;
  for (double c : coefficients_) {
    if (!std::isfinite(c)) throw SignalError("RIR has a non-finite coefficient");
    any_nonzero = any_nonzero || c != 0.0;
  }
  if (!any_nonzero) throw SignalError("RIR has no nonzero coefficient");
}

std::string rir_sidecar_path(const std::string& wav_path) {
  return std::filesystem::path(wav_path).replace_extension(".meta").string();
}

RirSidecar parse_rir_sidecar(std::string_view text) {
  RirSidecar out;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto body = trim(std::string_view(line).substr(0, line.find('#')));
    if (body.empty()) continue;
    const auto eq = body.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("sidecar line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = lower(trim(body.substr(0, eq)));
    const auto value = trim(body.substr(eq + 1));
    if (key == "room") {
      out.meta.room = std::string(value);
    } else if (key == "distance_m") {
      out.meta.distance_m = parse_number(value, key);
    } else if (key == "channel") {
      out.channel = parse_rir_channel(value);
    } else if (key == "dimensions_m") {
      out.meta.dimensions_m.clear();
      std::string_view rest = value;
      while (!rest.empty()) {
        const auto x = rest.find_first_of("xX");
        out.meta.dimensions_m.push_back(parse_number(rest.substr(0, x), key));
        if (x == std::string_view::npos) break;
        rest = rest.substr(x + 1);
      }
    }
  }
  return out;
}

RoomImpulseResponse load_rir(const std::string& wav_path, std::optional<RirChannel> channel) {
  RirSidecar sidecar;
  const auto meta_path = rir_sidecar_path(wav_path);
  if (std::filesystem::exists(meta_path)) {
    std::ifstream in(meta_path);
    std::stringstream buf;
    buf << in.rdbuf();
    sidecar = parse_rir_sidecar(buf.str());
  }
  const RirChannel selected = channel.value_or(sidecar.channel.value_or(RirChannel::Left));
  const int channels = wav_channel_count(wav_path);
  const int index = channels == 1 ? 0 : (selected == RirChannel::Left ? 0 : 1);
  Waveform wav = load_wav(wav_path, index);
  const int rate = wav.sample_rate_hz();
  if (sidecar.meta.room.empty()) {
    sidecar.meta.room = std::filesystem::path(wav_path).stem().string();
  }
  return RoomImpulseResponse(std::move(wav).release(), rate, selected, std::move(sidecar.meta));
}

RoomImpulseResponse resample(const RoomImpulseResponse& rir, int target_rate_hz) {
  auto wav = resample(rir.as_waveform(), target_rate_hz);
  return RoomImpulseResponse(std::move(wav).release(), target_rate_hz, rir.channel(), rir.meta());
}

Waveform convolve(const Waveform& speech, const RoomImpulseResponse& rir) {
  if (speech.sample_rate_hz() != rir.sample_rate_hz()) {
    throw SignalError("convolve: speech at " + std::to_string(speech.sample_rate_hz()) +
                      " Hz but RIR at " + std::to_string(rir.sample_rate_hz()) +
                      " Hz; resample first");
  }
  return convolve(speech, rir.as_waveform());
}

}  // namespace cisim
