#include "cisim/signal/wav_io.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <iterator>
#include <vector>

namespace cisim {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

struct WavFormat {
  std::uint16_t format = 0;
  std::uint16_t channels = 0;
  std::uint32_t sample_rate = 0;
  std::uint16_t bits = 0;
};

struct WavContents {
  WavFormat fmt;
  const std::uint8_t* data = nullptr;
  std::size_t data_bytes = 0;
};

std::uint16_t read_u16(const std::uint8_t* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

std::uint32_t read_u32(const std::uint8_t* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}

void put_u16(std::vector<std::uint8_t>& out, std::uint16_t v) {
  out.push_back(static_cast<std::uint8_t>(v & 0xFF));
  out.push_back(static_cast<std::uint8_t>(v >> 8));
}

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int shift = 0; shift < 32; shift += 8) out.push_back(static_cast<std::uint8_t>(v >> shift));
}

void put_tag(std::vector<std::uint8_t>& out, const char* tag) {
  out.insert(out.end(), tag, tag + 4);
}

std::vector<std::uint8_t> read_bytes(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open WAV file: " + path);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

WavContents parse(const std::vector<std::uint8_t>& bytes, const std::string& path) {
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 ||
      std::memcmp(bytes.data() + 8, "WAVE", 4) != 0) {
    throw IoError(path + ": not a RIFF/WAVE file");
  }
  WavContents wav;
  bool have_fmt = false;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const std::uint8_t* chunk = bytes.data() + pos;
    const std::uint32_t size = read_u32(chunk + 4);
    const std::size_t body = pos + 8;
    const std::size_t available = bytes.size() - body;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || available < 16) throw IoError(path + ": truncated fmt chunk");
      wav.fmt.format = read_u16(chunk + 8);
      wav.fmt.channels = read_u16(chunk + 10);
      wav.fmt.sample_rate = read_u32(chunk + 12);
      wav.fmt.bits = read_u16(chunk + 22);
      if (wav.fmt.format == kFormatExtensible) {
        if (size < 40 || available < 40) throw IoError(path + ": truncated extensible fmt chunk");
        // The first two bytes of the sub-format GUID carry the format tag.
        wav.fmt.format = read_u16(chunk + 8 + 24);
      }
      have_fmt = true;
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      wav.data = chunk + 8;
      // Streaming writers sometimes leave the size field unset.
      wav.data_bytes = std::min<std::size_t>(size, available);
      break;
    }
    pos = body + size + (size & 1u);
  }
  if (!have_fmt) throw IoError(path + ": missing fmt chunk");
  if (wav.data == nullptr) throw IoError(path + ": missing data chunk");
  if (wav.fmt.channels == 0) throw IoError(path + ": zero channels");
  if (wav.fmt.sample_rate == 0) throw IoError(path + ": zero sample rate");
  const bool pcm16 = wav.fmt.format == kFormatPcm && wav.fmt.bits == 16;
  const bool float32 = wav.fmt.format == kFormatFloat && wav.fmt.bits == 32;
  if (!pcm16 && !float32) {
    throw IoError(path + ": unsupported encoding (format " + std::to_string(wav.fmt.format) +
                  ", " + std::to_string(wav.fmt.bits) + " bits); need 16-bit PCM or 32-bit float");
  }
  return wav;
}

}  // namespace

Waveform load_wav(const std::string& path, int channel) {
  const auto bytes = read_bytes(path);
  const WavContents wav = parse(bytes, path);
  const int channels = wav.fmt.channels;
  if (channel != kMixChannels && (channel < 0 || channel >= channels)) {
    throw IoError(path + ": channel " + std::to_string(channel) + " out of range (file has " +
                  std::to_string(channels) + ")");
  }
  const std::size_t sample_bytes = wav.fmt.bits / 8;
  const std::size_t frame_bytes = sample_bytes * static_cast<std::size_t>(channels);
  const std::size_t frames = wav.data_bytes / frame_bytes;
  if (frames == 0) throw IoError(path + ": no audio frames");

  auto sample_at = [&](std::size_t frame, int ch) -> double {
    const std::uint8_t* p = wav.data + frame * frame_bytes + static_cast<std::size_t>(ch) * sample_bytes;
    if (sample_bytes == 2) {
      return static_cast<std::int16_t>(read_u16(p)) / 32768.0;
    }
    const std::uint32_t raw = read_u32(p);
    float value;
    std::memcpy(&value, &raw, sizeof value);
    return static_cast<double>(value);
  };

  std::vector<double> samples(frames);
  for (std::size_t i = 0; i < frames; ++i) {
    if (channel == kMixChannels) {
      double sum = 0.0;
      for (int ch = 0; ch < channels; ++ch) sum += sample_at(i, ch);
      samples[i] = sum / channels;
    } else {
      samples[i] = sample_at(i, channel);
    }
  }
  try {
    return Waveform(std::move(samples), static_cast<int>(wav.fmt.sample_rate));
  } catch (const SignalError& e) {
    throw IoError(path + ": " + e.what());
  }
}

int wav_channel_count(const std::string& path) {
  const auto bytes = read_bytes(path);
  return parse(bytes, path).fmt.channels;
}

std::size_t save_wav(const Waveform& waveform, const std::string& path, WavEncoding encoding) {
  const bool pcm = encoding == WavEncoding::Pcm16;
  const std::uint16_t bytes_per_sample = pcm ? 2 : 4;
  const auto n = waveform.size();
  const std::uint32_t data_bytes = static_cast<std::uint32_t>(n * bytes_per_sample);
  std::vector<std::uint8_t> out;
  out.reserve(44 + data_bytes);
  put_tag(out, "RIFF");
  put_u32(out, 36 + data_bytes);
  put_tag(out, "WAVE");
  put_tag(out, "fmt ");
  put_u32(out, 16);
  put_u16(out, pcm ? kFormatPcm : kFormatFloat);
  put_u16(out, 1);
  put_u32(out, static_cast<std::uint32_t>(waveform.sample_rate_hz()));
  put_u32(out, static_cast<std::uint32_t>(waveform.sample_rate_hz()) * bytes_per_sample);
  put_u16(out, bytes_per_sample);
  put_u16(out, static_cast<std::uint16_t>(bytes_per_sample * 8));
  put_tag(out, "data");
  put_u32(out, data_bytes);

  std::size_t clipped = 0;
  for (double x : waveform.samples()) {
    if (x > 1.0 || x < -1.0) ++clipped;
    if (pcm) {
      const double scaled = std::round(x * 32768.0);
      const auto q = static_cast<std::int16_t>(std::clamp(scaled, -32768.0, 32767.0));
      put_u16(out, static_cast<std::uint16_t>(q));
    } else {
      put_u32(out, std::bit_cast<std::uint32_t>(static_cast<float>(std::clamp(x, -1.0, 1.0))));
    }
  }

  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write WAV file: " + path);
  file.write(reinterpret_cast<const char*>(out.data()), static_cast<std::streamsize>(out.size()));
  if (!file) throw IoError("write failed: " + path);
  return clipped;
}

}  // namespace cisim
