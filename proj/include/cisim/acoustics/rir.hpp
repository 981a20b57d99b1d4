#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cisim/signal/waveform.hpp"

namespace cisim {

enum class RirChannel { Left, Right };

std::string_view to_string(RirChannel channel);
RirChannel parse_rir_channel(std::string_view text);

struct RirMeta {
  std::string room;
  std::optional<double> distance_m;
  /// Room dimensions in metres, as listed (L x W [x H]).
  std::vector<double> dimensions_m;
};

/// A measured room impulse response. Holds at least one nonzero tap and no
/// non-finite taps.
class RoomImpulseResponse {
 public:
  RoomImpulseResponse(std::vector<double> coefficients, int sample_rate_hz,
                      RirChannel channel = RirChannel::Left, RirMeta meta = {});

  std::span<const double> coefficients() const { return coefficients_; }
  int sample_rate_hz() const { return sample_rate_hz_; }
  RirChannel channel() const { return channel_; }
  const RirMeta& meta() const { return meta_; }
  std::size_t size() const { return coefficients_.size(); }

  Waveform as_waveform() const { return Waveform(coefficients_, sample_rate_hz_); }

 private:
  std::vector<double> coefficients_;
  int sample_rate_hz_;
  RirChannel channel_;
  RirMeta meta_;
};

/// Sidecar path for an RIR WAV: same path with the extension replaced by
/// ".meta".
std::string rir_sidecar_path(const std::string& wav_path);

/// Parses the key-value sidecar format:
///
///   # comment
///   room = Office
///   distance_m = 3.0
///   channel = left
///   dimensions_m = 5.0 x 6.4 x 2.9
///
/// Keys are case-insensitive; unknown keys are ignored. `channel` is
/// returned separately since it also selects the WAV channel.
struct RirSidecar {
  RirMeta meta;
  std::optional<RirChannel> channel;
};
RirSidecar parse_rir_sidecar(std::string_view text);

/// Loads an RIR from a WAV file plus its optional sidecar. For a stereo WAV
/// the channel comes from `channel` if given, else from the sidecar, else
/// left; mono files are used as-is.
RoomImpulseResponse load_rir(const std::string& wav_path,
                             std::optional<RirChannel> channel = std::nullopt);

/// Resamples an RIR, keeping its metadata.
RoomImpulseResponse resample(const RoomImpulseResponse& rir, int target_rate_hz);

/// Speech convolved with the RIR. Rates must already match.
Waveform convolve(const Waveform& speech, const RoomImpulseResponse& rir);

}  // namespace cisim
