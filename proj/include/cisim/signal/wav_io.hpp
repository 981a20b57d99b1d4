#pragma once

#include <cstddef>
#include <string>

#include "cisim/signal/waveform.hpp"

namespace cisim {

/// Channel selector that averages all channels instead of picking one.
inline constexpr int kMixChannels = -1;

/// Reads a RIFF/WAVE file holding 16-bit integer or 32-bit float PCM.
/// Integer samples are scaled by 2^-15. By default channel 0 is returned;
/// pass another index, or kMixChannels to average the channels.
Waveform load_wav(const std::string& path, int channel = 0);

enum class WavEncoding { Pcm16, Float32 };

/// Writes 16-bit PCM (default) or 32-bit float. Samples outside [-1, 1]
/// saturate; the number of saturated samples is returned.
std::size_t save_wav(const Waveform& waveform, const std::string& path,
                     WavEncoding encoding = WavEncoding::Pcm16);

/// Number of interleaved channels in a WAV file header.
int wav_channel_count(const std::string& path);

}  // namespace cisim
