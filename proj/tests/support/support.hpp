#pragma once

#include <complex>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "cisim/acoustics/rir.hpp"
#include "cisim/signal/waveform.hpp"
#include "cisim/stats/score_table.hpp"

namespace cisim::test {

/// Vowel-like test signal: a jittered glottal pulse train through two
/// moving formant resonators, gated into syllables, plus a little noise.
Waveform synthetic_speech(double seconds, int rate_hz = 16000, std::uint64_t seed = 1);

/// Exponentially decaying noise RIR with the given RT60, preceded by a
/// direct-path tap at index 0.
RoomImpulseResponse exponential_rir(double rt60_s, int rate_hz, double seconds, std::uint64_t seed = 7,
                                    double direct_gain = 1.0);

std::vector<double> naive_convolution(std::span<const double> x, std::span<const double> h);
std::vector<std::complex<double>> naive_dft(std::span<const double> x);
std::vector<double> random_signal(std::size_t n, std::uint64_t seed, double amplitude = 0.5);

/// Subject x room x channel RAU table with a known structure and optional
/// between-group shift, drawn from the given seed.
ScoreTable random_score_table(std::size_t subjects, std::uint64_t seed, Location location = Location::Remote,
                              double group_shift = 0.0, const std::string& id_prefix = "s");

/// Same layout with no condition effects but non-spherical room
/// variances, for null calibration.
ScoreTable null_score_table(std::size_t subjects, std::uint64_t seed);

/// Temporary directory removed on destruction.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

/// Writes a small rendered stimulus directory (stimuli.tsv plus short WAV
/// files) whose sentences are all in the test lexicon. Testing lists are
/// named L1..L<lists>, each rendered in every room x channel condition.
void write_stimulus_dir(const std::filesystem::path& dir, std::size_t training, const std::vector<Room>& rooms,
                        const std::vector<int>& channels, std::size_t lists, std::size_t per_list);

/// Sentence `i` of the fixed test sentence pool.
const std::string& test_sentence(std::size_t i);

std::string data_path(const std::string& name);
std::string fixture_path(const std::string& name);

}  // namespace cisim::test

namespace cisim::test {

/// Brute-force alignment: enumerates every order-preserving set of aligned
/// pairs; cost = n + m - |pairs| - matches. Returns {min cost, max matches at
/// that cost}.
std::pair<std::size_t, std::size_t> exhaustive_alignment(const std::vector<std::string>& target,
                                                         const std::vector<std::string>& response);

/// All sequences over `alphabet` of length lo..hi.
std::vector<std::vector<std::string>> all_sequences(const std::vector<std::string>& alphabet, std::size_t lo,
                                                    std::size_t hi);

/// RAU evaluated through atan2 rather than asin(sqrt()).
double rau_reference(std::size_t x, std::size_t n);

}  // namespace cisim::test
