#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cisim/acoustics/rir.hpp"
#include "cisim/common/tsv.hpp"
#include "cisim/session/catalog.hpp"

namespace cisim {

/// One stimulus to render: a corpus sentence, optionally convolved with a
/// room's RIR, vocoded with `num_selected` channels and written to `output`.
struct StimulusDescriptor {
  std::string stimulus_id;
  Phase phase = Phase::Testing;
  std::string corpus;
  std::string list_id;
  std::string sentence_id;
  Room room = Room::Anechoic;  // anechoic: no convolution
  RirChannel rir_channel = RirChannel::Left;
  int num_selected = 8;
  std::string output;  // relative to the output directory
  std::optional<double> rms;
};

/// Manifest columns:
///
///   stimulus_id  phase  corpus  list_id  sentence_id  room  rir_channel
///   channels  output  [rms]
///
/// `rir_channel` may be empty for anechoic rows. Stimulus ids and outputs
/// must be unique.
struct RunManifest {
  std::vector<StimulusDescriptor> rows;

  static RunManifest from_table(const TsvTable& table);
  static RunManifest load(const std::string& path);
};

struct CorpusSentence {
  std::string list_id;
  std::string sentence_id;
  std::string text;
  std::string path;  // absolute
};

/// Corpora live outside the repository, one directory per corpus under a
/// common root:
///
///   <root>/<corpus>/sentences.tsv     list_id  sentence_id  text  path
///   <root>/<corpus>/<path>            the recorded sentence (WAV)
class CorpusIndex {
 public:
  explicit CorpusIndex(std::string root) : root_(std::move(root)) {}

  /// Throws IoError when the corpus or the sentence is missing.
  const CorpusSentence& find(const std::string& corpus, const std::string& list_id,
                             const std::string& sentence_id);

 private:
  std::string root_;
  std::vector<std::pair<std::string, std::vector<CorpusSentence>>> loaded_;
};

/// `<dir>/<room>_<channel>.wav` when present, else `<dir>/<room>.wav`.
std::string rir_path_for(const std::string& rir_dir, Room room, RirChannel channel);

}  // namespace cisim
