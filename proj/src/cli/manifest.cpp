#include "cisim/cli/manifest.hpp"

#include <filesystem>
#include <set>

namespace cisim {

RunManifest RunManifest::from_table(const TsvTable& table) {
  for (const char* c : {"stimulus_id", "phase", "corpus", "list_id", "sentence_id", "room", "channels", "output"}) {
    table.require_column(c);
  }
  RunManifest m;
  std::set<std::string> ids, outputs;
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto where = "manifest row " + std::to_string(i + 1) + ": ";
    StimulusDescriptor d;
    d.stimulus_id = table.get(i, "stimulus_id");
    d.corpus = table.get(i, "corpus");
    d.list_id = table.get(i, "list_id");
    d.sentence_id = table.get(i, "sentence_id");
    d.output = table.get(i, "output");
    try {
      d.phase = parse_phase(table.get(i, "phase"));
      d.room = parse_room(table.get(i, "room"));
      const auto& ch = table.get(i, "rir_channel");
      if (!ch.empty()) d.rir_channel = parse_rir_channel(ch);
      std::size_t used = 0;
      const auto& n = table.get(i, "channels");
      d.num_selected = std::stoi(n, &used);
      if (used != n.size()) throw ConfigError("channels is not an integer: '" + n + "'");
      const auto& rms = table.get(i, "rms");
      if (!rms.empty()) {
        d.rms = std::stod(rms, &used);
        if (used != rms.size() || !(*d.rms > 0.0)) throw ConfigError("rms must be a positive number");
      }
    } catch (const std::exception& e) {
      throw ConfigError(where + e.what());
    }
    if (d.stimulus_id.empty() || d.output.empty()) throw ConfigError(where + "stimulus_id and output are required");
    if (std::filesystem::path(d.output).is_absolute()) throw ConfigError(where + "output must be a relative path");
    if (!ids.insert(d.stimulus_id).second) throw ConfigError(where + "duplicate stimulus id " + d.stimulus_id);
    const auto normal = std::filesystem::path(d.output).lexically_normal().string();
    if (!outputs.insert(normal).second) throw ConfigError(where + "duplicate output path " + d.output);
    m.rows.push_back(std::move(d));
  }
  return m;
}

RunManifest RunManifest::load(const std::string& path) { return from_table(TsvTable::read_file(path)); }

const CorpusSentence& CorpusIndex::find(const std::string& corpus, const std::string& list_id,
                                        const std::string& sentence_id) {
  auto it = std::find_if(loaded_.begin(), loaded_.end(), [&](const auto& e) { return e.first == corpus; });
  if (it == loaded_.end()) {
    const auto dir = std::filesystem::path(root_) / corpus;
    const auto index = dir / "sentences.tsv";
    if (!std::filesystem::exists(index)) throw IoError("corpus '" + corpus + "' not found under " + root_);
    const auto table = TsvTable::read_file(index.string());
    for (const char* c : {"list_id", "sentence_id", "text", "path"}) table.require_column(c);
    std::vector<CorpusSentence> sentences;
    for (std::size_t i = 0; i < table.size(); ++i) {
      sentences.push_back({table.get(i, "list_id"), table.get(i, "sentence_id"), table.get(i, "text"),
                           (dir / table.get(i, "path")).lexically_normal().string()});
    }
    loaded_.emplace_back(corpus, std::move(sentences));
    it = std::prev(loaded_.end());
  }
  for (const auto& s : it->second) {
    if (s.list_id == list_id && s.sentence_id == sentence_id) return s;
  }
  throw IoError("corpus '" + corpus + "' has no sentence " + list_id + "/" + sentence_id);
}

std::string rir_path_for(const std::string& rir_dir, Room room, RirChannel channel) {
  const auto dir = std::filesystem::path(rir_dir);
  const auto split = dir / (std::string(to_string(room)) + "_" + std::string(to_string(channel)) + ".wav");
  if (std::filesystem::exists(split)) return split.string();
  return (dir / (std::string(to_string(room)) + ".wav")).string();
}

}  // namespace cisim
