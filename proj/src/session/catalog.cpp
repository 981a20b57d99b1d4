#include "cisim/session/catalog.hpp"

#include <filesystem>
#include <set>

#include "cisim/scoring/score.hpp"
#include "cisim/scoring/text.hpp"

namespace cisim {

std::string_view to_string(Phase p) { return p == Phase::Training ? "training" : "testing"; }

Phase parse_phase(std::string_view text) {
  if (text == "training") return Phase::Training;
  if (text == "testing") return Phase::Testing;
  throw ConfigError("unknown phase '" + std::string(text) + "'");
}

StimulusCatalog StimulusCatalog::load(const std::string& directory) {
  const auto index = std::filesystem::path(directory) / "stimuli.tsv";
  if (!std::filesystem::exists(index)) throw IoError("stimulus directory has no stimuli.tsv: " + directory);
  return from_table(TsvTable::read_file(index.string()), directory);
}

StimulusCatalog StimulusCatalog::from_table(const TsvTable& table, const std::string& directory) {
  for (const char* column : {"stimulus_id", "phase", "list_id", "room", "channels", "text", "path"}) {
    table.require_column(column);
  }
  StimulusCatalog catalog;
  const std::filesystem::path root(directory);
  for (std::size_t i = 0; i < table.size(); ++i) {
    const auto where = "stimuli.tsv row " + std::to_string(i + 1) + ": ";
    Stimulus s;
    s.id = table.get(i, "stimulus_id");
    if (s.id.empty() || s.id.find('/') != std::string::npos) throw ConfigError(where + "bad stimulus id '" + s.id + "'");
    try {
      s.phase = parse_phase(table.get(i, "phase"));
      s.condition.room = parse_room(table.get(i, "room"));
      s.condition.channels = std::stoi(table.get(i, "channels"));
    } catch (const std::exception& e) {
      throw ConfigError(where + e.what());
    }
    s.list_id = table.get(i, "list_id");
    s.sentence_id = table.get(i, "sentence_id");
    s.text = table.get(i, "text");
    s.path = (root / table.get(i, "path")).lexically_normal().string();
    if (s.phase == Phase::Testing && s.list_id.empty()) throw ConfigError(where + "testing stimulus without a list id");
    if (!std::filesystem::is_regular_file(s.path)) throw IoError(where + "missing audio file " + s.path);
    if (!catalog.by_id_.emplace(s.id, catalog.stimuli_.size()).second) {
      throw ConfigError(where + "duplicate stimulus id '" + s.id + "'");
    }
    catalog.stimuli_.push_back(std::move(s));
  }
  return catalog;
}

const Stimulus* StimulusCatalog::find(std::string_view id) const {
  const auto it = by_id_.find(id);
  return it == by_id_.end() ? nullptr : &stimuli_[it->second];
}

const Stimulus& StimulusCatalog::at(std::string_view id) const {
  if (const auto* s = find(id)) return *s;
  throw ConfigError("unknown stimulus '" + std::string(id) + "'");
}

std::vector<std::string> StimulusCatalog::training_stimuli() const {
  std::vector<std::string> out;
  for (const auto& s : stimuli_) {
    if (s.phase == Phase::Training) out.push_back(s.id);
  }
  return out;
}

std::vector<Condition> StimulusCatalog::testing_conditions() const {
  std::set<Condition> set;
  for (const auto& s : stimuli_) {
    if (s.phase == Phase::Testing) set.insert(s.condition);
  }
  return {set.begin(), set.end()};
}

std::vector<std::string> StimulusCatalog::lists_covering(const std::vector<Condition>& conditions) const {
  std::map<std::string, std::set<Condition>> seen;
  for (const auto& s : stimuli_) {
    if (s.phase == Phase::Testing) seen[s.list_id].insert(s.condition);
  }
  std::vector<std::string> out;
  for (const auto& [list, have] : seen) {
    bool all = true;
    for (const auto& c : conditions) all = all && have.count(c) > 0;
    if (all) out.push_back(list);
  }
  return out;
}

std::vector<std::string> StimulusCatalog::testing_stimuli(const std::string& list, const Condition& condition) const {
  std::vector<std::string> out;
  for (const auto& s : stimuli_) {
    if (s.phase == Phase::Testing && s.list_id == list && s.condition == condition) out.push_back(s.id);
  }
  return out;
}

void StimulusCatalog::check_targets(const PhonemeLexicon& lexicon) const {
  for (const auto& s : stimuli_) {
    const auto t = to_phonemes(normalize_text(s.text, &lexicon), lexicon);
    if (!t.oov.empty() || t.phonemes.empty()) {
      throw CorpusError("stimulus " + s.id + ": target cannot be scored" +
                        (t.oov.empty() ? std::string(" (empty)") : " (unknown word '" + t.oov.front() + "')"));
    }
  }
}

}  // namespace cisim
