#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "cisim/scoring/lexicon.hpp"
#include "cisim/session/plan.hpp"

namespace cisim {

enum class Phase { Training, Testing };
std::string_view to_string(Phase p);
Phase parse_phase(std::string_view text);

struct Stimulus {
  std::string id;
  Phase phase = Phase::Testing;
  std::string list_id;
  Condition condition;
  std::string sentence_id;
  std::string text;
  std::string path;  // absolute
};

/// The rendered stimuli a service can present, read from `stimuli.tsv` in a
/// stimulus directory:
///
///   stimulus_id  phase  list_id  room  channels  sentence_id  text  path
///
/// `path` is relative to the directory. Row order within a list is the
/// presentation order.
class StimulusCatalog {
 public:
  static StimulusCatalog load(const std::string& directory);
  static StimulusCatalog from_table(const TsvTable& table, const std::string& directory);

  const Stimulus* find(std::string_view id) const;
  const Stimulus& at(std::string_view id) const;
  std::size_t size() const { return stimuli_.size(); }

  std::vector<std::string> training_stimuli() const;
  /// Testing conditions present in the catalog, sorted.
  std::vector<Condition> testing_conditions() const;
  /// Lists rendered in every one of `conditions`, sorted.
  std::vector<std::string> lists_covering(const std::vector<Condition>& conditions) const;
  /// Testing stimuli of `list` rendered in `condition`, in list order.
  std::vector<std::string> testing_stimuli(const std::string& list, const Condition& condition) const;

  /// Throws CorpusError naming the first target that cannot be scored.
  void check_targets(const PhonemeLexicon& lexicon) const;

 private:
  std::vector<Stimulus> stimuli_;
  std::map<std::string, std::size_t, std::less<>> by_id_;
};

}  // namespace cisim
