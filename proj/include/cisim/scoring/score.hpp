#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "cisim/scoring/lexicon.hpp"

namespace cisim {

/// Target transcript cannot be scored (out-of-vocabulary word or empty).
class CorpusError : public Error {
 public:
  using Error::Error;
};

inline constexpr std::string_view kGiveUpPhrase = "I don't know";

struct TrialScore {
  std::size_t total_phonemes = 0;
  std::size_t correct_phonemes = 0;
  double percent_correct = 0.0;
  double rau = 0.0;
  bool gave_up = false;
  std::vector<std::string> response_oov;
};

enum class ScoringMode {
  /// One alignment over the whole phoneme strings.
  Global,
  /// Words aligned first; phonemes credited only within aligned word pairs.
  PerWord,
};

struct ScoringOptions {
  ScoringMode mode = ScoringMode::Global;
  std::string give_up_phrase = std::string(kGiveUpPhrase);
};

/// Rationalized arcsine transform of X correct out of N:
/// (146/pi) * (asin(sqrt(X/(N+1))) + asin(sqrt((X+1)/(N+1)))) - 23.
double rau(std::size_t correct, std::size_t total);

/// Scores one typed response against its target sentence. A response that
/// normalizes to the give-up phrase scores 0 of N.
TrialScore score_trial(std::string_view target_text, std::string_view response_text,
                       const PhonemeLexicon& lexicon, const ScoringOptions& options = {});

}  // namespace cisim
