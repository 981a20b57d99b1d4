#include "cisim/scoring/score.hpp"

#include <cmath>
#include <numbers>

#include "cisim/scoring/alignment.hpp"
#include "cisim/scoring/text.hpp"

namespace cisim {

namespace {

struct WordCell {
  std::size_t cost = 0;
  std::size_t credit = 0;
};

bool better(const WordCell& a, const WordCell& b) {
  return a.cost < b.cost || (a.cost == b.cost && a.credit > b.credit);
}

// Word-level alignment; matched or substituted word pairs earn the phoneme
// matches between their pronunciations.
std::size_t per_word_credit(const std::vector<std::string>& target, const std::vector<std::string>& response,
                            const PhonemeLexicon& lexicon) {
  const std::size_t n = target.size(), m = response.size();
  std::vector<std::vector<WordCell>> dp(n + 1, std::vector<WordCell>(m + 1));
  for (std::size_t i = 0; i <= n; ++i) dp[i][0] = {i, 0};
  for (std::size_t j = 0; j <= m; ++j) dp[0][j] = {j, 0};
  for (std::size_t i = 1; i <= n; ++i) {
    const auto* target_phones = lexicon.find(target[i - 1]);
    for (std::size_t j = 1; j <= m; ++j) {
      const auto* response_phones = lexicon.find(response[j - 1]);
      const bool same = target[i - 1] == response[j - 1];
      std::size_t credit = 0;
      if (target_phones && response_phones) credit = align_phonemes(*target_phones, *response_phones);
      WordCell best{dp[i - 1][j - 1].cost + (same ? 0u : 1u), dp[i - 1][j - 1].credit + credit};
      const WordCell deletion{dp[i - 1][j].cost + 1, dp[i - 1][j].credit};
      const WordCell insertion{dp[i][j - 1].cost + 1, dp[i][j - 1].credit};
      if (better(deletion, best)) best = deletion;
      if (better(insertion, best)) best = insertion;
      dp[i][j] = best;
    }
  }
  return dp[n][m].credit;
}

}  // namespace

double rau(std::size_t correct, std::size_t total) {
  if (total == 0) throw Error("rau: total must be at least 1");
  if (correct > total) throw Error("rau: correct count exceeds total");
  const double n1 = static_cast<double>(total) + 1.0;
  const double x = static_cast<double>(correct);
  const double theta = std::asin(std::sqrt(x / n1)) + std::asin(std::sqrt((x + 1.0) / n1));
  return 146.0 / std::numbers::pi * theta - 23.0;
}

TrialScore score_trial(std::string_view target_text, std::string_view response_text,
                       const PhonemeLexicon& lexicon, const ScoringOptions& options) {
  const auto target_words = normalize_text(target_text, &lexicon);
  const auto target = to_phonemes(target_words, lexicon);
  if (!target.oov.empty()) {
    std::string list;
    for (const auto& w : target.oov) list += (list.empty() ? "" : ", ") + w;
    throw CorpusError("target sentence has words missing from the lexicon: " + list);
  }
  if (target.phonemes.empty()) throw CorpusError("target sentence is empty");

  TrialScore score;
  score.total_phonemes = target.phonemes.size();
  const auto response_words = normalize_text(response_text, &lexicon);
  if (!options.give_up_phrase.empty() && response_words == normalize_text(options.give_up_phrase)) {
    score.gave_up = true;
    score.correct_phonemes = 0;
  } else {
    const auto response = to_phonemes(response_words, lexicon);
    score.response_oov = response.oov;
    score.correct_phonemes = options.mode == ScoringMode::Global
                                 ? align_phonemes(target.phonemes, response.phonemes)
                                 : per_word_credit(target_words, response_words, lexicon);
  }
  score.percent_correct = 100.0 * static_cast<double>(score.correct_phonemes) /
                          static_cast<double>(score.total_phonemes);
  score.rau = rau(score.correct_phonemes, score.total_phonemes);
  return score;
}

}  // namespace cisim
