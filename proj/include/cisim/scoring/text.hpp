#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "cisim/scoring/lexicon.hpp"

namespace cisim {

/// Lowercases, drops apostrophes (ASCII and U+2019) so contractions stay one
/// word, turns every other non-alphanumeric byte into a separator, and splits
/// on whitespace. With a lexicon, tokens that have an alias (numerals) are
/// replaced by the alias words.
std::vector<std::string> normalize_text(std::string_view raw, const PhonemeLexicon* lexicon = nullptr);

/// Normalization of a single dictionary headword.
std::string normalize_word(std::string_view word);

struct PhonemeTranscription {
  PhonemeSequence phonemes;
  std::vector<std::string> oov;
};

/// Concatenated pronunciations; out-of-vocabulary words contribute nothing
/// and are listed in `oov`.
PhonemeTranscription to_phonemes(const std::vector<std::string>& words, const PhonemeLexicon& lexicon);

}  // namespace cisim
