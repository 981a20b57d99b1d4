#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "cisim/common/error.hpp"

namespace cisim {

using Phoneme = std::string;
using PhonemeSequence = std::vector<Phoneme>;

/// Normalized word -> pronunciation, plus token aliases used to spell out
/// numerals. Immutable once loaded.
///
/// File format (compatible with CMUdict-style dictionaries):
///
///   ;;; comment            (also '#')
///   BOY  B OY1
///   DON'T  D OW1 N T
///   READ(1)  R EH1 D      (alternate pronunciations are ignored)
///   @alias 2 two          (token -> replacement words)
///
/// Words are normalized the same way responses are (lowercase, apostrophes
/// dropped). Stress digits are stripped from phoneme symbols. For homographs
/// the first listed pronunciation wins.
class PhonemeLexicon {
 public:
  PhonemeLexicon() = default;

  static PhonemeLexicon parse(std::string_view text);
  static PhonemeLexicon load(const std::string& path);

  /// Adds an entry; `word` is normalized. Throws on an empty pronunciation.
  void add(std::string_view word, PhonemeSequence phonemes);
  void add_alias(std::string_view token, std::vector<std::string> words);

  const PhonemeSequence* find(std::string_view normalized_word) const;
  const std::vector<std::string>* alias(std::string_view token) const;
  bool contains(std::string_view normalized_word) const { return find(normalized_word) != nullptr; }
  std::size_t size() const { return entries_.size(); }

 private:
  std::unordered_map<std::string, PhonemeSequence> entries_;
  std::unordered_map<std::string, std::vector<std::string>> aliases_;
};

}  // namespace cisim
