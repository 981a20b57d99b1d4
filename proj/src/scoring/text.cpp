#include "cisim/scoring/text.hpp"

#include <cctype>

namespace cisim {

namespace {

enum class CharClass { Word, Apostrophe, Separator };

// Classifies the character starting at s[i]; `width` receives its byte count.
CharClass classify(std::string_view s, std::size_t i, std::size_t& width) {
  width = 1;
  const auto c = static_cast<unsigned char>(s[i]);
  if (c == '\'' || c == '`') return CharClass::Apostrophe;
  // U+2018 / U+2019 single quotation marks.
  if (c == 0xE2 && i + 2 < s.size() && static_cast<unsigned char>(s[i + 1]) == 0x80 &&
      (static_cast<unsigned char>(s[i + 2]) == 0x98 || static_cast<unsigned char>(s[i + 2]) == 0x99)) {
    width = 3;
    return CharClass::Apostrophe;
  }
  if (c >= 0x80 || std::isalnum(c)) return CharClass::Word;
  return CharClass::Separator;
}

std::vector<std::string> tokenize(std::string_view raw) {
  std::vector<std::string> words;
  std::string current;
  for (std::size_t i = 0; i < raw.size();) {
    std::size_t width = 1;
    switch (classify(raw, i, width)) {
      case CharClass::Word:
        current += static_cast<char>(std::tolower(static_cast<unsigned char>(raw[i])));
        break;
      case CharClass::Apostrophe:
        break;
      case CharClass::Separator:
        if (!current.empty()) words.push_back(std::move(current));
        current.clear();
        break;
    }
    i += width;
  }
  if (!current.empty()) words.push_back(std::move(current));
  return words;
}

}  // namespace

std::string normalize_word(std::string_view word) {
  std::string out;
  for (const auto& part : tokenize(word)) out += part;
  return out;
}

std::vector<std::string> normalize_text(std::string_view raw, const PhonemeLexicon* lexicon) {
  auto words = tokenize(raw);
  if (lexicon == nullptr) return words;
  std::vector<std::string> expanded;
  expanded.reserve(words.size());
  for (auto& w : words) {
    if (const auto* alias = lexicon->alias(w)) {
      expanded.insert(expanded.end(), alias->begin(), alias->end());
    } else {
      expanded.push_back(std::move(w));
    }
  }
  return expanded;
}

PhonemeTranscription to_phonemes(const std::vector<std::string>& words, const PhonemeLexicon& lexicon) {
  PhonemeTranscription out;
  for (const auto& w : words) {
    if (const auto* phones = lexicon.find(w)) {
      out.phonemes.insert(out.phonemes.end(), phones->begin(), phones->end());
    } else {
      out.oov.push_back(w);
    }
  }
  return out;
}

}  // namespace cisim
