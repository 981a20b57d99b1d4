#include "cisim/scoring/lexicon.hpp"

#include <cctype>
#include <fstream>
#include <sstream>

#include "cisim/scoring/text.hpp"

namespace cisim {

namespace {

std::string strip_stress(std::string_view symbol) {
  std::string out;
  for (char c : symbol) {
    if (!std::isdigit(static_cast<unsigned char>(c))) {
      out += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    }
  }
  return out.empty() ? std::string(symbol) : out;
}

}  // namespace

void PhonemeLexicon::add(std::string_view word, PhonemeSequence phonemes) {
  const auto key = normalize_word(word);
  if (key.empty()) throw ConfigError("lexicon: empty headword '" + std::string(word) + "'");
  if (phonemes.empty()) throw ConfigError("lexicon: empty pronunciation for '" + key + "'");
  entries_.try_emplace(key, std::move(phonemes));
}

void PhonemeLexicon::add_alias(std::string_view token, std::vector<std::string> words) {
  if (words.empty()) throw ConfigError("lexicon: empty alias for '" + std::string(token) + "'");
  for (auto& w : words) w = normalize_word(w);
  aliases_.insert_or_assign(normalize_word(token), std::move(words));
}

PhonemeLexicon PhonemeLexicon::parse(std::string_view text) {
  PhonemeLexicon lex;
  std::istringstream in{std::string(text)};
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    std::istringstream fields(line);
    std::string head;
    if (!(fields >> head)) continue;
    if (head.starts_with(";;;") || head.starts_with("#")) continue;
    std::vector<std::string> rest;
    for (std::string tok; fields >> tok;) rest.push_back(tok);
    if (head == "@alias") {
      if (rest.size() < 2) throw ConfigError("lexicon line " + std::to_string(line_no) + ": @alias needs a token and words");
      const std::string token = rest.front();
      lex.add_alias(token, std::vector<std::string>(rest.begin() + 1, rest.end()));
      continue;
    }
    // Alternate pronunciations are listed as WORD(2); keep the first.
    if (head.size() > 3 && head.back() == ')' && head.find('(') != std::string::npos) continue;
    if (rest.empty()) throw ConfigError("lexicon line " + std::to_string(line_no) + ": no phonemes for '" + head + "'");
    PhonemeSequence phonemes;
    for (const auto& p : rest) phonemes.push_back(strip_stress(p));
    try {
      lex.add(head, std::move(phonemes));
    } catch (const ConfigError& e) {
      throw ConfigError("lexicon line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return lex;
}

PhonemeLexicon PhonemeLexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open lexicon: " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str());
}

const PhonemeSequence* PhonemeLexicon::find(std::string_view normalized_word) const {
  const auto it = entries_.find(std::string(normalized_word));
  return it == entries_.end() ? nullptr : &it->second;
}

const std::vector<std::string>* PhonemeLexicon::alias(std::string_view token) const {
  const auto it = aliases_.find(std::string(token));
  return it == aliases_.end() ? nullptr : &it->second;
}

}  // namespace cisim
