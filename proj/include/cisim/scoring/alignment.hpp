#pragma once

#include <cstddef>

#include "cisim/scoring/lexicon.hpp"

namespace cisim {

struct AlignmentCounts {
  std::size_t cost = 0;     // unit-cost edit distance
  std::size_t correct = 0;  // aligned pairs with equal symbols
};

/// Global minimum-edit-distance alignment (unit insert, delete, substitute).
/// Among all minimum-cost alignments the one with the most matches is taken.
/// Throws Error on an empty target.
AlignmentCounts align(const PhonemeSequence& target, const PhonemeSequence& response);

/// Number of correctly identified target phonemes.
std::size_t align_phonemes(const PhonemeSequence& target, const PhonemeSequence& response);

}  // namespace cisim
