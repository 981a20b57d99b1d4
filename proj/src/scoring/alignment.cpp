#include "cisim/scoring/alignment.hpp"

#include <vector>

namespace cisim {

namespace {

// Lexicographic: lower cost first, then more matches.
bool better(const AlignmentCounts& a, const AlignmentCounts& b) {
  return a.cost < b.cost || (a.cost == b.cost && a.correct > b.correct);
}

}  // namespace

AlignmentCounts align(const PhonemeSequence& target, const PhonemeSequence& response) {
  if (target.empty()) throw Error("align_phonemes: empty target");
  const std::size_t n = target.size();
  const std::size_t m = response.size();
  std::vector<AlignmentCounts> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = {j, 0};
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = {i, 0};
    for (std::size_t j = 1; j <= m; ++j) {
      const bool same = target[i - 1] == response[j - 1];
      AlignmentCounts best{prev[j - 1].cost + (same ? 0u : 1u), prev[j - 1].correct + (same ? 1u : 0u)};
      const AlignmentCounts deletion{prev[j].cost + 1, prev[j].correct};
      const AlignmentCounts insertion{cur[j - 1].cost + 1, cur[j - 1].correct};
      if (better(deletion, best)) best = deletion;
      if (better(insertion, best)) best = insertion;
      cur[j] = best;
    }
    std::swap(prev, cur);
  }
  return prev[m];
}

std::size_t align_phonemes(const PhonemeSequence& target, const PhonemeSequence& response) {
  return align(target, response).correct;
}

}  // namespace cisim
