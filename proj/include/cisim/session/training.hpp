#pragma once

#include <span>
#include <string_view>

namespace cisim {

enum class PlateauStrategy {
  PerStep,  // every step between consecutive block means improves by <= delta
  Overall,  // last block mean minus first block mean <= delta
};

std::string_view to_string(PlateauStrategy s);
PlateauStrategy parse_plateau_strategy(std::string_view text);

struct TrainingRule {
  int block_size = 5;
  int plateau_blocks = 3;
  double plateau_delta = 10.0;  // percentage points
  int min_sentences = 20;
  PlateauStrategy strategy = PlateauStrategy::PerStep;

  void validate() const;
};

/// Mean percent correct of block `b` (0-based) of `history`.
double block_mean(std::span<const double> history, int block_size, std::size_t b);

/// Whether training ends after the sentences in `history` (percent correct
/// per sentence, oldest first). Requires at least `min_sentences`, and is
/// evaluated only at block boundaries, on the most recent `plateau_blocks`
/// complete blocks. Nothing is latched: a plateau seen at sentence 15 does
/// not by itself end training at 20.
bool training_should_stop(std::span<const double> history, const TrainingRule& rule = {});

}  // namespace cisim
