#include "cisim/session/training.hpp"

#include <string>

#include "cisim/common/error.hpp"

namespace cisim {

std::string_view to_string(PlateauStrategy s) {
  return s == PlateauStrategy::PerStep ? "per-step" : "overall";
}

PlateauStrategy parse_plateau_strategy(std::string_view text) {
  if (text == "per-step") return PlateauStrategy::PerStep;
  if (text == "overall") return PlateauStrategy::Overall;
  throw ConfigError("unknown plateau strategy '" + std::string(text) + "' (expected per-step or overall)");
}

void TrainingRule::validate() const {
  if (block_size < 1) throw ConfigError("training block size must be positive");
  if (plateau_blocks < 2) throw ConfigError("plateau needs at least two blocks");
  if (!(plateau_delta >= 0.0)) throw ConfigError("plateau delta must be non-negative");
  if (min_sentences < 0) throw ConfigError("minimum training sentences must be non-negative");
}

double block_mean(std::span<const double> history, int block_size, std::size_t b) {
  const auto size = static_cast<std::size_t>(block_size);
  double sum = 0.0;
  for (std::size_t i = b * size; i < (b + 1) * size; ++i) sum += history[i];
  return sum / static_cast<double>(size);
}

bool training_should_stop(std::span<const double> history, const TrainingRule& rule) {
  rule.validate();
  const std::size_t n = history.size();
  const auto block = static_cast<std::size_t>(rule.block_size);
  const auto blocks = static_cast<std::size_t>(rule.plateau_blocks);
  if (n < static_cast<std::size_t>(rule.min_sentences)) return false;
  if (n % block != 0 || n < blocks * block) return false;

  const std::size_t last = n / block;
  const std::size_t first = last - blocks;
  if (rule.strategy == PlateauStrategy::Overall) {
    return block_mean(history, rule.block_size, last - 1) - block_mean(history, rule.block_size, first) <=
           rule.plateau_delta;
  }
  for (std::size_t b = first + 1; b < last; ++b) {
    const double gain = block_mean(history, rule.block_size, b) - block_mean(history, rule.block_size, b - 1);
    if (gain > rule.plateau_delta) return false;
  }
  return true;
}

}  // namespace cisim
