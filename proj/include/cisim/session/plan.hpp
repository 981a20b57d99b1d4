#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "cisim/scoring/score.hpp"
#include "cisim/session/training.hpp"
#include "cisim/stats/score_table.hpp"

namespace cisim {

struct Condition {
  Room room = Room::Anechoic;
  int channels = 0;

  friend auto operator<=>(const Condition&, const Condition&) = default;
};

std::string to_string(const Condition& c);

struct SessionPlan {
  std::string session_id;
  std::string subject;
  Location location = Location::Remote;
  std::uint64_t seed = 0;
  std::vector<Condition> conditions;      // presentation order
  std::vector<std::string> condition_lists;  // list id per condition, same order
  TrainingRule training;
  int max_plays = 1;
  bool headphones_attested = false;  // listener confirmed wired headphones
  ScoringMode scoring_mode = ScoringMode::Global;
  std::vector<std::string> training_stimuli;
  std::vector<std::vector<std::string>> testing_stimuli;  // per condition

  std::size_t testing_total() const;
};

/// Random condition order and injective list assignment, a deterministic
/// function of the seed. Throws ConfigError when there are fewer lists than
/// conditions, no conditions, or duplicates in either input.
SessionPlan build_plan(std::span<const Condition> conditions, std::span<const std::string> lists,
                       std::uint64_t seed);

/// Uniform draw from [0, bound) by rejection on a 64-bit engine, so results
/// do not depend on the standard library's distribution implementation.
template <typename Engine>
std::uint64_t bounded_draw(Engine& engine, std::uint64_t bound) {
  const std::uint64_t limit = UINT64_MAX - UINT64_MAX % bound;
  std::uint64_t x = engine();
  while (x >= limit) x = engine();
  return x % bound;
}

}  // namespace cisim
