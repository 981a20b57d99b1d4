#pragma once

#include <optional>
#include <string>
#include <vector>

#include "cisim/stats/score_table.hpp"

namespace cisim::detail {

/// Scores arranged as y[subject][a][b], subjects carrying a group index.
struct Cube {
  Factor a = Factor::Room;
  Factor b = Factor::Channels;
  std::optional<Factor> between;
  std::vector<int> a_levels;
  std::vector<int> b_levels;
  std::vector<int> group_levels;  // a single pseudo-level when there is no between factor
  std::vector<std::string> subjects;
  std::vector<std::size_t> group_of;
  std::vector<std::size_t> group_sizes;
  std::vector<double> y;

  std::size_t n() const { return subjects.size(); }
  std::size_t na() const { return a_levels.size(); }
  std::size_t nb() const { return b_levels.size(); }
  std::size_t ng() const { return group_levels.size(); }
  double at(std::size_t s, std::size_t i, std::size_t j) const { return y[(s * na() + i) * nb() + j]; }
};

Cube build_cube(const ScoreTable& table, Factor a, Factor b, std::optional<Factor> between);

}  // namespace cisim::detail
