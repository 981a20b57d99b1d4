#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "cisim/stats/score_table.hpp"

namespace cisim {

struct ConditionSummary {
  Room room = Room::Anechoic;
  int channels = 0;
  Location location = Location::Remote;
  std::size_t n = 0;
  double mean = 0.0;  // percent correct
  double sd = 0.0;    // sample sd; 0 when n == 1
  bool single = false;

  /// "56.3 ± 12.8%"
  std::string formatted(int decimals = 1) const;
};

/// Per (room, channels, location) cell, in that sort order. Rows without a
/// percent score are ignored; cells with none are reported with n = 0 and
/// NaN statistics.
std::vector<ConditionSummary> summarize_conditions(const ScoreTable& table);

/// Lowest and highest channel condition (by mean) within each room and
/// location: "ranged from 56.3 ± 12.8% to 68.8 ± 16.7%".
struct ConditionRange {
  Room room = Room::Anechoic;
  Location location = Location::Remote;
  ConditionSummary lowest;
  ConditionSummary highest;

  std::string formatted(int decimals = 1) const;
};

std::vector<ConditionRange> condition_ranges(const std::vector<ConditionSummary>& summaries);

}  // namespace cisim
