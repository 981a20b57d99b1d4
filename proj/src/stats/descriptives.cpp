#include "cisim/stats/descriptives.hpp"

#include <cmath>
#include <limits>
#include <map>
#include <tuple>

#include <fmt/format.h>

namespace cisim {

std::string ConditionSummary::formatted(int decimals) const {
  if (n == 0 || !std::isfinite(mean)) return "NA";
  return fmt::format("{:.{}f} ± {:.{}f}%", mean, decimals, sd, decimals);
}

std::string ConditionRange::formatted(int decimals) const {
  return lowest.formatted(decimals) + " to " + highest.formatted(decimals);
}

std::vector<ConditionSummary> summarize_conditions(const ScoreTable& table) {
  std::map<std::tuple<Room, int, Location>, std::vector<double>> cells;
  for (const auto& row : table.rows) {
    auto& values = cells[{row.room, row.channels, row.location}];
    if (std::isfinite(row.percent)) values.push_back(row.percent);
  }
  std::vector<ConditionSummary> out;
  for (const auto& [key, values] : cells) {
    ConditionSummary s;
    std::tie(s.room, s.channels, s.location) = key;
    s.n = values.size();
    s.single = s.n == 1;
    if (s.n == 0) {
      s.mean = s.sd = std::numeric_limits<double>::quiet_NaN();
    } else {
      double sum = 0.0;
      for (double v : values) sum += v;
      s.mean = sum / static_cast<double>(s.n);
      double ss = 0.0;
      for (double v : values) ss += (v - s.mean) * (v - s.mean);
      s.sd = s.n > 1 ? std::sqrt(ss / static_cast<double>(s.n - 1)) : 0.0;
    }
    out.push_back(s);
  }
  return out;
}

std::vector<ConditionRange> condition_ranges(const std::vector<ConditionSummary>& summaries) {
  std::map<std::pair<Room, Location>, ConditionRange> ranges;
  for (const auto& s : summaries) {
    if (s.n == 0) continue;
    auto [it, inserted] = ranges.try_emplace({s.room, s.location});
    auto& r = it->second;
    if (inserted) {
      r.room = s.room;
      r.location = s.location;
      r.lowest = r.highest = s;
      continue;
    }
    if (s.mean < r.lowest.mean) r.lowest = s;
    if (s.mean > r.highest.mean) r.highest = s;
  }
  std::vector<ConditionRange> out;
  for (auto& [key, r] : ranges) out.push_back(std::move(r));
  return out;
}

}  // namespace cisim
