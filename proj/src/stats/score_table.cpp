#include "cisim/stats/score_table.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>
#include <sstream>
#include <tuple>

#include "cisim/scoring/score.hpp"

namespace cisim {

namespace {

std::string lower(std::string_view s) {
  std::string out;
  for (char c : s) {
    if (c != '-' && c != '_' && c != ' ') out += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  return out;
}

long parse_integer(const std::string& text, std::string_view column, std::size_t row) {
  std::size_t used = 0;
  long value = 0;
  try {
    value = std::stol(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size()) {
    throw DesignError("row " + std::to_string(row + 1) + ": column '" + std::string(column) +
                      "' is not an integer: '" + text + "'");
  }
  return value;
}

double parse_real(const std::string& text, std::string_view column, std::size_t row) {
  std::size_t used = 0;
  double value = 0.0;
  try {
    value = std::stod(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || !std::isfinite(value)) {
    throw DesignError("row " + std::to_string(row + 1) + ": column '" + std::string(column) +
                      "' is not a finite number: '" + text + "'");
  }
  return value;
}

std::string format_real(double v) {
  std::ostringstream out;
  out.precision(17);
  out << v;
  return out.str();
}

}  // namespace

std::string_view to_string(Room room) {
  switch (room) {
    case Room::Anechoic: return "anechoic";
    case Room::Office: return "office";
    case Room::Lecture: return "lecture";
    case Room::Stairway: return "stairway";
  }
  return "?";
}

std::string_view to_string(Location location) {
  return location == Location::Remote ? "remote" : "in-person";
}

std::string_view to_string(Factor factor) {
  switch (factor) {
    case Factor::Room: return "room";
    case Factor::Channels: return "channels";
    case Factor::Location: return "location";
  }
  return "?";
}

Room parse_room(std::string_view text) {
  const auto s = lower(text);
  if (s == "anechoic") return Room::Anechoic;
  if (s == "office") return Room::Office;
  if (s == "lecture" || s == "lecturehall") return Room::Lecture;
  if (s == "stairway") return Room::Stairway;
  throw DesignError("unknown room '" + std::string(text) + "'");
}

Location parse_location(std::string_view text) {
  const auto s = lower(text);
  if (s == "remote") return Location::Remote;
  if (s == "inperson" || s == "lab" || s == "inlab") return Location::InPerson;
  throw DesignError("unknown location '" + std::string(text) + "'");
}

Factor parse_factor(std::string_view text) {
  const auto s = lower(text);
  if (s == "room" || s == "environment") return Factor::Room;
  if (s == "channels" || s == "n" || s == "numselected") return Factor::Channels;
  if (s == "location") return Factor::Location;
  throw DesignError("unknown factor '" + std::string(text) + "'");
}

int level_of(const ScoreRow& row, Factor factor) {
  switch (factor) {
    case Factor::Room: return static_cast<int>(row.room);
    case Factor::Channels: return row.channels;
    case Factor::Location: return static_cast<int>(row.location);
  }
  return 0;
}

std::string level_label(Factor factor, int level) {
  switch (factor) {
    case Factor::Room: return std::string(to_string(static_cast<Room>(level)));
    case Factor::Channels: return std::to_string(level);
    case Factor::Location: return std::string(to_string(static_cast<Location>(level)));
  }
  return "?";
}

ScoreTable score_table_from_tsv(const TsvTable& tsv) {
  tsv.require_column("subject");
  tsv.require_column("room");
  tsv.require_column("channels");
  const bool trial_level = tsv.has_column("correct_phonemes") && tsv.has_column("total_phonemes");
  if (!trial_level) tsv.require_column("rau");

  auto location_of = [&](std::size_t i) {
    const auto& text = tsv.get(i, "location");
    return text.empty() ? Location::Remote : parse_location(text);
  };

  ScoreTable table;
  if (!trial_level) {
    for (std::size_t i = 0; i < tsv.size(); ++i) {
      ScoreRow row;
      row.subject = tsv.get(i, "subject");
      row.location = location_of(i);
      row.room = parse_room(tsv.get(i, "room"));
      row.channels = static_cast<int>(parse_integer(tsv.get(i, "channels"), "channels", i));
      row.rau = parse_real(tsv.get(i, "rau"), "rau", i);
      if (const auto& p = tsv.get(i, "percent_correct"); !p.empty()) row.percent = parse_real(p, "percent_correct", i);
      table.rows.push_back(std::move(row));
    }
    return table;
  }

  using Key = std::tuple<std::string, int, int, int>;
  std::map<Key, std::pair<long, long>> pooled;
  std::vector<Key> order;
  for (std::size_t i = 0; i < tsv.size(); ++i) {
    if (lower(tsv.get(i, "phase")) == "training") continue;
    const Key key{tsv.get(i, "subject"), static_cast<int>(location_of(i)),
                  static_cast<int>(parse_room(tsv.get(i, "room"))),
                  static_cast<int>(parse_integer(tsv.get(i, "channels"), "channels", i))};
    const long correct = parse_integer(tsv.get(i, "correct_phonemes"), "correct_phonemes", i);
    const long total = parse_integer(tsv.get(i, "total_phonemes"), "total_phonemes", i);
    if (correct < 0 || total < 0 || correct > total) {
      throw DesignError("row " + std::to_string(i + 1) + ": need 0 <= correct <= total");
    }
    auto [it, inserted] = pooled.try_emplace(key, 0L, 0L);
    if (inserted) order.push_back(key);
    it->second.first += correct;
    it->second.second += total;
  }
  for (const auto& key : order) {
    const auto [correct, total] = pooled.at(key);
    if (total == 0) throw DesignError("cell for subject '" + std::get<0>(key) + "' has no phonemes");
    ScoreRow row;
    row.subject = std::get<0>(key);
    row.location = static_cast<Location>(std::get<1>(key));
    row.room = static_cast<Room>(std::get<2>(key));
    row.channels = std::get<3>(key);
    row.rau = rau(static_cast<std::size_t>(correct), static_cast<std::size_t>(total));
    row.percent = 100.0 * static_cast<double>(correct) / static_cast<double>(total);
    table.rows.push_back(std::move(row));
  }
  return table;
}

ScoreTable read_score_table(const std::string& path) {
  const auto tsv = TsvTable::read_file(path);
  try {
    return score_table_from_tsv(tsv);
  } catch (const Error& e) {
    throw DesignError(path + ": " + e.what());
  }
}

TsvTable to_tsv(const ScoreTable& table) {
  TsvTable tsv({"subject", "location", "room", "channels", "rau", "percent_correct"});
  for (const auto& r : table.rows) {
    tsv.add_row({r.subject, std::string(to_string(r.location)), std::string(to_string(r.room)),
                 std::to_string(r.channels), format_real(r.rau),
                 std::isnan(r.percent) ? std::string() : format_real(r.percent)});
  }
  return tsv;
}

ScoreTable restrict_to_common_cells(const ScoreTable& table) {
  std::map<std::string, std::set<std::pair<int, int>>> cells_by_subject;
  for (const auto& r : table.rows) cells_by_subject[r.subject].insert({static_cast<int>(r.room), r.channels});
  if (cells_by_subject.empty()) return table;
  std::set<std::pair<int, int>> common = cells_by_subject.begin()->second;
  for (const auto& [subject, cells] : cells_by_subject) {
    std::set<std::pair<int, int>> keep;
    std::set_intersection(common.begin(), common.end(), cells.begin(), cells.end(),
                          std::inserter(keep, keep.begin()));
    common = std::move(keep);
  }
  return table.filter([&](const ScoreRow& r) { return common.contains({static_cast<int>(r.room), r.channels}); });
}

}  // namespace cisim
