#pragma once

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "cisim/common/error.hpp"
#include "cisim/common/tsv.hpp"

namespace cisim {

/// The data cannot be analyzed with the requested design (unbalanced cells,
/// subjects in two groups, constant data, ...).
class DesignError : public Error {
 public:
  using Error::Error;
};

enum class Room { Anechoic, Office, Lecture, Stairway };
enum class Location { Remote, InPerson };
enum class Factor { Room, Channels, Location };

std::string_view to_string(Room room);
std::string_view to_string(Location location);
std::string_view to_string(Factor factor);
Room parse_room(std::string_view text);
Location parse_location(std::string_view text);
Factor parse_factor(std::string_view text);

/// One subject x condition cell: its RAU score for inference and its
/// percent-correct score for descriptives.
struct ScoreRow {
  std::string subject;
  Location location = Location::Remote;
  Room room = Room::Anechoic;
  int channels = 0;
  double rau = 0.0;
  double percent = std::numeric_limits<double>::quiet_NaN();
};

/// Level of `factor` in `row`, as an integer code (enum value or channel
/// count).
int level_of(const ScoreRow& row, Factor factor);
std::string level_label(Factor factor, int level);

struct ScoreTable {
  std::vector<ScoreRow> rows;

  bool empty() const { return rows.empty(); }
  std::size_t size() const { return rows.size(); }

  /// Rows satisfying `keep`.
  template <typename Pred>
  ScoreTable filter(Pred keep) const {
    ScoreTable out;
    for (const auto& r : rows) {
      if (keep(r)) out.rows.push_back(r);
    }
    return out;
  }
};

/// Reads either format:
///  - cell level: subject, room, channels, rau [, location, percent_correct]
///  - trial level: subject, room, channels, correct_phonemes,
///    total_phonemes [, location, phase]; training-phase rows are dropped
///    and trials are pooled per (subject, location, room, channels) cell,
///    RAU taken from the pooled counts.
/// Missing location means remote.
ScoreTable score_table_from_tsv(const TsvTable& tsv);
ScoreTable read_score_table(const std::string& path);

/// Cell-level TSV (the first format above).
TsvTable to_tsv(const ScoreTable& table);

/// Keeps only the (room, channels) cells that every subject has, so that a
/// design mixing groups with different condition subsets becomes balanced.
ScoreTable restrict_to_common_cells(const ScoreTable& table);

}  // namespace cisim
