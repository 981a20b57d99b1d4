#pragma once

#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "cisim/scoring/score.hpp"
#include "cisim/session/catalog.hpp"
#include "cisim/session/plan.hpp"

namespace cisim {

/// One presented sentence and what the listener typed, kept verbatim.
struct TrialRecord {
  std::string session_id;
  Phase phase = Phase::Training;
  std::size_t trial = 0;                        // 0-based presentation index in the session
  std::optional<std::size_t> condition_index;  // testing only
  Condition condition;
  std::string list_id;
  std::string stimulus_id;
  std::string sentence_id;
  std::string target;
  std::string response;
  std::string presented_at;  // ISO 8601 UTC
  std::string responded_at;
  TrialScore score;
};

/// Append-only JSON-lines log of session plans and trial records in a single
/// file. Each line is one event; replay reads them back in order. With an
/// empty path nothing is written.
class SessionStore {
 public:
  struct Contents {
    std::vector<SessionPlan> plans;
    std::vector<TrialRecord> trials;
  };

  SessionStore() = default;
  explicit SessionStore(std::string path);

  const std::string& path() const { return path_; }
  void append(const SessionPlan& plan);
  void append(const TrialRecord& record);
  /// Reads every event; a torn final line (crash mid-write) is ignored,
  /// any other malformed line throws IoError.
  Contents replay() const;

 private:
  void append_line(const std::string& line);

  std::string path_;
  std::mutex mutex_;
};

}  // namespace cisim
