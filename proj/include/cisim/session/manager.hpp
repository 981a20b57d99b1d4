#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "cisim/common/tsv.hpp"
#include "cisim/scoring/lexicon.hpp"
#include "cisim/session/catalog.hpp"
#include "cisim/session/store.hpp"

namespace cisim {

class SessionError : public Error {
 public:
  enum class Kind { NotFound, Conflict, Invalid };
  SessionError(Kind kind, const std::string& what) : Error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct SessionRequest {
  std::string subject;
  Location location = Location::Remote;
  std::optional<std::uint64_t> seed;
  std::optional<std::vector<Condition>> conditions;  // default: every testing condition in the catalog
  std::optional<std::size_t> sentences_per_condition;
  TrainingRule training;
  int max_plays = 1;
  bool headphones_attested = false;
  ScoringMode scoring_mode = ScoringMode::Global;
};

struct TrialView {
  Phase phase = Phase::Training;
  std::size_t trial = 0;
  std::optional<std::size_t> condition_index;
  Condition condition;
  std::string stimulus_id;
  int plays_used = 0;
  int max_plays = 1;
};

struct NextTrial {
  bool complete = false;
  std::optional<TrialView> trial;
};

struct Feedback {
  std::string stimulus_id;
  Phase phase = Phase::Training;
  std::string target;
  std::string response;
  TrialScore score;
  bool training_finished = false;  // this response ended the training phase
  bool session_complete = false;
};

struct SessionStatus {
  std::string session_id;
  std::string subject;
  Location location = Location::Remote;
  bool headphones_attested = false;
  bool complete = false;
  Phase phase = Phase::Training;
  std::size_t trials_completed = 0;
  std::size_t training_completed = 0;
  std::size_t testing_completed = 0;
  std::size_t testing_total = 0;
  std::vector<Condition> conditions;
  std::optional<TrialView> pending;
};

/// Runs listening sessions against a read-only stimulus catalog. Sessions
/// are independent; operations on one session are serialized.
class SessionManager {
 public:
  SessionManager(StimulusCatalog catalog, PhonemeLexicon lexicon, std::shared_ptr<SessionStore> store = nullptr);
  ~SessionManager();
  SessionManager(const SessionManager&) = delete;
  SessionManager& operator=(const SessionManager&) = delete;

  const StimulusCatalog& catalog() const { return catalog_; }

  SessionPlan create_session(const SessionRequest& request);
  /// The current trial; serving is idempotent until a response arrives.
  NextTrial next_trial(const std::string& session_id);
  /// Path of the audio for the pending trial, counting one play. Throws
  /// Conflict when the stimulus is not the pending one or plays are used up.
  std::string play(const std::string& session_id, const std::string& stimulus_id);
  Feedback submit_response(const std::string& session_id, const std::string& stimulus_id,
                           const std::string& response);
  SessionStatus status(const std::string& session_id);
  /// Every recorded trial in presentation order.
  TsvTable export_results(const std::string& session_id);
  std::vector<std::string> session_ids() const;

  static const std::vector<std::string>& export_columns();

 private:
  struct State;
  State& state(const std::string& id) const;
  void restore();

  StimulusCatalog catalog_;
  PhonemeLexicon lexicon_;
  std::shared_ptr<SessionStore> store_;
  mutable std::shared_mutex sessions_mutex_;
  std::map<std::string, std::unique_ptr<State>> sessions_;
};

/// 128-bit random hex token.
std::string new_session_token();

}  // namespace cisim
