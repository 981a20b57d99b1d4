#include "cisim/session/manager.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <random>
#include <set>

#include "cisim/scoring/score.hpp"

namespace cisim {

namespace {

std::string now_iso8601() {
  const auto now = std::chrono::system_clock::now();
  const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now.time_since_epoch()).count() % 1000;
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[64];
  std::snprintf(buf, sizeof buf, "%04d-%02d-%02dT%02d:%02d:%02d.%03dZ", tm.tm_year + 1900, tm.tm_mon + 1,
                tm.tm_mday, tm.tm_hour, tm.tm_min, tm.tm_sec, static_cast<int>(ms));
  return buf;
}

std::uint64_t random_seed() {
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

SessionError not_found(const std::string& id) {
  return SessionError(SessionError::Kind::NotFound, "unknown session '" + id + "'");
}

SessionError conflict(const std::string& what) { return SessionError(SessionError::Kind::Conflict, what); }

SessionError invalid(const std::string& what) { return SessionError(SessionError::Kind::Invalid, what); }

}  // namespace

std::string new_session_token() {
  std::random_device rd;
  std::string out;
  char buf[9];
  for (int i = 0; i < 4; ++i) {
    std::snprintf(buf, sizeof buf, "%08x", static_cast<unsigned>(rd()));
    out += buf;
  }
  return out;
}

struct SessionManager::State {
  struct Current {
    Phase phase;
    std::string stimulus;
    std::optional<std::size_t> condition_index;
  };
  struct Pending {
    std::string stimulus;
    std::string presented_at;
    int plays = 0;
  };

  std::mutex mutex;
  SessionPlan plan;
  std::vector<TrialRecord> records;
  std::vector<double> training_history;
  bool training_done = false;
  std::size_t condition = 0;
  std::size_t within = 0;
  std::optional<Pending> pending;
  std::set<std::string> answered;

  explicit State(SessionPlan p) : plan(std::move(p)) { training_done = plan.training_stimuli.empty(); }

  std::optional<Current> current() {
    if (!training_done) return Current{Phase::Training, plan.training_stimuli[training_history.size()], std::nullopt};
    while (condition < plan.testing_stimuli.size() && within >= plan.testing_stimuli[condition].size()) {
      ++condition;
      within = 0;
    }
    if (condition >= plan.testing_stimuli.size()) return std::nullopt;
    return Current{Phase::Testing, plan.testing_stimuli[condition][within], condition};
  }

  void apply(const TrialRecord& r) {
    records.push_back(r);
    answered.insert(r.stimulus_id);
    pending.reset();
    if (r.phase == Phase::Training) {
      training_history.push_back(r.score.percent_correct);
      training_done = training_should_stop(training_history, plan.training) ||
                      training_history.size() >= plan.training_stimuli.size();
    } else {
      ++within;
    }
  }

  TrialView view(const Current& c) const {
    TrialView v;
    v.phase = c.phase;
    v.trial = records.size();
    v.condition_index = c.condition_index;
    v.stimulus_id = c.stimulus;
    v.plays_used = pending && pending->stimulus == c.stimulus ? pending->plays : 0;
    v.max_plays = plan.max_plays;
    return v;
  }
};

SessionManager::SessionManager(StimulusCatalog catalog, PhonemeLexicon lexicon, std::shared_ptr<SessionStore> store)
    : catalog_(std::move(catalog)), lexicon_(std::move(lexicon)), store_(std::move(store)) {
  catalog_.check_targets(lexicon_);
  restore();
}

SessionManager::~SessionManager() = default;

void SessionManager::restore() {
  if (!store_) return;
  auto contents = store_->replay();
  for (auto& plan : contents.plans) {
    for (const auto& id : plan.training_stimuli) catalog_.at(id);
    for (const auto& list : plan.testing_stimuli) {
      for (const auto& id : list) catalog_.at(id);
    }
    const auto id = plan.session_id;
    sessions_[id] = std::make_unique<State>(std::move(plan));
  }
  for (const auto& r : contents.trials) {
    const auto it = sessions_.find(r.session_id);
    if (it == sessions_.end()) throw IoError("session store: trial for unknown session " + r.session_id);
    auto& s = *it->second;
    const auto cur = s.current();
    if (!cur || cur->stimulus != r.stimulus_id) {
      throw IoError("session store: trial " + r.stimulus_id + " does not follow the plan of " + r.session_id);
    }
    s.apply(r);
  }
}

SessionManager::State& SessionManager::state(const std::string& id) const {
  std::shared_lock lock(sessions_mutex_);
  const auto it = sessions_.find(id);
  if (it == sessions_.end()) throw not_found(id);
  return *it->second;
}

SessionPlan SessionManager::create_session(const SessionRequest& request) {
  if (request.subject.empty()) throw invalid("subject alias is required");
  if (request.max_plays < 1) throw invalid("max_plays must be at least 1");
  try {
    request.training.validate();
  } catch (const ConfigError& e) {
    throw invalid(e.what());
  }
  const auto available = catalog_.testing_conditions();
  const auto conditions = request.conditions.value_or(available);
  for (const auto& c : conditions) {
    if (std::find(available.begin(), available.end(), c) == available.end()) {
      throw invalid("condition " + to_string(c) + " has no testing stimuli");
    }
  }
  const auto lists = catalog_.lists_covering(conditions);

  SessionPlan plan;
  try {
    plan = build_plan(conditions, lists, request.seed.value_or(random_seed()));
  } catch (const ConfigError& e) {
    throw invalid(e.what());
  }
  plan.subject = request.subject;
  plan.location = request.location;
  plan.training = request.training;
  plan.max_plays = request.max_plays;
  plan.headphones_attested = request.headphones_attested;
  plan.scoring_mode = request.scoring_mode;
  plan.training_stimuli = catalog_.training_stimuli();
  for (std::size_t c = 0; c < plan.conditions.size(); ++c) {
    auto ids = catalog_.testing_stimuli(plan.condition_lists[c], plan.conditions[c]);
    if (request.sentences_per_condition && ids.size() > *request.sentences_per_condition) {
      ids.resize(*request.sentences_per_condition);
    }
    plan.testing_stimuli.push_back(std::move(ids));
  }

  std::unique_lock lock(sessions_mutex_);
  do {
    plan.session_id = new_session_token();
  } while (sessions_.count(plan.session_id));
  if (store_) store_->append(plan);
  sessions_[plan.session_id] = std::make_unique<State>(plan);
  return plan;
}

NextTrial SessionManager::next_trial(const std::string& session_id) {
  auto& s = state(session_id);
  std::lock_guard lock(s.mutex);
  const auto cur = s.current();
  if (!cur) return {true, std::nullopt};
  if (!s.pending || s.pending->stimulus != cur->stimulus) s.pending = State::Pending{cur->stimulus, now_iso8601(), 0};
  auto v = s.view(*cur);
  v.condition = catalog_.at(cur->stimulus).condition;
  return {false, v};
}

std::string SessionManager::play(const std::string& session_id, const std::string& stimulus_id) {
  auto& s = state(session_id);
  std::lock_guard lock(s.mutex);
  if (!catalog_.find(stimulus_id)) {
    throw SessionError(SessionError::Kind::NotFound, "unknown stimulus '" + stimulus_id + "'");
  }
  if (!s.pending || s.pending->stimulus != stimulus_id) {
    throw conflict("stimulus " + stimulus_id + " is not the current trial");
  }
  if (s.pending->plays >= s.plan.max_plays) {
    throw conflict("stimulus " + stimulus_id + " has already been played " + std::to_string(s.pending->plays) +
                   " time(s)");
  }
  ++s.pending->plays;
  return catalog_.at(stimulus_id).path;
}

Feedback SessionManager::submit_response(const std::string& session_id, const std::string& stimulus_id,
                                         const std::string& response) {
  auto& s = state(session_id);
  std::lock_guard lock(s.mutex);
  if (s.answered.count(stimulus_id)) throw conflict("a response for " + stimulus_id + " was already recorded");
  const auto cur = s.current();
  if (!cur) throw conflict("session is complete");
  if (cur->stimulus != stimulus_id || !s.pending || s.pending->stimulus != stimulus_id) {
    throw conflict("stimulus " + stimulus_id + " is not the trial most recently served");
  }
  const Stimulus& stim = catalog_.at(stimulus_id);

  TrialRecord r;
  r.session_id = session_id;
  r.phase = cur->phase;
  r.trial = s.records.size();
  r.condition_index = cur->condition_index;
  r.condition = stim.condition;
  r.list_id = stim.list_id;
  r.stimulus_id = stimulus_id;
  r.sentence_id = stim.sentence_id;
  r.target = stim.text;
  r.response = response;
  r.presented_at = s.pending->presented_at;
  r.responded_at = now_iso8601();
  ScoringOptions options;
  options.mode = s.plan.scoring_mode;
  r.score = score_trial(stim.text, response, lexicon_, options);

  if (store_) store_->append(r);
  s.apply(r);

  Feedback f;
  f.stimulus_id = stimulus_id;
  f.phase = r.phase;
  f.target = r.target;
  f.response = r.response;
  f.score = r.score;
  f.training_finished = r.phase == Phase::Training && s.training_done;
  f.session_complete = !s.current().has_value();
  return f;
}

SessionStatus SessionManager::status(const std::string& session_id) {
  auto& s = state(session_id);
  std::lock_guard lock(s.mutex);
  SessionStatus st;
  st.session_id = session_id;
  st.subject = s.plan.subject;
  st.headphones_attested = s.plan.headphones_attested;
  st.location = s.plan.location;
  st.conditions = s.plan.conditions;
  st.trials_completed = s.records.size();
  st.training_completed = s.training_history.size();
  st.testing_completed = st.trials_completed - st.training_completed;
  st.testing_total = s.plan.testing_total();
  const auto cur = s.current();
  st.complete = !cur.has_value();
  st.phase = s.training_done ? Phase::Testing : Phase::Training;
  if (cur && s.pending && s.pending->stimulus == cur->stimulus) {
    st.pending = s.view(*cur);
    st.pending->condition = catalog_.at(cur->stimulus).condition;
  }
  return st;
}

const std::vector<std::string>& SessionManager::export_columns() {
  static const std::vector<std::string> columns = {
      "session_id", "subject",       "location",     "phase",          "trial",          "condition_index",
      "room",       "channels",      "list_id",      "stimulus_id",    "sentence_id",    "target",
      "response",   "presented_at",  "responded_at", "total_phonemes", "correct_phonemes", "percent_correct",
      "rau",        "gave_up"};
  return columns;
}

TsvTable SessionManager::export_results(const std::string& session_id) {
  auto& s = state(session_id);
  std::lock_guard lock(s.mutex);
  TsvTable table(export_columns());
  auto real = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.10g", v);
    return std::string(buf);
  };
  for (const auto& r : s.records) {
    table.add_row({r.session_id, s.plan.subject, std::string(to_string(s.plan.location)),
                   std::string(to_string(r.phase)), std::to_string(r.trial),
                   r.condition_index ? std::to_string(*r.condition_index) : "", std::string(to_string(r.condition.room)),
                   std::to_string(r.condition.channels), r.list_id, r.stimulus_id, r.sentence_id, r.target,
                   r.response, r.presented_at, r.responded_at, std::to_string(r.score.total_phonemes),
                   std::to_string(r.score.correct_phonemes), real(r.score.percent_correct), real(r.score.rau),
                   r.score.gave_up ? "1" : "0"});
  }
  return table;
}

std::vector<std::string> SessionManager::session_ids() const {
  std::shared_lock lock(sessions_mutex_);
  std::vector<std::string> out;
  for (const auto& [id, s] : sessions_) out.push_back(id);
  return out;
}

}  // namespace cisim
