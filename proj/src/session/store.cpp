#include "cisim/session/store.hpp"

#include <fstream>
#include <iterator>

#include <json.hpp>

namespace cisim {

using nlohmann::json;

namespace {

json condition_json(const Condition& c) { return {{"room", to_string(c.room)}, {"channels", c.channels}}; }

Condition condition_from(const json& j) {
  return {parse_room(j.at("room").get<std::string>()), j.at("channels").get<int>()};
}

json plan_json(const SessionPlan& p) {
  json conditions = json::array();
  for (const auto& c : p.conditions) conditions.push_back(condition_json(c));
  return {{"event", "session"},
          {"session_id", p.session_id},
          {"subject", p.subject},
          {"location", to_string(p.location)},
          {"seed", p.seed},
          {"conditions", conditions},
          {"condition_lists", p.condition_lists},
          {"training",
           {{"block_size", p.training.block_size},
            {"plateau_blocks", p.training.plateau_blocks},
            {"plateau_delta", p.training.plateau_delta},
            {"min_sentences", p.training.min_sentences},
            {"strategy", to_string(p.training.strategy)}}},
          {"max_plays", p.max_plays},
          {"headphones_attested", p.headphones_attested},
          {"scoring_mode", p.scoring_mode == ScoringMode::PerWord ? "per-word" : "global"},
          {"training_stimuli", p.training_stimuli},
          {"testing_stimuli", p.testing_stimuli}};
}

SessionPlan plan_from(const json& j) {
  SessionPlan p;
  p.session_id = j.at("session_id").get<std::string>();
  p.subject = j.at("subject").get<std::string>();
  p.location = parse_location(j.at("location").get<std::string>());
  p.seed = j.at("seed").get<std::uint64_t>();
  for (const auto& c : j.at("conditions")) p.conditions.push_back(condition_from(c));
  p.condition_lists = j.at("condition_lists").get<std::vector<std::string>>();
  const auto& t = j.at("training");
  p.training.block_size = t.at("block_size").get<int>();
  p.training.plateau_blocks = t.at("plateau_blocks").get<int>();
  p.training.plateau_delta = t.at("plateau_delta").get<double>();
  p.training.min_sentences = t.at("min_sentences").get<int>();
  p.training.strategy = parse_plateau_strategy(t.at("strategy").get<std::string>());
  p.max_plays = j.at("max_plays").get<int>();
  p.headphones_attested = j.value("headphones_attested", false);
  p.scoring_mode = j.at("scoring_mode").get<std::string>() == "per-word" ? ScoringMode::PerWord : ScoringMode::Global;
  p.training_stimuli = j.at("training_stimuli").get<std::vector<std::string>>();
  p.testing_stimuli = j.at("testing_stimuli").get<std::vector<std::vector<std::string>>>();
  return p;
}

json trial_json(const TrialRecord& r) {
  return {{"event", "trial"},
          {"session_id", r.session_id},
          {"phase", to_string(r.phase)},
          {"trial", r.trial},
          {"condition_index", r.condition_index ? json(*r.condition_index) : json(nullptr)},
          {"condition", condition_json(r.condition)},
          {"list_id", r.list_id},
          {"stimulus_id", r.stimulus_id},
          {"sentence_id", r.sentence_id},
          {"target", r.target},
          {"response", r.response},
          {"presented_at", r.presented_at},
          {"responded_at", r.responded_at},
          {"total_phonemes", r.score.total_phonemes},
          {"correct_phonemes", r.score.correct_phonemes},
          {"percent_correct", r.score.percent_correct},
          {"rau", r.score.rau},
          {"gave_up", r.score.gave_up},
          {"response_oov", r.score.response_oov}};
}

TrialRecord trial_from(const json& j) {
  TrialRecord r;
  r.session_id = j.at("session_id").get<std::string>();
  r.phase = parse_phase(j.at("phase").get<std::string>());
  r.trial = j.at("trial").get<std::size_t>();
  if (!j.at("condition_index").is_null()) r.condition_index = j.at("condition_index").get<std::size_t>();
  r.condition = condition_from(j.at("condition"));
  r.list_id = j.at("list_id").get<std::string>();
  r.stimulus_id = j.at("stimulus_id").get<std::string>();
  r.sentence_id = j.at("sentence_id").get<std::string>();
  r.target = j.at("target").get<std::string>();
  r.response = j.at("response").get<std::string>();
  r.presented_at = j.at("presented_at").get<std::string>();
  r.responded_at = j.at("responded_at").get<std::string>();
  r.score.total_phonemes = j.at("total_phonemes").get<std::size_t>();
  r.score.correct_phonemes = j.at("correct_phonemes").get<std::size_t>();
  r.score.percent_correct = j.at("percent_correct").get<double>();
  r.score.rau = j.at("rau").get<double>();
  r.score.gave_up = j.at("gave_up").get<bool>();
  r.score.response_oov = j.at("response_oov").get<std::vector<std::string>>();
  return r;
}

}  // namespace

SessionStore::SessionStore(std::string path) : path_(std::move(path)) {
  if (path_.empty()) return;
  std::ofstream touch(path_, std::ios::app);
  if (!touch) throw IoError("cannot open session store " + path_);
}

void SessionStore::append(const SessionPlan& plan) { append_line(plan_json(plan).dump()); }

void SessionStore::append(const TrialRecord& record) { append_line(trial_json(record).dump()); }

void SessionStore::append_line(const std::string& line) {
  if (path_.empty()) return;
  std::lock_guard lock(mutex_);
  std::ofstream out(path_, std::ios::app | std::ios::binary);
  out << line << '\n';
  out.flush();
  if (!out) throw IoError("write to session store " + path_ + " failed");
}

SessionStore::Contents SessionStore::replay() const {
  Contents contents;
  if (path_.empty()) return contents;
  std::ifstream in(path_, std::ios::binary);
  if (!in) return contents;
  const std::string data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  std::size_t pos = 0, number = 0;
  while (pos < data.size()) {
    const std::size_t nl = data.find('\n', pos);
    const bool torn = nl == std::string::npos;
    const std::string line = data.substr(pos, torn ? std::string::npos : nl - pos);
    pos = torn ? data.size() : nl + 1;
    ++number;
    if (line.empty()) continue;
    try {
      const json j = json::parse(line);
      const auto event = j.at("event").get<std::string>();
      if (event == "session") {
        contents.plans.push_back(plan_from(j));
      } else if (event == "trial") {
        contents.trials.push_back(trial_from(j));
      } else {
        throw IoError("unknown event '" + event + "'");
      }
    } catch (const std::exception& e) {
      if (torn) break;  // crash mid-write
      throw IoError(path_ + ":" + std::to_string(number) + ": " + e.what());
    }
  }
  return contents;
}

}  // namespace cisim
