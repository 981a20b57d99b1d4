#include "cisim/session/http_service.hpp"

#include <fstream>
#include <iterator>
#include <sstream>

#include <httplib.h>
#include <json.hpp>

namespace cisim {

using nlohmann::json;

namespace {

json condition_json(const Condition& c) { return {{"room", to_string(c.room)}, {"channels", c.channels}}; }

json trial_json(const std::string& session_id, const TrialView& v) {
  return {{"phase", to_string(v.phase)},
          {"trial", v.trial},
          {"condition_index", v.condition_index ? json(*v.condition_index) : json(nullptr)},
          {"condition", condition_json(v.condition)},
          {"stimulus_id", v.stimulus_id},
          {"audio_url", "/sessions/" + session_id + "/stimuli/" + v.stimulus_id + "/audio"},
          {"plays_used", v.plays_used},
          {"max_plays", v.max_plays}};
}

SessionRequest parse_request(const json& body) {
  if (!body.is_object()) throw SessionError(SessionError::Kind::Invalid, "request body must be a JSON object");
  SessionRequest r;
  r.subject = body.at("subject").get<std::string>();
  if (body.contains("location")) r.location = parse_location(body["location"].get<std::string>());
  if (body.contains("seed")) r.seed = body["seed"].get<std::uint64_t>();
  if (body.contains("conditions")) {
    std::vector<Condition> cs;
    for (const auto& c : body["conditions"]) {
      cs.push_back({parse_room(c.at("room").get<std::string>()), c.at("channels").get<int>()});
    }
    r.conditions = std::move(cs);
  }
  if (body.contains("sentences_per_condition")) {
    r.sentences_per_condition = body["sentences_per_condition"].get<std::size_t>();
  }
  if (body.contains("training")) {
    const auto& t = body["training"];
    r.training.block_size = t.value("block_size", r.training.block_size);
    r.training.plateau_blocks = t.value("plateau_blocks", r.training.plateau_blocks);
    r.training.plateau_delta = t.value("plateau_delta", r.training.plateau_delta);
    r.training.min_sentences = t.value("min_sentences", r.training.min_sentences);
    if (t.contains("strategy")) r.training.strategy = parse_plateau_strategy(t["strategy"].get<std::string>());
  }
  r.max_plays = body.value("max_plays", r.max_plays);
  r.headphones_attested = body.value("headphones_attested", false);
  if (body.contains("scoring_mode")) {
    const auto mode = body["scoring_mode"].get<std::string>();
    if (mode == "per-word") {
      r.scoring_mode = ScoringMode::PerWord;
    } else if (mode != "global") {
      throw SessionError(SessionError::Kind::Invalid, "scoring_mode must be global or per-word");
    }
  }
  return r;
}

void send_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& message) {
  send_json(res, status, {{"error", message}});
}

template <typename F>
httplib::Server::Handler guarded(F f) {
  return [f](const httplib::Request& req, httplib::Response& res) {
    try {
      f(req, res);
    } catch (const SessionError& e) {
      switch (e.kind()) {
        case SessionError::Kind::NotFound: send_error(res, 404, e.what()); break;
        case SessionError::Kind::Conflict: send_error(res, 409, e.what()); break;
        case SessionError::Kind::Invalid: send_error(res, 400, e.what()); break;
      }
    } catch (const json::exception& e) {
      send_error(res, 400, std::string("malformed request: ") + e.what());
    } catch (const Error& e) {
      send_error(res, 400, e.what());
    } catch (const std::exception& e) {
      send_error(res, 500, e.what());
    }
  };
}

}  // namespace

struct HttpService::Impl {
  SessionManager& manager;
  httplib::Server server;

  explicit Impl(SessionManager& m) : manager(m) {}
};

HttpService::HttpService(SessionManager& manager, std::optional<std::string> ui_dir)
    : impl_(std::make_unique<Impl>(manager)) {
  auto& server = impl_->server;
  auto& mgr = impl_->manager;

  server.Get("/health", guarded([](const httplib::Request&, httplib::Response& res) {
               send_json(res, 200, {{"status", "ok"}});
             }));

  server.Post("/sessions", guarded([&mgr](const httplib::Request& req, httplib::Response& res) {
                const auto plan = mgr.create_session(parse_request(json::parse(req.body)));
                json conditions = json::array();
                for (const auto& c : plan.conditions) conditions.push_back(condition_json(c));
                send_json(res, 201,
                          {{"session_id", plan.session_id},
                           {"subject", plan.subject},
                           {"location", to_string(plan.location)},
                           {"seed", plan.seed},
                           {"conditions", conditions},
                           {"condition_lists", plan.condition_lists},
                           {"training_available", plan.training_stimuli.size()},
                           {"testing_total", plan.testing_total()},
                           {"max_plays", plan.max_plays},
                           {"headphones_attested", plan.headphones_attested}});
              }));

  server.Get(R"(/sessions/([0-9a-zA-Z]+)/next)", guarded([&mgr](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               const auto next = mgr.next_trial(id);
               if (next.complete) {
                 send_json(res, 200, {{"complete", true}, {"trial", nullptr}});
               } else {
                 send_json(res, 200, {{"complete", false}, {"trial", trial_json(id, *next.trial)}});
               }
             }));

  server.Get(R"(/sessions/([0-9a-zA-Z]+)/stimuli/([^/]+)/audio)",
             guarded([&mgr](const httplib::Request& req, httplib::Response& res) {
               const auto path = mgr.play(req.matches[1], req.matches[2]);
               std::ifstream in(path, std::ios::binary);
               if (!in) throw IoError("cannot read " + path);
               std::string bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
               res.set_header("Cache-Control", "no-store");
               res.set_content(std::move(bytes), "audio/wav");
             }));

  server.Post(R"(/sessions/([0-9a-zA-Z]+)/responses)",
              guarded([&mgr](const httplib::Request& req, httplib::Response& res) {
                const auto body = json::parse(req.body);
                const auto f = mgr.submit_response(req.matches[1], body.at("stimulus_id").get<std::string>(),
                                                   body.at("response").get<std::string>());
                send_json(res, 200,
                          {{"stimulus_id", f.stimulus_id},
                           {"phase", to_string(f.phase)},
                           {"target", f.target},
                           {"response", f.response},
                           {"percent_correct", f.score.percent_correct},
                           {"correct_phonemes", f.score.correct_phonemes},
                           {"total_phonemes", f.score.total_phonemes},
                           {"gave_up", f.score.gave_up},
                           {"training_finished", f.training_finished},
                           {"session_complete", f.session_complete}});
              }));

  server.Get(R"(/sessions/([0-9a-zA-Z]+)/status)", guarded([&mgr](const httplib::Request& req, httplib::Response& res) {
               const std::string id = req.matches[1];
               const auto st = mgr.status(id);
               json conditions = json::array();
               for (const auto& c : st.conditions) conditions.push_back(condition_json(c));
               send_json(res, 200,
                         {{"session_id", st.session_id},
                          {"subject", st.subject},
                          {"location", to_string(st.location)},
                          {"headphones_attested", st.headphones_attested},
                          {"complete", st.complete},
                          {"phase", to_string(st.phase)},
                          {"trials_completed", st.trials_completed},
                          {"training_completed", st.training_completed},
                          {"testing_completed", st.testing_completed},
                          {"testing_total", st.testing_total},
                          {"conditions", conditions},
                          {"pending", st.pending ? trial_json(id, *st.pending) : json(nullptr)}});
             }));

  server.Get(R"(/sessions/([0-9a-zA-Z]+)/export)", guarded([&mgr](const httplib::Request& req, httplib::Response& res) {
               std::ostringstream out;
               mgr.export_results(req.matches[1]).write(out);
               res.set_content(out.str(), "text/tab-separated-values; charset=utf-8");
             }));

  if (ui_dir && !server.set_mount_point("/", *ui_dir)) throw IoError("UI directory not found: " + *ui_dir);
}

HttpService::~HttpService() { stop(); }

int HttpService::bind(const std::string& host, int port) {
  auto& server = impl_->server;
  if (port == 0) {
    const int bound = server.bind_to_any_port(host);
    if (bound < 0) throw IoError("cannot bind " + host);
    return bound;
  }
  if (!server.bind_to_port(host, port)) throw IoError("cannot bind " + host + ":" + std::to_string(port));
  return port;
}

void HttpService::serve() { impl_->server.listen_after_bind(); }

void HttpService::stop() {
  if (impl_) impl_->server.stop();
}

}  // namespace cisim
