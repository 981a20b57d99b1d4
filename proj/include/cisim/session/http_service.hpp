#pragma once

#include <memory>
#include <optional>
#include <string>

#include "cisim/session/manager.hpp"

namespace cisim {

/// JSON-over-HTTP front end of a SessionManager.
///
///   GET  /health
///   POST /sessions                                  create, returns the session token
///   GET  /sessions/{id}/next                        current trial or completion
///   GET  /sessions/{id}/stimuli/{stimulus}/audio    WAV bytes (counts a play)
///   POST /sessions/{id}/responses                   {"stimulus_id", "response"} -> feedback
///   GET  /sessions/{id}/status
///   GET  /sessions/{id}/export                      tab-separated trial table
///
/// Errors are {"error": message} with 400, 404 or 409.
class HttpService {
 public:
  explicit HttpService(SessionManager& manager, std::optional<std::string> ui_dir = std::nullopt);
  ~HttpService();
  HttpService(const HttpService&) = delete;
  HttpService& operator=(const HttpService&) = delete;

  /// Binds; port 0 picks a free port. Returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void serve();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace cisim
