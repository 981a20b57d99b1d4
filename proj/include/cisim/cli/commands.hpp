#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "cisim/acoustics/metrics.hpp"
#include "cisim/acoustics/rir.hpp"
#include "cisim/signal/wav_io.hpp"
#include "cisim/stats/anova.hpp"

namespace cisim {

enum class OutputFormat { Text, Delimited };

struct AnalyzeRirOptions {
  std::vector<std::string> paths;
  std::optional<RirChannel> channel;
  DirectWindowOptions window;
  OutputFormat format = OutputFormat::Text;
  std::string out;  // empty: standard output
};

struct GenStimuliOptions {
  std::string manifest;
  std::string corpus_root;
  std::string rir_dir;
  std::string config;  // empty: built-in defaults
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  unsigned threads = 0;  // 0: hardware concurrency
  WavEncoding encoding = WavEncoding::Float32;
  double rms = 0.08;  // for rows without their own
};

struct ScoreOptions {
  std::string responses;
  std::string targets;
  std::string lexicon;
  bool per_word = false;
  OutputFormat format = OutputFormat::Delimited;
  std::string out;
  std::string summary;  // per-condition summary TSV, optional
};

struct StatsOptions {
  std::string table;
  AnovaOptions anova;
  OutputFormat format = OutputFormat::Text;
  std::string out;
  std::string contrasts;  // optional TSV outputs
  std::string summary;
};

struct ServeOptions {
  std::string stimuli_dir;
  std::string lexicon;
  std::string host = "127.0.0.1";
  int port = 8080;
  std::string data;  // session log; empty keeps sessions in memory only
  std::string ui_dir;
};

/// Exit codes: 0 success, 1 some item or validation failed, 2 usage error.
int cmd_analyze_rir(const AnalyzeRirOptions& options, std::ostream& out, std::ostream& err);
int cmd_gen_stimuli(const GenStimuliOptions& options, std::ostream& out, std::ostream& err);
int cmd_score(const ScoreOptions& options, std::ostream& out, std::ostream& err);
int cmd_stats(const StatsOptions& options, std::ostream& out, std::ostream& err);
int cmd_serve(const ServeOptions& options, std::ostream& out, std::ostream& err);
int cmd_default_config(std::ostream& out);

/// Parses the command line and dispatches to a subcommand.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Lowercase hex SHA-256 of a file's bytes.
std::string sha256_file(const std::string& path);

}  // namespace cisim
