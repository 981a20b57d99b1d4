#include "cisim/cli/commands.hpp"

#include <atomic>
#include <csignal>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include <CLI11.hpp>
#include <fmt/format.h>
#include <openssl/evp.h>

#include "cisim/cli/manifest.hpp"
#include "cisim/scoring/score.hpp"
#include "cisim/session/http_service.hpp"
#include "cisim/signal/dsp.hpp"
#include "cisim/stats/descriptives.hpp"
#include "cisim/stats/posthoc.hpp"
#include "cisim/stats/report.hpp"
#include "cisim/vocoder/ace.hpp"
#include "cisim/vocoder/config.hpp"

namespace fs = std::filesystem;

namespace cisim {

namespace {

/// Writes to `path`, or to `fallback` when the path is empty.
template <typename F>
void emit(const std::string& path, std::ostream& fallback, F write) {
  if (path.empty()) {
    write(fallback);
    return;
  }
  std::ofstream file(path, std::ios::binary | std::ios::trunc);
  if (!file) throw IoError("cannot write " + path);
  write(file);
  if (!file) throw IoError("write failed: " + path);
}

std::string real(double v, int digits = 10) { return fmt::format("{:.{}g}", v, digits); }

}  // namespace

std::string sha256_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot read " + path);
  std::unique_ptr<EVP_MD_CTX, decltype(&EVP_MD_CTX_free)> ctx(EVP_MD_CTX_new(), EVP_MD_CTX_free);
  if (!ctx || EVP_DigestInit_ex(ctx.get(), EVP_sha256(), nullptr) != 1) throw Error("SHA-256 unavailable");
  std::vector<char> buf(1 << 16);
  while (in) {
    in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
    if (in.gcount() > 0) EVP_DigestUpdate(ctx.get(), buf.data(), static_cast<std::size_t>(in.gcount()));
  }
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx.get(), digest, &len);
  std::string hex;
  for (unsigned int i = 0; i < len; ++i) hex += fmt::format("{:02x}", digest[i]);
  return hex;
}

// ---------------------------------------------------------------- analyze-rir

int cmd_analyze_rir(const AnalyzeRirOptions& options, std::ostream& out, std::ostream& err) {
  TsvTable table({"path", "room", "channel", "distance_m", "rt60_s", "drr_db", "error"});
  bool failed = false;
  for (const auto& path : options.paths) {
    std::string room = fs::path(path).stem().string(), channel, distance, rt60, drr;
    std::vector<std::string> errors;
    try {
      const auto rir = load_rir(path, options.channel);
      if (!rir.meta().room.empty()) room = rir.meta().room;
      channel = std::string(to_string(rir.channel()));
      if (rir.meta().distance_m) distance = real(*rir.meta().distance_m, 4);
      try {
        rt60 = real(estimate_rt60(rir));
      } catch (const Error& e) {
        errors.push_back(std::string("RT60: ") + e.what());
      }
      try {
        drr = real(compute_drr(rir, options.window));
      } catch (const Error& e) {
        errors.push_back(std::string("DRR: ") + e.what());
      }
    } catch (const Error& e) {
      errors.push_back(e.what());
    }
    std::string message;
    for (const auto& e : errors) message += (message.empty() ? "" : "; ") + e;
    if (!errors.empty()) {
      failed = true;
      err << path << ": " << message << '\n';
    }
    table.add_row({path, room, channel, distance, rt60, drr, message});
  }

  emit(options.out, out, [&](std::ostream& o) {
    if (options.format == OutputFormat::Delimited) {
      table.write(o);
      return;
    }
    o << fmt::format("{:<16} {:<8} {:>10} {:>9} {:>9}\n", "Room", "Channel", "Distance", "RT60 (s)", "DRR (dB)");
    for (std::size_t i = 0; i < table.size(); ++i) {
      auto cell = [&](const char* col, int decimals) {
        const auto& v = table.get(i, col);
        return v.empty() ? std::string("error") : fmt::format("{:.{}f}", std::stod(v), decimals);
      };
      const auto& d = table.get(i, "distance_m");
      o << fmt::format("{:<16} {:<8} {:>10} {:>9} {:>9}\n", table.get(i, "room"), table.get(i, "channel"),
                       d.empty() ? "-" : d + " m", cell("rt60_s", 2), cell("drr_db", 1));
    }
  });
  return failed ? 1 : 0;
}

// ---------------------------------------------------------------- gen-stimuli

int cmd_gen_stimuli(const GenStimuliOptions& options, std::ostream& out, std::ostream& err) {
  const auto manifest = RunManifest::load(options.manifest);
  VocoderConfig base = options.config.empty() ? VocoderConfig::defaults() : load_vocoder_config(options.config);
  if (options.seed) base.phase_seed = *options.seed;
  base.validate();
  fs::create_directories(options.out_dir);

  const std::size_t n = manifest.rows.size();
  std::vector<std::string> errors(n);
  std::vector<const CorpusSentence*> sentences(n, nullptr);
  std::map<std::pair<Room, RirChannel>, std::optional<RoomImpulseResponse>> rirs;
  std::map<std::pair<Room, RirChannel>, std::string> rir_errors;

  // Lookups and RIR loading are serial; rendering is parallel.
  CorpusIndex corpus(options.corpus_root);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& d = manifest.rows[i];
    try {
      sentences[i] = &corpus.find(d.corpus, d.list_id, d.sentence_id);
    } catch (const Error& e) {
      errors[i] = e.what();
      continue;
    }
    if (d.room == Room::Anechoic) continue;
    const auto key = std::make_pair(d.room, d.rir_channel);
    if (!rirs.count(key)) {
      try {
        const auto path = rir_path_for(options.rir_dir, d.room, d.rir_channel);
        rirs[key] = resample(load_rir(path, d.rir_channel), base.sample_rate_hz);
      } catch (const Error& e) {
        rirs[key] = std::nullopt;
        rir_errors[key] = e.what();
      }
    }
    if (!rirs[key]) errors[i] = rir_errors[key];
  }

  std::vector<std::string> checksums(n);
  std::vector<std::size_t> clipped(n, 0);
  std::vector<double> levels(n, 0.0);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      if (!errors[i].empty()) continue;
      const auto& d = manifest.rows[i];
      try {
        VocoderConfig config = base;
        config.num_selected = d.num_selected;
        Waveform speech = resample(load_wav(sentences[i]->path), config.sample_rate_hz);
        if (d.room != Room::Anechoic) speech = convolve(speech, *rirs.at({d.room, d.rir_channel}));
        const double target = d.rms.value_or(options.rms);
        const Waveform stimulus = vocode(speech, config, target);
        const auto path = fs::path(options.out_dir) / d.output;
        if (path.has_parent_path()) fs::create_directories(path.parent_path());
        clipped[i] = save_wav(stimulus, path.string(), options.encoding);
        levels[i] = target;
        checksums[i] = sha256_file(path.string());
      } catch (const std::exception& e) {
        errors[i] = e.what();
      }
    }
  };
  unsigned threads = options.threads ? options.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, std::max<std::size_t>(n, 1)));
  std::vector<std::thread> pool;
  for (unsigned t = 1; t < threads; ++t) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();

  TsvTable echo({"stimulus_id", "phase", "corpus", "list_id", "sentence_id", "room", "rir_channel", "channels",
                 "output", "rms", "sha256", "clipped", "error"});
  TsvTable catalog({"stimulus_id", "phase", "list_id", "room", "channels", "sentence_id", "text", "path"});
  bool failed = false;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& d = manifest.rows[i];
    const bool anechoic = d.room == Room::Anechoic;
    echo.add_row({d.stimulus_id, std::string(to_string(d.phase)), d.corpus, d.list_id, d.sentence_id,
                  std::string(to_string(d.room)), anechoic ? "" : std::string(to_string(d.rir_channel)),
                  std::to_string(d.num_selected), d.output, errors[i].empty() ? real(levels[i]) : "", checksums[i],
                  errors[i].empty() ? std::to_string(clipped[i]) : "", errors[i]});
    if (!errors[i].empty()) {
      failed = true;
      err << d.stimulus_id << ": " << errors[i] << '\n';
      continue;
    }
    if (clipped[i]) err << d.stimulus_id << ": " << clipped[i] << " samples clipped\n";
    catalog.add_row({d.stimulus_id, std::string(to_string(d.phase)), d.list_id, std::string(to_string(d.room)),
                     std::to_string(d.num_selected), d.sentence_id, sentences[i]->text, d.output});
  }
  echo.write_file((fs::path(options.out_dir) / "manifest.tsv").string());
  catalog.write_file((fs::path(options.out_dir) / "stimuli.tsv").string());
  out << fmt::format("{} of {} stimuli written to {}\n", catalog.size(), n, options.out_dir);
  return failed ? 1 : 0;
}

// ---------------------------------------------------------------------- score

int cmd_score(const ScoreOptions& options, std::ostream& out, std::ostream& err) {
  const auto targets = TsvTable::read_file(options.targets);
  const auto responses = TsvTable::read_file(options.responses);
  targets.require_column("text");
  responses.require_column("response");
  if (targets.size() != responses.size()) {
    err << "row count mismatch: " << targets.size() << " targets, " << responses.size() << " responses\n";
    return 1;
  }
  const auto lexicon = PhonemeLexicon::load(options.lexicon);
  ScoringOptions scoring;
  scoring.mode = options.per_word ? ScoringMode::PerWord : ScoringMode::Global;

  std::vector<std::string> header = targets.header();
  for (const char* c : {"response", "total_phonemes", "correct_phonemes", "percent_correct", "rau", "gave_up"}) {
    if (std::find(header.begin(), header.end(), c) != header.end()) {
      err << "targets file already has a '" << c << "' column\n";
      return 1;
    }
    header.emplace_back(c);
  }
  TsvTable scored(header);
  for (std::size_t i = 0; i < targets.size(); ++i) {
    TrialScore s;
    try {
      s = score_trial(targets.get(i, "text"), responses.get(i, "response"), lexicon, scoring);
    } catch (const Error& e) {
      err << "row " << i + 1 << ": " << e.what() << '\n';
      return 1;
    }
    auto row = targets.rows()[i];
    row.insert(row.end(), {responses.get(i, "response"), std::to_string(s.total_phonemes),
                           std::to_string(s.correct_phonemes), real(s.percent_correct), real(s.rau),
                           s.gave_up ? "1" : "0"});
    scored.add_row(std::move(row));
  }

  std::vector<ConditionSummary> summary;
  const bool has_design = targets.has_column("subject") && targets.has_column("room") && targets.has_column("channels");
  if (has_design) summary = summarize_conditions(score_table_from_tsv(scored));
  if (!options.summary.empty()) {
    if (!has_design) {
      err << "summary needs subject, room and channels columns in the targets file\n";
      return 1;
    }
    summaries_to_tsv(summary).write_file(options.summary);
  }

  emit(options.out, out, [&](std::ostream& o) {
    if (options.format == OutputFormat::Delimited) {
      scored.write(o);
      return;
    }
    for (std::size_t i = 0; i < scored.size(); ++i) {
      o << fmt::format("{:>4}  {:>6}%  {}/{}  \"{}\" -> \"{}\"\n", i + 1,
                       fmt::format("{:.1f}", std::stod(scored.get(i, "percent_correct"))),
                       scored.get(i, "correct_phonemes"), scored.get(i, "total_phonemes"), scored.get(i, "text"),
                       scored.get(i, "response"));
    }
    if (!summary.empty()) {
      o << "\nPercent correct by condition (mean ± sd over subjects)\n";
      for (const auto& s : summary) {
        o << fmt::format("  {:<9} {:>2} ch  {:<9} n = {:<3} {}\n", to_string(s.room), s.channels,
                         to_string(s.location), s.n, s.formatted());
      }
    }
  });
  return 0;
}

// ---------------------------------------------------------------------- stats

int cmd_stats(const StatsOptions& options, std::ostream& out, std::ostream& err) {
  const auto table = read_score_table(options.table);
  std::set<Location> locations;
  for (const auto& r : table.rows) locations.insert(r.location);

  struct Analysis {
    std::string label;
    AnovaResult result;
    std::vector<TukeyResult> posthoc;
  };
  std::vector<Analysis> analyses;
  try {
    for (Location loc : locations) {
      const auto subset = table.filter([loc](const ScoreRow& r) { return r.location == loc; });
      auto fit = rm_anova_2way(subset, Factor::Room, Factor::Channels, options.anova);
      std::vector<TukeyResult> posthoc{emm_tukey(subset, fit, Factor::Room), emm_tukey(subset, fit, Factor::Channels)};
      analyses.push_back({"rm:" + std::string(to_string(loc)), std::move(fit), std::move(posthoc)});
    }
    if (locations.size() > 1) {
      const auto common = restrict_to_common_cells(table);
      auto fit = mixed_anova(common, Factor::Location, Factor::Room, Factor::Channels, options.anova);
      std::vector<TukeyResult> posthoc{emm_tukey(common, fit, Factor::Location)};
      analyses.push_back({"mixed", std::move(fit), std::move(posthoc)});
    }
  } catch (const Error& e) {
    err << "stats: " << e.what() << '\n';
    return 1;
  }
  const auto summary = summarize_conditions(table);

  if (!options.contrasts.empty()) {
    TsvTable all({"analysis", "factor", "level_a", "level_b", "estimate", "se", "df", "t", "p_unadjusted",
                  "p_adjusted"});
    for (const auto& a : analyses) {
      const auto t = contrasts_to_tsv(a.posthoc);
      for (const auto& row : t.rows()) {
        std::vector<std::string> r{a.label};
        r.insert(r.end(), row.begin(), row.end());
        all.add_row(std::move(r));
      }
    }
    all.write_file(options.contrasts);
  }
  if (!options.summary.empty()) summaries_to_tsv(summary).write_file(options.summary);

  emit(options.out, out, [&](std::ostream& o) {
    if (options.format == OutputFormat::Delimited) {
      std::vector<std::string> header{"analysis"};
      TsvTable first = anova_to_tsv(analyses.front().result);
      header.insert(header.end(), first.header().begin(), first.header().end());
      TsvTable all(header);
      for (const auto& a : analyses) {
        for (const auto& row : anova_to_tsv(a.result).rows()) {
          std::vector<std::string> r{a.label};
          r.insert(r.end(), row.begin(), row.end());
          all.add_row(std::move(r));
        }
      }
      all.write(o);
      return;
    }
    for (std::size_t i = 0; i < analyses.size(); ++i) {
      if (i) o << "\n" << std::string(72, '-') << "\n\n";
      o << "[" << analyses[i].label << "]\n";
      const bool last = i + 1 == analyses.size();
      o << format_report(analyses[i].result, analyses[i].posthoc, last ? summary : std::vector<ConditionSummary>{});
    }
  });
  return 0;
}

// ---------------------------------------------------------------------- serve

namespace {
std::atomic<HttpService*> g_service{nullptr};
extern "C" void handle_stop_signal(int) {
  if (auto* s = g_service.load()) s->stop();
}
}  // namespace

int cmd_serve(const ServeOptions& options, std::ostream& out, std::ostream& err) {
  auto catalog = StimulusCatalog::load(options.stimuli_dir);
  auto lexicon = PhonemeLexicon::load(options.lexicon);
  std::shared_ptr<SessionStore> store;
  if (!options.data.empty()) store = std::make_shared<SessionStore>(options.data);
  SessionManager manager(std::move(catalog), std::move(lexicon), store);
  HttpService service(manager, options.ui_dir.empty() ? std::nullopt : std::optional<std::string>(options.ui_dir));
  int port = 0;
  try {
    port = service.bind(options.host, options.port);
  } catch (const Error& e) {
    err << "serve: " << e.what() << '\n';
    return 1;
  }
  out << fmt::format("serving {} stimuli, {} restored sessions, on http://{}:{}\n", manager.catalog().size(),
                     manager.session_ids().size(), options.host, port)
      << std::flush;
  g_service = &service;
  std::signal(SIGINT, handle_stop_signal);
  std::signal(SIGTERM, handle_stop_signal);
  service.serve();
  g_service = nullptr;
  return 0;
}

int cmd_default_config(std::ostream& out) {
  out << to_json(VocoderConfig::defaults()) << '\n';
  return 0;
}

// ------------------------------------------------------------------- dispatch

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Cochlear-implant simulation listening-test toolkit", "cisim"};
  app.require_subcommand(1);
  const std::map<std::string, OutputFormat> formats{{"text", OutputFormat::Text}, {"delimited", OutputFormat::Delimited}};

  AnalyzeRirOptions rir;
  std::string rir_channel, anchor = "zero";
  auto* analyze = app.add_subcommand("analyze-rir", "RT60 and DRR of room impulse responses");
  analyze->add_option("rirs", rir.paths, "RIR WAV files (sidecar .meta files are read when present)")->required();
  analyze->add_option("--channel", rir_channel, "left or right channel of stereo files");
  analyze->add_option("--anchor", anchor, "direct-path window start: zero or peak")
      ->check(CLI::IsMember({"zero", "peak"}));
  analyze->add_option("--direct-ms", rir.window.post_peak_ms, "direct-path window length after the peak (ms)");
  analyze->add_option("--format", rir.format, "text or delimited")->transform(CLI::CheckedTransformer(formats))->option_text("{text,delimited}");
  analyze->add_option("--out", rir.out, "output file");

  GenStimuliOptions gen;
  bool pcm16 = false;
  auto* generate = app.add_subcommand("gen-stimuli", "Render vocoded stimuli from a manifest");
  generate->add_option("manifest", gen.manifest, "manifest TSV")->required()->check(CLI::ExistingFile);
  generate->add_option("--corpus-root", gen.corpus_root, "directory holding one folder per corpus")->required();
  generate->add_option("--rir-dir", gen.rir_dir, "directory of room impulse responses");
  generate->add_option("--config", gen.config, "vocoder config JSON")->check(CLI::ExistingFile);
  generate->add_option("--out", gen.out_dir, "output directory")->required();
  generate->add_option("--seed", gen.seed, "synthesis phase seed (overrides the config)");
  generate->add_option("--threads", gen.threads, "worker threads (0: all cores)");
  generate->add_option("--rms", gen.rms, "output RMS for rows without one");
  generate->add_flag("--pcm16", pcm16, "write 16-bit PCM instead of 32-bit float");

  ScoreOptions score;
  auto* scorer = app.add_subcommand("score", "Phoneme scoring of typed responses");
  scorer->add_option("responses", score.responses, "TSV with a response column")->required()->check(CLI::ExistingFile);
  scorer->add_option("targets", score.targets, "TSV with a text column, row-aligned")->required()->check(CLI::ExistingFile);
  scorer->add_option("--lexicon", score.lexicon, "pronouncing dictionary")->required()->check(CLI::ExistingFile);
  scorer->add_flag("--per-word", score.per_word, "credit phonemes only within aligned words");
  scorer->add_option("--format", score.format, "text or delimited")->transform(CLI::CheckedTransformer(formats))->option_text("{text,delimited}");
  scorer->add_option("--out", score.out, "output file");
  scorer->add_option("--summary", score.summary, "per-condition summary TSV");

  StatsOptions stats;
  std::string correction = "gg";
  auto* statistics = app.add_subcommand("stats", "ANOVA, post-hoc contrasts and descriptives");
  statistics->add_option("table", stats.table, "score table TSV")->required()->check(CLI::ExistingFile);
  statistics->add_option("--correction", correction, "sphericity correction: gg, none or auto")
      ->check(CLI::IsMember({"gg", "none", "auto"}));
  statistics->add_option("--alpha", stats.anova.alpha, "significance level");
  statistics->add_option("--format", stats.format, "text or delimited")->transform(CLI::CheckedTransformer(formats))->option_text("{text,delimited}");
  statistics->add_option("--out", stats.out, "output file");
  statistics->add_option("--contrasts", stats.contrasts, "write Tukey contrasts TSV");
  statistics->add_option("--summary", stats.summary, "write condition summary TSV");

  ServeOptions serve;
  auto* server = app.add_subcommand("serve", "Run the listening-session service");
  server->add_option("stimuli", serve.stimuli_dir, "stimulus directory with stimuli.tsv")->required()->check(CLI::ExistingDirectory);
  server->add_option("--lexicon", serve.lexicon, "pronouncing dictionary")->required()->check(CLI::ExistingFile);
  server->add_option("--host", serve.host, "bind address");
  server->add_option("--port", serve.port, "port (0 picks a free one)");
  server->add_option("--data", serve.data, "append-only session log (JSON lines)");
  server->add_option("--ui-dir", serve.ui_dir, "static files for the listener UI")->check(CLI::ExistingDirectory);

  auto* defaults = app.add_subcommand("default-config", "Print the default vocoder config as JSON");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? 0 : 2;
  }

  try {
    if (analyze->parsed()) {
      if (!rir_channel.empty()) rir.channel = parse_rir_channel(rir_channel);
      rir.window.anchor = anchor == "peak" ? DirectWindowAnchor::Peak : DirectWindowAnchor::Zero;
      return cmd_analyze_rir(rir, out, err);
    }
    if (generate->parsed()) {
      if (pcm16) gen.encoding = WavEncoding::Pcm16;
      return cmd_gen_stimuli(gen, out, err);
    }
    if (scorer->parsed()) return cmd_score(score, out, err);
    if (statistics->parsed()) {
      stats.anova.correction = parse_sphericity_correction(correction);
      return cmd_stats(stats, out, err);
    }
    if (server->parsed()) return cmd_serve(serve, out, err);
    if (defaults->parsed()) return cmd_default_config(out);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return 2;
}

}  // namespace cisim
