#include <catch_amalgamated.hpp>

#include <fstream>
#include <json.hpp>
#include <sstream>

#include "cisim/cli/commands.hpp"
#include "cisim/cli/manifest.hpp"
#include "cisim/common/tsv.hpp"
#include "cisim/session/catalog.hpp"
#include "cisim/signal/dsp.hpp"
#include "support.hpp"

using namespace cisim;
using Catch::Matchers::WithinRel;

namespace {

struct Run {
  int code = 0;
  std::string out, err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "cisim");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  Run r;
  r.code = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
  r.out = out.str();
  r.err = err.str();
  return r;
}

// Corpus "c" with two lists of two sentences, and RIRs for office and
// stairway.
void write_inputs(const test::TempDir& dir) {
  const auto corpus = dir.path() / "corpus" / "c";
  std::filesystem::create_directories(corpus);
  TsvTable sentences(std::vector<std::string>{"list_id", "sentence_id", "text", "path"});
  for (int l = 1; l <= 2; ++l) {
    for (int s = 1; s <= 2; ++s) {
      const std::string name = "l" + std::to_string(l) + "s" + std::to_string(s) + ".wav";
      save_wav(test::synthetic_speech(0.6, 16000, static_cast<std::uint64_t>(10 * l + s)), (corpus / name).string());
      sentences.add_row({std::to_string(l), std::to_string(s), test::test_sentence(static_cast<std::size_t>(2 * l + s)),
                         name});
    }
  }
  sentences.write_file((corpus / "sentences.tsv").string());
  std::filesystem::create_directories(dir.path() / "rirs");
  save_wav(test::exponential_rir(0.6, 48000, 0.8).as_waveform(), dir.file("rirs/office_left.wav"), WavEncoding::Float32);
  save_wav(test::exponential_rir(1.0, 48000, 1.2).as_waveform(), dir.file("rirs/stairway.wav"), WavEncoding::Float32);
}

void write_manifest(const std::string& path, const std::vector<std::vector<std::string>>& rows) {
  TsvTable t(std::vector<std::string>{"stimulus_id", "phase", "corpus", "list_id", "sentence_id", "room",
                                      "rir_channel", "channels", "output"});
  for (const auto& r : rows) t.add_row(r);
  t.write_file(path);
}

}  // namespace

TEST_CASE("usage errors exit with 2") {
  CHECK(run({}).code == 2);
  CHECK(run({"frobnicate"}).code == 2);
  CHECK(run({"stats"}).code == 2);
  CHECK(run({"--help"}).code == 0);
}

TEST_CASE("default-config prints valid JSON") {
  const auto r = run({"default-config"});
  REQUIRE(r.code == 0);
  const auto j = nlohmann::json::parse(r.out);
  CHECK(j.contains("bands"));
}

TEST_CASE("analyze-rir reports rt60 and drr") {
  test::TempDir dir;
  save_wav(test::exponential_rir(0.6, 48000, 0.8).as_waveform(), dir.file("r.wav"), WavEncoding::Float32);
  const auto r = run({"analyze-rir", dir.file("r.wav"), "--format", "delimited", "--out", dir.file("o.tsv")});
  REQUIRE(r.code == 0);
  const auto t = TsvTable::read_file(dir.file("o.tsv"));
  REQUIRE(t.size() == 1);
  CHECK_THAT(std::stod(t.get(0, "rt60_s")), WithinRel(0.6, 0.05));
  const auto missing = run({"analyze-rir", dir.file("r.wav"), dir.file("nope.wav")});
  CHECK(missing.code == 1);
}

TEST_CASE("analyze-rir reports both metrics as errors for a bare impulse") {
  test::TempDir dir;
  std::vector<double> delta(4800, 0.0);
  delta[0] = 0.9;
  save_wav(Waveform(delta, 48000), dir.file("delta.wav"));
  const auto r = run({"analyze-rir", dir.file("delta.wav"), "--format", "delimited", "--out", dir.file("o.tsv")});
  CHECK(r.code == 1);
  const auto t = TsvTable::read_file(dir.file("o.tsv"));
  REQUIRE(t.size() == 1);
  CHECK(t.get(0, "error").find("RT60") != std::string::npos);
  CHECK(t.get(0, "error").find("DRR") != std::string::npos);
}

TEST_CASE("gen-stimuli renders equal-level stimuli and a servable catalog") {
  test::TempDir dir;
  write_inputs(dir);
  write_manifest(dir.file("m.tsv"), {{"a", "training", "c", "1", "1", "anechoic", "", "12", "train/a.wav"},
                                     {"b", "testing", "c", "1", "2", "office", "left", "8", "test/b.wav"},
                                     {"c", "testing", "c", "2", "1", "stairway", "right", "6", "test/c.wav"},
                                     {"d", "testing", "c", "2", "2", "office", "left", "10", "test/d.wav"}});
  const auto out = dir.path() / "out";
  const auto r = run({"gen-stimuli", dir.file("m.tsv"), "--corpus-root", dir.file("corpus"), "--rir-dir",
                      dir.file("rirs"), "--out", out.string(), "--threads", "2"});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto echo = TsvTable::read_file((out / "manifest.tsv").string());
  REQUIRE(echo.size() == 4);
  std::vector<double> levels;
  for (std::size_t i = 0; i < echo.size(); ++i) {
    const auto path = (out / echo.get(i, "output")).string();
    CHECK(echo.get(i, "sha256") == sha256_file(path));
    CHECK(echo.get(i, "error").empty());
    levels.push_back(rms(load_wav(path)));
  }
  for (double l : levels) CHECK_THAT(l, WithinRel(0.08, 1e-6));

  const auto catalog = StimulusCatalog::load(out.string());
  CHECK(catalog.size() == 4);
  CHECK(catalog.at("c").condition.channels == 6);

  // identical reruns give identical bytes
  const auto again = dir.path() / "again";
  run({"gen-stimuli", dir.file("m.tsv"), "--corpus-root", dir.file("corpus"), "--rir-dir", dir.file("rirs"), "--out",
       again.string(), "--threads", "1"});
  CHECK(sha256_file((again / "test/b.wav").string()) == echo.get(1, "sha256"));
}

TEST_CASE("gen-stimuli channel count changes the output") {
  test::TempDir dir;
  write_inputs(dir);
  write_manifest(dir.file("m.tsv"), {{"a", "testing", "c", "1", "1", "anechoic", "", "6", "a.wav"},
                                     {"b", "testing", "c", "1", "1", "anechoic", "", "12", "b.wav"}});
  const auto out = dir.path() / "out";
  REQUIRE(run({"gen-stimuli", dir.file("m.tsv"), "--corpus-root", dir.file("corpus"), "--out", out.string()}).code == 0);
  const auto echo = TsvTable::read_file((out / "manifest.tsv").string());
  CHECK(echo.get(0, "sha256") != echo.get(1, "sha256"));
}

TEST_CASE("gen-stimuli reports failing rows and keeps going") {
  test::TempDir dir;
  write_inputs(dir);
  write_manifest(dir.file("m.tsv"), {{"a", "testing", "c", "1", "1", "lecture", "left", "8", "a.wav"},
                                     {"b", "testing", "c", "9", "9", "anechoic", "", "8", "b.wav"},
                                     {"c", "testing", "c", "1", "2", "anechoic", "", "8", "c.wav"}});
  const auto out = dir.path() / "out";
  const auto r = run({"gen-stimuli", dir.file("m.tsv"), "--corpus-root", dir.file("corpus"), "--rir-dir",
                      dir.file("rirs"), "--out", out.string()});
  CHECK(r.code == 1);
  const auto echo = TsvTable::read_file((out / "manifest.tsv").string());
  CHECK_FALSE(echo.get(0, "error").empty());
  CHECK_FALSE(echo.get(1, "error").empty());
  CHECK(echo.get(2, "error").empty());
  CHECK(std::filesystem::exists(out / "c.wav"));
}

TEST_CASE("manifest validation") {
  test::TempDir dir;
  write_manifest(dir.file("m.tsv"), {{"a", "testing", "c", "1", "1", "office", "left", "8", "x.wav"},
                                     {"a", "testing", "c", "1", "2", "office", "left", "8", "y.wav"}});
  CHECK_THROWS(RunManifest::load(dir.file("m.tsv")));
  write_manifest(dir.file("m.tsv"), {{"a", "warmup", "c", "1", "1", "office", "left", "8", "x.wav"}});
  CHECK_THROWS(RunManifest::load(dir.file("m.tsv")));
}

TEST_CASE("score command adds score columns") {
  test::TempDir dir;
  TsvTable targets(std::vector<std::string>{"subject", "room", "channels", "text"});
  TsvTable responses(std::vector<std::string>{"response"});
  targets.add_row({"s1", "office", "8", "The boy fell."});
  responses.add_row({"the boy fell"});
  targets.add_row({"s1", "office", "8", "The cat sat."});
  responses.add_row({"I don't know"});
  targets.write_file(dir.file("t.tsv"));
  responses.write_file(dir.file("r.tsv"));
  const auto r = run({"score", dir.file("r.tsv"), dir.file("t.tsv"), "--lexicon", test::data_path("lexicon.dict"),
                      "--out", dir.file("s.tsv"), "--summary", dir.file("sum.tsv")});
  INFO(r.err);
  REQUIRE(r.code == 0);
  const auto s = TsvTable::read_file(dir.file("s.tsv"));
  CHECK(s.get(0, "percent_correct") == "100");
  CHECK(s.get(1, "correct_phonemes") == "0");
  CHECK(s.get(1, "gave_up") == "1");
  CHECK(TsvTable::read_file(dir.file("sum.tsv")).size() == 1);
}

TEST_CASE("stats command on the fixture") {
  test::TempDir dir;
  const auto r = run({"stats", test::fixture_path("mixed_scores.tsv"), "--contrasts", dir.file("c.tsv"), "--summary",
                      dir.file("s.tsv")});
  INFO(r.err);
  REQUIRE(r.code == 0);
  CHECK(r.out.find("room") != std::string::npos);
  CHECK(r.out.find("F(") != std::string::npos);
  CHECK(TsvTable::read_file(dir.file("c.tsv")).size() > 0);
  CHECK(TsvTable::read_file(dir.file("s.tsv")).size() == 48);
  const auto bad = run({"stats", test::fixture_path("mixed_scores.tsv"), "--correction", "hf"});
  CHECK(bad.code != 0);
}

TEST_CASE("stats command rejects constant data") {
  test::TempDir dir;
  auto table = test::random_score_table(4, 1);
  for (auto& r : table.rows) r.rau = 40.0;
  to_tsv(table).write_file(dir.file("flat.tsv"));
  const auto r = run({"stats", dir.file("flat.tsv")});
  CHECK(r.code == 1);
  CHECK_FALSE(r.err.empty());
}
