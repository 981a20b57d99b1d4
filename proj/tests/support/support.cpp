#include "support.hpp"

#include <cmath>
#include <numbers>
#include <random>

#include "cisim/common/tsv.hpp"
#include "cisim/signal/wav_io.hpp"

namespace cisim::test {

namespace {

/// Two-pole resonator coefficients for centre frequency f and bandwidth bw.
struct Resonator {
  double y1 = 0.0, y2 = 0.0;
  double step(double x, double f, double bw, double fs) {
    const double r = std::exp(-std::numbers::pi * bw / fs);
    const double a1 = 2.0 * r * std::cos(2.0 * std::numbers::pi * f / fs);
    const double a2 = -r * r;
    const double y = (1.0 - r) * x + a1 * y1 + a2 * y2;
    y2 = y1;
    y1 = y;
    return y;
  }
};

}  // namespace

Waveform synthetic_speech(double seconds, int rate_hz, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  std::uniform_real_distribution<double> jitter(-0.03, 0.03);
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate_hz));
  const double fs = rate_hz;
  std::vector<double> out(n, 0.0);
  Resonator f1, f2, f3;
  double phase = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double t = static_cast<double>(i) / fs;
    const double f0 = 120.0 + 25.0 * std::sin(2.0 * std::numbers::pi * 0.7 * t);
    phase += f0 / fs * (1.0 + jitter(rng));
    double source = 0.0;
    if (phase >= 1.0) {
      phase -= 1.0;
      source = 1.0;
    }
    source += 0.02 * noise(rng);
    // Formants glide between vowel targets, one syllable every 250 ms.
    const double syl = std::fmod(t, 0.25) / 0.25;
    const double gate = std::sin(std::numbers::pi * syl);
    const double g1 = 300.0 + 500.0 * (0.5 + 0.5 * std::sin(2.0 * std::numbers::pi * 1.3 * t));
    const double g2 = 900.0 + 1400.0 * (0.5 + 0.5 * std::cos(2.0 * std::numbers::pi * 0.9 * t));
    const double v = f1.step(source, g1, 80.0, fs) + 0.6 * f2.step(source, g2, 120.0, fs) +
                     0.3 * f3.step(source, 2800.0, 200.0, fs);
    const double fric = (syl > 0.8 ? 0.05 : 0.0) * noise(rng);
    out[i] = gate * gate * v + fric;
  }
  double peak = 0.0;
  for (double v : out) peak = std::max(peak, std::abs(v));
  for (double& v : out) v *= 0.5 / peak;
  return Waveform(std::move(out), rate_hz);
}

RoomImpulseResponse exponential_rir(double rt60_s, int rate_hz, double seconds, std::uint64_t seed,
                                    double direct_gain) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> noise(0.0, 1.0);
  const auto n = static_cast<std::size_t>(std::llround(seconds * rate_hz));
  std::vector<double> h(n, 0.0);
  // Amplitude decays 60 dB over rt60: exp(-6.9078 t / rt60).
  const double k = 3.0 * std::log(10.0) / rt60_s;
  for (std::size_t i = 1; i < n; ++i) {
    const double t = static_cast<double>(i) / rate_hz;
    h[i] = 0.1 * noise(rng) * std::exp(-k * t);
  }
  h[0] = direct_gain;
  return RoomImpulseResponse(std::move(h), rate_hz);
}

std::vector<double> naive_convolution(std::span<const double> x, std::span<const double> h) {
  std::vector<double> y(x.size() + h.size() - 1, 0.0);
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = 0; j < h.size(); ++j) y[i + j] += x[i] * h[j];
  }
  return y;
}

std::vector<std::complex<double>> naive_dft(std::span<const double> x) {
  const std::size_t n = x.size();
  std::vector<std::complex<double>> out(n / 2 + 1);
  for (std::size_t k = 0; k <= n / 2; ++k) {
    std::complex<double> acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      const double angle = -2.0 * std::numbers::pi * static_cast<double>((k * t) % n) / static_cast<double>(n);
      acc += x[t] * std::complex<double>(std::cos(angle), std::sin(angle));
    }
    out[k] = acc;
  }
  return out;
}

std::vector<double> random_signal(std::size_t n, std::uint64_t seed, double amplitude) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  std::vector<double> out(n);
  for (double& v : out) v = u(rng);
  return out;
}

namespace {

ScoreTable structured_table(std::size_t subjects, std::uint64_t seed, Location location, double group_shift,
                            const std::string& id_prefix, double room_step, double channel_step) {
  static const Room rooms[] = {Room::Anechoic, Room::Office, Room::Lecture, Room::Stairway};
  static const int channels[] = {6, 8, 9, 10, 11, 12};
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> z(0.0, 1.0);
  ScoreTable t;
  for (std::size_t s = 0; s < subjects; ++s) {
    const double subject = 8.0 * z(rng);
    for (int i = 0; i < 4; ++i) {
      const double slope = (1.0 + 2.0 * i) * z(rng);
      for (int j = 0; j < 6; ++j) {
        ScoreRow r;
        r.subject = id_prefix + std::to_string(s);
        r.location = location;
        r.room = rooms[i];
        r.channels = channels[j];
        r.rau = 60.0 + group_shift + subject + slope - room_step * i + channel_step * j + 5.0 * z(rng);
        r.percent = r.rau - 5.0;
        t.rows.push_back(r);
      }
    }
  }
  return t;
}

}  // namespace

ScoreTable random_score_table(std::size_t subjects, std::uint64_t seed, Location location, double group_shift,
                              const std::string& id_prefix) {
  return structured_table(subjects, seed, location, group_shift, id_prefix, 3.0, 1.5);
}

ScoreTable null_score_table(std::size_t subjects, std::uint64_t seed) {
  return structured_table(subjects, seed, Location::Remote, 0.0, "s", 0.0, 0.0);
}

const std::string& test_sentence(std::size_t i) {
  static const std::vector<std::string> pool{
      "The boy fell from the window.", "The wife helped her husband.", "She is drinking milk.",
      "The dog ran home.",            "The cat sat.",                   "A big hat.",
      "The boy read.",                "She sat home." ,                  "It's a big cat.",
      "She ran from the dog.",        "The husband is home.",           "I know the boy.",
  };
  return pool[i % pool.size()];
}

void write_stimulus_dir(const std::filesystem::path& dir, std::size_t training, const std::vector<Room>& rooms,
                        const std::vector<int>& channels, std::size_t lists, std::size_t per_list) {
  std::filesystem::create_directories(dir / "audio");
  const auto tone = random_signal(160, 3, 0.1);
  const Waveform audio(tone, 16000);
  TsvTable t(std::vector<std::string>{"stimulus_id", "phase", "list_id", "room", "channels", "sentence_id", "text",
                                      "path"});
  std::size_t sentence = 0;
  auto add = [&](const std::string& id, const std::string& phase, const std::string& list, Room room, int ch) {
    const std::string rel = "audio/" + id + ".wav";
    save_wav(audio, (dir / rel).string());
    t.add_row({id, phase, list, std::string(to_string(room)), std::to_string(ch), "S" + std::to_string(sentence),
               test_sentence(sentence), rel});
    ++sentence;
  };
  for (std::size_t i = 0; i < training; ++i) add("T" + std::to_string(i), "training", "T", Room::Anechoic, 12);
  for (std::size_t l = 1; l <= lists; ++l) {
    for (Room room : rooms) {
      for (int ch : channels) {
        for (std::size_t k = 0; k < per_list; ++k) {
          const std::string id = "L" + std::to_string(l) + "_" + std::string(to_string(room)) + "_" +
                                 std::to_string(ch) + "_" + std::to_string(k);
          add(id, "testing", "L" + std::to_string(l), room, ch);
        }
      }
    }
  }
  t.write_file((dir / "stimuli.tsv").string());
}

TempDir::TempDir() {
  std::random_device rd;
  for (int attempt = 0; attempt < 100; ++attempt) {
    auto candidate = std::filesystem::temp_directory_path() / ("cisim-test-" + std::to_string(rd()));
    if (std::filesystem::create_directory(candidate)) {
      path_ = candidate;
      return;
    }
  }
  throw std::runtime_error("cannot create temporary directory");
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

std::string data_path(const std::string& name) { return std::string(CISIM_TEST_DATA_DIR) + "/" + name; }

std::string fixture_path(const std::string& name) { return std::string(CISIM_TEST_FIXTURE_DIR) + "/" + name; }

}  // namespace cisim::test

namespace cisim::test {

namespace {

void enumerate(const std::vector<std::string>& t, const std::vector<std::string>& r, std::size_t i, std::size_t j,
               std::size_t pairs, std::size_t matches, std::pair<std::size_t, std::size_t>& best) {
  const std::size_t cost = t.size() + r.size() - pairs - matches;
  if (cost < best.first || (cost == best.first && matches > best.second)) best = {cost, matches};
  for (std::size_t a = i; a < t.size(); ++a) {
    for (std::size_t b = j; b < r.size(); ++b) {
      enumerate(t, r, a + 1, b + 1, pairs + 1, matches + (t[a] == r[b] ? 1 : 0), best);
    }
  }
}

}  // namespace

std::pair<std::size_t, std::size_t> exhaustive_alignment(const std::vector<std::string>& target,
                                                         const std::vector<std::string>& response) {
  std::pair<std::size_t, std::size_t> best{SIZE_MAX, 0};
  enumerate(target, response, 0, 0, 0, 0, best);
  return best;
}

std::vector<std::vector<std::string>> all_sequences(const std::vector<std::string>& alphabet, std::size_t lo,
                                                    std::size_t hi) {
  std::vector<std::vector<std::string>> out;
  std::vector<std::vector<std::string>> layer{{}};
  for (std::size_t len = 0; len <= hi; ++len) {
    if (len >= lo) out.insert(out.end(), layer.begin(), layer.end());
    std::vector<std::vector<std::string>> next;
    for (const auto& s : layer) {
      for (const auto& a : alphabet) {
        auto e = s;
        e.push_back(a);
        next.push_back(std::move(e));
      }
    }
    layer = std::move(next);
  }
  return out;
}

double rau_reference(std::size_t x, std::size_t n) {
  const double d = static_cast<double>(n) + 1.0;
  const double p1 = static_cast<double>(x) / d, p2 = (static_cast<double>(x) + 1.0) / d;
  const double theta = std::atan2(std::sqrt(p1), std::sqrt(1.0 - p1)) + std::atan2(std::sqrt(p2), std::sqrt(1.0 - p2));
  return 146.0 / std::numbers::pi * theta - 23.0;
}

}  // namespace cisim::test
