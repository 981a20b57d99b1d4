#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>

#include "cisim/acoustics/metrics.hpp"
#include "cisim/acoustics/rir.hpp"
#include "cisim/signal/dsp.hpp"
#include "cisim/signal/wav_io.hpp"
#include "support.hpp"

using namespace cisim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;

TEST_CASE("RoomImpulseResponse validation") {
  CHECK_THROWS_AS(RoomImpulseResponse({0.0, 0.0}, 16000), SignalError);
  CHECK_THROWS_AS(RoomImpulseResponse({1.0, NAN}, 16000), SignalError);
  CHECK_THROWS_AS(RoomImpulseResponse({1.0}, 0), SignalError);
  CHECK(RoomImpulseResponse({0.0, 1.0}, 16000).size() == 2);
}

TEST_CASE("sidecar parsing") {
  const auto s = parse_rir_sidecar("# Aachen office\nroom = Office\nDistance_m = 3.0\nchannel = right\n"
                                   "dimensions_m = 5.0 x 6.4 x 2.9\nunknown = 1\n");
  CHECK(s.meta.room == "Office");
  REQUIRE(s.meta.distance_m);
  CHECK(*s.meta.distance_m == 3.0);
  CHECK(s.channel == RirChannel::Right);
  CHECK(s.meta.dimensions_m == std::vector<double>{5.0, 6.4, 2.9});
  CHECK_THROWS_AS(parse_rir_sidecar("distance_m = far\n"), ConfigError);
  CHECK_THROWS_AS(parse_rir_sidecar("no equals sign\n"), ConfigError);
  CHECK(rir_sidecar_path("/x/office.wav") == "/x/office.meta");
  CHECK(parse_rir_channel("L") == RirChannel::Left);
  CHECK_THROWS_AS(parse_rir_channel("centre"), ConfigError);
}

TEST_CASE("load_rir reads the requested channel and the sidecar") {
  test::TempDir dir;
  const auto wav = dir.file("stairway.wav");
  // Stereo interleaved through two mono saves is awkward; write a mono file
  // and check the sidecar route, then a stereo one through raw bytes.
  save_wav(Waveform({0.5, 0.25, 0.0, 0.125}, 48000), wav);
  std::ofstream(dir.file("stairway.meta")) << "room = Stairway\ndistance_m = 2\nchannel = right\n";
  const auto rir = load_rir(wav);
  CHECK(rir.meta().room == "Stairway");
  CHECK(rir.channel() == RirChannel::Right);
  CHECK(rir.sample_rate_hz() == 48000);
  CHECK_THAT(rir.coefficients()[0], WithinAbs(0.5, 1e-12));

  const auto down = resample(rir, 16000);
  CHECK(down.sample_rate_hz() == 16000);
  CHECK(down.meta().room == "Stairway");
  CHECK_THROWS_AS(load_rir(dir.file("absent.wav")), IoError);
}

TEST_CASE("speech convolved with an RIR") {
  const Waveform speech(test::random_signal(100, 1), 16000);
  const RoomImpulseResponse rir({1.0, 0.0, 0.5}, 16000);
  const auto y = convolve(speech, rir);
  CHECK(y.size() == 102);
  CHECK_THAT(y[2], WithinAbs(speech[2] + 0.5 * speech[0], 1e-15));
  CHECK_THROWS_AS(convolve(speech, RoomImpulseResponse({1.0}, 48000)), SignalError);
}

TEST_CASE("Schroeder decay is normalized and non-increasing") {
  const auto rir = test::exponential_rir(0.5, 16000, 0.8);
  const auto curve = schroeder_decay(rir);
  REQUIRE(curve.size() == rir.size());
  CHECK(curve.front() == 0.0);
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] <= curve[i - 1]);
  CHECK(curve.back() >= kDecayFloorDb);

  // Backward integration against a direct recomputation.
  const auto h = rir.coefficients();
  double total = 0.0, tail = 0.0;
  for (double v : h) total += v * v;
  for (std::size_t i = 4000; i < h.size(); ++i) tail += h[i] * h[i];
  CHECK_THAT(curve[4000], WithinAbs(10.0 * std::log10(tail / total), 1e-9));
}

TEST_CASE("RT60 of synthetic exponential decays") {
  for (double t : {0.3, 0.6, 1.0}) {
    for (int rate : {16000, 48000}) {
      const auto rir = test::exponential_rir(t, rate, 1.6 * t, 40 + static_cast<std::uint64_t>(t * 10));
      CHECK_THAT(estimate_rt60(rir), WithinRel(t, 0.05));
    }
  }
}

TEST_CASE("RT60 errors") {
  std::vector<double> delta(1000, 0.0);
  delta[0] = 1.0;
  CHECK_THROWS_AS(estimate_rt60(RoomImpulseResponse(delta, 16000)), InsufficientDecayError);
  // A decay that stops at -20 dB never reaches the -35 dB fit end.
  std::vector<double> flat(2000, 0.1);
  CHECK_THROWS_AS(estimate_rt60(RoomImpulseResponse(flat, 16000)), InsufficientDecayError);
  CHECK_THROWS_AS(estimate_rt60(test::exponential_rir(0.5, 16000, 1.0), {-35.0, -5.0}), ConfigError);
}

TEST_CASE("DRR of two-tap responses") {
  for (double ratio : {0.1, 0.5, 0.9}) {
    std::vector<double> h(16000, 0.0);
    h[0] = 1.0;
    h[800] = ratio;  // 50 ms, well past the 8 ms direct window
    const RoomImpulseResponse rir(h, 16000);
    CHECK_THAT(compute_drr(rir), WithinAbs(10.0 * std::log10(1.0 / (ratio * ratio)), 1e-9));
  }
}

TEST_CASE("direct window anchors") {
  std::vector<double> h(2000, 0.0);
  h[100] = 1.0;
  h[1500] = 0.3;
  const RoomImpulseResponse rir(h, 16000);
  const auto zero = direct_path_window(rir);
  CHECK(zero.start == 0);
  CHECK(zero.end == 100 + 128);
  DirectWindowOptions peak;
  peak.anchor = DirectWindowAnchor::Peak;
  const auto w = direct_path_window(rir, peak);
  CHECK(w.start == 92);
  CHECK(w.end == 228);
  CHECK_THAT(compute_drr(rir, peak), WithinAbs(10.0 * std::log10(1.0 / 0.09), 1e-9));
}

TEST_CASE("anechoic RIR has no DRR") {
  std::vector<double> delta(100, 0.0);
  delta[0] = 1.0;
  CHECK_THROWS_AS(compute_drr(RoomImpulseResponse(delta, 16000)), AnechoicRirError);
  CHECK_THROWS_AS(analyze_rir(RoomImpulseResponse(delta, 16000)), Error);
}

TEST_CASE("analyze_rir reports both metrics") {
  const auto rir = test::exponential_rir(0.6, 16000, 1.0, 3, 2.0);
  const auto m = analyze_rir(rir);
  CHECK_THAT(m.rt60_s, WithinRel(0.6, 0.05));
  CHECK(std::isfinite(m.drr_db));
  CHECK(m.direct_window.start == 0);
}
