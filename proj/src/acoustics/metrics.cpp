#include "cisim/acoustics/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace cisim {

namespace {

std::size_t peak_index(std::span<const double> h) {
  std::size_t best = 0;
  for (std::size_t i = 1; i < h.size(); ++i) {
    if (std::abs(h[i]) > std::abs(h[best])) best = i;
  }
  return best;
}

std::size_t ms_to_samples(double ms, int rate) {
  return static_cast<std::size_t>(std::llround(ms * 1e-3 * rate));
}

}  // namespace

IndexRange direct_path_window(const RoomImpulseResponse& rir, const DirectWindowOptions& options) {
  const auto h = rir.coefficients();
  if (h.empty()) throw SignalError("direct_path_window: empty RIR");
  const std::size_t peak = peak_index(h);
  const std::size_t after = ms_to_samples(options.post_peak_ms, rir.sample_rate_hz());
  IndexRange range;
  range.end = std::min(peak + after, h.size() - 1);
  if (options.anchor == DirectWindowAnchor::Peak) {
    const std::size_t before = ms_to_samples(options.pre_peak_ms, rir.sample_rate_hz());
    range.start = peak > before ? peak - before : 0;
  }
  return range;
}

double compute_drr(const RoomImpulseResponse& rir, const DirectWindowOptions& options) {
  const auto window = direct_path_window(rir, options);
  const auto h = rir.coefficients();
  double direct = 0.0;
  double reverberant = 0.0;
  for (std::size_t i = window.start; i <= window.end; ++i) direct += h[i] * h[i];
  for (std::size_t i = window.end + 1; i < h.size(); ++i) reverberant += h[i] * h[i];
  if (reverberant == 0.0) {
    throw AnechoicRirError("anechoic RIR: no energy after the direct path, DRR undefined");
  }
  return 10.0 * std::log10(direct / reverberant);
}

std::vector<double> schroeder_decay(const RoomImpulseResponse& rir) {
  const auto h = rir.coefficients();
  std::vector<double> energy(h.size());
  double acc = 0.0;
  for (std::size_t i = h.size(); i-- > 0;) {
    acc += h[i] * h[i];
    energy[i] = acc;
  }
  const double total = energy.front();
  if (total == 0.0) throw SignalError("schroeder_decay: all-zero RIR");
  std::vector<double> curve(h.size());
  double previous = 0.0;
  for (std::size_t i = 0; i < h.size(); ++i) {
    double db = energy[i] > 0.0 ? 10.0 * std::log10(energy[i] / total) : kDecayFloorDb;
    db = std::max(db, kDecayFloorDb);
    // Rounding in the running sum must not make the curve rise.
    if (i > 0) db = std::min(db, previous);
    curve[i] = db;
    previous = db;
  }
  curve[0] = 0.0;
  return curve;
}

double estimate_rt60(const RoomImpulseResponse& rir, const Rt60Options& options) {
  if (!(options.fit_start_db > options.fit_end_db) || options.fit_start_db > 0.0) {
    throw ConfigError("RT60 fit range must satisfy 0 >= start > end");
  }
  const auto curve = schroeder_decay(rir);
  const auto below = [&](double level) {
    return std::find_if(curve.begin(), curve.end(), [level](double v) { return v <= level; });
  };
  const auto first = below(options.fit_start_db);
  const auto last = below(options.fit_end_db);
  if (last == curve.end()) {
    throw InsufficientDecayError("decay curve never reaches " + std::to_string(options.fit_end_db) +
                                 " dB; cannot fit RT60");
  }
  const auto i0 = static_cast<std::size_t>(first - curve.begin());
  const auto i1 = static_cast<std::size_t>(last - curve.begin());
  if (i1 <= i0) throw InsufficientDecayError("decay falls through the fit range in one sample");

  // Least squares of level (dB) against time (s).
  const double fs = rir.sample_rate_hz();
  const double n = static_cast<double>(i1 - i0 + 1);
  double st = 0.0, sy = 0.0;
  for (std::size_t i = i0; i <= i1; ++i) {
    st += static_cast<double>(i) / fs;
    sy += curve[i];
  }
  const double mt = st / n, my = sy / n;
  double stt = 0.0, sty = 0.0;
  for (std::size_t i = i0; i <= i1; ++i) {
    const double dt = static_cast<double>(i) / fs - mt;
    stt += dt * dt;
    sty += dt * (curve[i] - my);
  }
  const double slope = sty / stt;
  if (!(slope < 0.0)) throw InsufficientDecayError("decay slope is not negative");
  return -60.0 / slope;
}

RirMetrics analyze_rir(const RoomImpulseResponse& rir, const Rt60Options& rt60,
                       const DirectWindowOptions& window) {
  RirMetrics m;
  m.direct_window = direct_path_window(rir, window);
  m.drr_db = compute_drr(rir, window);
  m.rt60_s = estimate_rt60(rir, rt60);
  return m;
}

}  // namespace cisim
