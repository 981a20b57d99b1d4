#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "cisim/acoustics/rir.hpp"

namespace cisim {

/// DRR is undefined because the RIR carries no energy after the direct path.
class AnechoicRirError : public Error {
 public:
  using Error::Error;
};

/// The Schroeder curve never falls far enough for the RT60 line fit.
class InsufficientDecayError : public Error {
 public:
  using Error::Error;
};

/// Inclusive sample index range.
struct IndexRange {
  std::size_t start = 0;
  std::size_t end = 0;
  friend bool operator==(const IndexRange&, const IndexRange&) = default;
};

enum class DirectWindowAnchor {
  /// Window starts at sample 0.
  Zero,
  /// Window starts `pre_peak_ms` before the largest-magnitude tap.
  Peak,
};

struct DirectWindowOptions {
  DirectWindowAnchor anchor = DirectWindowAnchor::Zero;
  double post_peak_ms = 8.0;
  double pre_peak_ms = 0.5;
};

struct Rt60Options {
  double fit_start_db = -5.0;
  double fit_end_db = -35.0;
};

/// Floor for the decay curve where the remaining energy is zero.
inline constexpr double kDecayFloorDb = -120.0;

/// Direct-path segment: from the anchor through post_peak_ms after the
/// largest-magnitude tap, clamped to the RIR.
IndexRange direct_path_window(const RoomImpulseResponse& rir, const DirectWindowOptions& options = {});

/// 10 log10 of direct-window energy over the energy after the window.
/// Throws AnechoicRirError when nothing follows the direct path.
double compute_drr(const RoomImpulseResponse& rir, const DirectWindowOptions& options = {});

/// Schroeder backward-integrated energy decay in dB, normalized so the first
/// value is 0 dB. Non-increasing; zero remaining energy maps to kDecayFloorDb.
std::vector<double> schroeder_decay(const RoomImpulseResponse& rir);

/// Least-squares line through the decay curve between the two fit levels;
/// RT60 is the time that line takes to fall 60 dB.
double estimate_rt60(const RoomImpulseResponse& rir, const Rt60Options& options = {});

struct RirMetrics {
  double rt60_s = 0.0;
  double drr_db = 0.0;
  IndexRange direct_window;
};

/// Both metrics or the first error.
RirMetrics analyze_rir(const RoomImpulseResponse& rir, const Rt60Options& rt60 = {},
                       const DirectWindowOptions& window = {});

}  // namespace cisim
