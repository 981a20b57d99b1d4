#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "cisim/stats/epsilon.hpp"
#include "cisim/stats/score_table.hpp"

namespace cisim {

enum class SphericityCorrection {
  GreenhouseGeisser,  // always deflate dfs of within effects by epsilon
  None,
  Auto,  // deflate only when Mauchly's test rejects at alpha
};

std::string_view to_string(SphericityCorrection c);
SphericityCorrection parse_sphericity_correction(std::string_view text);

struct AnovaOptions {
  SphericityCorrection correction = SphericityCorrection::GreenhouseGeisser;
  double alpha = 0.05;
};

struct EffectResult {
  std::string name;  // e.g. "room", "location:room:channels"
  std::vector<Factor> factors;
  double ss = 0.0;
  double ss_error = 0.0;
  double df_num_uncorrected = 0.0;
  double df_den_uncorrected = 0.0;
  double df_num = 0.0;
  double df_den = 0.0;
  double f = 0.0;
  double p = 1.0;
  double ges = 0.0;
  std::optional<double> epsilon_gg;  // absent for purely between-subject effects
  std::optional<MauchlyResult> mauchly;
  bool corrected = false;
  bool significant = false;

  double ms_error() const { return ss_error / df_den_uncorrected; }
  bool involves(Factor f) const;
};

struct AnovaResult {
  std::optional<Factor> between;
  Factor within_a = Factor::Room;
  Factor within_b = Factor::Channels;
  std::size_t n_subjects = 0;
  std::vector<int> group_levels;
  std::vector<std::size_t> group_sizes;
  AnovaOptions options;
  std::vector<EffectResult> effects;

  const EffectResult* find(std::string_view name) const;
  const EffectResult& effect(std::string_view name) const;
  bool has_factor(Factor f) const;
  /// The main-effect row for `f`.
  const EffectResult& main_effect(Factor f) const;
};

/// Two-way repeated-measures ANOVA. Effects: A, B, A:B.
AnovaResult rm_anova_2way(const ScoreTable& table, Factor a, Factor b,
                          const AnovaOptions& options = {});

/// Mixed ANOVA with one between-subjects factor and two within factors.
/// Effects: G, A, B, G:A, G:B, A:B, G:A:B. Group sizes may differ.
AnovaResult mixed_anova(const ScoreTable& table, Factor between, Factor a, Factor b,
                        const AnovaOptions& options = {});

}  // namespace cisim
