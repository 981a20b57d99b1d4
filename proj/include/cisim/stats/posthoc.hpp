#pragma once

#include <string>
#include <vector>

#include "cisim/stats/anova.hpp"
#include "cisim/stats/score_table.hpp"

namespace cisim {

struct MarginalMean {
  int level = 0;
  std::string label;
  double mean = 0.0;
};

struct ContrastResult {
  Factor factor = Factor::Room;
  int level_a = 0;
  int level_b = 0;
  std::string label_a;
  std::string label_b;
  double estimate = 0.0;  // mean(level_a) - mean(level_b), RAU
  double se = 0.0;
  double df = 0.0;
  double t = 0.0;
  double p_unadjusted = 1.0;
  double p_adjusted = 1.0;
};

struct TukeyResult {
  Factor factor = Factor::Room;
  std::vector<MarginalMean> means;
  std::vector<ContrastResult> contrasts;
};

/// Estimated marginal means of `factor`, averaged with equal weight over
/// the other factors and over groups, with all pairwise differences tested
/// against the factor's error stratum and Tukey-adjusted through the
/// studentized range with that stratum's (uncorrected) df.
/// Throws if `factor` is not part of `fit`.
TukeyResult emm_tukey(const ScoreTable& table, const AnovaResult& fit, Factor factor);

}  // namespace cisim
