#pragma once

#include <string>
#include <vector>

#include "cisim/common/tsv.hpp"
#include "cisim/stats/anova.hpp"
#include "cisim/stats/descriptives.hpp"
#include "cisim/stats/posthoc.hpp"

namespace cisim {

TsvTable anova_to_tsv(const AnovaResult& result);
TsvTable contrasts_to_tsv(const std::vector<TukeyResult>& results);
TsvTable summaries_to_tsv(const std::vector<ConditionSummary>& summaries);

/// "F(1.8, 35.8) = 97.0, p < 0.001, ges = 0.415"
std::string format_effect(const EffectResult& effect);

/// Human-readable report: effect table, post-hoc contrasts and descriptives.
std::string format_report(const AnovaResult& result, const std::vector<TukeyResult>& posthoc,
                          const std::vector<ConditionSummary>& summaries);

}  // namespace cisim
