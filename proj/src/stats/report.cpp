#include "cisim/stats/report.hpp"

#include <cmath>

#include <fmt/format.h>

namespace cisim {

namespace {

std::string real(double v) { return fmt::format("{:.10g}", v); }

std::string p_text(double p) {
  if (p < 0.001) return "p < 0.001";
  return fmt::format("p = {:.3f}", p);
}

std::string df_text(double df) {
  if (std::abs(df - std::round(df)) < 1e-9) return fmt::format("{:.0f}", df);
  return fmt::format("{:.1f}", df);
}

}  // namespace

TsvTable anova_to_tsv(const AnovaResult& result) {
  TsvTable t(std::vector<std::string>{"effect", "ss", "ss_error", "df_num", "df_den", "f", "p", "ges", "epsilon_gg",
              "corrected", "mauchly_w", "mauchly_p"});
  for (const auto& e : result.effects) {
    t.add_row({e.name, real(e.ss), real(e.ss_error), real(e.df_num), real(e.df_den), real(e.f), real(e.p),
               real(e.ges), e.epsilon_gg ? real(*e.epsilon_gg) : "", e.corrected ? "yes" : "no",
               e.mauchly ? real(e.mauchly->w) : "", e.mauchly ? real(e.mauchly->p) : ""});
  }
  return t;
}

TsvTable contrasts_to_tsv(const std::vector<TukeyResult>& results) {
  TsvTable t(std::vector<std::string>{"factor", "level_a", "level_b", "estimate", "se", "df", "t", "p_unadjusted", "p_adjusted"});
  for (const auto& r : results) {
    for (const auto& c : r.contrasts) {
      t.add_row({std::string(to_string(c.factor)), c.label_a, c.label_b, real(c.estimate), real(c.se),
                 real(c.df), real(c.t), real(c.p_unadjusted), real(c.p_adjusted)});
    }
  }
  return t;
}

TsvTable summaries_to_tsv(const std::vector<ConditionSummary>& summaries) {
  TsvTable t(std::vector<std::string>{"room", "channels", "location", "n", "mean_percent", "sd_percent", "summary"});
  for (const auto& s : summaries) {
    t.add_row({std::string(to_string(s.room)), std::to_string(s.channels), std::string(to_string(s.location)),
               std::to_string(s.n), real(s.mean), real(s.sd), s.formatted()});
  }
  return t;
}

std::string format_effect(const EffectResult& e) {
  return fmt::format("F({}, {}) = {:.1f}, {}, ges = {:.3f}", df_text(e.df_num), df_text(e.df_den), e.f,
                     p_text(e.p), e.ges);
}

std::string format_report(const AnovaResult& result, const std::vector<TukeyResult>& posthoc,
                          const std::vector<ConditionSummary>& summaries) {
  std::string out;
  if (result.between) {
    out += fmt::format("Mixed ANOVA: between {}, within {} x {}; {} subjects (", to_string(*result.between),
                       to_string(result.within_a), to_string(result.within_b), result.n_subjects);
    for (std::size_t g = 0; g < result.group_sizes.size(); ++g) {
      if (g) out += ", ";
      out += fmt::format("{} = {}", level_label(*result.between, result.group_levels[g]), result.group_sizes[g]);
    }
    out += ")\n";
  } else {
    out += fmt::format("Repeated-measures ANOVA: {} x {}; {} subjects\n", to_string(result.within_a),
                       to_string(result.within_b), result.n_subjects);
  }
  out += fmt::format("sphericity correction: {}, alpha = {}\n\n", to_string(result.options.correction),
                     result.options.alpha);
  out += fmt::format("{:<26} {:>8} {:>8} {:>10} {:>10} {:>7} {:>7}\n", "effect", "df_num", "df_den", "F", "p",
                     "ges", "eps");
  for (const auto& e : result.effects) {
    out += fmt::format("{:<26} {:>8.2f} {:>8.2f} {:>10.3f} {:>10.4g} {:>7.3f} {:>7}{}\n", e.name, e.df_num,
                       e.df_den, e.f, e.p, e.ges, e.epsilon_gg ? fmt::format("{:.3f}", *e.epsilon_gg) : "-",
                       e.significant ? " *" : "");
  }
  out += "\n";
  for (const auto& e : result.effects) out += fmt::format("{}: {}\n", e.name, format_effect(e));

  for (const auto& r : posthoc) {
    out += fmt::format("\nEstimated marginal means, {} (RAU)\n", to_string(r.factor));
    for (const auto& m : r.means) out += fmt::format("  {:<12} {:8.2f}\n", m.label, m.mean);
    out += "Pairwise contrasts, Tukey adjusted\n";
    for (const auto& c : r.contrasts) {
      out += fmt::format("  {:>10} - {:<10} {:8.2f}  se {:6.2f}  t({:.0f}) = {:7.3f}  p_adj = {:.4g}\n", c.label_a,
                         c.label_b, c.estimate, c.se, c.df, c.t, c.p_adjusted);
    }
  }

  if (!summaries.empty()) {
    out += "\nPercent correct by condition (mean ± sd)\n";
    for (const auto& s : summaries) {
      out += fmt::format("  {:<9} {:>2} ch  {:<9} n = {:<3} {}\n", to_string(s.room), s.channels,
                         to_string(s.location), s.n, s.formatted());
    }
    out += "\nRange across channel conditions\n";
    for (const auto& r : condition_ranges(summaries)) {
      out += fmt::format("  {:<9} {:<9} {}\n", to_string(r.room), to_string(r.location), r.formatted());
    }
  }
  return out;
}

}  // namespace cisim
