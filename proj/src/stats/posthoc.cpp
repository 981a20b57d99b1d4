#include "cisim/stats/posthoc.hpp"

#include <algorithm>
#include <cmath>

#include "cisim/stats/distributions.hpp"
#include "design.hpp"

namespace cisim {

TukeyResult emm_tukey(const ScoreTable& table, const AnovaResult& fit, Factor factor) {
  if (!fit.has_factor(factor)) {
    throw Error("factor '" + std::string(to_string(factor)) + "' is not part of the fitted model");
  }
  const detail::Cube c = detail::build_cube(table, fit.within_a, fit.within_b, fit.between);
  if (c.n() != fit.n_subjects) throw DesignError("score table does not match the fitted model");
  const EffectResult& main = fit.main_effect(factor);
  const double ms_error = main.ms_error();
  const double df = main.df_den_uncorrected;

  const std::size_t N = c.n(), na = c.na(), nb = c.nb(), ng = c.ng();
  const double dg = static_cast<double>(ng);

  // Group x level means for the chosen factor, then the equal-weight EMM.
  std::vector<int> levels;
  std::vector<std::vector<double>> group_level;  // [g][level]
  double per_mean_cells = 0.0;  // cells averaged into one subject-level score
  if (factor == c.a) {
    levels = c.a_levels;
    per_mean_cells = static_cast<double>(nb);
  } else if (factor == c.b) {
    levels = c.b_levels;
    per_mean_cells = static_cast<double>(na);
  } else {
    levels = c.group_levels;
    per_mean_cells = static_cast<double>(na * nb);
  }
  const std::size_t k = levels.size();
  const bool between = c.between && factor == *c.between;
  group_level.assign(between ? 1 : ng, std::vector<double>(k, 0.0));
  for (std::size_t s = 0; s < N; ++s) {
    const std::size_t g = c.group_of[s];
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        const double v = c.at(s, i, j);
        if (between) {
          group_level[0][g] += v / (static_cast<double>(c.group_sizes[g]) * per_mean_cells);
        } else {
          const std::size_t lvl = factor == c.a ? i : j;
          group_level[g][lvl] += v / (static_cast<double>(c.group_sizes[g]) * per_mean_cells);
        }
      }
    }
  }

  TukeyResult out;
  out.factor = factor;
  std::vector<double> emm(k, 0.0);
  for (std::size_t l = 0; l < k; ++l) {
    if (between) {
      emm[l] = group_level[0][l];
    } else {
      for (std::size_t g = 0; g < ng; ++g) emm[l] += group_level[g][l] / dg;
    }
    out.means.push_back({levels[l], level_label(factor, levels[l]), emm[l]});
  }

  double inv_n_sum = 0.0;
  for (std::size_t g = 0; g < ng; ++g) inv_n_sum += 1.0 / static_cast<double>(c.group_sizes[g]);

  for (std::size_t x = 0; x < k; ++x) {
    for (std::size_t y = x + 1; y < k; ++y) {
      ContrastResult r;
      r.factor = factor;
      r.level_a = levels[x];
      r.level_b = levels[y];
      r.label_a = level_label(factor, levels[x]);
      r.label_b = level_label(factor, levels[y]);
      r.estimate = emm[x] - emm[y];
      if (between) {
        r.se = std::sqrt(ms_error / per_mean_cells *
                         (1.0 / static_cast<double>(c.group_sizes[x]) + 1.0 / static_cast<double>(c.group_sizes[y])));
      } else {
        r.se = std::sqrt(2.0 * ms_error / (per_mean_cells * dg * dg) * inv_n_sum);
      }
      r.df = df;
      r.t = r.estimate / r.se;
      r.p_unadjusted = t_two_sided(r.t, df);
      const double p = studentized_range_upper_tail(std::sqrt(2.0) * std::abs(r.t), static_cast<int>(k), df);
      r.p_adjusted = std::clamp(p, r.p_unadjusted, 1.0);
      out.contrasts.push_back(std::move(r));
    }
  }
  return out;
}

}  // namespace cisim
