#include "cisim/stats/anova.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <map>
#include <set>

#include "cisim/stats/distributions.hpp"
#include "design.hpp"

namespace cisim {

namespace detail {

Cube build_cube(const ScoreTable& table, Factor a, Factor b, std::optional<Factor> between) {
  if (a == b || (between && (*between == a || *between == b))) {
    throw DesignError("factors of an analysis must be distinct");
  }
  if (table.empty()) throw DesignError("score table is empty");
  Cube cube;
  cube.a = a;
  cube.b = b;
  cube.between = between;

  std::set<int> a_levels, b_levels, g_levels;
  std::map<std::string, int> group_by_subject;
  for (const auto& row : table.rows) {
    if (!std::isfinite(row.rau)) throw DesignError("non-finite score for subject " + row.subject);
    a_levels.insert(level_of(row, a));
    b_levels.insert(level_of(row, b));
    const int g = between ? level_of(row, *between) : 0;
    g_levels.insert(g);
    auto [it, inserted] = group_by_subject.emplace(row.subject, g);
    if (!inserted && it->second != g) {
      throw DesignError("subject " + row.subject + " appears in more than one " +
                        std::string(to_string(*between)) + " group");
    }
  }
  cube.a_levels.assign(a_levels.begin(), a_levels.end());
  cube.b_levels.assign(b_levels.begin(), b_levels.end());
  cube.group_levels.assign(g_levels.begin(), g_levels.end());
  if (cube.na() < 2) throw DesignError(std::string(to_string(a)) + " has fewer than two levels");
  if (cube.nb() < 2) throw DesignError(std::string(to_string(b)) + " has fewer than two levels");
  if (between && cube.ng() < 2) {
    throw DesignError(std::string(to_string(*between)) + " has fewer than two groups");
  }
  if (group_by_subject.size() < 2) throw DesignError("at least two subjects are required");

  // Subjects ordered by group, then by id.
  std::vector<std::pair<int, std::string>> order;
  for (const auto& [subject, g] : group_by_subject) order.emplace_back(g, subject);
  std::sort(order.begin(), order.end());
  std::map<std::string, std::size_t> subject_index;
  cube.group_sizes.assign(cube.ng(), 0);
  for (const auto& [g, subject] : order) {
    const auto gi = static_cast<std::size_t>(
        std::lower_bound(cube.group_levels.begin(), cube.group_levels.end(), g) - cube.group_levels.begin());
    subject_index[subject] = cube.subjects.size();
    cube.subjects.push_back(subject);
    cube.group_of.push_back(gi);
    ++cube.group_sizes[gi];
  }
  if (cube.n() <= cube.ng()) throw DesignError("too few subjects for the number of groups");

  auto index_in = [](const std::vector<int>& levels, int v) {
    return static_cast<std::size_t>(std::lower_bound(levels.begin(), levels.end(), v) - levels.begin());
  };
  const std::size_t cells = cube.na() * cube.nb();
  cube.y.assign(cube.n() * cells, 0.0);
  std::vector<char> seen(cube.y.size(), 0);
  for (const auto& row : table.rows) {
    const std::size_t s = subject_index.at(row.subject);
    const std::size_t i = index_in(cube.a_levels, level_of(row, a));
    const std::size_t j = index_in(cube.b_levels, level_of(row, b));
    const std::size_t k = (s * cube.na() + i) * cube.nb() + j;
    if (seen[k]) {
      throw DesignError("subject " + row.subject + " has more than one score for " +
                        level_label(a, cube.a_levels[i]) + " x " + level_label(b, cube.b_levels[j]));
    }
    seen[k] = 1;
    cube.y[k] = row.rau;
  }
  for (std::size_t s = 0; s < cube.n(); ++s) {
    for (std::size_t i = 0; i < cube.na(); ++i) {
      for (std::size_t j = 0; j < cube.nb(); ++j) {
        if (!seen[(s * cube.na() + i) * cube.nb() + j]) {
          throw DesignError("subject " + cube.subjects[s] + " is missing " +
                            level_label(a, cube.a_levels[i]) + " x " + level_label(b, cube.b_levels[j]));
        }
      }
    }
  }
  return cube;
}

}  // namespace detail

namespace {

using detail::Cube;

Eigen::MatrixXd contrast_matrix(std::size_t k) {
  const auto c = orthonormal_contrasts(k);
  Eigen::MatrixXd out(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(k - 1));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j + 1 < k; ++j) out(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = c[i][j];
  }
  return out;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& x, const Eigen::MatrixXd& y) {
  Eigen::MatrixXd out(x.rows() * y.rows(), x.cols() * y.cols());
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
      out.block(i * y.rows(), j * y.cols(), y.rows(), y.cols()) = x(i, j) * y;
    }
  }
  return out;
}

Matrix to_matrix(const Eigen::MatrixXd& m) {
  Matrix out(static_cast<std::size_t>(m.rows()), std::vector<double>(static_cast<std::size_t>(m.cols())));
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) out[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = m(i, j);
  }
  return out;
}

struct Sums {
  double g = 0, err_between = 0;
  double a = 0, ga = 0, err_a = 0;
  double b = 0, gb = 0, err_b = 0;
  double ab = 0, gab = 0, err_ab = 0;
  double total = 0;
};

struct Means {
  double m = 0;
  std::vector<double> g, s, a, b, ab, ga, gb, gab, sa, sb;
};

Means compute_means(const Cube& c) {
  Means mm;
  const std::size_t N = c.n(), na = c.na(), nb = c.nb(), ng = c.ng();
  mm.g.assign(ng, 0);
  mm.s.assign(N, 0);
  mm.a.assign(na, 0);
  mm.b.assign(nb, 0);
  mm.ab.assign(na * nb, 0);
  mm.ga.assign(ng * na, 0);
  mm.gb.assign(ng * nb, 0);
  mm.gab.assign(ng * na * nb, 0);
  mm.sa.assign(N * na, 0);
  mm.sb.assign(N * nb, 0);
  for (std::size_t s = 0; s < N; ++s) {
    const std::size_t g = c.group_of[s];
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        const double v = c.at(s, i, j);
        mm.m += v;
        mm.g[g] += v;
        mm.s[s] += v;
        mm.a[i] += v;
        mm.b[j] += v;
        mm.ab[i * nb + j] += v;
        mm.ga[g * na + i] += v;
        mm.gb[g * nb + j] += v;
        mm.gab[(g * na + i) * nb + j] += v;
        mm.sa[s * na + i] += v;
        mm.sb[s * nb + j] += v;
      }
    }
  }
  const double dN = static_cast<double>(N), da = static_cast<double>(na), db = static_cast<double>(nb);
  mm.m /= dN * da * db;
  for (std::size_t g = 0; g < ng; ++g) {
    const double n = static_cast<double>(c.group_sizes[g]);
    mm.g[g] /= n * da * db;
    for (std::size_t i = 0; i < na; ++i) mm.ga[g * na + i] /= n * db;
    for (std::size_t j = 0; j < nb; ++j) mm.gb[g * nb + j] /= n * da;
    for (std::size_t k = 0; k < na * nb; ++k) mm.gab[g * na * nb + k] /= n;
  }
  for (double& v : mm.s) v /= da * db;
  for (double& v : mm.a) v /= dN * db;
  for (double& v : mm.b) v /= dN * da;
  for (double& v : mm.ab) v /= dN;
  for (double& v : mm.sa) v /= db;
  for (double& v : mm.sb) v /= da;
  return mm;
}

Sums compute_sums(const Cube& c, const Means& mm) {
  const std::size_t N = c.n(), na = c.na(), nb = c.nb(), ng = c.ng();
  const double da = static_cast<double>(na), db = static_cast<double>(nb), dN = static_cast<double>(N);
  Sums ss;
  auto sq = [](double x) { return x * x; };

  for (std::size_t g = 0; g < ng; ++g) {
    const double n = static_cast<double>(c.group_sizes[g]);
    ss.g += da * db * n * sq(mm.g[g] - mm.m);
    for (std::size_t i = 0; i < na; ++i) {
      ss.ga += db * n * sq(mm.ga[g * na + i] - mm.g[g] - mm.a[i] + mm.m);
    }
    for (std::size_t j = 0; j < nb; ++j) {
      ss.gb += da * n * sq(mm.gb[g * nb + j] - mm.g[g] - mm.b[j] + mm.m);
    }
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        ss.gab += n * sq(mm.gab[(g * na + i) * nb + j] - mm.ga[g * na + i] - mm.gb[g * nb + j] -
                         mm.ab[i * nb + j] + mm.g[g] + mm.a[i] + mm.b[j] - mm.m);
      }
    }
  }
  for (std::size_t i = 0; i < na; ++i) ss.a += dN * db * sq(mm.a[i] - mm.m);
  for (std::size_t j = 0; j < nb; ++j) ss.b += dN * da * sq(mm.b[j] - mm.m);
  for (std::size_t i = 0; i < na; ++i) {
    for (std::size_t j = 0; j < nb; ++j) ss.ab += dN * sq(mm.ab[i * nb + j] - mm.a[i] - mm.b[j] + mm.m);
  }
  for (std::size_t s = 0; s < N; ++s) {
    const std::size_t g = c.group_of[s];
    ss.err_between += da * db * sq(mm.s[s] - mm.g[g]);
    for (std::size_t i = 0; i < na; ++i) {
      ss.err_a += db * sq(mm.sa[s * na + i] - mm.s[s] - mm.ga[g * na + i] + mm.g[g]);
    }
    for (std::size_t j = 0; j < nb; ++j) {
      ss.err_b += da * sq(mm.sb[s * nb + j] - mm.s[s] - mm.gb[g * nb + j] + mm.g[g]);
    }
    for (std::size_t i = 0; i < na; ++i) {
      for (std::size_t j = 0; j < nb; ++j) {
        const double r = c.at(s, i, j) - mm.sa[s * na + i] - mm.sb[s * nb + j] + mm.s[s] -
                         mm.gab[(g * na + i) * nb + j] + mm.ga[g * na + i] + mm.gb[g * nb + j] - mm.g[g];
        ss.err_ab += sq(r);
        ss.total += sq(c.at(s, i, j) - mm.m);
      }
    }
  }
  return ss;
}

/// Covariance of the ab cells pooled over groups, df N - g.
Eigen::MatrixXd pooled_covariance(const Cube& c, const Means& mm) {
  const std::size_t cells = c.na() * c.nb();
  Eigen::MatrixXd sp = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(cells), static_cast<Eigen::Index>(cells));
  Eigen::VectorXd d(static_cast<Eigen::Index>(cells));
  for (std::size_t s = 0; s < c.n(); ++s) {
    const std::size_t g = c.group_of[s];
    for (std::size_t k = 0; k < cells; ++k) {
      d(static_cast<Eigen::Index>(k)) = c.y[s * cells + k] - mm.gab[g * cells + k];
    }
    sp.noalias() += d * d.transpose();
  }
  return sp / static_cast<double>(c.n() - c.ng());
}

struct Stratum {
  double epsilon = 1.0;
  MauchlyResult mauchly;
};

Stratum sphericity(const Eigen::MatrixXd& sp, const Eigen::MatrixXd& contrasts, double error_df) {
  const Eigen::MatrixXd v = contrasts.transpose() * sp * contrasts;
  const Matrix vm = to_matrix(v);
  return {gg_epsilon_from_contrast_covariance(vm), mauchly_test(vm, error_df)};
}

std::string effect_name(const std::vector<Factor>& factors) {
  std::string out;
  for (Factor f : factors) {
    if (!out.empty()) out += ':';
    out += to_string(f);
  }
  return out;
}

AnovaResult fit(const Cube& c, const AnovaOptions& options) {
  if (!(options.alpha > 0.0 && options.alpha < 1.0)) throw DesignError("alpha must lie in (0, 1)");
  const Means mm = compute_means(c);
  const Sums ss = compute_sums(c, mm);

  const double scale = std::max(ss.total, 0.0);
  const double tiny = 1e-12 * scale;
  const bool mixed = c.between.has_value();
  if (scale == 0.0 || ss.err_a <= tiny || ss.err_b <= tiny || ss.err_ab <= tiny ||
      (mixed && ss.err_between <= tiny)) {
    throw DesignError("scores are constant within subjects: error sums of squares vanish");
  }

  const double N = static_cast<double>(c.n()), g = static_cast<double>(c.ng());
  const double da = static_cast<double>(c.na()) - 1.0, db = static_cast<double>(c.nb()) - 1.0;
  const double df_subj = N - g;
  const double all_error = ss.err_between + ss.err_a + ss.err_b + ss.err_ab;

  const Eigen::MatrixXd sp = pooled_covariance(c, mm);
  const Eigen::MatrixXd ca = contrast_matrix(c.na());
  const Eigen::MatrixXd cb = contrast_matrix(c.nb());
  const Eigen::MatrixXd ua = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(c.na()), 1,
                                                       1.0 / std::sqrt(static_cast<double>(c.na())));
  const Eigen::MatrixXd ub = Eigen::MatrixXd::Constant(static_cast<Eigen::Index>(c.nb()), 1,
                                                       1.0 / std::sqrt(static_cast<double>(c.nb())));
  const Stratum st_a = sphericity(sp, kron(ca, ub), df_subj);
  const Stratum st_b = sphericity(sp, kron(ua, cb), df_subj);
  const Stratum st_ab = sphericity(sp, kron(ca, cb), df_subj);

  AnovaResult result;
  result.between = c.between;
  result.within_a = c.a;
  result.within_b = c.b;
  result.n_subjects = c.n();
  result.group_sizes = c.group_sizes;
  if (mixed) result.group_levels = c.group_levels;
  result.options = options;

  auto add = [&](std::vector<Factor> factors, double effect_ss, double df_num, double error_ss,
                 double df_den, const Stratum* stratum) {
    EffectResult e;
    e.name = effect_name(factors);
    e.factors = std::move(factors);
    e.ss = effect_ss;
    e.ss_error = error_ss;
    e.df_num_uncorrected = df_num;
    e.df_den_uncorrected = df_den;
    e.f = effect_ss <= 0.0 ? 0.0 : (effect_ss / df_num) / (error_ss / df_den);
    double eps = 1.0;
    if (stratum) {
      e.epsilon_gg = stratum->epsilon;
      if (df_num > 1.0) e.mauchly = stratum->mauchly;
      switch (options.correction) {
        case SphericityCorrection::GreenhouseGeisser: e.corrected = df_num > 1.0; break;
        case SphericityCorrection::None: e.corrected = false; break;
        case SphericityCorrection::Auto:
          e.corrected = df_num > 1.0 && stratum->mauchly.p < options.alpha;
          break;
      }
      if (e.corrected) eps = stratum->epsilon;
    }
    e.df_num = eps * df_num;
    e.df_den = eps * df_den;
    e.p = e.f <= 0.0 ? 1.0 : f_upper_tail(e.f, e.df_num, e.df_den);
    e.ges = effect_ss <= 0.0 ? 0.0 : effect_ss / (effect_ss + all_error);
    e.significant = e.p < options.alpha;
    result.effects.push_back(std::move(e));
  };

  const Factor A = c.a, B = c.b;
  if (mixed) {
    const Factor G = *c.between;
    add({G}, ss.g, g - 1.0, ss.err_between, df_subj, nullptr);
    add({A}, ss.a, da, ss.err_a, df_subj * da, &st_a);
    add({B}, ss.b, db, ss.err_b, df_subj * db, &st_b);
    add({G, A}, ss.ga, (g - 1.0) * da, ss.err_a, df_subj * da, &st_a);
    add({G, B}, ss.gb, (g - 1.0) * db, ss.err_b, df_subj * db, &st_b);
    add({A, B}, ss.ab, da * db, ss.err_ab, df_subj * da * db, &st_ab);
    add({G, A, B}, ss.gab, (g - 1.0) * da * db, ss.err_ab, df_subj * da * db, &st_ab);
  } else {
    add({A}, ss.a, da, ss.err_a, df_subj * da, &st_a);
    add({B}, ss.b, db, ss.err_b, df_subj * db, &st_b);
    add({A, B}, ss.ab, da * db, ss.err_ab, df_subj * da * db, &st_ab);
  }
  return result;
}

}  // namespace

std::string_view to_string(SphericityCorrection c) {
  switch (c) {
    case SphericityCorrection::GreenhouseGeisser: return "gg";
    case SphericityCorrection::None: return "none";
    case SphericityCorrection::Auto: return "auto";
  }
  return "?";
}

SphericityCorrection parse_sphericity_correction(std::string_view text) {
  if (text == "gg" || text == "greenhouse-geisser") return SphericityCorrection::GreenhouseGeisser;
  if (text == "none") return SphericityCorrection::None;
  if (text == "auto") return SphericityCorrection::Auto;
  throw Error("unknown sphericity correction '" + std::string(text) + "' (expected gg, none or auto)");
}

bool EffectResult::involves(Factor f) const {
  return std::find(factors.begin(), factors.end(), f) != factors.end();
}

const EffectResult* AnovaResult::find(std::string_view name) const {
  for (const auto& e : effects) {
    if (e.name == name) return &e;
  }
  return nullptr;
}

const EffectResult& AnovaResult::effect(std::string_view name) const {
  if (const auto* e = find(name)) return *e;
  throw Error("no effect named '" + std::string(name) + "' in the model");
}

bool AnovaResult::has_factor(Factor f) const {
  return within_a == f || within_b == f || (between && *between == f);
}

const EffectResult& AnovaResult::main_effect(Factor f) const {
  return effect(to_string(f));
}

AnovaResult rm_anova_2way(const ScoreTable& table, Factor a, Factor b, const AnovaOptions& options) {
  return fit(detail::build_cube(table, a, b, std::nullopt), options);
}

AnovaResult mixed_anova(const ScoreTable& table, Factor between, Factor a, Factor b,
                        const AnovaOptions& options) {
  return fit(detail::build_cube(table, a, b, between), options);
}

}  // namespace cisim
