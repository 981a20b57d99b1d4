#include <catch_amalgamated.hpp>

#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <json.hpp>

#include "cisim/stats/anova.hpp"
#include "cisim/stats/descriptives.hpp"
#include "cisim/stats/distributions.hpp"
#include "cisim/stats/epsilon.hpp"
#include "cisim/stats/posthoc.hpp"
#include "cisim/stats/report.hpp"
#include "support.hpp"

using namespace cisim;
using Catch::Matchers::WithinAbs;
using Catch::Matchers::WithinRel;
using nlohmann::json;

namespace {

const json& reference() {
  static const json j = [] {
    std::ifstream in(test::fixture_path("reference.json"));
    return json::parse(in);
  }();
  return j;
}

const ContrastResult* find_contrast(const TukeyResult& t, const std::string& a, const std::string& b) {
  for (const auto& c : t.contrasts) {
    if ((c.label_a == a && c.label_b == b) || (c.label_a == b && c.label_b == a)) return &c;
  }
  return nullptr;
}

void check_effects(const AnovaResult& fit, const json& effects) {
  for (const auto& [name, ref] : effects.items()) {
    INFO("effect " << name);
    const auto& e = fit.effect(name);
    CHECK_THAT(e.f, WithinRel(ref["F"].get<double>(), 1e-6));
    CHECK(e.df_num_uncorrected == ref["df_num"].get<double>());
    CHECK(e.df_den_uncorrected == ref["df_den"].get<double>());
    CHECK_THAT(e.ges, WithinRel(ref["ges"].get<double>(), 1e-6));
    if (ref["epsilon"].is_null()) {
      CHECK_FALSE(e.epsilon_gg.has_value());
      CHECK_THAT(e.p, WithinRel(ref["p_uncorrected"].get<double>(), 1e-6));
    } else {
      REQUIRE(e.epsilon_gg.has_value());
      CHECK_THAT(*e.epsilon_gg, WithinRel(ref["epsilon"].get<double>(), 1e-6));
      CHECK_THAT(e.p, WithinRel(ref["p_gg"].get<double>(), 1e-5));
    }
  }
}

void check_tukey(const TukeyResult& t, const json& ref) {
  for (const auto& r : ref) {
    const auto a = r["level_a"].get<std::string>(), b = r["level_b"].get<std::string>();
    INFO(a << " vs " << b);
    const auto* c = find_contrast(t, a, b);
    REQUIRE(c != nullptr);
    const double sign = c->label_a == a ? 1.0 : -1.0;
    CHECK_THAT(sign * c->estimate, WithinRel(r["estimate"].get<double>(), 1e-6));
    CHECK_THAT(c->se, WithinRel(r["se"].get<double>(), 1e-6));
    CHECK(c->df == r["df"].get<double>());
    CHECK_THAT(c->p_adjusted, WithinAbs(r["p_adjusted"].get<double>(), 1e-4));
    CHECK_THAT(c->p_unadjusted, WithinAbs(r["p_unadjusted"].get<double>(), 1e-8));
  }
}

Matrix room_marginals(const ScoreTable& table) {
  std::map<std::string, std::vector<double>> sums;
  for (const auto& r : table.rows) {
    auto& v = sums[r.subject];
    v.resize(4, 0.0);
    v[static_cast<int>(r.room)] += r.rau / 6.0;
  }
  Matrix m;
  for (auto& [s, v] : sums) m.push_back(v);
  return m;
}

}  // namespace

TEST_CASE("repeated-measures fixture matches the reference implementation") {
  const auto table = read_score_table(test::fixture_path("rm_scores.tsv"));
  const auto fit = rm_anova_2way(table, Factor::Room, Factor::Channels);
  CHECK(fit.n_subjects == 21);
  REQUIRE(fit.effects.size() == 3);
  check_effects(fit, reference()["rm"]["effects"]);
  check_tukey(emm_tukey(table, fit, Factor::Room), reference()["rm"]["tukey"]["room"]);
  check_tukey(emm_tukey(table, fit, Factor::Channels), reference()["rm"]["tukey"]["channels"]);
}

TEST_CASE("gg_epsilon of room marginals matches the reference") {
  const auto table = read_score_table(test::fixture_path("rm_scores.tsv"));
  CHECK_THAT(gg_epsilon(room_marginals(table)),
             WithinAbs(reference()["rm"]["epsilon_room_marginal"].get<double>(), 1e-8));
}

TEST_CASE("mixed fixture matches the reference implementation") {
  const auto table = read_score_table(test::fixture_path("mixed_scores.tsv"));
  const auto fit = mixed_anova(table, Factor::Location, Factor::Room, Factor::Channels);
  REQUIRE(fit.effects.size() == 7);
  CHECK(fit.group_sizes == std::vector<std::size_t>{21, 9});
  check_effects(fit, reference()["mixed"]["effects"]);
  check_tukey(emm_tukey(table, fit, Factor::Location), reference()["mixed"]["tukey"]["location"]);
}

TEST_CASE("two conditions give epsilon one") {
  CHECK(gg_epsilon({{1, 2}, {3, 7}, {2, 2}, {5, 1}}) == 1.0);
  CHECK(gg_epsilon_from_covariance({{4, 1}, {1, 9}}) == 1.0);
}

TEST_CASE("epsilon lies within its bounds and equals one under compound symmetry") {
  const Matrix cs{{2, 1, 1}, {1, 2, 1}, {1, 1, 2}};
  CHECK_THAT(gg_epsilon_from_covariance(cs), WithinAbs(1.0, 1e-12));
  const Matrix skewed{{10, 0, 0}, {0, 1, 0}, {0, 0, 0.1}};
  const double e = gg_epsilon_from_covariance(skewed);
  CHECK(e >= 0.5);
  CHECK(e < 1.0);
  // contrast route agrees with the double-centered form
  const auto c = orthonormal_contrasts(3);
  Matrix v(2, std::vector<double>(2, 0.0));
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j)
      for (int r = 0; r < 3; ++r)
        for (int s = 0; s < 3; ++s) v[i][j] += c[r][i] * skewed[r][s] * c[s][j];
  CHECK_THAT(gg_epsilon_from_contrast_covariance(v), WithinAbs(e, 1e-12));
}

TEST_CASE("orthonormal contrasts") {
  const auto c = orthonormal_contrasts(5);
  REQUIRE(c.size() == 5);
  for (std::size_t i = 0; i < 4; ++i) {
    double col_sum = 0.0;
    for (std::size_t r = 0; r < 5; ++r) col_sum += c[r][i];
    CHECK_THAT(col_sum, WithinAbs(0.0, 1e-12));
    for (std::size_t j = 0; j < 4; ++j) {
      double dot = 0.0;
      for (std::size_t r = 0; r < 5; ++r) dot += c[r][i] * c[r][j];
      CHECK_THAT(dot, WithinAbs(i == j ? 1.0 : 0.0, 1e-12));
    }
  }
}

TEST_CASE("Mauchly test") {
  const auto sphere = mauchly_test({{2, 0}, {0, 2}}, 20);
  CHECK_THAT(sphere.w, WithinAbs(1.0, 1e-12));
  CHECK_THAT(sphere.p, WithinAbs(1.0, 1e-9));
  CHECK(sphere.df == 2.0);
  const auto lopsided = mauchly_test({{10, 0}, {0, 0.1}}, 20);
  CHECK(lopsided.w < 0.2);
  CHECK(lopsided.p < 0.001);
}

TEST_CASE("corrected df follow epsilon times the uncorrected df") {
  const auto table = test::random_score_table(21, 3);
  const auto fit = rm_anova_2way(table, Factor::Room, Factor::Channels);
  for (const auto& e : fit.effects) {
    REQUIRE(e.epsilon_gg.has_value());
    CHECK_THAT(e.df_num, WithinRel(*e.epsilon_gg * e.df_num_uncorrected, 1e-12));
    CHECK_THAT(e.df_den, WithinRel(*e.epsilon_gg * e.df_den_uncorrected, 1e-12));
    CHECK(e.corrected);
  }
  CHECK(fit.effect("room").df_num_uncorrected == 3);
  CHECK(fit.effect("room").df_den_uncorrected == 60);
  CHECK(fit.effect("channels").df_den_uncorrected == 100);
  CHECK(fit.effect("room:channels").df_num_uncorrected == 15);
}

TEST_CASE("no correction and automatic correction") {
  const auto table = test::random_score_table(21, 3);
  const auto none = rm_anova_2way(table, Factor::Room, Factor::Channels, {SphericityCorrection::None});
  const auto gg = rm_anova_2way(table, Factor::Room, Factor::Channels);
  const auto automatic = rm_anova_2way(table, Factor::Room, Factor::Channels, {SphericityCorrection::Auto});
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(none.effects[i].f == gg.effects[i].f);
    CHECK(none.effects[i].df_num == none.effects[i].df_num_uncorrected);
    CHECK_FALSE(none.effects[i].corrected);
    if (gg.effects[i].f > 4.0) CHECK(none.effects[i].p <= gg.effects[i].p);
    const auto& e = automatic.effects[i];
    REQUIRE(e.mauchly.has_value());
    CHECK(e.corrected == (e.mauchly->p < 0.05));
  }
  CHECK(parse_sphericity_correction("gg") == SphericityCorrection::GreenhouseGeisser);
  CHECK(parse_sphericity_correction("auto") == SphericityCorrection::Auto);
  CHECK_THROWS(parse_sphericity_correction("hf"));
}

TEST_CASE("F statistics are invariant to affine score transforms") {
  const auto table = test::random_score_table(12, 11);
  auto scaled = table;
  for (auto& r : scaled.rows) r.rau = -3.7 * r.rau + 120.0;
  const auto a = rm_anova_2way(table, Factor::Room, Factor::Channels);
  const auto b = rm_anova_2way(scaled, Factor::Room, Factor::Channels);
  for (std::size_t i = 0; i < a.effects.size(); ++i) {
    CHECK_THAT(b.effects[i].f, WithinRel(a.effects[i].f, 1e-9));
    CHECK_THAT(b.effects[i].p, WithinRel(a.effects[i].p, 1e-9));
  }
}

TEST_CASE("a pure group shift produces no interaction with location") {
  auto table = test::random_score_table(8, 21, Location::Remote, 0.0, "r");
  auto shifted = table;
  for (auto& r : shifted.rows) {
    r.subject = "p" + r.subject;
    r.location = Location::InPerson;
    r.rau += 10.0;
  }
  table.rows.insert(table.rows.end(), shifted.rows.begin(), shifted.rows.end());
  const auto fit = mixed_anova(table, Factor::Location, Factor::Room, Factor::Channels);
  CHECK(fit.effect("location:room").f < 1e-9);
  CHECK(fit.effect("location:channels").f < 1e-9);
  CHECK(fit.effect("location:room:channels").f < 1e-9);
  CHECK(fit.effect("location").f > 1.0);
}

TEST_CASE("design validation") {
  auto table = test::random_score_table(5, 1);
  SECTION("constant data") {
    for (auto& r : table.rows) r.rau = 50.0;
    CHECK_THROWS_AS(rm_anova_2way(table, Factor::Room, Factor::Channels), DesignError);
  }
  SECTION("missing cell") {
    table.rows.pop_back();
    CHECK_THROWS_AS(rm_anova_2way(table, Factor::Room, Factor::Channels), DesignError);
  }
  SECTION("duplicate cell") {
    table.rows.push_back(table.rows.front());
    CHECK_THROWS_AS(rm_anova_2way(table, Factor::Room, Factor::Channels), DesignError);
  }
  SECTION("same factor twice") {
    CHECK_THROWS_AS(rm_anova_2way(table, Factor::Room, Factor::Room), DesignError);
  }
  SECTION("single group in a mixed design") {
    CHECK_THROWS_AS(mixed_anova(table, Factor::Location, Factor::Room, Factor::Channels), DesignError);
  }
  SECTION("subject in two groups") {
    auto other = test::random_score_table(5, 2, Location::InPerson, 0.0, "q");
    other.rows.front().subject = "s0";
    table.rows.insert(table.rows.end(), other.rows.begin(), other.rows.end());
    CHECK_THROWS_AS(mixed_anova(table, Factor::Location, Factor::Room, Factor::Channels), DesignError);
  }
  SECTION("empty table") {
    CHECK_THROWS_AS(rm_anova_2way(ScoreTable{}, Factor::Room, Factor::Channels), DesignError);
  }
}

TEST_CASE("tukey with two levels equals the unadjusted t test") {
  auto table = test::random_score_table(10, 4).filter([](const ScoreRow& r) { return r.room == Room::Office || r.room == Room::Lecture; });
  const auto fit = rm_anova_2way(table, Factor::Room, Factor::Channels);
  const auto t = emm_tukey(table, fit, Factor::Room);
  REQUIRE(t.contrasts.size() == 1);
  CHECK_THAT(t.contrasts[0].p_adjusted, WithinAbs(t.contrasts[0].p_unadjusted, 1e-7));
  CHECK_THROWS(emm_tukey(table, fit, Factor::Location));
}

TEST_CASE("studentized range distribution") {
  // k = 2: Q = sqrt(2) |T|
  for (double df : {5.0, 20.0, 60.0}) {
    for (double t : {0.5, 1.5, 3.0}) {
      CHECK_THAT(studentized_range_upper_tail(std::sqrt(2.0) * t, 2, df), WithinAbs(t_two_sided(t, df), 1e-7));
    }
  }
  // tabulated 0.95 quantiles
  CHECK_THAT(studentized_range_cdf(3.578, 3, 20), WithinAbs(0.95, 5e-4));
  CHECK_THAT(studentized_range_cdf(4.232, 5, 20), WithinAbs(0.95, 5e-4));
  CHECK_THAT(studentized_range_cdf(3.314, 3, std::numeric_limits<double>::infinity()), WithinAbs(0.95, 5e-4));
}

TEST_CASE("distribution tails") {
  CHECK_THAT(f_upper_tail(4.0, 1.0, 10.0), WithinAbs(t_two_sided(2.0, 10.0), 1e-12));
  CHECK_THAT(chi_square_upper_tail(3.841458820694124, 1.0), WithinAbs(0.05, 1e-9));
  CHECK(f_upper_tail(0.0, 2.0, 10.0) == 1.0);
}

TEST_CASE("summarize_conditions") {
  ScoreTable t;
  t.rows.push_back({"a", Location::Remote, Room::Office, 8, 0.0, 40.0});
  t.rows.push_back({"b", Location::Remote, Room::Office, 8, 0.0, 60.0});
  t.rows.push_back({"a", Location::Remote, Room::Anechoic, 8, 0.0, 70.0});
  const auto s = summarize_conditions(t);
  REQUIRE(s.size() == 2);
  CHECK(s[0].room == Room::Anechoic);
  CHECK(s[0].single);
  CHECK(s[0].sd == 0.0);
  CHECK(s[1].n == 2);
  CHECK(s[1].mean == 50.0);
  CHECK_THAT(s[1].sd, WithinAbs(14.142135623730951, 1e-12));
  CHECK(s[1].formatted() == "50.0 ± 14.1%");
  const auto ranges = condition_ranges(s);
  CHECK_FALSE(ranges.empty());
}

TEST_CASE("report formatting") {
  EffectResult e;
  e.name = "room";
  e.df_num = 1.8;
  e.df_den = 35.8;
  e.f = 97.0;
  e.p = 1e-9;
  e.ges = 0.415;
  CHECK(format_effect(e) == "F(1.8, 35.8) = 97.0, p < 0.001, ges = 0.415");
  const auto table = read_score_table(test::fixture_path("rm_scores.tsv"));
  const auto fit = rm_anova_2way(table, Factor::Room, Factor::Channels);
  const auto tsv = anova_to_tsv(fit);
  CHECK(tsv.size() == 3);
  CHECK(tsv.get(0, "effect") == "room");
  CHECK_FALSE(format_report(fit, {emm_tukey(table, fit, Factor::Room)}, summarize_conditions(table)).empty());
}
