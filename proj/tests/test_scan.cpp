#include <cmath>
#include <map>
#include <set>

#include "doctest.h"
#include "etm/errors.hpp"
#include "etm/scan.hpp"
#include "etm/steady_state.hpp"

using namespace etm;

namespace {

ModelFamily sigmoid_family() {
  return [](double b) {
    return FiringModel::refractory(0.5, HazardCurve::sigmoid9(b));
  };
}

ModelFamily sat_quad_family() {
  return [](double b) {
    return FiringModel::refractory(1.0, HazardCurve::sat_quad(b * b));
  };
}

ModelFamily constant_family() {
  return [](double) {
    return FiringModel::refractory(0.5, HazardCurve::constant(2.0));
  };
}

}  // namespace

TEST_CASE("constant family scan is flat and stable") {
  const auto rows = bifurcation_scan(constant_family(), 0.1, 1.0, 60);
  REQUIRE(rows.size() == 60);
  const double expect = 2.0 / (1.0 + 0.5 * 2.0);
  for (const auto& row : rows) {
    REQUIRE(row.error.empty());
    CHECK(row.branch_id == rows[0].branch_id);
    CHECK(row.r_star == doctest::Approx(expect).epsilon(1e-10));
    CHECK(row.A_star == doctest::Approx(0.0).epsilon(1e-10));
    CHECK(row.verdict_d0 == Verdict::Stable);
    CHECK(row.verdict_dpos == Verdict::Stable);
  }
  CHECK(find_fold_points(constant_family(), rows).empty());
  CHECK(find_level_crossings(constant_family(), rows, LevelKind::A_eq_1).empty());
}

TEST_CASE("satquad family has one branch with a d0 instability window") {
  const auto fam = sat_quad_family();
  const auto rows = bifurcation_scan(fam, 0.05, 1.5, 120);
  std::set<int> branches;
  for (const auto& row : rows) {
    REQUIRE(row.error.empty());
    branches.insert(row.branch_id);
  }
  CHECK(branches.size() == 1);
  CHECK(find_fold_points(fam, rows).empty());

  const auto cr = find_level_crossings(fam, rows, LevelKind::A_eq_1);
  REQUIRE(cr.size() == 2);
  CHECK(std::abs(cr[0].b - 0.4750) <= 1e-3);
  CHECK(std::abs(cr[1].b - 1.0730) <= 1e-3);

  // d=0 verdict flips exactly across the window
  for (const auto& row : rows) {
    if (row.b > 0.49 && row.b < 1.06)
      CHECK(row.verdict_d0 == Verdict::Unstable);
    if (row.b < 0.46 || row.b > 1.09)
      CHECK(row.verdict_d0 == Verdict::Stable);
  }
}

TEST_CASE("sigmoid family folds and A=1 crossings") {
  const auto fam = sigmoid_family();
  const auto rows = bifurcation_scan(fam, 0.8, 1.7, 120);

  // one steady state outside (b1,b4), three inside
  int inside = 0, outside = 0;
  std::map<double, int> per_b;
  for (const auto& row : rows) {
    REQUIRE(row.error.empty());
    per_b[row.b]++;
  }
  for (const auto& [b, cnt] : per_b) {
    if (b > 0.94 && b < 1.52) {
      CHECK(cnt == 3);
      ++inside;
    }
    if (b < 0.92 || b > 1.54) {
      CHECK(cnt == 1);
      ++outside;
    }
  }
  CHECK(inside > 10);
  CHECK(outside > 10);

  const auto folds = find_fold_points(fam, rows);
  REQUIRE(folds.size() == 2);
  CHECK(std::abs(folds[0] - 0.9313) <= 1e-3);
  CHECK(std::abs(folds[1] - 1.5314) <= 1e-3);

  const auto cr = find_level_crossings(fam, rows, LevelKind::A_eq_1);
  REQUIRE(cr.size() == 2);
  CHECK(std::abs(cr[0].b - 0.9480) <= 1e-3);
  CHECK(std::abs(cr[1].b - 1.5301) <= 1e-3);
}

TEST_CASE("scan input validation") {
  CHECK_THROWS_AS(bifurcation_scan(constant_family(), 1.0, 0.5, 60), ConfigError);
  CHECK_THROWS_AS(bifurcation_scan(constant_family(), 0.1, 1.0, 10), ConfigError);
}

TEST_CASE("pseudo-equilibrium recursion") {
  SUBCASE("constant hazard converges in one step") {
    const auto m = FiringModel::refractory(0.5, HazardCurve::constant(2.0));
    const auto seq = pseudo_equilibrium_sequence(m, 0.9, 10);
    REQUIRE(seq.converged);
    REQUIRE(seq.fixed_point.has_value());
    CHECK(*seq.fixed_point == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(seq.x[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  SUBCASE("satquad contraction reaches the steady activity") {
    const auto m = FiringModel::refractory(1.0, HazardCurve::sat_quad(0.43 * 0.43));
    const auto seq = pseudo_equilibrium_sequence(m, 0.6, 200);
    REQUIRE(seq.converged);
    REQUIRE(seq.fixed_point.has_value());
    CHECK(std::abs(*seq.fixed_point - 0.4729) <= 1e-4);
    const double x = *seq.fixed_point;
    CHECK(std::abs(x * integral_I(m, x) - 1.0) <= 1e-8);
    // recursion is recomputable from the stored iterates
    for (std::size_t k = 1; k < seq.x.size(); ++k)
      CHECK(seq.x[k] == doctest::Approx(1.0 / integral_I(m, seq.x[k - 1])).epsilon(1e-14));
    // limit matches the certified steady state
    const auto st = find_steady_states(m)[0];
    CHECK(std::abs(x - st.r_star) <= 1e-6);
  }
  SUBCASE("sigmoid middle branch repels the iteration") {
    const auto m = FiringModel::refractory(0.5, HazardCurve::sigmoid9(1.2));
    const auto states = find_steady_states(m);
    REQUIRE(states.size() == 3);
    REQUIRE(std::abs(states[1].slope_inv_I) > 1.0);
    const auto seq = pseudo_equilibrium_sequence(m, states[1].r_star + 1e-4, 500);
    if (seq.converged) {
      REQUIRE(seq.fixed_point.has_value());
      CHECK(std::abs(*seq.fixed_point - states[1].r_star) > 1e-3);
    } else {
      CHECK(std::abs(seq.x.back() - states[1].r_star) > 1e-3);
    }
  }
  SUBCASE("input validation") {
    const auto m = FiringModel::refractory(0.5, HazardCurve::constant(2.0));
    CHECK_THROWS_AS(pseudo_equilibrium_sequence(m, -0.1, 10), ConfigError);
    CHECK_THROWS_AS(pseudo_equilibrium_sequence(m, 0.5, 0), ConfigError);
  }
}

TEST_CASE("local convergence follows the slope criterion") {
  // stable outer branches attract, the middle branch repels
  const auto m = FiringModel::refractory(0.5, HazardCurve::sigmoid9(1.2));
  const auto states = find_steady_states(m);
  REQUIRE(states.size() == 3);
  for (const auto& st : states) {
    const bool contracting = std::abs(st.slope_inv_I) < 1.0 - 1e-3;
    for (double sgn : {1.0, -1.0}) {
      const auto seq =
          pseudo_equilibrium_sequence(m, st.r_star + sgn * 1e-4, 2000);
      const bool came_back =
          seq.converged && std::abs(*seq.fixed_point - st.r_star) <= 1e-6;
      CHECK(came_back == contracting);
    }
  }
}
