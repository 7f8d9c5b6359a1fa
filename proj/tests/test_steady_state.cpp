#include <cmath>

#include "doctest.h"
#include "etm/errors.hpp"
#include "etm/steady_state.hpp"

using namespace etm;

namespace {
FiringModel sat_quad_model() {
  return FiringModel::refractory(1.0, HazardCurve::sat_quad(0.43 * 0.43));
}
}  // namespace

TEST_CASE("integral_I closed form for the refractory family") {
  const auto m = FiringModel::refractory(0.5, HazardCurve::constant(2.0));
  CHECK(integral_I(m, 0.7) == doctest::Approx(0.5 + 0.5).epsilon(1e-14));
  const auto mq = sat_quad_model();
  const double r = 0.4729;
  CHECK(integral_I(mq, r) ==
        doctest::Approx(1.0 + 1.0 / mq.phi()(r)).epsilon(1e-14));
}

TEST_CASE("integral_I quadrature agrees with the closed form") {
  const double sigma = 0.5;
  const auto phi = HazardCurve::sigmoid9(0.9);
  const auto ref = FiringModel::refractory(sigma, phi);
  const auto cus = FiringModel::custom(
      [&](double a, double r) { return a < sigma ? 0.0 : phi(r); },
      [&](double a, double r) { return a < sigma ? 0.0 : phi.deriv(r); },
      phi.lower_bound(), sigma);
  for (double r : {0.1, 0.5, 1.0})
    CHECK(integral_I(cus, r) == doctest::Approx(integral_I(ref, r)).epsilon(1e-8));
}

TEST_CASE("unique steady state of the satquad model") {
  const auto m = sat_quad_model();
  const auto states = find_steady_states(m);
  REQUIRE(states.size() == 1);
  const auto& s = states[0];
  CHECK(s.r_star == doctest::Approx(0.4729).epsilon(1e-3));
  CHECK(s.A_star == doctest::Approx(0.8500).epsilon(1e-3));
  CHECK(s.slope_inv_I == doctest::Approx(0.4481).epsilon(1e-3));
  CHECK(s.phi_at_r == doctest::Approx(m.phi()(s.r_star)).epsilon(1e-12));
  CHECK(std::abs(s.mass_residual) <= 1e-10);
  CHECK(std::abs(s.r_star * integral_I(m, s.r_star) - 1.0) <= 1e-10);
  CHECK_FALSE(s.fold_suspect);
}

TEST_CASE("constant hazard steady state in closed form") {
  const double sigma = 0.5, p = 2.0;
  const auto m = FiringModel::refractory(sigma, HazardCurve::constant(p));
  const auto states = find_steady_states(m);
  REQUIRE(states.size() == 1);
  CHECK(states[0].r_star == doctest::Approx(p / (1.0 + sigma * p)).epsilon(1e-12));
  CHECK(states[0].A_star == doctest::Approx(0.0).epsilon(1e-12));
  CHECK(states[0].slope_inv_I == doctest::Approx(0.0).epsilon(1e-12));
}

TEST_CASE("three steady states on the sigmoid branch overlap") {
  const auto m = FiringModel::refractory(0.5, HazardCurve::sigmoid9(1.2));
  const auto states = find_steady_states(m);
  REQUIRE(states.size() == 3);
  CHECK(states[0].r_star < states[1].r_star);
  CHECK(states[1].r_star < states[2].r_star);
  for (const auto& s : states) {
    CHECK(std::abs(s.r_star * integral_I(m, s.r_star) - 1.0) <= 1e-10);
    CHECK(std::abs(s.mass_residual) <= 1e-10);
  }
  // middle branch has |slope| > 1 (unstable by the bisector picture)
  CHECK(std::abs(states[1].slope_inv_I) > 1.0);
  CHECK(std::abs(states[0].slope_inv_I) < 1.0);
  CHECK(std::abs(states[2].slope_inv_I) < 1.0);
}

TEST_CASE("single state outside the sigmoid fold window") {
  const auto lo = FiringModel::refractory(0.5, HazardCurve::sigmoid9(0.85));
  CHECK(find_steady_states(lo).size() == 1);
  const auto hi = FiringModel::refractory(0.5, HazardCurve::sigmoid9(1.65));
  CHECK(find_steady_states(hi).size() == 1);
}

TEST_CASE("slope cross-check against the refractory closed form") {
  const auto m = sat_quad_model();
  const auto s = find_steady_states(m)[0];
  const double phi = m.phi()(s.r_star);
  const double closed = s.A_star / (1.0 + m.sigma() * phi);
  CHECK(s.slope_inv_I == doctest::Approx(closed).epsilon(1e-8));
}

TEST_CASE("density and A_star quadrature identities") {
  const auto m = sat_quad_model();
  const auto s = find_steady_states(m)[0];
  CHECK(density_n_star(m, s.r_star, 0.0) == doctest::Approx(s.r_star));
  // n*(a) = r* exp(-phi (a - sigma)_+)
  const double phi = m.phi()(s.r_star);
  CHECK(density_n_star(m, s.r_star, 2.5) ==
        doctest::Approx(s.r_star * std::exp(-phi * 1.5)).epsilon(1e-12));
  // A* against an independent trapezoid of dS/dr times the steady density,
  // starting at sigma where the integrand switches on
  const double a_max = default_a_max(m);
  const int n = 200000;
  const double h = (a_max - m.sigma()) / n;
  double acc = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double a = m.sigma() + i * h;
    acc += m.eval_dSdr(a, s.r_star) * density_n_star(m, s.r_star, a) *
           ((i == 0 || i == n) ? 0.5 : 1.0);
  }
  CHECK(compute_A_star(m, s.r_star) == doctest::Approx(acc * h).epsilon(1e-6));
}

TEST_CASE("scan parameter validation") {
  const auto m = sat_quad_model();
  CHECK_THROWS_AS(find_steady_states(m, 0.0, 50), ConfigError);
}
