#include <cmath>

#include "doctest.h"
#include "etm/errors.hpp"
#include "etm/firing_model.hpp"

using namespace etm;

TEST_CASE("sigmoid9 hazard values and derivative") {
  const auto phi = HazardCurve::sigmoid9(0.9);
  CHECK(phi(0.0) == doctest::Approx(1.0 / (1.0 + std::exp(3.5))).epsilon(1e-14));
  CHECK(phi(0.5) == doctest::Approx(1.0 / (1.0 + std::exp(-9.0 * 0.9 * 0.5 + 3.5))).epsilon(1e-14));
  // monotone increasing, bounded by 1
  double prev = -1.0;
  for (double r = 0.0; r <= 3.0; r += 0.1) {
    CHECK(phi(r) > prev);
    CHECK(phi(r) < 1.0);
    prev = phi(r);
  }
  // derivative against central differences
  for (double r : {0.1, 0.4729, 1.0, 2.5}) {
    const double h = 1e-6;
    const double fd = (phi(r + h) - phi(r - h)) / (2 * h);
    CHECK(phi.deriv(r) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK(phi.lower_bound() > 0.0);
  CHECK(phi.upper_bound() <= 1.0);
}

TEST_CASE("sat_quad hazard values and derivative") {
  const double b_bar = 0.43 * 0.43;
  const auto phi = HazardCurve::sat_quad(b_bar);
  CHECK(phi(0.0) == doctest::Approx(0.5).epsilon(1e-15));
  const double r = 0.7;
  const double q = b_bar * r * r;
  CHECK(phi(r) == doctest::Approx(10.0 * q / (q + 1.0) + 0.5).epsilon(1e-15));
  CHECK(phi.lower_bound() == doctest::Approx(0.5));
  CHECK(phi.upper_bound() == doctest::Approx(10.5));
  for (double rr : {0.1, 0.4729, 1.0, 3.0}) {
    const double h = 1e-6;
    const double fd = (phi(rr + h) - phi(rr - h)) / (2 * h);
    CHECK(phi.deriv(rr) == doctest::Approx(fd).epsilon(1e-7));
  }
  CHECK_THROWS_AS(HazardCurve::sat_quad(-1.0), ConfigError);
}

TEST_CASE("constant hazard") {
  const auto phi = HazardCurve::constant(2.0);
  CHECK(phi(0.0) == 2.0);
  CHECK(phi(10.0) == 2.0);
  CHECK(phi.deriv(1.0) == 0.0);
  CHECK_THROWS_AS(HazardCurve::constant(0.0), ConfigError);
  CHECK_THROWS_AS(HazardCurve::constant(-1.0), ConfigError);
}

TEST_CASE("custom hazard with finite-difference derivative") {
  const auto phi = HazardCurve::custom([](double r) { return 1.0 + r * r; },
                                       nullptr, 1.0, 10.0);
  CHECK(phi(2.0) == doctest::Approx(5.0));
  CHECK(phi.deriv(2.0) == doctest::Approx(4.0).epsilon(1e-5));
  CHECK_THROWS_AS(
      HazardCurve::custom([](double) { return 1.0; }, nullptr, 0.0, 1.0),
      ConfigError);
}

TEST_CASE("refractory model S(a,r) with boundary convention") {
  const double sigma = 0.5;
  const auto m = FiringModel::refractory(sigma, HazardCurve::sat_quad(0.1849));
  const double r = 0.4729;
  const double p = m.phi()(r);
  CHECK(m.eval_S(0.0, r) == 0.0);
  CHECK(m.eval_S(sigma - 1e-12, r) == 0.0);
  CHECK(m.eval_S(sigma, r) == p);  // a = sigma counts as active
  CHECK(m.eval_S(2.0, r) == p);
  CHECK(m.sigma() == sigma);
  CHECK(m.s0() == doctest::Approx(0.5));

  // cumulative closed form and survival bounds
  CHECK(m.cumulative_S(0.3, r) == 0.0);
  CHECK(m.cumulative_S(1.7, r) == doctest::Approx(p * 1.2).epsilon(1e-14));
  CHECK(m.survival(1.7, r) == doctest::Approx(std::exp(-p * 1.2)).epsilon(1e-14));
  CHECK(m.survival(0.0, r) == 1.0);
  for (double a : {0.1, 1.0, 5.0, 30.0}) {
    const double s = m.survival(a, r);
    CHECK(s > 0.0);
    CHECK(s <= 1.0);
  }

  CHECK(m.eval_dSdr(2.0, r) == doctest::Approx(m.phi().deriv(r)));
  CHECK(m.eval_dSdr(0.2, r) == 0.0);
}

TEST_CASE("domain validation") {
  const auto m = FiringModel::refractory(1.0, HazardCurve::constant(1.0));
  CHECK_THROWS_AS(m.eval_S(-0.1, 0.5), DomainError);
  CHECK_THROWS_AS(m.eval_S(0.5, -0.1), DomainError);
  CHECK_THROWS_AS(m.eval_S(std::nan(""), 0.5), DomainError);
  CHECK_THROWS_AS(m.cumulative_S(1.0, -1.0), DomainError);
  CHECK_THROWS_AS(FiringModel::refractory(0.0, HazardCurve::constant(1.0)),
                  ConfigError);
}

TEST_CASE("custom model matches an equivalent refractory closed form") {
  const double sigma = 0.5;
  const auto phi = HazardCurve::sat_quad(0.1849);
  const auto ref = FiringModel::refractory(sigma, phi);
  const auto cus = FiringModel::custom(
      [&](double a, double r) { return a < sigma ? 0.0 : phi(r); },
      [&](double a, double r) { return a < sigma ? 0.0 : phi.deriv(r); },
      phi.lower_bound(), sigma);
  for (double a : {0.2, 0.5, 1.3, 4.0}) {
    for (double r : {0.1, 0.4729, 1.5}) {
      CHECK(cus.eval_S(a, r) == doctest::Approx(ref.eval_S(a, r)).epsilon(1e-14));
      CHECK(cus.eval_dSdr(a, r) == doctest::Approx(ref.eval_dSdr(a, r)).epsilon(1e-12));
      CHECK(cus.cumulative_S(a, r) == doctest::Approx(ref.cumulative_S(a, r)).epsilon(1e-9));
    }
  }
}

TEST_CASE("custom model finite-difference policy") {
  const auto fd_ok = FiringModel::custom(
      [](double a, double r) { return a < 1.0 ? 0.0 : 1.0 + r; }, nullptr, 1.0,
      1.0, true);
  CHECK(fd_ok.eval_dSdr(2.0, 0.5) == doctest::Approx(1.0).epsilon(1e-5));
  const auto fd_off = FiringModel::custom(
      [](double a, double r) { return a < 1.0 ? 0.0 : 1.0 + r; }, nullptr, 1.0,
      1.0, false);
  CHECK_THROWS_AS(fd_off.eval_dSdr(2.0, 0.5), ConfigError);
}

TEST_CASE("describe is informative") {
  CHECK(FiringModel::refractory(1.0, HazardCurve::sat_quad(0.1849)).describe() !=
        "");
  CHECK(FiringModel::custom([](double, double) { return 1.0; }, nullptr, 1.0,
                            1.0)
            .describe() != "");
}
