#include <cmath>
#include <complex>
#include <random>

#include "doctest.h"
#include "etm/errors.hpp"
#include "etm/linear_kernel.hpp"
#include "etm/steady_state.hpp"

using namespace etm;
using cplx = std::complex<double>;

namespace {

FiringModel sat_quad_model() {
  return FiringModel::refractory(1.0, HazardCurve::sat_quad(0.43 * 0.43));
}

// u = g + 1*u with g(t) = 2e^{-t} - 1 has the closed-form solution u = e^{-t}.
double volterra_max_error(double dt) {
  const double T = 4.0;
  const std::size_t n = static_cast<std::size_t>(std::llround(T / dt)) + 1;
  VolterraProblem p;
  p.delta_t = dt;
  p.g.resize(n);
  p.h.assign(n, 1.0);
  for (std::size_t k = 0; k < n; ++k) p.g[k] = 2.0 * std::exp(-(k * dt)) - 1.0;
  const auto u = solve_volterra(p);
  double err = 0.0;
  for (std::size_t k = 0; k < n; ++k)
    err = std::max(err, std::abs(u[k] - std::exp(-(k * dt))));
  return err;
}

}  // namespace

TEST_CASE("volterra solver is second order on the exponential closed form") {
  const double e1 = volterra_max_error(0.02);
  const double e2 = volterra_max_error(0.01);
  const double e3 = volterra_max_error(0.005);
  CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.15));
  CHECK(e2 / e3 == doctest::Approx(4.0).epsilon(0.15));
  CHECK(e3 < 1e-4);
}

TEST_CASE("volterra delay term reproduces the pure recursion") {
  VolterraProblem p;
  p.delta_t = 0.1;
  const std::size_t n = 40, m = 7;
  p.d = m * p.delta_t;
  p.A_star = 0.8;
  p.g.resize(n);
  p.h.assign(n, 0.0);
  for (std::size_t k = 0; k < n; ++k) p.g[k] = std::sin(0.3 * k) + 1.0;
  const auto u = solve_volterra(p);
  for (std::size_t k = 0; k < n; ++k) {
    const double expected = p.g[k] + (k > m ? p.A_star * u[k - m] : 0.0);
    CHECK(u[k] == doctest::Approx(expected).epsilon(1e-14));
  }
}

TEST_CASE("volterra input validation") {
  VolterraProblem p;
  p.delta_t = 0.1;
  p.g.assign(10, 0.0);
  p.h.assign(9, 0.0);
  CHECK_THROWS_AS(solve_volterra(p), ConfigError);
  p.h.assign(10, 0.0);
  p.d = 0.123;  // not a grid multiple
  CHECK_THROWS_AS(solve_volterra(p), ConfigError);
  p.d = 0.0;
  p.A_star = 0.5;  // implicit delayed term is not a marching problem
  CHECK_THROWS_AS(solve_volterra(p), ConfigError);
}

TEST_CASE("build_G satisfies the zero-mass relation") {
  const auto m = sat_quad_model();
  const auto s = find_steady_states(m)[0];
  const auto G = build_G(m, s);
  CHECK(G.atom_at_zero == doctest::Approx(s.A_star));
  CHECK(G.density(0.5) == 0.0);  // below the refractory period
  CHECK(G.density(2.0) < 0.0);
  CHECK(G.support_bound > m.sigma());
}

TEST_CASE("kernel h0 decays with a credible exponential envelope") {
  const auto m = sat_quad_model();
  const auto s = find_steady_states(m)[0];
  const auto k = kernel_h0(m, s);
  REQUIRE(k.values.size() > 100);
  CHECK(k.decaying);
  CHECK(k.decay_rate_fit > 0.0);
  CHECK(k.l1_partial < 10.0);
  CHECK(k.l1_tail_bound < 1e-3);

  // independent envelope fit on decay-range local maxima (above the
  // discretization floor); relative residual <= 10%
  const double floor_est = std::abs(k.values.back());
  std::vector<std::pair<double, double>> pts;
  for (std::size_t i = 1; i + 1 < k.values.size(); ++i) {
    const double v = std::abs(k.values[i]);
    if (v <= std::max(1e-13, 100.0 * floor_est)) continue;
    if (v >= std::abs(k.values[i - 1]) && v >= std::abs(k.values[i + 1]))
      pts.emplace_back(i * k.delta_t, std::log(v));
  }
  REQUIRE(pts.size() >= 3);
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) { sx += x; sy += y; sxx += x * x; sxy += x * y; }
  const double np = pts.size();
  const double slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
  const double icpt = (sy - slope * sx) / np;
  CHECK(slope < 0.0);
  double rss = 0.0;
  for (auto& [x, y] : pts) rss += (y - slope * x - icpt) * (y - slope * x - icpt);
  const double span = std::abs(slope) * (pts.back().first - pts.front().first);
  CHECK(std::sqrt(rss / np) <= 0.1 * span);
}

TEST_CASE("laplace transform at zero matches the slope of 1/I") {
  const auto m = sat_quad_model();
  const auto s = find_steady_states(m)[0];
  const cplx a = laplace_h0_refractory(m, s, 0.0);
  CHECK(a.real() == doctest::Approx(s.slope_inv_I).epsilon(1e-12));
  CHECK(a.imag() == doctest::Approx(0.0));
  const cplx b = laplace_h0_general(m, s, 0.0);
  CHECK(std::abs(b - cplx(s.slope_inv_I, 0.0)) <= 1e-6);
}

TEST_CASE("laplace oracles agree off the real axis") {
  const auto models = {
      sat_quad_model(),
      FiringModel::refractory(0.5, HazardCurve::sigmoid9(0.9)),
      FiringModel::refractory(0.5, HazardCurve::constant(1.0)),
  };
  std::mt19937 rng(12345);
  for (const auto& m : models) {
    const auto s = find_steady_states(m)[0];
    std::uniform_real_distribution<double> re(-0.3 * m.s0(), 3.0), im(-20.0, 20.0);
    for (int i = 0; i < 20; ++i) {
      const cplx z(re(rng), im(rng));
      const cplx a = laplace_h0_refractory(m, s, z);
      const cplx b = laplace_h0_general(m, s, z);
      CAPTURE(z.real());
      CAPTURE(z.imag());
      CHECK(std::abs(a - b) <= 1e-6);
    }
  }
}

TEST_CASE("laplace of the sampled trace matches the closed form") {
  const auto m = sat_quad_model();
  const auto s = find_steady_states(m)[0];
  const auto k = kernel_h0(m, s);
  for (const cplx z : {cplx(1.0, 0.0), cplx(0.5, 5.0), cplx(2.0, -3.0)}) {
    // the trace carries the density part only; the closed form adds the atom
    const cplx tr = laplace_of_trace(k, z) + s.A_star;
    const cplx cf = laplace_h0_refractory(m, s, z);
    CHECK(std::abs(tr - cf) <= 1e-3);
  }
}

TEST_CASE("laplace domain guard") {
  const auto m = sat_quad_model();
  const auto s = find_steady_states(m)[0];
  CHECK_THROWS_AS(laplace_h0_general(m, s, cplx(-0.96 * m.s0(), 0.0)), DomainError);
}
