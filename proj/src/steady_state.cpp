#include "etm/steady_state.hpp"

#include <algorithm>
#include <cmath>

#include "etm/detail/hazard_walk.hpp"
#include "etm/errors.hpp"
#include "etm/quadrature.hpp"

namespace etm {

double default_a_max(const FiringModel& model) {
  return model.sigma() + std::max(50.0, 30.0 / model.s0());
}

double integral_I(const FiringModel& model, double r) {
  if (r < 0) throw DomainError("integral_I: r must be >= 0");
  if (model.kind() == FiringModel::Kind::Refractory)
    return model.sigma() + 1.0 / model.phi()(r);

  const double a_max = default_a_max(model);
  double acc = 0.0;
  detail::walk_hazard_nodes(model, r, a_max, [&](double, double w, double cum) {
    acc += w * std::exp(-cum);
  });
  // Analytic remainder under the (HS) envelope.
  acc += std::exp(-model.s0() * (a_max - model.sigma())) / model.s0();
  if (!std::isfinite(acc))
    throw NumericalError("integral_I: non-finite quadrature result");
  return acc;
}

double density_n_star(const FiringModel& model, double r_star, double a) {
  return r_star * model.survival(a, r_star);
}

double compute_A_star(const FiringModel& model, double r_star) {
  if (model.kind() == FiringModel::Kind::Refractory) {
    const double p = model.phi()(r_star);
    return r_star * model.phi().deriv(r_star) / p;
  }
  const double a_max = default_a_max(model);
  double acc = 0.0;
  detail::walk_hazard_nodes(model, r_star, a_max, [&](double a, double w, double cum) {
    acc += w * model.eval_dSdr(a, r_star) * std::exp(-cum);
  });
  return r_star * acc;
}

double slope_inv_I_at(const FiringModel& model, double r_star) {
  const double h = 1e-6;
  const double rm = std::max(0.0, r_star - h);
  const double Ip = (integral_I(model, r_star + h) - integral_I(model, rm)) /
                    (r_star + h - rm);
  const double I = integral_I(model, r_star);
  const double slope = -Ip / (I * I);
  if (model.kind() == FiringModel::Kind::Refractory) {
    const double p = model.phi()(r_star);
    const double closed = compute_A_star(model, r_star) / (1.0 + model.sigma() * p);
    if (std::abs(slope - closed) > 1e-6 * (1.0 + std::abs(closed)))
      throw NumericalError("slope_inv_I: finite-difference value disagrees with closed form");
    return closed;
  }
  return slope;
}

SteadyState make_steady_state(const FiringModel& model, double r_star,
                              bool fold_suspect) {
  SteadyState s;
  s.r_star = r_star;
  s.A_star = compute_A_star(model, r_star);
  s.phi_at_r =
      model.kind() == FiringModel::Kind::Refractory ? model.phi()(r_star) : 0.0;
  s.slope_inv_I = slope_inv_I_at(model, r_star);
  s.mass_residual = std::abs(r_star * integral_I(model, r_star) - 1.0);
  s.fold_suspect = fold_suspect;
  return s;
}

namespace {
double psi(const FiringModel& model, double r) {
  return r * integral_I(model, r) - 1.0;
}
}  // namespace

std::vector<SteadyState> find_steady_states(const FiringModel& model,
                                            double r_max, int n_scan) {
  if (n_scan < 100) throw ConfigError("find_steady_states: n_scan must be >= 100");
  if (r_max <= 0.0)
    r_max = (model.kind() == FiringModel::Kind::Refractory ? 1.0 : 10.0) /
            model.sigma();

  std::vector<double> roots;
  std::vector<double> dips;  // fold suspects: |psi| dips without sign change

  double r_prev = r_max / n_scan;
  double f_prev = psi(model, r_prev);
  if (std::abs(f_prev) <= 1e-12) roots.push_back(r_prev);
  double dip_best = 0.0, dip_val = 1e300;
  bool in_dip = false;
  for (int j = 2; j <= n_scan; ++j) {
    const double r = r_max * j / n_scan;
    const double f = psi(model, r);
    if (f == 0.0) {
      // Root exactly on a scan point; a bracketing bisection would drift.
      roots.push_back(r);
      in_dip = false;
      dip_val = 1e300;
    } else if (f_prev != 0.0 && (f_prev < 0) != (f < 0)) {
      double lo = r_prev, hi = r, flo = f_prev;
      for (int it = 0; it < 200 && hi - lo > 1e-16 * r_max; ++it) {
        const double mid = 0.5 * (lo + hi), fm = psi(model, mid);
        if (fm == 0.0) { lo = hi = mid; break; }
        if ((fm < 0) == (flo < 0)) { lo = mid; flo = fm; }
        else hi = mid;
      }
      const double root = 0.5 * (lo + hi);
      if (std::abs(psi(model, root)) > 1e-12)
        throw NumericalError("find_steady_states: bisection did not certify the root");
      roots.push_back(root);
      in_dip = false;
      dip_val = 1e300;
    } else if (std::abs(f) < 1e-8) {
      in_dip = true;
      if (std::abs(f) < dip_val) { dip_val = std::abs(f); dip_best = r; }
    } else if (in_dip) {
      dips.push_back(dip_best);
      in_dip = false;
      dip_val = 1e300;
    }
    r_prev = r;
    f_prev = f;
  }
  if (in_dip) dips.push_back(dip_best);

  // Deduplicate within 1e-9.
  std::sort(roots.begin(), roots.end());
  roots.erase(std::unique(roots.begin(), roots.end(),
                          [](double a, double b) { return std::abs(a - b) <= 1e-9; }),
              roots.end());

  std::vector<SteadyState> out;
  for (double r : roots) out.push_back(make_steady_state(model, r));
  for (double r : dips) {
    // Near a tangency the dip is close to, but not on, a certified root.
    bool near_root = false;
    for (double q : roots)
      if (std::abs(q - r) <= 1e-6) near_root = true;
    if (!near_root) out.push_back(make_steady_state(model, r, /*fold_suspect=*/true));
  }
  std::sort(out.begin(), out.end(),
            [](const SteadyState& a, const SteadyState& b) { return a.r_star < b.r_star; });

  if (out.empty() && model.kind() == FiringModel::Kind::Refractory)
    throw NumericalError(
        "find_steady_states: refractory models always have a steady state; scan found none");
  return out;
}

}  // namespace etm
