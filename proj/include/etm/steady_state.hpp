#ifndef ETM_STEADY_STATE_HPP
#define ETM_STEADY_STATE_HPP

#include <vector>

#include "etm/firing_model.hpp"

namespace etm {

/// A certified root r* of r*I(r) = 1 with the derived equilibrium quantities.
struct SteadyState {
  double r_star = 0.0;
  double A_star = 0.0;
  double phi_at_r = 0.0;  // phi(r*), Refractory kind only
  double slope_inv_I = 0.0;
  double mass_residual = 0.0;
  bool fold_suspect = false;
};

// Truncation age: survival beyond it is below 1e-12 by the (HS) envelope.
double default_a_max(const FiringModel& model);

// I(r) = int_0^inf exp(-int_0^a S) da. Closed form sigma + 1/phi(r) for the
// refractory family; quadrature plus analytic tail bound otherwise.
double integral_I(const FiringModel& model, double r);

double compute_A_star(const FiringModel& model, double r_star);

// n*(a) = r* exp(-int_0^a S(.,r*)).
double density_n_star(const FiringModel& model, double r_star, double a);

// d/dr (1/I) at r*, by central differences on I (cross-checked against the
// refractory closed form A*/(1+sigma*phi)).
double slope_inv_I_at(const FiringModel& model, double r_star);

// Sign-scan of psi(r) = r I(r) - 1 on (0, r_max], bisection on each change.
// r_max <= 0 selects the default (1/sigma refractory, 10/sigma custom).
std::vector<SteadyState> find_steady_states(const FiringModel& model,
                                            double r_max = 0.0,
                                            int n_scan = 2000);

// Packages one certified root (all derived fields filled in).
SteadyState make_steady_state(const FiringModel& model, double r_star,
                              bool fold_suspect = false);

}  // namespace etm

#endif
