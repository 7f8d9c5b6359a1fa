#ifndef ETM_LINEAR_KERNEL_HPP
#define ETM_LINEAR_KERNEL_HPP

#include <complex>
#include <functional>
#include <vector>

#include "etm/firing_model.hpp"
#include "etm/steady_state.hpp"

namespace etm {

/// Signed measure with an atom at zero plus an absolutely continuous part,
/// used for the linearization measure G = -dS/dr(.,r*) n* + A* delta_0.
struct MeasureWithAtom {
  double atom_at_zero = 0.0;
  std::function<double(double)> density;
  double support_bound = 0.0;
};

/// Sampled kernel h0 on {0, dt, ..., T} with its fitted exponential envelope.
struct KernelTrace {
  double delta_t = 0.0;
  std::vector<double> values;
  double decay_rate_fit = 0.0;   // mu in |h0| <= C exp(-mu t); <= 0 means no decay
  double l1_partial = 0.0;       // trapezoid of |h0| on [0,T]
  double l1_tail_bound = 0.0;    // envelope tail / mu; +inf when the fit fails
  bool decaying = true;
};

/// u(t) = g(t) + (h*u)(t) + A* u(t-d) 1_{t>d} on an aligned uniform grid.
struct VolterraProblem {
  std::vector<double> g;  // samples on {0, dt, ..., T}
  std::vector<double> h;  // same grid
  double A_star = 0.0;
  double d = 0.0;         // must be an integer multiple of delta_t (or zero)
  double delta_t = 0.0;
};

// Marching solution with trapezoidal convolution quadrature; second order
// between delay multiples.
std::vector<double> solve_volterra(const VolterraProblem& p);

MeasureWithAtom build_G(const FiringModel& model, const SteadyState& steady);

// h0(t) via the undelayed Volterra equation of the frozen-r* linear system;
// the atom of G enters the forcing analytically. delta_t/T <= 0 pick defaults
// (sigma/200 and 40*max(sigma, 1/s0)).
KernelTrace kernel_h0(const FiringModel& model, const SteadyState& steady,
                      double delta_t = 0.0, double T = 0.0);

// hat(h0)(z) + A* = A* z / (z + phi(1 - exp(-sigma z))), removable
// singularity at z = 0 patched (value A*/(1+sigma*phi)).
std::complex<double> laplace_h0_refractory(const FiringModel& model,
                                           const SteadyState& steady,
                                           std::complex<double> z);

// hat(h0)(z) + A* by the quadrature ratio formula, valid for
// Re(z) > -s0 + 0.05 s0.
std::complex<double> laplace_h0_general(const FiringModel& model,
                                        const SteadyState& steady,
                                        std::complex<double> z);

// Trapezoid of h0(t) exp(-z t) over the trace plus the fitted tail estimate.
std::complex<double> laplace_of_trace(const KernelTrace& k, std::complex<double> z);

}  // namespace etm

#endif
