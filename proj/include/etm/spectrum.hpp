#ifndef ETM_SPECTRUM_HPP
#define ETM_SPECTRUM_HPP

#include <complex>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "etm/firing_model.hpp"
#include "etm/linear_kernel.hpp"
#include "etm/steady_state.hpp"

namespace etm {

using cplx = std::complex<double>;

struct Rect {
  double re_lo = 0, re_hi = 0, om_lo = 0, om_hi = 0;
  double width() const { return re_hi - re_lo; }
  double height() const { return om_hi - om_lo; }
  bool contains(cplx z, double slack = 0.0) const {
    return z.real() >= re_lo - slack && z.real() <= re_hi + slack &&
           z.imag() >= om_lo - slack && z.imag() <= om_hi + slack;
  }
};

struct ComplexRoot {
  cplx z;
  double residual = 0.0;
  int newton_iters = 0;
  Rect region;
  bool unrefined = false;
};

/// Characteristic function whose zeros are the linearized eigenvalues.
/// RefractoryEntire uses F(z) = exp(zd)(z + phi(1-exp(-sigma z)))/z - A*,
/// entire in z (spurious common zero at the origin removed analytically).
/// GeneralQuadrature uses Phi_d(z) = 1 - exp(-zd)(hat(h0)(z)+A*), restricted
/// to the transform half-plane.
class CharFunction {
 public:
  enum class Mode { RefractoryEntire, GeneralQuadrature };

  CharFunction(const FiringModel& model, const SteadyState& steady, double d,
               Mode mode);
  // Picks RefractoryEntire when the model allows it.
  CharFunction(const FiringModel& model, const SteadyState& steady, double d);

  cplx operator()(cplx z) const;
  Mode mode() const { return mode_; }
  double delay() const { return d_; }
  const SteadyState& steady() const { return steady_; }

  // Finest oscillation scale of the characteristic function (from e^{zd} and
  // the kernel support); boundary samples must resolve it.
  double sampling_scale() const;

 private:
  const FiringModel* model_;
  SteadyState steady_;
  double d_;
  Mode mode_;
};

using CplxFn = std::function<cplx(cplx)>;

// Zero count (with multiplicity) inside the rectangle by the argument
// principle with adaptive boundary sampling. Perturbs the rectangle (up to 5
// times) when a boundary sample sits on a zero. max_spacing > 0 caps the
// initial sample spacing (adaptive refinement alone cannot see oscillations
// far below the 64-per-edge default).
int count_roots_rect(const CplxFn& f, Rect rect, double max_spacing = 0.0);

// All zeros in the rectangle by recursive bisection plus damped Newton.
std::vector<ComplexRoot> find_roots(const CplxFn& f, Rect rect,
                                    double tol = 1e-11, double max_spacing = 0.0);

// Newton refinement from an initial guess (numerical derivative, step
// halving). Returns nullopt after 100 iterations without convergence.
std::optional<ComplexRoot> refine_root(const CplxFn& f, cplx guess, double tol = 1e-11);

// Default dominant-root search region for a delay d.
Rect default_search_region(const FiringModel& model, const SteadyState& steady,
                           double d);

// Root with maximal real part in the region; ties broken by smallest |Im|.
// Roots are reported with Im >= 0 (conjugate implied).
std::optional<ComplexRoot> dominant_root(const FiringModel& model,
                                         const SteadyState& steady, double d);
std::optional<ComplexRoot> dominant_root(const CharFunction& cf, Rect search);

enum class Verdict { Stable, Unstable, Inconclusive };
enum class Clause { Thm3_1, Thm3_2, Thm3_3, Thm5_1, Thm5_2, Thm5_3, DominantRootSign, None };

std::string to_string(Verdict v);
std::string to_string(Clause c);

struct StabilityReport {
  Verdict verdict = Verdict::Inconclusive;
  Clause clause = Clause::None;
  std::optional<ComplexRoot> dominant;
  std::string notes;
};

StabilityReport classify_stability(const FiringModel& model,
                                   const SteadyState& steady, double d,
                                   const KernelTrace* kernel = nullptr);

struct TracePoint {
  double d = 0.0;
  std::optional<ComplexRoot> root;
  std::string error;
};

std::vector<TracePoint> trace_dominant_root(const FiringModel& model,
                                            const SteadyState& steady,
                                            const std::vector<double>& d_grid);

struct CriticalDelay {
  double d = 0.0;
  double frequency = 0.0;
  bool stable_to_unstable = false;
};

std::vector<CriticalDelay> critical_delays(const FiringModel& model,
                                           const SteadyState& steady,
                                           double d_lo, double d_hi);

// Independent certification of a root against the eigenvalue problem:
// |int psi| + |boundary-condition defect| for the eigenfunction built from
// the root. Small values certify a genuine eigenvalue.
double eigenfunction_residual(const FiringModel& model, const SteadyState& steady,
                              double d, const ComplexRoot& root);

// Rightmost nonzero root of the frozen-r* linear characteristic function
// 1 - hat(h)(z) = 0 (refractory closed form), for Theorem-1-style rate checks.
std::optional<ComplexRoot> rightmost_linear_root(const FiringModel& model,
                                                 double r_bar);

}  // namespace etm

#endif
