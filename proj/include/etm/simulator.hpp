#ifndef ETM_SIMULATOR_HPP
#define ETM_SIMULATOR_HPP

#include <cstddef>
#include <functional>
#include <string>
#include <vector>

#include "etm/firing_model.hpp"

namespace etm {

/// Uniform age grid with sigma on a cell edge; delta_t = delta_a (exact
/// characteristics).
struct AgeGrid {
  double delta_a = 0.0;
  std::size_t n_cells = 0;
  double a_max = 0.0;
  double cell_mid(std::size_t j) const { return (j + 0.5) * delta_a; }
};

// Adjusts delta_a so that sigma is an integer multiple of it (>= 20 cells per
// refractory period). Zero arguments pick sigma/200 and the steady-state
// truncation age.
AgeGrid make_age_grid(const FiringModel& model, double delta_a = 0.0,
                      double a_max = 0.0);

struct SimState {
  std::vector<double> mass;  // cell masses; density = mass / delta_a
  double t = 0.0;
  std::vector<double> r_history;  // ring over {t-d, ..., t}, oldest at hist_pos
  std::size_t hist_pos = 0;
  std::size_t delay_steps = 0;
  double total_mass = 1.0;
  double renorm_factor = 1.0;
  bool renorm_warning = false;

  double r_delayed() const { return r_history[hist_pos]; }
  double r_current() const {
    return r_history[(hist_pos + delay_steps) % r_history.size()];
  }
};

struct ActivityTrace {
  double delta_t = 0.0;
  std::vector<double> values;  // r on {0, delta_t, ...}
  double d = 0.0;
  std::string meta;
  double duration() const {
    return values.empty() ? 0.0 : (values.size() - 1) * delta_t;
  }
};

// Cell masses by midpoint sampling of n0, renormalized to unit mass
// (renorm_warning set when the factor deviates from 1 by more than 1e-3);
// delay history filled from r0 on [-d, 0]. d must sit on the grid.
SimState init_state(const AgeGrid& grid,
                    const std::function<double(double)>& n0,
                    const std::function<double(double)>& r0, double d);

// One conservative step with the delayed activity from the history ring:
// discharge p_j = m_j(1 - exp(-S(a_j, r(t-d)) dt)), survivors shift right
// (absorbing tail cell at a_max), boundary cell collects sum(p), and
// r(t+dt) = sum(p)/dt enters the ring. step() runs the OpenMP cell kernel,
// step_serial() the reference loop; both are bitwise identical.
void step(SimState& state, const FiringModel& model, const AgeGrid& grid);
void step_serial(SimState& state, const FiringModel& model, const AgeGrid& grid);

struct SimResult {
  ActivityTrace trace;
  SimState state;
  AgeGrid grid;
};

// Full nonlinear run on [0,T]. d > 0 is snapped to a grid multiple (the grid
// is refined when the relative snap error exceeds 1e-6); d = 0 solves the
// implicit activity by damped fixed point each step.
SimResult simulate(const FiringModel& model, AgeGrid grid,
                   const std::function<double(double)>& n0,
                   const std::function<double(double)>& r0, double d, double T);

// Same scheme with r frozen at r_bar inside S; no delay logic.
ActivityTrace simulate_linear(const FiringModel& model, double r_bar,
                              const AgeGrid& grid,
                              const std::function<double(double)>& n0, double T);

struct PeriodReport {
  enum class Kind { Converged, Periodic, Undetermined };
  Kind kind = Kind::Undetermined;
  double value = 0.0;   // limit when Converged (tail mean)
  double period = 0.0;  // lag of the autocorrelation peak when Periodic
};

// Tail analysis: converged when the tail oscillation amplitude is < 1e-6,
// periodic when the mean-removed autocorrelation peaks >= 0.95 at some lag in
// (2 dt, window). window must be <= half the trace.
PeriodReport detect_period(const ActivityTrace& trace, double window);

// sup |r(t) - r_star| over the final `tail` window.
double distance_to_equilibrium(const ActivityTrace& trace, double r_star,
                               double tail);

}  // namespace etm

#endif
