#ifndef ETM_SCAN_HPP
#define ETM_SCAN_HPP

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "etm/firing_model.hpp"
#include "etm/spectrum.hpp"
#include "etm/steady_state.hpp"

namespace etm {

using ModelFamily = std::function<FiringModel(double)>;  // b -> model

struct BifurcationRow {
  double b = 0.0;
  int branch_id = -1;
  double r_star = 0.0;
  double A_star = 0.0;
  double slope_inv_I = 0.0;
  bool fold_suspect = false;
  Verdict verdict_d0 = Verdict::Inconclusive;
  Verdict verdict_dpos = Verdict::Inconclusive;
  std::string error;  // per-point failures recorded, scan continues
};

// Steady states and d=0 / d=d_probe classifications over a connectivity sweep;
// branch ids by nearest-neighbor continuation in (b, r*).
std::vector<BifurcationRow> bifurcation_scan(const ModelFamily& family,
                                             double b_lo, double b_hi,
                                             int n_points,
                                             double d_probe = 0.1);

// Fold locations: bisection in b of the steady-state count change to 1e-6.
std::vector<double> find_fold_points(const ModelFamily& family,
                                     const std::vector<BifurcationRow>& scan);

enum class LevelKind { A_eq_1, A_eq_1_plus_sigma_phi };

struct LevelCrossing {
  double b = 0.0;
  int branch_id = -1;
};

// Per-branch bisection of A*(b) - level to 1e-6 in b, re-solving the steady
// state at each probe (scan values only bracket).
std::vector<LevelCrossing> find_level_crossings(
    const ModelFamily& family, const std::vector<BifurcationRow>& scan,
    LevelKind level);

struct PseudoEqSequence {
  std::vector<double> x;
  std::optional<double> fixed_point;
  bool converged = false;
  bool divergent = false;
};

// x_k = 1/I(x_{k-1}); converged when successive iterates agree to 1e-12.
PseudoEqSequence pseudo_equilibrium_sequence(const FiringModel& model,
                                             double x0, int K);

}  // namespace etm

#endif
