#include "etm/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "etm/errors.hpp"
#include "etm/quadrature.hpp"
#include "etm/steady_state.hpp"

namespace etm {

AgeGrid make_age_grid(const FiringModel& model, double delta_a, double a_max) {
  const double sigma = model.sigma();
  if (delta_a <= 0.0) delta_a = sigma / 200.0;
  if (a_max <= 0.0) a_max = default_a_max(model);
  long k = static_cast<long>(std::ceil(sigma / delta_a - 1e-9));
  if (k < 20) k = 20;  // delta_a <= sigma/20
  AgeGrid g;
  g.delta_a = sigma / static_cast<double>(k);
  g.n_cells = static_cast<std::size_t>(std::ceil(a_max / g.delta_a - 1e-9));
  g.a_max = g.n_cells * g.delta_a;
  return g;
}

SimState init_state(const AgeGrid& grid,
                    const std::function<double(double)>& n0,
                    const std::function<double(double)>& r0, double d) {
  if (grid.n_cells == 0 || grid.delta_a <= 0.0)
    throw ConfigError("init_state: empty grid");
  if (d < 0.0) throw ConfigError("init_state: negative delay");
  const double dt = grid.delta_a;
  std::size_t m = 0;
  if (d > 0.0) {
    m = static_cast<std::size_t>(std::llround(d / dt));
    if (m < 1 || std::abs(d - m * dt) > 1e-6 * std::max(dt, d))
      throw ConfigError("init_state: d does not sit on the time grid");
  }

  SimState s;
  s.mass.resize(grid.n_cells);
  for (std::size_t j = 0; j < grid.n_cells; ++j) {
    const double v = n0(grid.cell_mid(j));
    if (!(v >= 0.0) || !std::isfinite(v))
      throw DomainError("init_state: n0 must be finite and >= 0");
    s.mass[j] = v * dt;
  }
  const double raw = pairwise_sum(s.mass);
  if (raw <= 0.0) throw DomainError("init_state: n0 has zero mass");
  s.renorm_factor = 1.0 / raw;
  s.renorm_warning = std::abs(s.renorm_factor - 1.0) > 1e-3;
  for (double& v : s.mass) v *= s.renorm_factor;
  s.total_mass = pairwise_sum(s.mass);

  s.delay_steps = m;
  s.r_history.resize(m + 1);
  for (std::size_t k = 0; k <= m; ++k) {
    const double t = -d + static_cast<double>(k) * dt;
    const double v = r0(std::min(t, 0.0));
    if (!(v >= 0.0) || !std::isfinite(v))
      throw DomainError("init_state: r0 must be finite and >= 0");
    s.r_history[k] = v;
  }
  s.hist_pos = 0;
  return s;
}

namespace {

void compute_discharge(const FiringModel& model, const AgeGrid& grid,
                       const std::vector<double>& mass, double rd,
                       std::vector<double>& p, bool parallel) {
  const double dt = grid.delta_a;
  const std::ptrdiff_t n = static_cast<std::ptrdiff_t>(mass.size());
  p.resize(mass.size());
  if (model.kind() == FiringModel::Kind::Refractory) {
    // Uniform hazard beyond sigma: one factor serves every active cell, the
    // absorbing tail cell included.
    const double fac = -std::expm1(-model.phi()(rd) * dt);
    const std::ptrdiff_t j0 =
        static_cast<std::ptrdiff_t>(std::llround(model.sigma() / dt));
    for (std::ptrdiff_t j = 0; j < std::min(j0, n); ++j) p[j] = 0.0;
    for (std::ptrdiff_t j = std::min(j0, n); j < n; ++j) p[j] = fac * mass[j];
    return;
  }
  if (parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const double a = (j + 1 == n) ? grid.a_max : grid.cell_mid(j);
      p[j] = mass[j] * -std::expm1(-model.eval_S(a, rd) * dt);
    }
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const double a = (j + 1 == n) ? grid.a_max : grid.cell_mid(j);
      p[j] = mass[j] * -std::expm1(-model.eval_S(a, rd) * dt);
    }
  }
}

// Transport + discharge with the given discharge-rate activity; returns the
// new boundary activity sum(p)/dt.
double advance(SimState& s, const FiringModel& model, const AgeGrid& grid,
               double rd, bool parallel) {
  static thread_local std::vector<double> p;
  compute_discharge(model, grid, s.mass, rd, p, parallel);
  const double sum_p = pairwise_sum(p);
  auto& m = s.mass;
  const std::size_t n = m.size();
  m[n - 1] = (m[n - 1] - p[n - 1]) + (m[n - 2] - p[n - 2]);
  for (std::size_t j = n - 2; j >= 1; --j) m[j] = m[j - 1] - p[j - 1];
  m[0] = sum_p;
  s.total_mass = pairwise_sum(m);
  s.t += grid.delta_a;
  return sum_p / grid.delta_a;
}

void step_impl(SimState& s, const FiringModel& model, const AgeGrid& grid,
               bool parallel) {
  if (s.delay_steps == 0)
    throw ConfigError("step: d = 0 needs the implicit solve in simulate()");
  if (s.mass.size() != grid.n_cells)
    throw ConfigError("step: state does not match the grid");
  const double rd = s.r_history[s.hist_pos];
  const double rn = advance(s, model, grid, rd, parallel);
  s.r_history[s.hist_pos] = rn;
  s.hist_pos = (s.hist_pos + 1) % s.r_history.size();
}

// r = sum_j m_j (1 - exp(-S(a_j,r) dt))/dt by damped fixed point.
double solve_implicit_activity(const SimState& s, const FiringModel& model,
                               const AgeGrid& grid, double x0) {
  static thread_local std::vector<double> p;
  const auto g = [&](double x) {
    compute_discharge(model, grid, s.mass, x, p, false);
    return pairwise_sum(p) / grid.delta_a;
  };
  const auto f = [&](double x) { return g(x) - x; };

  // Secant fast path seeded at the previous activity.
  double xa = std::max(x0, 0.0);
  double fa = f(xa);
  if (std::abs(fa) <= 1e-12) return xa;
  double xb = std::max(xa + fa, 0.0);
  if (xb == xa) xb = xa + 1e-8;
  double fb = f(xb);
  for (int it = 0; it < 50; ++it) {
    if (std::abs(fb) <= 1e-12) return xb;
    const double denom = fb - fa;
    double xc = denom != 0.0 ? xb - fb * (xb - xa) / denom : xb + 0.5 * fb;
    if (!std::isfinite(xc) || xc < 0.0) xc = 0.5 * xb;
    xa = xb; fa = fb;
    xb = xc; fb = f(xb);
  }

  // The nearby root can disappear through a fold of the self-consistency
  // map (the activity then jumps to the remaining branch). f(0) = g(0) >= 0
  // and f is negative beyond total-mass/delta_t, so walking up from zero to
  // the first sign change always yields a bracket.
  double lo = 0.0, flo = f(0.0);
  if (flo <= 0.0) return 0.0;
  const double cap = 1.0 / grid.delta_a + 1.0;
  double step_sz = 0.05 * std::max(1.0, x0);
  double hi = step_sz, fhi = f(hi);
  while (fhi > 0.0) {
    if (hi >= cap)
      throw NumericalError(
          "simulate: d = 0 activity fixed point not bracketed "
          "(the undelayed problem may be ill-posed)");
    lo = hi; flo = fhi;
    step_sz *= 1.5;
    hi = std::min(hi + step_sz, cap);
    fhi = f(hi);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * std::max(1.0, hi); ++it) {
    const double mid = 0.5 * (lo + hi), fm = f(mid);
    if (fm == 0.0) return mid;
    if (fm > 0.0) { lo = mid; flo = fm; }
    else { hi = mid; fhi = fm; }
  }
  return 0.5 * (lo + hi);
}

}  // namespace

void step(SimState& s, const FiringModel& model, const AgeGrid& grid) {
  step_impl(s, model, grid, true);
}

void step_serial(SimState& s, const FiringModel& model, const AgeGrid& grid) {
  step_impl(s, model, grid, false);
}

SimResult simulate(const FiringModel& model, AgeGrid grid,
                   const std::function<double(double)>& n0,
                   const std::function<double(double)>& r0, double d, double T) {
  if (d < 0.0 || T <= 0.0) throw ConfigError("simulate: need d >= 0 and T > 0");
  if (grid.n_cells == 0) grid = make_age_grid(model);

  double d_eff = d;
  if (d > 0.0) {
    const double sigma = model.sigma();
    long k0 = static_cast<long>(std::llround(sigma / grid.delta_a));
    long best_k = k0;
    long best_m = std::max<long>(1, std::llround(d / grid.delta_a));
    double best_err =
        std::abs(d - best_m * grid.delta_a) / d;
    if (best_err > 1e-6) {
      for (long k = k0; k <= 16 * k0; ++k) {
        const double dtk = sigma / static_cast<double>(k);
        const long mk = std::max<long>(1, std::llround(d / dtk));
        const double e = std::abs(d - mk * dtk) / d;
        if (e < best_err) {
          best_err = e;
          best_k = k;
          best_m = mk;
        }
        if (e <= 1e-6) break;
      }
      if (best_k != k0)
        grid = make_age_grid(model, sigma / static_cast<double>(best_k),
                             grid.a_max);
    }
    d_eff = best_m * grid.delta_a;
  }

  SimResult out;
  out.grid = grid;
  out.state = init_state(grid, n0, r0, d_eff);
  const double dt = grid.delta_a;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));

  out.trace.delta_t = dt;
  out.trace.d = d_eff;
  out.trace.values.reserve(steps + 1);
  out.trace.values.push_back(out.state.r_current());
  for (std::size_t k = 0; k < steps; ++k) {
    double r;
    if (d_eff > 0.0) {
      step(out.state, model, grid);
      r = out.state.r_current();
    } else {
      const double x = solve_implicit_activity(out.state, model, grid,
                                               out.state.r_history[0]);
      r = advance(out.state, model, grid, x, true);
      out.state.r_history[0] = r;
    }
    out.trace.values.push_back(r);
  }

  std::ostringstream meta;
  meta << "model=" << model.describe() << " delta_a=" << dt
       << " n_cells=" << grid.n_cells << " d=" << d_eff << " T=" << T;
  out.trace.meta = meta.str();
  return out;
}

ActivityTrace simulate_linear(const FiringModel& model, double r_bar,
                              const AgeGrid& grid,
                              const std::function<double(double)>& n0,
                              double T) {
  if (r_bar < 0.0 || T <= 0.0)
    throw ConfigError("simulate_linear: need r_bar >= 0 and T > 0");
  AgeGrid g = grid;
  if (g.n_cells == 0) g = make_age_grid(model);
  SimState s = init_state(g, n0, [](double) { return 0.0; }, 0.0);
  const double dt = g.delta_a;
  const std::size_t steps = static_cast<std::size_t>(std::ceil(T / dt - 1e-9));

  ActivityTrace tr;
  tr.delta_t = dt;
  tr.d = 0.0;
  tr.values.reserve(steps + 1);
  {
    // Initial rate implied by the frozen hazard acting on n0.
    static thread_local std::vector<double> p;
    compute_discharge(model, g, s.mass, r_bar, p, false);
    tr.values.push_back(pairwise_sum(p) / dt);
  }
  for (std::size_t k = 0; k < steps; ++k)
    tr.values.push_back(advance(s, model, g, r_bar, true));

  std::ostringstream meta;
  meta << "linear r_bar=" << r_bar << " model=" << model.describe()
       << " delta_a=" << dt << " T=" << T;
  tr.meta = meta.str();
  return tr;
}

PeriodReport detect_period(const ActivityTrace& trace, double window) {
  const double dur = trace.duration();
  if (window <= 0.0 || window > 0.5 * dur + 1e-12)
    throw ConfigError("detect_period: window must be positive and <= half the trace");
  const double dt = trace.delta_t;
  const std::size_t wn = static_cast<std::size_t>(std::floor(window / dt));
  const std::size_t seg_len = std::min(trace.values.size(), 2 * wn + 1);
  const std::size_t start = trace.values.size() - seg_len;

  PeriodReport rep;
  double mx = trace.values[start], mn = trace.values[start], mean = 0.0;
  for (std::size_t i = start; i < trace.values.size(); ++i) {
    mx = std::max(mx, trace.values[i]);
    mn = std::min(mn, trace.values[i]);
    mean += trace.values[i];
  }
  mean /= static_cast<double>(seg_len);
  if (mx - mn < 1e-6) {
    rep.kind = PeriodReport::Kind::Converged;
    rep.value = mean;
    return rep;
  }

  std::vector<double> x(seg_len);
  for (std::size_t i = 0; i < seg_len; ++i) x[i] = trace.values[start + i] - mean;

  // Normalized autocorrelation over the overlap; first local peak >= 0.95.
  const std::size_t lag_lo = 3;
  const std::size_t lag_hi = std::min(wn, seg_len - 2);
  std::vector<double> rho(lag_hi + 1, 0.0);
  for (std::size_t L = lag_lo; L <= lag_hi; ++L) {
    double num = 0.0, va = 0.0, vb = 0.0;
    for (std::size_t i = 0; i + L < seg_len; ++i) {
      num += x[i] * x[i + L];
      va += x[i] * x[i];
      vb += x[i + L] * x[i + L];
    }
    const double den = std::sqrt(va * vb);
    rho[L] = den > 0.0 ? num / den : 0.0;
  }
  for (std::size_t L = lag_lo + 1; L + 1 <= lag_hi; ++L) {
    if (rho[L] >= 0.95 && rho[L] >= rho[L - 1] && rho[L] >= rho[L + 1]) {
      rep.kind = PeriodReport::Kind::Periodic;
      rep.period = static_cast<double>(L) * dt;
      return rep;
    }
  }
  return rep;
}

double distance_to_equilibrium(const ActivityTrace& trace, double r_star,
                               double tail) {
  if (trace.values.empty()) throw ConfigError("distance_to_equilibrium: empty trace");
  const double dur = trace.duration();
  const double t0 = std::max(0.0, dur - tail);
  std::size_t i0 = static_cast<std::size_t>(std::floor(t0 / trace.delta_t));
  i0 = std::min(i0, trace.values.size() - 1);
  double sup = 0.0;
  for (std::size_t i = i0; i < trace.values.size(); ++i)
    sup = std::max(sup, std::abs(trace.values[i] - r_star));
  return sup;
}

}  // namespace etm
