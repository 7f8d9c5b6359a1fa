#include "etm/linear_kernel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "etm/detail/hazard_walk.hpp"
#include "etm/errors.hpp"
#include "etm/quadrature.hpp"

namespace etm {

using cplx = std::complex<double>;

std::vector<double> solve_volterra(const VolterraProblem& p) {
  const std::size_t n = p.g.size();
  if (p.h.size() != n || p.delta_t <= 0)
    throw ConfigError("solve_volterra: grids must match and delta_t > 0");
  if (p.d < 0) throw ConfigError("solve_volterra: negative delay");
  std::size_t m = 0;
  if (p.d > 0) {
    const double ratio = p.d / p.delta_t;
    m = static_cast<std::size_t>(std::llround(ratio));
    if (std::abs(ratio - static_cast<double>(m)) > 1e-6 * std::max(1.0, ratio))
      throw ConfigError("solve_volterra: d is not aligned to the time grid");
  } else if (p.A_star != 0.0) {
    throw ConfigError("solve_volterra: d = 0 with A* != 0 is not a marching problem");
  }

  const double dt = p.delta_t;
  const double denom = 1.0 - 0.5 * dt * p.h[0];
  if (denom <= 0.0)
    throw NumericalError("solve_volterra: step too large (1 - dt*h0/2 <= 0)");

  std::vector<double> u(n);
  u[0] = p.g[0];
  for (std::size_t k = 1; k < n; ++k) {
    double conv = 0.5 * p.h[k] * u[0];
    for (std::size_t j = 1; j < k; ++j) conv += p.h[k - j] * u[j];
    double rhs = p.g[k] + dt * conv;
    if (m > 0 && k > m) rhs += p.A_star * u[k - m];
    u[k] = rhs / denom;
  }
  return u;
}

MeasureWithAtom build_G(const FiringModel& model, const SteadyState& steady) {
  MeasureWithAtom G;
  G.atom_at_zero = steady.A_star;
  const double r = steady.r_star;
  G.density = [&model, r](double a) {
    return -model.eval_dSdr(a, r) * density_n_star(model, r, a);
  };
  G.support_bound = default_a_max(model);

  double total = 0.0;
  detail::walk_hazard_nodes(model, r, G.support_bound,
                            [&](double a, double w, double cum) {
                              total += w * model.eval_dSdr(a, r) * std::exp(-cum);
                            });
  const double residual = std::abs(G.atom_at_zero - r * total);
  if (residual > 1e-6)
    throw NumericalError("build_G: atom and density disagree (zero-mass residual " +
                         std::to_string(residual) + ")");
  return G;
}

namespace {

// Least-squares exponential envelope on the tail half of the trace. Uses
// local maxima of |h0| so zero crossings of an oscillatory kernel do not
// drag the fit.
void fit_tail(KernelTrace& k, double T) {
  const std::size_t n = k.values.size();

  // The discrete solution bottoms out at an O(dt^2) quadrature floor; fitting
  // through it would hide the true decay. Estimate the floor from the last
  // tenth of the trace and fit only well above it, unless the tail is
  // genuinely large (non-decaying kernel).
  double peak = 0.0;
  std::size_t peak_at = 0;
  for (std::size_t i = 0; i < n; ++i)
    if (std::abs(k.values[i]) > peak) {
      peak = std::abs(k.values[i]);
      peak_at = i;
    }
  std::vector<double> tail_abs;
  for (std::size_t i = n - std::max<std::size_t>(n / 10, 5); i < n; ++i)
    tail_abs.push_back(std::abs(k.values[i]));
  std::sort(tail_abs.begin(), tail_abs.end());
  const double floor_est = tail_abs[tail_abs.size() / 2];
  const bool floor_is_noise = floor_est < 1e-3 * peak;
  const double thresh =
      floor_is_noise ? std::max(1e-13, 100.0 * floor_est) : 1e-13;
  const std::size_t start = floor_is_noise ? std::max<std::size_t>(peak_at, 1)
                                           : std::max<std::size_t>(n / 2, 1);

  std::vector<std::pair<double, double>> pts;  // (t, log|h0|)
  for (std::size_t i = start; i + 1 < n; ++i) {
    const double v = std::abs(k.values[i]);
    if (v <= thresh) continue;
    if (v >= std::abs(k.values[i - 1]) && v >= std::abs(k.values[i + 1]))
      pts.emplace_back(i * k.delta_t, std::log(v));
  }
  if (pts.size() < 3) {
    for (std::size_t i = start; i < n; ++i) {
      const double v = std::abs(k.values[i]);
      if (v > thresh) pts.emplace_back(i * k.delta_t, std::log(v));
    }
  }
  if (pts.size() < 2) {
    // Tail is numerically zero: treat as fully decayed.
    k.decay_rate_fit = std::numeric_limits<double>::infinity();
    k.l1_tail_bound = 0.0;
    k.decaying = true;
    return;
  }
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (auto& [x, y] : pts) {
    sx += x; sy += y; sxx += x * x; sxy += x * y;
  }
  const double np = static_cast<double>(pts.size());
  const double slope = (np * sxy - sx * sy) / (np * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / np;
  k.decay_rate_fit = -slope;
  if (k.decay_rate_fit <= 0.0) {
    k.decaying = false;
    k.l1_tail_bound = std::numeric_limits<double>::infinity();
    return;
  }
  k.decaying = true;
  const double envelope_at_T = std::exp(intercept + slope * T);
  k.l1_tail_bound = envelope_at_T / k.decay_rate_fit;
}

}  // namespace

KernelTrace kernel_h0(const FiringModel& model, const SteadyState& steady,
                      double delta_t, double T) {
  const double sigma = model.sigma();
  if (delta_t <= 0.0) delta_t = sigma / 200.0;
  if (delta_t > sigma / 10.0)
    throw ConfigError("kernel_h0: delta_t must be <= sigma/10");
  if (T <= 0.0) T = 40.0 * std::max(sigma, 1.0 / model.s0());

  const std::size_t n = static_cast<std::size_t>(std::ceil(T / delta_t)) + 1;
  const double r = steady.r_star;
  const MeasureWithAtom G = build_G(model, steady);

  // Kernel of the frozen-r* linear system: h(t) = S(t,r*) exp(-int_0^t S).
  std::vector<double> h(n), g(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double t = k * delta_t;
    h[k] = model.eval_S(t, r) * model.survival(t, r);
  }
  // h jumps from 0 to phi(r*) at t = sigma. Trapezoid weights across that
  // jump add a phantom half cell of mass, pushing the discrete kernel mass
  // above its true value (~1) and leaving a spurious marginal renewal mode.
  // Halving the first nonzero sample restores trapezoid-on-support.
  for (std::size_t k = 1; k < n; ++k) {
    if (h[k - 1] == 0.0 && h[k] > 0.0) {
      h[k] *= 0.5;
      break;
    }
    if (h[k] != 0.0) break;
  }

  // Forcing: the atom of G contributes A* h(t); the density part by
  // quadrature of S(t+s) exp(-(cum(t+s)-cum(s))) dG(s).
  const double B = G.support_bound;
  const double width =
      std::min(sigma, 1.0 / std::max(model.eval_S(sigma, r), 1e-9)) / 4.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = k * delta_t;
    const double q = gauss_composite(
        [&](double s) {
          const double dens = G.density(s);
          if (dens == 0.0) return 0.0;
          const double expo = model.cumulative_S(t + s, r) - model.cumulative_S(s, r);
          return model.eval_S(t + s, r) * std::exp(-expo) * dens;
        },
        0.0, B, width, {sigma, std::max(sigma - t, 0.0)});
    g[k] = G.atom_at_zero * h[k] + q;
  }

  // The renewal kernel h has mass 1 - survival(T) ~ 1, so a direct march
  // amplifies tail quadrature errors by 1/(1 - mass). Solve the shifted
  // equation w = g e^{-at} + (h e^{-at}) * w instead (kernel mass strictly
  // below 1) and unshift h0 = w e^{at}.
  const double alpha = 0.5 * model.s0();
  VolterraProblem p;
  p.g.resize(n);
  p.h.resize(n);
  for (std::size_t k = 0; k < n; ++k) {
    const double damp = std::exp(-alpha * (k * delta_t));
    p.g[k] = g[k] * damp;
    p.h[k] = h[k] * damp;
  }
  p.A_star = 0.0;
  p.d = 0.0;
  p.delta_t = delta_t;

  KernelTrace out;
  out.delta_t = delta_t;
  out.values = solve_volterra(p);
  for (std::size_t k = 0; k < n; ++k)
    out.values[k] *= std::exp(alpha * (k * delta_t));

  double l1 = 0.0;
  for (std::size_t k = 0; k < out.values.size(); ++k) {
    const double w = (k == 0 || k + 1 == out.values.size()) ? 0.5 : 1.0;
    l1 += w * std::abs(out.values[k]);
  }
  out.l1_partial = l1 * delta_t;
  fit_tail(out, (out.values.size() - 1) * delta_t);
  return out;
}

namespace {

// (1 - exp(-w))/w with a series for small |w|.
cplx one_minus_exp_over(cplx w) {
  if (std::abs(w) < 1e-4)
    return 1.0 - w / 2.0 + w * w / 6.0 - w * w * w / 24.0;
  return (1.0 - std::exp(-w)) / w;
}

}  // namespace

cplx laplace_h0_refractory(const FiringModel& model, const SteadyState& steady,
                           cplx z) {
  if (model.kind() != FiringModel::Kind::Refractory)
    throw ConfigError("laplace_h0_refractory: refractory model required");
  const double sigma = model.sigma();
  const double phi = steady.phi_at_r;
  const double A = steady.A_star;
  if (std::abs(z) < 1e-8) return A / (1.0 + sigma * phi);
  // hat(h0)+A* = A* z / (z + phi(1-exp(-sigma z))) = A* / q(z).
  const cplx q = 1.0 + phi * sigma * one_minus_exp_over(sigma * z);
  if (std::abs(q) < 1e-14)
    throw NumericalError("laplace_h0_refractory: z is a zero of z+phi(1-exp(-sigma z))");
  return A / q;
}

cplx laplace_h0_general(const FiringModel& model, const SteadyState& steady,
                        cplx z) {
  const double margin = -0.95 * model.s0();
  if (z.real() <= margin)
    throw DomainError("laplace_h0_general: Re(z) below the transform domain");
  const double r = steady.r_star;
  const double sigma = model.sigma();
  const double a_max = default_a_max(model);

  // inner(a) = int_0^a exp(-z(a-a')) dS/dr(a',r*) da', advanced node to node:
  // inner(a2) = exp(-z(a2-a1)) inner(a1) + local Gauss on [a1,a2].
  cplx inner = 0.0, num = 0.0, den = 0.0;
  double a_prev = 0.0;
  const auto dS = [&](double a) { return model.eval_dSdr(a, r); };
  detail::walk_hazard_nodes(model, r, a_max, [&](double a, double w, double cum) {
    const auto local = [&](double lo, double hi) {
      return gauss_panel(
          [&](double ap) { return std::exp(-z * (a - ap)) * dS(ap); }, lo, hi);
    };
    cplx seg;
    if (a_prev < sigma && sigma < a)
      seg = local(a_prev, sigma) + local(sigma, a);
    else
      seg = local(a_prev, a);
    inner = std::exp(-z * (a - a_prev)) * inner + seg;
    a_prev = a;
    const double surv = std::exp(-cum);
    num += w * surv * inner;
    den += w * surv * std::exp(-z * a);
  });
  if (std::abs(den) < 1e-14)
    throw NumericalError("laplace_h0_general: denominator near a pole");
  return r * num / den;
}

cplx laplace_of_trace(const KernelTrace& k, cplx z) {
  cplx acc = 0.0;
  const std::size_t n = k.values.size();
  for (std::size_t j = 0; j < n; ++j) {
    const double w = (j == 0 || j + 1 == n) ? 0.5 : 1.0;
    acc += w * k.values[j] * std::exp(-z * (static_cast<double>(j) * k.delta_t));
  }
  acc *= k.delta_t;
  if (k.decaying && std::isfinite(k.decay_rate_fit)) {
    const double T = (n - 1) * k.delta_t;
    acc += k.values[n - 1] * std::exp(-z * T) / (z + k.decay_rate_fit);
  }
  return acc;
}

}  // namespace etm
