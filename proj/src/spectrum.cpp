#include "etm/spectrum.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "etm/detail/cplx_util.hpp"
#include "etm/detail/hazard_walk.hpp"
#include "etm/errors.hpp"
#include "etm/quadrature.hpp"

namespace etm {

namespace {

constexpr double kPi = std::numbers::pi;

// Signals a boundary sample (or an unresolvable phase jump, which in practice
// means a zero hugging the edge) during winding-number evaluation.
struct BoundaryZero {};

cplx eval_checked(const CplxFn& f, cplx z) {
  const cplx v = f(z);
  if (!std::isfinite(v.real()) || !std::isfinite(v.imag()))
    throw NumericalError("count_roots_rect: non-finite boundary value");
  if (std::abs(v) < 1e-9) throw BoundaryZero{};
  return v;
}

// Phase increment over one segment. The midpoint both refines the phase and
// guards against aliasing: a hidden 2pi wrap bends the trajectory far off the
// chord, so acceptance needs small half-steps plus chord consistency.
double seg_arg(const CplxFn& f, cplx za, cplx zb, cplx fa, cplx fb, int depth) {
  const cplx zm = 0.5 * (za + zb);
  const cplx fm = eval_checked(f, zm);
  const double d1 = std::arg(fm / fa);
  const double d2 = std::arg(fb / fm);
  const double chord = std::abs(fm - 0.5 * (fa + fb));
  if (std::abs(d1) + std::abs(d2) < kPi / 2.0 &&
      chord <= 0.5 * std::max(std::abs(fa), std::abs(fb)))
    return d1 + d2;
  if (depth <= 0) throw BoundaryZero{};
  return seg_arg(f, za, zm, fa, fm, depth - 1) +
         seg_arg(f, zm, zb, fm, fb, depth - 1);
}

double edge_arg(const CplxFn& f, cplx z0, cplx z1, double max_spacing) {
  int n = 64;
  if (max_spacing > 0.0) {
    const double len = std::abs(z1 - z0);
    n = std::max(n, static_cast<int>(std::ceil(len / max_spacing)));
    n = std::min(n, 2000000);
  }
  double total = 0.0;
  cplx zp = z0, fp = eval_checked(f, z0);
  for (int i = 1; i <= n; ++i) {
    const cplx z = z0 + (z1 - z0) * (static_cast<double>(i) / n);
    const cplx fz = eval_checked(f, z);
    total += seg_arg(f, zp, z, fp, fz, 28);
    zp = z;
    fp = fz;
  }
  return total;
}

int winding(const CplxFn& f, const Rect& r, double max_spacing) {
  const cplx c0(r.re_lo, r.om_lo), c1(r.re_hi, r.om_lo);
  const cplx c2(r.re_hi, r.om_hi), c3(r.re_lo, r.om_hi);
  const double tot =
      edge_arg(f, c0, c1, max_spacing) + edge_arg(f, c1, c2, max_spacing) +
      edge_arg(f, c2, c3, max_spacing) + edge_arg(f, c3, c0, max_spacing);
  const double w = tot / (2.0 * kPi);
  const long n = std::lround(w);
  if (std::abs(w - static_cast<double>(n)) > 0.25)
    throw NumericalError("count_roots_rect: winding number is not integral");
  if (n < 0)
    throw NumericalError("count_roots_rect: negative winding (not analytic?)");
  return static_cast<int>(n);
}

}  // namespace

int count_roots_rect(const CplxFn& f, Rect rect, double max_spacing) {
  if (rect.width() <= 0 || rect.height() <= 0)
    throw ConfigError("count_roots_rect: degenerate rectangle");
  for (int attempt = 0; attempt < 5; ++attempt) {
    try {
      return winding(f, rect, max_spacing);
    } catch (const BoundaryZero&) {
      const double eps = 1e-6 * (attempt + 1);
      rect.re_lo -= eps;
      rect.re_hi += eps;
      rect.om_lo -= eps;
      rect.om_hi += eps;
    }
  }
  throw NumericalError(
      "count_roots_rect: indeterminate (boundary zero persists after 5 perturbations)");
}

std::optional<ComplexRoot> refine_root(const CplxFn& f, cplx z, double tol) {
  const auto safe = [&f](cplx w) -> std::optional<cplx> {
    try {
      const cplx v = f(w);
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return std::nullopt;
      return v;
    } catch (const std::exception&) {
      return std::nullopt;
    }
  };

  auto fz_opt = safe(z);
  if (!fz_opt) return std::nullopt;
  cplx fz = *fz_opt;
  int iter = 0;
  for (; iter < 100; ++iter) {
    const double h = 1e-7 * (1.0 + std::abs(z));
    const auto fp1 = safe(z + h), fp2 = safe(z - h);
    if (!fp1 || !fp2) break;
    const cplx fp = (*fp1 - *fp2) / (2.0 * h);
    if (std::abs(fp) == 0.0) break;
    const cplx step = fz / fp;
    const double best = std::abs(fz);
    bool improved = false;
    cplx zn = z, fn = fz;
    double damp = 1.0;
    for (int t = 0; t < 30; ++t, damp *= 0.5) {
      const cplx cand = z - damp * step;
      const auto fc = safe(cand);
      if (fc && std::abs(*fc) < best) {
        zn = cand;
        fn = *fc;
        improved = true;
        break;
      }
    }
    if (!improved) break;
    const double moved = std::abs(zn - z);
    z = zn;
    fz = fn;
    if (moved < 1e-14 * (1.0 + std::abs(z)) || std::abs(fz) == 0.0) {
      ++iter;
      break;
    }
  }

  const double h = 1e-7 * (1.0 + std::abs(z));
  const auto d1 = safe(z + h), d2 = safe(z - h);
  const double fpn = (d1 && d2) ? std::abs(*d1 - *d2) / (2.0 * h) : 0.0;
  const double res = std::abs(fz);
  if (res > tol * (1.0 + fpn)) return std::nullopt;
  ComplexRoot out;
  out.z = z;
  out.residual = res;
  out.newton_iters = iter;
  return out;
}

namespace {

// Cut coordinate avoiding zeros of f on the cut line.
double pick_cut(const CplxFn& f, const Rect& r, bool split_re) {
  const double lo = split_re ? r.re_lo : r.om_lo;
  const double len = split_re ? r.width() : r.height();
  const double t_lo = split_re ? r.om_lo : r.re_lo;
  const double t_len = split_re ? r.height() : r.width();
  for (double frac : {0.5, 0.53, 0.47, 0.56, 0.44}) {
    const double c = lo + frac * len;
    bool clear = true;
    for (int k = 0; k <= 4 && clear; ++k) {
      const double t = t_lo + t_len * k / 4.0;
      const cplx z = split_re ? cplx(c, t) : cplx(t, c);
      try {
        if (std::abs(f(z)) < 1e-9) clear = false;
      } catch (const std::exception&) {
        clear = false;
      }
    }
    if (clear) return c;
  }
  return lo + 0.5 * len;
}

void push_root(std::vector<ComplexRoot>& out, ComplexRoot r) {
  for (const auto& q : out)
    if (std::abs(q.z - r.z) <= 1e-9) return;
  out.push_back(std::move(r));
}

void find_roots_rec(const CplxFn& f, const Rect& rect, double tol,
                    double max_spacing, std::vector<ComplexRoot>& out,
                    int depth) {
  const int n = count_roots_rect(f, rect, max_spacing);
  if (n == 0) return;

  const cplx center(0.5 * (rect.re_lo + rect.re_hi), 0.5 * (rect.om_lo + rect.om_hi));
  if (n == 1) {
    auto r = refine_root(f, center, tol);
    if (r && rect.contains(r->z, 1e-5)) {
      r->region = rect;
      push_root(out, *r);
      return;
    }
  }
  const double size = std::max(rect.width(), rect.height());
  if (size < 1e-9 || depth <= 0) {
    ComplexRoot r;
    r.z = center;
    try {
      r.residual = std::abs(f(center));
    } catch (const std::exception&) {
      r.residual = std::numeric_limits<double>::infinity();
    }
    r.region = rect;
    r.unrefined = true;
    push_root(out, r);
    return;
  }
  const bool split_re = rect.width() >= rect.height();
  const double c = pick_cut(f, rect, split_re);
  Rect a = rect, b = rect;
  if (split_re) {
    a.re_hi = c;
    b.re_lo = c;
  } else {
    a.om_hi = c;
    b.om_lo = c;
  }
  find_roots_rec(f, a, tol, max_spacing, out, depth - 1);
  find_roots_rec(f, b, tol, max_spacing, out, depth - 1);
}

}  // namespace

std::vector<ComplexRoot> find_roots(const CplxFn& f, Rect rect, double tol,
                                    double max_spacing) {
  std::vector<ComplexRoot> out;
  find_roots_rec(f, rect, tol, max_spacing, out, 80);

  // Canonical representative: Im >= 0 when the conjugate is also a root.
  for (auto& r : out) {
    if (r.z.imag() < 0.0 && !r.unrefined) {
      try {
        const cplx zc = std::conj(r.z);
        const double rc = std::abs(f(zc));
        if (rc <= std::max(r.residual * 10.0, tol)) {
          r.z = zc;
          r.residual = rc;
        }
      } catch (const std::exception&) {
      }
    }
  }
  std::sort(out.begin(), out.end(), [](const ComplexRoot& a, const ComplexRoot& b) {
    if (a.z.real() != b.z.real()) return a.z.real() < b.z.real();
    return a.z.imag() < b.z.imag();
  });
  std::vector<ComplexRoot> dedup;
  for (auto& r : out) push_root(dedup, std::move(r));
  return dedup;
}

CharFunction::CharFunction(const FiringModel& model, const SteadyState& steady,
                           double d, Mode mode)
    : model_(&model), steady_(steady), d_(d), mode_(mode) {
  if (d < 0) throw ConfigError("CharFunction: negative delay");
  if (mode == Mode::RefractoryEntire && model.kind() != FiringModel::Kind::Refractory)
    throw ConfigError("CharFunction: RefractoryEntire requires a refractory model");
}

CharFunction::CharFunction(const FiringModel& model, const SteadyState& steady,
                           double d)
    : CharFunction(model, steady, d,
                   model.kind() == FiringModel::Kind::Refractory
                       ? Mode::RefractoryEntire
                       : Mode::GeneralQuadrature) {}

double CharFunction::sampling_scale() const {
  const double sigma = model_->sigma();
  double period = 2.0 * kPi / sigma;
  if (d_ > 0.0) period = std::min(period, 2.0 * kPi / d_);
  return period / 8.0;
}

cplx CharFunction::operator()(cplx z) const {
  if (mode_ == Mode::RefractoryEntire) {
    const double sigma = model_->sigma();
    const double phi = steady_.phi_at_r;
    const cplx q = 1.0 + phi * sigma * detail::one_minus_exp_over(sigma * z);
    return std::exp(z * d_) * q - steady_.A_star;
  }
  const cplx h = laplace_h0_general(*model_, steady_, z);
  return 1.0 - std::exp(-z * d_) * h;
}

Rect default_search_region(const FiringModel& model, const SteadyState& steady,
                           double d) {
  const double s0 = model.s0();
  const double A = std::abs(steady.A_star);
  double re_lo = -0.9 * s0;
  if (d > 0.0 && A > 0.0 && A < 1.0) {
    double candidate = std::max(re_lo, std::log(A) / d + 0.05);
    // For large d the heuristic floor drifts above zero and would hide
    // near-marginal dominant roots; keep the region reaching below the axis.
    candidate = std::min(candidate, -0.05);
    re_lo = std::max(candidate, re_lo);
  }
  double re_hi = 2.0;
  if (d > 0.0) re_hi = std::max(2.0, A * std::exp(1.0) / d);
  const double scale = d > 0.0 ? std::min(d, model.sigma()) : model.sigma();
  Rect r;
  r.re_lo = re_lo;
  r.re_hi = re_hi;
  r.om_lo = -1e-6;
  r.om_hi = 20.0 * kPi / scale;
  return r;
}

namespace {

std::optional<ComplexRoot> pick_dominant(std::vector<ComplexRoot> roots) {
  std::optional<ComplexRoot> best;
  for (auto& r : roots) {
    if (!best) {
      best = r;
      continue;
    }
    const double dre = r.z.real() - best->z.real();
    if (dre > 1e-9 ||
        (std::abs(dre) <= 1e-9 && std::abs(r.z.imag()) < std::abs(best->z.imag())))
      best = r;
  }
  if (best && best->z.imag() < 0.0) best->z = std::conj(best->z);
  return best;
}

}  // namespace

std::optional<ComplexRoot> dominant_root(const CharFunction& cf, Rect search) {
  const CplxFn f = [&cf](cplx z) { return cf(z); };
  return pick_dominant(find_roots(f, search, 1e-11, cf.sampling_scale()));
}

std::optional<ComplexRoot> dominant_root(const FiringModel& model,
                                         const SteadyState& steady, double d) {
  const CharFunction cf(model, steady, d);
  return dominant_root(cf, default_search_region(model, steady, d));
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Stable: return "stable";
    case Verdict::Unstable: return "unstable";
    default: return "inconclusive";
  }
}

std::string to_string(Clause c) {
  switch (c) {
    case Clause::Thm3_1: return "thm3.1";
    case Clause::Thm3_2: return "thm3.2";
    case Clause::Thm3_3: return "thm3.3";
    case Clause::Thm5_1: return "thm5.1";
    case Clause::Thm5_2: return "thm5.2";
    case Clause::Thm5_3: return "thm5.3";
    case Clause::DominantRootSign: return "dominant-root-sign";
    default: return "none";
  }
}

StabilityReport classify_stability(const FiringModel& model,
                                   const SteadyState& steady, double d,
                                   const KernelTrace* kernel) {
  StabilityReport rep;
  const double A = steady.A_star;

  if (d > 0.0 && steady.slope_inv_I > 1.0) {
    rep.verdict = Verdict::Unstable;
    rep.clause = Clause::Thm3_1;
    rep.notes = "slope of 1/I at r* exceeds 1";
    return rep;
  }
  if (d > 0.0 && std::abs(A) > 1.0) {
    rep.verdict = Verdict::Unstable;
    rep.clause = Clause::Thm3_3;
    rep.notes = "|A*| > 1";
    return rep;
  }
  if (kernel != nullptr && kernel->decaying &&
      std::abs(A) + kernel->l1_partial + kernel->l1_tail_bound < 1.0) {
    rep.verdict = Verdict::Stable;
    rep.clause = Clause::Thm3_2;
    rep.notes = "|A*| + ||h0||_1 < 1";
    return rep;
  }
  if (model.kind() == FiringModel::Kind::Refractory && d == 0.0) {
    const double cap = 1.0 + model.sigma() * steady.phi_at_r;
    if (std::abs(A - 1.0) <= 1e-9 || std::abs(A - cap) <= 1e-9) {
      rep.verdict = Verdict::Inconclusive;
      rep.clause = Clause::None;
      rep.notes = "A* sits on a clause boundary (A*=1 or A*=1+sigma*phi)";
      return rep;
    }
    if (A < 1.0) {
      rep.verdict = Verdict::Stable;
      rep.clause = Clause::Thm5_1;
    } else if (A < cap) {
      rep.verdict = Verdict::Unstable;
      rep.clause = Clause::Thm5_2;
    } else {
      rep.verdict = Verdict::Stable;
      rep.clause = Clause::Thm5_3;
    }
    return rep;
  }

  try {
    rep.dominant = dominant_root(model, steady, d);
  } catch (const std::exception& e) {
    rep.verdict = Verdict::Inconclusive;
    rep.clause = Clause::None;
    rep.notes = std::string("dominant root search failed: ") + e.what();
    return rep;
  }
  rep.clause = Clause::DominantRootSign;
  if (!rep.dominant) {
    rep.verdict = Verdict::Stable;
    rep.notes = "no root in the default search region";
  } else if (std::abs(rep.dominant->z.real()) < 1e-4) {
    rep.verdict = Verdict::Inconclusive;
    rep.notes = "dominant root is marginal (|Re| < 1e-4)";
  } else {
    rep.verdict =
        rep.dominant->z.real() > 0.0 ? Verdict::Unstable : Verdict::Stable;
  }
  return rep;
}

namespace {

void push_unique(std::vector<cplx>& v, cplx z, double tol = 1e-8) {
  if (z.imag() < 0.0) z = std::conj(z);
  for (const cplx& w : v)
    if (std::abs(w - z) <= tol) return;
  v.push_back(z);
}

std::vector<cplx> continue_candidates(const CplxFn& f,
                                      const std::vector<cplx>& seeds) {
  std::vector<cplx> out;
  for (cplx s : seeds) {
    if (auto r = refine_root(f, s)) push_unique(out, r->z);
    // Frequencies drift with d, so also try the conjugate path for roots
    // that were folded onto the upper half plane.
  }
  return out;
}

}  // namespace

std::vector<TracePoint> trace_dominant_root(const FiringModel& model,
                                            const SteadyState& steady,
                                            const std::vector<double>& d_grid) {
  for (std::size_t i = 0; i < d_grid.size(); ++i) {
    if (d_grid[i] <= 0.0 || (i > 0 && d_grid[i] <= d_grid[i - 1]))
      throw ConfigError("trace_dominant_root: d_grid must be increasing and > 0");
  }

  std::vector<TracePoint> out;
  std::vector<cplx> cands;
  double prev_re = 0.0;
  bool have_prev = false;
  for (std::size_t i = 0; i < d_grid.size(); ++i) {
    TracePoint tp;
    tp.d = d_grid[i];
    try {
      const CharFunction cf(model, steady, tp.d);
      const CplxFn f = [&cf](cplx z) { return cf(z); };
      const Rect region = default_search_region(model, steady, tp.d);

      std::vector<cplx> nc = continue_candidates(f, cands);
      auto dominant_of = [&](const std::vector<cplx>& zs) -> std::optional<ComplexRoot> {
        std::vector<ComplexRoot> rs;
        for (cplx z : zs) {
          ComplexRoot r;
          r.z = z;
          r.residual = std::abs(f(z));
          r.region = region;
          rs.push_back(r);
        }
        return pick_dominant(std::move(rs));
      };

      bool rescan = (i % 10 == 0) || nc.empty();
      if (!rescan && have_prev) {
        // A sign flip of the continued dominant is exactly where a missed
        // branch would matter; spend a rescan there.
        auto dom = dominant_of(nc);
        if (dom && (dom->z.real() > 0.0) != (prev_re > 0.0)) rescan = true;
      }
      if (rescan) {
        for (const auto& r : find_roots(f, region, 1e-11, cf.sampling_scale()))
          if (!r.unrefined) push_unique(nc, r.z);
      }
      auto dom = dominant_of(nc);
      if (!dom) {
        tp.error = "no root located in the search region";
      } else {
        tp.root = *dom;
        prev_re = dom->z.real();
        have_prev = true;
      }

      // Keep a bounded set of near-dominant branches for continuation.
      std::sort(nc.begin(), nc.end(),
                [](cplx a, cplx b) { return a.real() > b.real(); });
      if (nc.size() > 12) nc.resize(12);
      cands = std::move(nc);
    } catch (const std::exception& e) {
      tp.error = e.what();
    }
    out.push_back(std::move(tp));
  }
  return out;
}

std::vector<CriticalDelay> critical_delays(const FiringModel& model,
                                           const SteadyState& steady,
                                           double d_lo, double d_hi) {
  if (!(d_lo > 0.0 && d_hi > d_lo))
    throw ConfigError("critical_delays: need 0 < d_lo < d_hi");

  const double span = d_hi - d_lo;
  int n = static_cast<int>(std::ceil(span / 0.0125));
  n = std::clamp(n, 40, 2000);
  std::vector<double> grid(n + 1);
  for (int i = 0; i <= n; ++i) grid[i] = d_lo + span * i / n;

  const auto trace = trace_dominant_root(model, steady, grid);

  std::vector<CriticalDelay> out;
  for (std::size_t i = 0; i + 1 < trace.size(); ++i) {
    if (!trace[i].root || !trace[i + 1].root) continue;
    const double re_a = trace[i].root->z.real();
    const double re_b = trace[i + 1].root->z.real();
    if (re_a == 0.0 || (re_a < 0.0) == (re_b < 0.0)) continue;

    double lo = trace[i].d, hi = trace[i + 1].d;
    double f_lo = re_a;
    std::vector<cplx> seeds = {trace[i].root->z, trace[i + 1].root->z};
    cplx z_mid = seeds[0];
    double re_mid = f_lo;
    for (int it = 0; it < 80 && std::abs(re_mid) > 1e-6; ++it) {
      const double mid = 0.5 * (lo + hi);
      const CharFunction cf(model, steady, mid);
      const CplxFn f = [&cf](cplx z) { return cf(z); };
      std::vector<cplx> refined = continue_candidates(f, seeds);
      if (refined.empty()) {
        auto dom = dominant_root(model, steady, mid);
        if (!dom) break;
        refined.push_back(dom->z);
      }
      cplx best = refined[0];
      for (cplx z : refined)
        if (z.real() > best.real()) best = z;
      z_mid = best;
      re_mid = best.real();
      push_unique(seeds, best);
      if (seeds.size() > 6) seeds.erase(seeds.begin());
      if ((re_mid < 0.0) == (f_lo < 0.0)) {
        lo = mid;
        f_lo = re_mid;
      } else {
        hi = mid;
      }
    }
    if (std::abs(re_mid) > 1e-6) continue;
    CriticalDelay cd;
    cd.d = 0.5 * (lo + hi);
    cd.frequency = std::abs(z_mid.imag());
    cd.stable_to_unstable = re_a < 0.0;
    out.push_back(cd);
  }
  return out;
}

double eigenfunction_residual(const FiringModel& model, const SteadyState& steady,
                              double d, const ComplexRoot& root) {
  const cplx lam = root.z;
  const double r = steady.r_star;
  const double sigma = model.sigma();
  if (lam.real() <= -0.9 * model.s0())
    throw NumericalError(
        "eigenfunction_residual: Re(lambda) too negative, psi not integrable");

  const double a_max = default_a_max(model);
  const cplx e_ld = std::exp(-lam * d);
  const auto g = [&](double a) {
    return model.eval_dSdr(a, r) * density_n_star(model, r, a);
  };

  // J(a) = int_0^a exp(-(cum(a)-cum(a')) - lam(a-a')) g(a') da', advanced node
  // to node; psi(a) = surv(a) e^{-lam a} - e^{-lam d} J(a).
  cplx J = 0.0, int_psi = 0.0, int_S_psi = 0.0;
  double a_prev = 0.0, cum_prev = 0.0;
  detail::walk_hazard_nodes(model, r, a_max, [&](double a, double w, double cum) {
    const auto local = [&](double lo, double hi) {
      return gauss_panel(
          [&](double ap) {
            const double cum_ap = model.cumulative_S(ap, r);
            return std::exp(-(cum - cum_ap) - lam * (a - ap)) * g(ap);
          },
          lo, hi);
    };
    cplx seg;
    if (a_prev < sigma && sigma < a)
      seg = local(a_prev, sigma) + local(sigma, a);
    else
      seg = local(a_prev, a);
    J = std::exp(-(cum - cum_prev) - lam * (a - a_prev)) * J + seg;
    a_prev = a;
    cum_prev = cum;

    const cplx psi = std::exp(-cum - lam * a) - e_ld * J;
    if (!std::isfinite(psi.real()) || !std::isfinite(psi.imag()))
      throw NumericalError("eigenfunction_residual: psi diverged");
    int_psi += w * psi;
    int_S_psi += w * model.eval_S(a, r) * psi;
  });

  const cplx bc_defect = 1.0 - int_S_psi - steady.A_star * e_ld;
  return std::abs(int_psi) + std::abs(bc_defect);
}

std::optional<ComplexRoot> rightmost_linear_root(const FiringModel& model,
                                                 double r_bar) {
  if (model.kind() != FiringModel::Kind::Refractory) return std::nullopt;
  const double sigma = model.sigma();
  const double phi = model.phi()(r_bar);

  // Nonzero roots of 1 - hat(h)(z) = 0 are the zeros of
  // q(z) = 1 + phi (1 - exp(-sigma z))/z, which is entire with q(0) != 0.
  const CplxFn q = [sigma, phi](cplx z) {
    return 1.0 + phi * sigma * detail::one_minus_exp_over(sigma * z);
  };

  double L = 2.0 / sigma;
  for (int attempt = 0; attempt < 4; ++attempt, L *= 2.0) {
    Rect rect;
    rect.re_lo = -L;
    rect.re_hi = 0.5;
    rect.om_lo = -1e-6;
    // Any zero with Re > -L satisfies |z + phi| = phi e^{-sigma Re z}.
    rect.om_hi = phi * (1.0 + std::exp(sigma * L)) + 1.0;
    auto roots = find_roots(q, rect, 1e-11, 2.0 * std::numbers::pi / (8.0 * sigma));
    if (auto dom = pick_dominant(std::move(roots))) return dom;
  }
  return std::nullopt;
}

}  // namespace etm
