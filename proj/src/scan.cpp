#include "etm/scan.hpp"

#include <algorithm>
#include <cmath>

#include "etm/errors.hpp"

namespace etm {

namespace {

std::vector<BifurcationRow> rows_at(const ModelFamily& family, double b,
                                    double d_probe) {
  std::vector<BifurcationRow> out;
  try {
    const FiringModel model = family(b);
    for (const auto& ss : find_steady_states(model)) {
      BifurcationRow row;
      row.b = b;
      row.r_star = ss.r_star;
      row.A_star = ss.A_star;
      row.slope_inv_I = ss.slope_inv_I;
      row.fold_suspect = ss.fold_suspect;
      if (!ss.fold_suspect) {
        row.verdict_d0 = classify_stability(model, ss, 0.0).verdict;
        row.verdict_dpos = classify_stability(model, ss, d_probe).verdict;
      }
      out.push_back(std::move(row));
    }
  } catch (const std::exception& e) {
    BifurcationRow row;
    row.b = b;
    row.error = e.what();
    out.push_back(std::move(row));
  }
  return out;
}

// Nearest-neighbor continuation in (b, r*): each branch extrapolates its last
// two points; unmatched rows open new branches, unmatched branches retire.
void assign_branches(std::vector<std::vector<BifurcationRow>>& columns,
                     double db) {
  struct Branch {
    int id;
    double r_last;
    double slope;  // dr*/db estimate
  };
  std::vector<Branch> active;
  int next_id = 0;
  for (auto& col : columns) {
    std::vector<BifurcationRow*> rows;
    for (auto& row : col)
      if (row.error.empty() && !row.fold_suspect) rows.push_back(&row);

    struct Pair {
      double dist;
      std::size_t bi, ri;
    };
    std::vector<Pair> pairs;
    for (std::size_t bi = 0; bi < active.size(); ++bi) {
      const double pred = active[bi].r_last + active[bi].slope * db;
      for (std::size_t ri = 0; ri < rows.size(); ++ri)
        pairs.push_back({std::abs(rows[ri]->r_star - pred), bi, ri});
    }
    std::sort(pairs.begin(), pairs.end(),
              [](const Pair& a, const Pair& b) { return a.dist < b.dist; });

    std::vector<bool> b_used(active.size(), false), r_used(rows.size(), false);
    std::vector<Branch> next_active;
    for (const auto& p : pairs) {
      if (b_used[p.bi] || r_used[p.ri]) continue;
      const double tol =
          std::max(0.05, 20.0 * db * (1.0 + std::abs(active[p.bi].slope)));
      if (p.dist > tol) continue;
      b_used[p.bi] = true;
      r_used[p.ri] = true;
      rows[p.ri]->branch_id = active[p.bi].id;
      Branch nb = active[p.bi];
      nb.slope = db > 0.0 ? (rows[p.ri]->r_star - nb.r_last) / db : 0.0;
      nb.r_last = rows[p.ri]->r_star;
      next_active.push_back(nb);
    }
    for (std::size_t ri = 0; ri < rows.size(); ++ri) {
      if (r_used[ri]) continue;
      rows[ri]->branch_id = next_id++;
      next_active.push_back({rows[ri]->branch_id, rows[ri]->r_star, 0.0});
    }
    active = std::move(next_active);
  }
}

}  // namespace

std::vector<BifurcationRow> bifurcation_scan(const ModelFamily& family,
                                             double b_lo, double b_hi,
                                             int n_points, double d_probe) {
  if (!(b_lo < b_hi)) throw ConfigError("bifurcation_scan: need b_lo < b_hi");
  if (n_points < 50) throw ConfigError("bifurcation_scan: need n_points >= 50");

  const double db = (b_hi - b_lo) / (n_points - 1);
  std::vector<std::vector<BifurcationRow>> columns(n_points);
#pragma omp parallel for schedule(dynamic)
  for (int i = 0; i < n_points; ++i)
    columns[i] = rows_at(family, b_lo + db * i, d_probe);

  assign_branches(columns, db);

  std::vector<BifurcationRow> out;
  for (auto& col : columns)
    for (auto& row : col) out.push_back(std::move(row));
  return out;
}

namespace {

int certified_count(const ModelFamily& family, double b) {
  int n = 0;
  for (const auto& ss : find_steady_states(family(b)))
    if (!ss.fold_suspect) ++n;
  return n;
}

}  // namespace

std::vector<double> find_fold_points(const ModelFamily& family,
                                     const std::vector<BifurcationRow>& scan) {
  // Column counts in scan order (b is non-decreasing by construction).
  std::vector<std::pair<double, int>> counts;
  for (const auto& row : scan) {
    if (!row.error.empty()) continue;
    if (!counts.empty() && counts.back().first == row.b) {
      if (!row.fold_suspect) ++counts.back().second;
    } else {
      counts.emplace_back(row.b, row.fold_suspect ? 0 : 1);
    }
  }

  std::vector<double> folds;
  for (std::size_t i = 0; i + 1 < counts.size(); ++i) {
    auto [b0, c0] = counts[i];
    auto [b1, c1] = counts[i + 1];
    if (c0 == c1) continue;
    double lo = b0, hi = b1;
    int c_lo = c0;
    while (hi - lo > 1e-6) {
      const double mid = 0.5 * (lo + hi);
      const int cm = certified_count(family, mid);
      if (cm == c_lo) lo = mid;
      else hi = mid;
    }
    folds.push_back(0.5 * (lo + hi));
  }
  return folds;
}

std::vector<LevelCrossing> find_level_crossings(
    const ModelFamily& family, const std::vector<BifurcationRow>& scan,
    LevelKind level) {
  const auto level_at = [level](const FiringModel& m, double r_star) {
    if (level == LevelKind::A_eq_1) return 1.0;
    const double phi =
        m.kind() == FiringModel::Kind::Refractory ? m.phi()(r_star) : 0.0;
    return 1.0 + m.sigma() * phi;
  };

  // g(b) at the steady state nearest a target r*: A* - level(r*).
  const auto gap = [&](double b, double r_near, double& r_found) {
    const FiringModel model = family(b);
    const auto states = find_steady_states(model);
    const SteadyState* best = nullptr;
    for (const auto& ss : states) {
      if (ss.fold_suspect) continue;
      if (!best || std::abs(ss.r_star - r_near) < std::abs(best->r_star - r_near))
        best = &ss;
    }
    if (!best) throw NumericalError("find_level_crossings: branch lost");
    r_found = best->r_star;
    return best->A_star - level_at(model, best->r_star);
  };

  // Group scan rows by branch.
  std::vector<int> ids;
  for (const auto& row : scan)
    if (row.branch_id >= 0 &&
        std::find(ids.begin(), ids.end(), row.branch_id) == ids.end())
      ids.push_back(row.branch_id);

  std::vector<LevelCrossing> out;
  for (int id : ids) {
    std::vector<const BifurcationRow*> branch;
    for (const auto& row : scan)
      if (row.branch_id == id) branch.push_back(&row);
    for (std::size_t i = 0; i + 1 < branch.size(); ++i) {
      const double g0 =
          branch[i]->A_star - level_at(family(branch[i]->b), branch[i]->r_star);
      const double g1 = branch[i + 1]->A_star -
                        level_at(family(branch[i + 1]->b), branch[i + 1]->r_star);
      if (g0 == 0.0 || (g0 < 0.0) == (g1 < 0.0)) continue;

      double lo = branch[i]->b, hi = branch[i + 1]->b;
      double r_near = branch[i]->r_star;
      double g_lo = g0;
      try {
        while (hi - lo > 1e-6) {
          const double mid = 0.5 * (lo + hi);
          double r_found;
          const double gm = gap(mid, r_near, r_found);
          r_near = r_found;
          if ((gm < 0.0) == (g_lo < 0.0)) {
            lo = mid;
            g_lo = gm;
          } else {
            hi = mid;
          }
        }
        out.push_back({0.5 * (lo + hi), id});
      } catch (const std::exception&) {
        // Branch too short or lost near the crossing: leave it unbracketed.
      }
    }

    // A branch that dies between scan columns can still cross the level on
    // the stub between its last column and the fold, where A* climbs to the
    // merge value. Continue the branch with halving steps and bisect any
    // sign change of the gap.
    if (branch.size() < 2) continue;
    const double db = branch[1]->b - branch[0]->b;
    const double b_lo_scan = scan.front().b, b_hi_scan = scan.back().b;
    const auto continue_tail = [&](const BifurcationRow& prev2,
                                   const BifurcationRow& last, double dir) {
      double slope =
          (last.r_star - prev2.r_star) / (last.b - prev2.b);
      double b_prev = last.b, r_prev = last.r_star;
      double g_prev =
          last.A_star - level_at(family(last.b), last.r_star);
      double step = dir * std::abs(db);
      for (int guard = 0; guard < 300 && std::abs(step) > 1e-7; ++guard) {
        const double b_try = b_prev + step;
        const double r_pred = r_prev + slope * step;
        double r_found = 0.0, g_try = 0.0;
        bool ok = true;
        try {
          g_try = gap(b_try, r_pred, r_found);
        } catch (const std::exception&) {
          ok = false;
        }
        if (!ok || std::abs(r_found - r_pred) > 0.05) {
          step *= 0.5;
          continue;
        }
        if ((g_prev < 0.0) != (g_try < 0.0)) {
          double lo = b_prev, hi = b_try, g_lo = g_prev, rn = r_prev;
          while (std::abs(hi - lo) > 1e-6) {
            const double mid = 0.5 * (lo + hi);
            double rf;
            const double gm = gap(mid, rn, rf);
            rn = rf;
            if ((gm < 0.0) == (g_lo < 0.0)) { lo = mid; g_lo = gm; }
            else hi = mid;
          }
          out.push_back({0.5 * (lo + hi), id});
          return;
        }
        slope = (r_found - r_prev) / (b_try - b_prev);
        b_prev = b_try;
        r_prev = r_found;
        g_prev = g_try;
      }
    };
    if (branch.back()->b < b_hi_scan - 0.5 * std::abs(db))
      continue_tail(*branch[branch.size() - 2], *branch.back(), 1.0);
    if (branch.front()->b > b_lo_scan + 0.5 * std::abs(db))
      continue_tail(*branch[1], *branch.front(), -1.0);
  }
  std::sort(out.begin(), out.end(),
            [](const LevelCrossing& a, const LevelCrossing& b) { return a.b < b.b; });
  return out;
}

PseudoEqSequence pseudo_equilibrium_sequence(const FiringModel& model,
                                             double x0, int K) {
  if (!(x0 > 0.0)) throw ConfigError("pseudo_equilibrium_sequence: need x0 > 0");
  if (K < 1) throw ConfigError("pseudo_equilibrium_sequence: need K >= 1");

  PseudoEqSequence seq;
  seq.x.push_back(x0);
  double x = x0;
  for (int k = 1; k <= K; ++k) {
    const double xn = 1.0 / integral_I(model, x);
    seq.x.push_back(xn);
    if (xn > 1e6 || !std::isfinite(xn)) {
      seq.divergent = true;
      return seq;
    }
    if (std::abs(xn - x) <= 1e-12) {
      seq.converged = true;
      seq.fixed_point = xn;
      return seq;
    }
    x = xn;
  }
  return seq;
}

}  // namespace etm
