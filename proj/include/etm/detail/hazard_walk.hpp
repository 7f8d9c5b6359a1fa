#ifndef ETM_DETAIL_HAZARD_WALK_HPP
#define ETM_DETAIL_HAZARD_WALK_HPP

#include <algorithm>
#include <cmath>
#include <vector>

#include "etm/firing_model.hpp"
#include "etm/quadrature.hpp"

namespace etm::detail {

// Panel width for age quadratures: integrands are piecewise smooth with a
// kink at a = sigma, so panels are pinned there and sized against the
// hazard's scale.
inline double age_panel_width(const FiringModel& model) {
  const double hi = model.hazard_upper_bound();
  return std::min(model.sigma(), 1.0 / std::max(hi, 1e-9)) / 4.0;
}

// Visits ascending Gauss nodes of a composite panel decomposition of
// [0, a_max] (edges pinned at sigma), passing (a, weight, cumS(a)) for each
// node. cumS is accumulated panel-by-panel so Custom models avoid a fresh
// adaptive quadrature from zero at every node.
template <typename Visit>
void walk_hazard_nodes(const FiringModel& model, double r, double a_max,
                       Visit&& visit) {
  const double width = age_panel_width(model);
  std::vector<double> edges{0.0};
  if (model.sigma() < a_max) edges.push_back(model.sigma());
  edges.push_back(a_max);

  // Sorted copy of the node set (the raw table alternates signs).
  std::array<double, 16> xs = Gauss16::nodes();
  std::array<double, 16> ws = Gauss16::weights();
  for (int i = 0; i < 16; ++i)
    for (int j = i + 1; j < 16; ++j)
      if (xs[j] < xs[i]) {
        std::swap(xs[i], xs[j]);
        std::swap(ws[i], ws[j]);
      }

  const bool closed_form = model.kind() == FiringModel::Kind::Refractory;
  double cum_lo = 0.0;
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double lo = edges[k], hi = edges[k + 1];
    const int m = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
    const double pw = (hi - lo) / m;
    for (int j = 0; j < m; ++j) {
      const double plo = lo + j * pw, phi = lo + (j + 1) * pw;
      const double c = 0.5 * (plo + phi), h = 0.5 * (phi - plo);
      for (int i = 0; i < 16; ++i) {
        const double a = c + h * xs[i];
        const double cum =
            closed_form
                ? model.cumulative_S(a, r)
                : cum_lo + gauss_panel([&](double s) { return model.eval_S(s, r); },
                                       plo, a);
        visit(a, h * ws[i], cum);
      }
      if (!closed_form)
        cum_lo += gauss_panel([&](double s) { return model.eval_S(s, r); }, plo, phi);
    }
  }
}

}  // namespace etm::detail

#endif
