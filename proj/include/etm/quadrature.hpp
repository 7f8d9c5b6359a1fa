#ifndef ETM_QUADRATURE_HPP
#define ETM_QUADRATURE_HPP

#include <algorithm>
#include <array>
#include <cmath>
#include <vector>

namespace etm {

// 16-point Gauss-Legendre rule on [-1,1].
struct Gauss16 {
  static constexpr int n = 16;
  static const std::array<double, 16>& nodes();
  static const std::array<double, 16>& weights();
};

// Integrate f over [a,b] with a single 16-point panel.
template <typename F>
auto gauss_panel(F&& f, double a, double b) {
  const auto& x = Gauss16::nodes();
  const auto& w = Gauss16::weights();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  auto acc = h * w[0] * f(c + h * x[0]);
  for (int i = 1; i < Gauss16::n; ++i) acc += h * w[i] * f(c + h * x[i]);
  return acc;
}

// Composite Gauss over [a,b] with panel width <= max_width and panel edges
// pinned at each breakpoint in `pins` that falls inside (a,b).
template <typename F>
auto gauss_composite(F&& f, double a, double b, double max_width,
                     std::initializer_list<double> pins = {}) {
  std::vector<double> edges{a};
  for (double p : pins)
    if (p > a && p < b) edges.push_back(p);
  edges.push_back(b);
  std::sort(edges.begin(), edges.end());
  auto acc = decltype(f(a))(0);
  for (std::size_t k = 0; k + 1 < edges.size(); ++k) {
    const double lo = edges[k], hi = edges[k + 1];
    const int m = std::max(1, static_cast<int>(std::ceil((hi - lo) / max_width)));
    const double w = (hi - lo) / m;
    for (int j = 0; j < m; ++j) acc += gauss_panel(f, lo + j * w, lo + (j + 1) * w);
  }
  return acc;
}

// Adaptive bisection with Gauss panels: refine until the two-half estimate
// agrees with the single-panel estimate to rel_tol, down to max_depth levels.
template <typename F>
double gauss_adaptive(F&& f, double a, double b, double rel_tol = 1e-10,
                      int max_depth = 30) {
  struct Rec {
    F& f;
    double rel_tol;
    double run(double lo, double hi, double whole, int depth) {
      const double mid = 0.5 * (lo + hi);
      const double left = gauss_panel(f, lo, mid);
      const double right = gauss_panel(f, mid, hi);
      const double err = std::abs(left + right - whole);
      if (depth <= 0 || err <= rel_tol * (1.0 + std::abs(left + right)))
        return left + right;
      return run(lo, mid, left, depth - 1) + run(mid, hi, right, depth - 1);
    }
  } rec{f, rel_tol};
  return rec.run(a, b, gauss_panel(f, a, b), max_depth);
}

// Deterministic pairwise summation; independent of thread count because it
// runs over a fully materialized array in index order.
inline double pairwise_sum(const double* v, std::size_t n) {
  if (n <= 8) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += v[i];
    return s;
  }
  const std::size_t half = n / 2;
  return pairwise_sum(v, half) + pairwise_sum(v + half, n - half);
}

inline double pairwise_sum(const std::vector<double>& v) {
  return pairwise_sum(v.data(), v.size());
}

}  // namespace etm

#endif
