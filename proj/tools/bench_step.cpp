#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>

#include "etm/firing_model.hpp"
#include "etm/simulator.hpp"

// Times the per-step cell kernel: OpenMP version against the serial
// reference, on a custom (non-refractory) hazard so the generic exp path is
// exercised. Also checks that both produce bitwise identical activity.

int main(int argc, char** argv) {
  const int steps = argc > 1 ? std::atoi(argv[1]) : 2000;

  const double sigma = 0.5;
  auto S = [sigma](double a, double r) {
    if (a < sigma) return 0.0;
    return 0.5 + r * r / (r * r + 1.0) * (1.0 + 0.1 * std::tanh(a - sigma));
  };
  auto dS = [sigma](double a, double r) {
    if (a < sigma) return 0.0;
    const double den = r * r + 1.0;
    return 2.0 * r / (den * den) * (1.0 + 0.1 * std::tanh(a - sigma));
  };
  const auto model = etm::FiringModel::custom(S, dS, 0.5, sigma);

  const auto grid = etm::make_age_grid(model, sigma / 2000.0);
  const auto n0 = [](double a) { return std::exp(-a); };
  const auto r0 = [](double) { return 0.5; };
  const double d = 16.0 * grid.delta_a;

  std::printf("cells=%zu steps=%d delta_a=%g\n", grid.n_cells, steps,
              grid.delta_a);

  const auto run = [&](bool parallel) {
    auto state = etm::init_state(grid, n0, r0, d);
    const auto t0 = std::chrono::steady_clock::now();
    for (int k = 0; k < steps; ++k) {
      if (parallel)
        etm::step(state, model, grid);
      else
        etm::step_serial(state, model, grid);
    }
    const auto t1 = std::chrono::steady_clock::now();
    const double sec = std::chrono::duration<double>(t1 - t0).count();
    return std::pair<double, double>(sec, state.r_current());
  };

  const auto [sec_serial, r_serial] = run(false);
  const auto [sec_omp, r_omp] = run(true);

  std::printf("serial: %.3f s (%.1f steps/s)\n", sec_serial, steps / sec_serial);
  std::printf("openmp: %.3f s (%.1f steps/s)\n", sec_omp, steps / sec_omp);
  std::printf("speedup: %.2fx\n", sec_serial / sec_omp);
  if (r_serial != r_omp) {
    std::printf("MISMATCH: serial r=%.17g omp r=%.17g\n", r_serial, r_omp);
    return 1;
  }
  std::printf("outputs identical (r=%.17g)\n", r_serial);
  return 0;
}
