#include "etm/quadrature.hpp"

namespace etm {

namespace {
constexpr std::array<double, 8> kAbs = {
    0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
    0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
    0.9445750230732326, 0.9894009349916499};
constexpr std::array<double, 8> kW = {
    0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
    0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
    0.0622535239386479, 0.0271524594117541};

std::array<double, 16> make_nodes() {
  std::array<double, 16> x{};
  for (int i = 0; i < 8; ++i) {
    x[2 * i] = -kAbs[i];
    x[2 * i + 1] = kAbs[i];
  }
  return x;
}

std::array<double, 16> make_weights() {
  std::array<double, 16> w{};
  for (int i = 0; i < 8; ++i) {
    w[2 * i] = kW[i];
    w[2 * i + 1] = kW[i];
  }
  return w;
}
}  // namespace

const std::array<double, 16>& Gauss16::nodes() {
  static const std::array<double, 16> x = make_nodes();
  return x;
}

const std::array<double, 16>& Gauss16::weights() {
  static const std::array<double, 16> w = make_weights();
  return w;
}

}  // namespace etm
