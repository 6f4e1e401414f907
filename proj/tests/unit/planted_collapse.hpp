#pragma once

#include <cmath>
#include <random>

#include "decoh/scaling/collapse.hpp"

namespace fixture {

/// Synthetic e^{s0} curves y = L^{zeta/nu} g((p - p_c) L^{1/nu}) with
/// g(x) = 1.5 + tanh(1.5 x) and Gaussian relative noise.
inline decoh::scaling::CollapseCurves planted_curves(double p_c, double nu, double zeta,
                                                     double noise, unsigned seed,
                                                     std::initializer_list<int> sizes = {
                                                         8, 16, 32, 64}) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  decoh::scaling::CollapseCurves curves;
  for (int L : sizes) {
    auto& pts = curves[L];
    for (int k = 0; k <= 24; ++k) {
      const double p = 0.2 + 0.0125 * k;
      const double x = (p - p_c) * std::pow(L, 1.0 / nu);
      const double clean = std::pow(L, zeta / nu) * (1.5 + std::tanh(1.5 * x));
      const double y = clean * (1.0 + noise * gauss(rng));
      pts.push_back({p, y, std::max(noise * clean, decoh::scaling::kSigmaFloor)});
    }
  }
  return curves;
}

}  // namespace fixture
