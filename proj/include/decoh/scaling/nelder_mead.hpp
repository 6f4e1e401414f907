#pragma once

#include <functional>
#include <vector>

namespace decoh::scaling {

struct SimplexOptions {
  int max_evaluations = 4000;
  double f_tolerance = 1e-12;  // spread of simplex values
  double x_tolerance = 1e-9;   // largest vertex distance from the best vertex
};

struct SimplexResult {
  std::vector<double> x;
  double value = 0.0;
  int evaluations = 0;
  bool converged = false;
};

/// Derivative-free minimization with the standard reflection / expansion /
/// contraction / shrink moves. Non-finite objective values count as +inf, so
/// bounds can be imposed by returning infinity outside them.
SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const std::vector<double>& step,
                          const SimplexOptions& options = {});

}  // namespace decoh::scaling
