#include "decoh/scaling/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "decoh/error.hpp"

namespace decoh::scaling {

namespace {

constexpr double kReflect = 1.0;
constexpr double kExpand = 2.0;
constexpr double kContract = 0.5;
constexpr double kShrink = 0.5;

}  // namespace

SimplexResult nelder_mead(const std::function<double(const std::vector<double>&)>& f,
                          std::vector<double> x0, const std::vector<double>& step,
                          const SimplexOptions& options) {
  const std::size_t n = x0.size();
  if (n == 0 || step.size() != n) {
    throw InvalidInput("nelder_mead: start point and step sizes must match");
  }
  SimplexResult result;
  auto eval = [&](const std::vector<double>& x) {
    ++result.evaluations;
    const double v = f(x);
    return std::isfinite(v) ? v : std::numeric_limits<double>::infinity();
  };

  std::vector<std::vector<double>> simplex(n + 1, x0);
  for (std::size_t i = 0; i < n; ++i) simplex[i + 1][i] += step[i];
  std::vector<double> values(n + 1);
  for (std::size_t i = 0; i <= n; ++i) values[i] = eval(simplex[i]);

  std::vector<std::size_t> order(n + 1);
  std::vector<double> centroid(n), trial(n), trial2(n);
  auto along = [&](double t, std::vector<double>& out) {
    // centroid + t (centroid - worst)
    for (std::size_t k = 0; k < n; ++k) {
      out[k] = centroid[k] + t * (centroid[k] - simplex[order[n]][k]);
    }
  };

  while (result.evaluations < options.max_evaluations) {
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order[0];
    const std::size_t worst = order[n];

    double spread = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
      for (std::size_t k = 0; k < n; ++k) {
        spread = std::max(spread, std::abs(simplex[order[i]][k] - simplex[best][k]));
      }
    }
    if (std::isfinite(values[worst]) &&
        values[worst] - values[best] <= options.f_tolerance &&
        spread <= options.x_tolerance) {
      result.converged = true;
      break;
    }

    std::fill(centroid.begin(), centroid.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t k = 0; k < n; ++k) centroid[k] += simplex[order[i]][k];
    }
    for (double& c : centroid) c /= static_cast<double>(n);

    along(kReflect, trial);
    const double fr = eval(trial);
    if (fr < values[best]) {
      along(kExpand, trial2);
      const double fe = eval(trial2);
      if (fe < fr) {
        simplex[worst] = trial2;
        values[worst] = fe;
      } else {
        simplex[worst] = trial;
        values[worst] = fr;
      }
      continue;
    }
    if (fr < values[order[n - 1]]) {
      simplex[worst] = trial;
      values[worst] = fr;
      continue;
    }
    // Outside contraction if the reflection improved on the worst, else inside.
    const bool outside = fr < values[worst];
    along(outside ? kContract : -kContract, trial2);
    const double fc = eval(trial2);
    if (fc < (outside ? fr : values[worst])) {
      simplex[worst] = trial2;
      values[worst] = fc;
      continue;
    }
    for (std::size_t i = 1; i <= n; ++i) {
      auto& v = simplex[order[i]];
      for (std::size_t k = 0; k < n; ++k) {
        v[k] = simplex[best][k] + kShrink * (v[k] - simplex[best][k]);
      }
      values[order[i]] = eval(v);
    }
  }

  const auto it = std::min_element(values.begin(), values.end());
  result.x = simplex[static_cast<std::size_t>(it - values.begin())];
  result.value = *it;
  return result;
}

}  // namespace decoh::scaling
