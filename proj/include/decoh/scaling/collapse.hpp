#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace decoh::scaling {

struct CurvePoint {
  double p = 0.0;
  double y = 0.0;      // e^{s0}
  double sigma = 0.0;  // uncertainty on y; floored at kSigmaFloor
};

inline constexpr double kSigmaFloor = 1e-4;

/// L_sd -> points of one size window.
using CollapseCurves = std::map<int, std::vector<CurvePoint>>;

struct CollapseParams {
  double p_c = 0.0;
  double nu = 1.0;
  double zeta = 0.0;
};

struct CollapseBounds {
  double p_c_min = 0.0;
  double p_c_max = 0.5;
  double nu_min = 0.5;
  double nu_max = 6.0;
  double zeta_min = -0.5;
  double zeta_max = 0.5;

  bool contains(const CollapseParams& params) const;
};

struct CollapseOptions {
  int restarts = 16;
  std::uint64_t seed = 1;
  int max_evaluations = 3000;  // per restart
  std::optional<std::pair<double, double>> p_window;  // keep p_lo <= p <= p_hi
};

struct RestartSummary {
  CollapseParams start;
  CollapseParams end;
  double quality = 0.0;
  int evaluations = 0;
  bool converged = false;
};

struct CollapseResult {
  double p_c = 0.0;
  double nu = 1.0;
  double zeta = 0.0;
  double quality = 0.0;
  int total_evaluations = 0;
  int best_restart = 0;
  std::vector<RestartSummary> trace;
};

struct QualityTerms {
  double quality = 0.0;  // mean normalized squared residual
  int terms = 0;         // points that had neighbours in other sizes
};

/// Master-curve quality for the ansatz y = L^{zeta/nu} g((p - p_c) L^{1/nu}).
/// Each scaled point is compared with a weighted line through the bracketing
/// points of every other size, normalized by the combined variance.
QualityTerms collapse_quality(const CollapseCurves& curves, const CollapseParams& params);

/// Clips curves to the p window, checks >= 3 sizes and overlap at `init`, then
/// runs multi-start simplex descent inside `bounds`. `bounds` p_c range is
/// intersected with the data range. Restart 0 starts at `init`; the rest start
/// at seeded uniform points. The best quality wins; ties go to lower p_c, then
/// lower nu.
CollapseResult fss_collapse(CollapseCurves curves, const CollapseParams& init,
                            CollapseBounds bounds, const CollapseOptions& options = {});

}  // namespace decoh::scaling
