#include "decoh/scaling/collapse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>

#include "decoh/error.hpp"
#include "decoh/scaling/nelder_mead.hpp"

namespace decoh::scaling {

namespace {

struct Scaled {
  double x, y, var;
};

std::vector<std::vector<Scaled>> scale(const CollapseCurves& curves,
                                       const CollapseParams& params) {
  std::vector<std::vector<Scaled>> out;
  for (const auto& [L, points] : curves) {
    const double lx = std::pow(static_cast<double>(L), 1.0 / params.nu);
    const double ly = std::pow(static_cast<double>(L), -params.zeta / params.nu);
    auto& dst = out.emplace_back();
    for (const CurvePoint& pt : points) {
      const double s = std::max(pt.sigma, kSigmaFloor) * ly;
      dst.push_back({(pt.p - params.p_c) * lx, pt.y * ly, s * s});
    }
  }
  return out;
}

int total_points(const CollapseCurves& curves) {
  int n = 0;
  for (const auto& [L, points] : curves) n += static_cast<int>(points.size());
  return n;
}

// Fewer comparable points than this makes the quality meaningless (a collapse
// that pushes the sizes apart would otherwise score well).
int minimum_terms(const CollapseCurves& curves) {
  return std::max(3, total_points(curves) / 4);
}

}  // namespace

bool CollapseBounds::contains(const CollapseParams& q) const {
  return q.p_c >= p_c_min && q.p_c <= p_c_max && q.nu >= nu_min && q.nu <= nu_max &&
         q.zeta >= zeta_min && q.zeta <= zeta_max;
}

QualityTerms collapse_quality(const CollapseCurves& curves, const CollapseParams& params) {
  const auto sets = scale(curves, params);
  QualityTerms q;
  double sum = 0.0;
  for (std::size_t i = 0; i < sets.size(); ++i) {
    for (const Scaled& pt : sets[i]) {
      // Weighted line through the two bracketing points of every other size.
      double k = 0.0, kx = 0.0, ky = 0.0, kxx = 0.0, kxy = 0.0;
      int used = 0;
      for (std::size_t j = 0; j < sets.size(); ++j) {
        if (j == i) continue;
        const auto& other = sets[j];
        for (std::size_t m = 0; m + 1 < other.size(); ++m) {
          if (other[m].x <= pt.x && pt.x <= other[m + 1].x) {
            for (const Scaled* o : {&other[m], &other[m + 1]}) {
              const double w = 1.0 / o->var;
              k += w;
              kx += w * o->x;
              ky += w * o->y;
              kxx += w * o->x * o->x;
              kxy += w * o->x * o->y;
            }
            ++used;
            break;
          }
        }
      }
      if (used == 0) continue;
      const double det = k * kxx - kx * kx;
      if (!(det > 0.0)) continue;
      const double fit = ((kxx * ky - kx * kxy) + pt.x * (k * kxy - kx * ky)) / det;
      const double fit_var = (kxx - 2.0 * pt.x * kx + pt.x * pt.x * k) / det;
      const double r = pt.y - fit;
      sum += r * r / (pt.var + fit_var);
      ++q.terms;
    }
  }
  q.quality = q.terms > 0 ? sum / q.terms : std::numeric_limits<double>::infinity();
  return q;
}

CollapseResult fss_collapse(CollapseCurves curves, const CollapseParams& init,
                            CollapseBounds bounds, const CollapseOptions& options) {
  if (options.restarts < 1) throw InvalidInput("fss_collapse: restarts must be >= 1");
  for (auto it = curves.begin(); it != curves.end();) {
    auto& points = it->second;
    if (options.p_window) {
      const auto [lo, hi] = *options.p_window;
      std::erase_if(points, [&](const CurvePoint& pt) { return pt.p < lo || pt.p > hi; });
    }
    std::sort(points.begin(), points.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.p < b.p; });
    for (const CurvePoint& pt : points) {
      if (!std::isfinite(pt.p) || !std::isfinite(pt.y) || !std::isfinite(pt.sigma)) {
        throw InvalidInput("fss_collapse: non-finite data for L_sd=" +
                           std::to_string(it->first));
      }
    }
    it = points.size() < 2 ? curves.erase(it) : std::next(it);
  }
  if (curves.size() < 3) {
    throw InvalidInput("fss_collapse: need at least 3 sizes with >= 2 points each, got " +
                       std::to_string(curves.size()));
  }

  double p_lo = std::numeric_limits<double>::infinity();
  double p_hi = -p_lo;
  for (const auto& [L, points] : curves) {
    p_lo = std::min(p_lo, points.front().p);
    p_hi = std::max(p_hi, points.back().p);
  }
  bounds.p_c_min = std::max(bounds.p_c_min, p_lo);
  bounds.p_c_max = std::min(bounds.p_c_max, p_hi);
  if (!(bounds.p_c_min < bounds.p_c_max) || !(bounds.nu_min < bounds.nu_max) ||
      bounds.nu_min <= 0.0 || !(bounds.zeta_min <= bounds.zeta_max)) {
    throw InvalidInput("fss_collapse: empty parameter bounds after intersecting with the "
                       "data range [" + std::to_string(p_lo) + ", " +
                       std::to_string(p_hi) + "]");
  }
  if (!bounds.contains(init)) {
    throw InvalidInput("fss_collapse: initial parameters lie outside the bounds");
  }

  const int need = minimum_terms(curves);
  const QualityTerms at_init = collapse_quality(curves, init);
  if (at_init.terms < need) {
    std::ostringstream msg;
    msg << "fss_collapse: insufficient overlap after scaling at p_c=" << init.p_c
        << " nu=" << init.nu << " zeta=" << init.zeta << ": " << at_init.terms
        << " of " << total_points(curves) << " points have neighbours in other sizes ("
        << need << " needed)";
    throw InvalidInput(msg.str());
  }

  auto objective = [&](const std::vector<double>& v) {
    const CollapseParams q{v[0], v[1], v[2]};
    if (!bounds.contains(q)) return std::numeric_limits<double>::infinity();
    const QualityTerms t = collapse_quality(curves, q);
    return t.terms < need ? std::numeric_limits<double>::infinity() : t.quality;
  };
  const std::vector<double> step = {0.1 * (bounds.p_c_max - bounds.p_c_min),
                                    0.1 * (bounds.nu_max - bounds.nu_min),
                                    0.1 * std::max(bounds.zeta_max - bounds.zeta_min, 1e-3)};

  std::mt19937_64 rng(options.seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  CollapseResult result;
  result.quality = std::numeric_limits<double>::infinity();
  for (int r = 0; r < options.restarts; ++r) {
    CollapseParams start = init;
    if (r > 0) {
      start.p_c = bounds.p_c_min + unit(rng) * (bounds.p_c_max - bounds.p_c_min);
      start.nu = bounds.nu_min + unit(rng) * (bounds.nu_max - bounds.nu_min);
      start.zeta = bounds.zeta_min + unit(rng) * (bounds.zeta_max - bounds.zeta_min);
    }
    SimplexOptions so;
    so.max_evaluations = options.max_evaluations / 2;
    auto first = nelder_mead(objective, {start.p_c, start.nu, start.zeta}, step, so);
    // A second descent from the first optimum guards against a collapsed simplex.
    auto polished = nelder_mead(objective, first.x,
                                {step[0] * 0.1, step[1] * 0.1, step[2] * 0.1}, so);
    const auto& best = polished.value <= first.value ? polished : first;

    RestartSummary summary;
    summary.start = start;
    summary.end = {best.x[0], best.x[1], best.x[2]};
    summary.quality = best.value;
    summary.evaluations = first.evaluations + polished.evaluations;
    summary.converged = polished.converged;
    result.total_evaluations += summary.evaluations;
    result.trace.push_back(summary);

    const bool better =
        summary.quality < result.quality ||
        (summary.quality == result.quality &&
         (summary.end.p_c < result.p_c ||
          (summary.end.p_c == result.p_c && summary.end.nu < result.nu)));
    if (std::isfinite(summary.quality) && better) {
      result.p_c = summary.end.p_c;
      result.nu = summary.end.nu;
      result.zeta = summary.end.zeta;
      result.quality = summary.quality;
      result.best_restart = r;
    }
  }
  if (!std::isfinite(result.quality)) {
    throw NumericalFailure("fss_collapse: no restart reached a finite quality inside the "
                           "bounds");
  }
  if (!bounds.contains({result.p_c, result.nu, result.zeta})) {
    throw NumericalFailure("fss_collapse: optimizer left the parameter bounds");
  }
  return result;
}

}  // namespace decoh::scaling
