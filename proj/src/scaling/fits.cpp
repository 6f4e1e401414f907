#include "decoh/scaling/fits.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numbers>
#include <sstream>

#include "decoh/error.hpp"

namespace decoh::scaling {

namespace {

// Values this far below the largest one are rounding noise on an exact zero
// (e.g. odd-distance correlators of the XX chain).
constexpr double kZeroCorrelator = 1e-12;

struct Line {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
  double intercept_stderr = 0.0;
};

Line least_squares(const std::vector<double>& x, const std::vector<double>& y) {
  const auto n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (sxx <= 0.0) throw InvalidInput("least squares: abscissae are all equal");
  Line line;
  line.slope = sxy / sxx;
  line.intercept = my - line.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - (line.intercept + line.slope * x[i]);
    ssr += r * r;
  }
  line.residual_rms = std::sqrt(ssr / n);
  if (x.size() > 2) {
    const double s2 = ssr / (n - 2.0);
    line.intercept_stderr = std::sqrt(s2 * (1.0 / n + mx * mx / sxx));
  }
  return line;
}

}  // namespace

double FitResult::g() const { return std::exp(s0); }

FitResult fit_linear_s0(std::span<const SeeSample> samples) {
  if (samples.empty()) throw InvalidInput("fit_linear_s0: no samples");
  const SeeSample& first = samples.front();
  std::map<int, double> by_size;
  for (const SeeSample& s : samples) {
    if (s.p != first.p || s.backend != first.backend) {
      throw InvalidInput("fit_linear_s0: samples mix p values or backends");
    }
    if (!std::isfinite(s.S_SE) || s.S_SE < -1e-10) {
      throw InvalidInput("fit_linear_s0: S_SE must be finite and nonnegative (L=" +
                         std::to_string(s.L) + ")");
    }
    const auto [it, inserted] = by_size.emplace(s.L, s.S_SE);
    if (!inserted && std::abs(it->second - s.S_SE) > 1e-9) {
      throw InvalidInput("fit_linear_s0: conflicting S_SE values for L=" +
                         std::to_string(s.L));
    }
  }
  if (by_size.size() < 3) {
    throw InvalidInput("fit_linear_s0: need at least 3 distinct sizes, got " +
                       std::to_string(by_size.size()));
  }
  std::vector<double> x, y;
  FitResult fit;
  for (const auto& [L, s] : by_size) {
    x.push_back(L);
    y.push_back(s);
    fit.L_window.push_back(L);
  }
  const Line line = least_squares(x, y);
  fit.alpha = line.slope;
  fit.s0 = -line.intercept;
  fit.residual_rms = line.residual_rms;
  fit.s0_stderr = line.intercept_stderr;
  return fit;
}

LineFit extrapolate_s0(std::span<const std::pair<int, double>> s0_by_L_sd) {
  if (s0_by_L_sd.size() < 3) {
    throw InvalidInput("extrapolate_s0: need at least 3 windows, got " +
                       std::to_string(s0_by_L_sd.size()));
  }
  std::vector<double> x, y;
  for (const auto& [L, s0] : s0_by_L_sd) {
    if (L <= 0 || !std::isfinite(s0)) throw InvalidInput("extrapolate_s0: bad point");
    x.push_back(1.0 / L);
    y.push_back(s0);
  }
  const Line line = least_squares(x, y);
  return {line.slope, line.intercept, line.residual_rms};
}

PowerLawFit fit_power_law(std::span<const std::pair<double, double>> profile) {
  double largest = 0.0;
  for (const auto& [r, c] : profile) {
    if (std::isfinite(c)) largest = std::max(largest, c);
  }
  std::vector<double> x, y;
  for (const auto& [r, c] : profile) {
    if (r > 0.0 && c > kZeroCorrelator * largest && std::isfinite(c)) {
      x.push_back(std::log(r));
      y.push_back(std::log(c));
    }
  }
  if (x.size() < 4) {
    throw InvalidInput("fit_power_law: need at least 4 positive points, got " +
                       std::to_string(x.size()));
  }
  const Line line = least_squares(x, y);
  PowerLawFit fit;
  fit.eta = -line.slope;
  fit.amplitude = std::exp(line.intercept);
  fit.points_used = static_cast<int>(x.size());
  fit.residual_rms = line.residual_rms;
  return fit;
}

double chord_distance(double r, int L) {
  return L / std::numbers::pi * std::sin(std::numbers::pi * r / L);
}

std::vector<std::pair<double, double>> distance_profile(
    std::span<const std::pair<int, double>> correlator, int L, Boundary boundary) {
  std::vector<std::pair<double, double>> out;
  for (const auto& [r, c] : correlator) {
    if (r <= 0) continue;
    const double d = boundary == Boundary::Periodic ? chord_distance(r, L) : r;
    out.emplace_back(d, std::abs(c));
  }
  return out;
}

std::vector<std::vector<int>> consecutive_windows(std::vector<int> sizes, int width) {
  if (width < 3) throw InvalidInput("fit windows need at least 3 sizes");
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());
  std::vector<std::vector<int>> out;
  for (std::size_t i = 0; i + width <= sizes.size(); ++i) {
    out.emplace_back(sizes.begin() + static_cast<std::ptrdiff_t>(i),
                     sizes.begin() + static_cast<std::ptrdiff_t>(i + width));
  }
  return out;
}

std::string window_label(std::span<const int> window) {
  std::string out;
  for (std::size_t i = 0; i < window.size(); ++i) {
    if (i) out += '-';
    out += std::to_string(window[i]);
  }
  return out;
}

std::vector<int> parse_window_label(const std::string& label) {
  std::vector<int> out;
  std::stringstream ss(label);
  std::string part;
  while (std::getline(ss, part, '-')) {
    std::size_t used = 0;
    int value = 0;
    try {
      value = std::stoi(part, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (used == 0 || used != part.size() || value <= 0) {
      throw InvalidInput("bad window label '" + label + "' (expected e.g. 6-8-10)");
    }
    out.push_back(value);
  }
  if (out.size() < 3) throw InvalidInput("window '" + label + "' has fewer than 3 sizes");
  if (!std::is_sorted(out.begin(), out.end()) ||
      std::adjacent_find(out.begin(), out.end()) != out.end()) {
    throw InvalidInput("window '" + label + "' must list increasing sizes");
  }
  return out;
}

double luttinger_parameter(double delta) {
  if (!(std::abs(delta) < 1.0)) {
    throw InvalidInput("Luttinger parameter needs |delta| < 1, got " + std::to_string(delta));
  }
  return std::numbers::pi / (2.0 * (std::numbers::pi - std::acos(delta)));
}

double reference_g_value(ModelKind model, double delta, ChannelKind channel) {
  if (model == ModelKind::Tfim) {
    if (channel == ChannelKind::ZZ) return 1.0;
    if (channel == ChannelKind::XplusZZ) return 2.0;
  } else if (channel == ChannelKind::ZZ) {
    return 2.0 * std::sqrt(2.0 * luttinger_parameter(delta));
  }
  throw InvalidInput("no reference g value for " + std::string(to_string(model)) +
                     " under the " + std::string(to_string(channel)) + " channel");
}

PhaseLabel classify_phase(double c2_longrange, double c1_longrange,
                          const PhaseThresholds& thresholds) {
  PhaseLabel label{Phase::Symmetric, c2_longrange, c1_longrange};
  const double c1 = std::abs(c1_longrange);
  if (c2_longrange >= thresholds.c2) {
    label.phase = c1 <= thresholds.c1 ? Phase::SWSSB : Phase::StrongToTrivial;
  }
  return label;
}

std::string_view to_string(Phase phase) {
  switch (phase) {
    case Phase::Symmetric: return "symmetric";
    case Phase::SWSSB: return "swssb";
    case Phase::StrongToTrivial: return "strong_to_trivial";
  }
  return "?";
}

}  // namespace decoh::scaling
