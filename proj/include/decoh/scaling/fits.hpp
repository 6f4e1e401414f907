#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "decoh/backend.hpp"
#include "decoh/engine/channel.hpp"
#include "decoh/spin/model.hpp"

namespace decoh::scaling {

struct SeeSample {
  int L = 0;
  double p = 0.0;
  double S_SE = 0.0;
  Backend backend = Backend::Dense;
  double truncation_weight = 0.0;
};

/// S_SE(L) = alpha L - s0 over the sizes in L_window.
struct FitResult {
  double alpha = 0.0;
  double s0 = 0.0;
  double residual_rms = 0.0;
  double s0_stderr = 0.0;  // ordinary least-squares standard error; 0 for 3 exact points
  std::vector<int> L_window;

  double g() const;  // e^{s0}
  int L_sd() const { return L_window.empty() ? 0 : L_window.front(); }
};

/// Throws InvalidInput for fewer than 3 distinct sizes, mixed p or backend, a
/// negative or non-finite S_SE, or duplicated sizes whose S_SE differ by > 1e-9.
FitResult fit_linear_s0(std::span<const SeeSample> samples);

struct LineFit {
  double slope = 0.0;
  double intercept = 0.0;
  double residual_rms = 0.0;
};

/// Least-squares line of s0 against 1/L_sd. Needs >= 3 windows.
LineFit extrapolate_s0(std::span<const std::pair<int, double>> s0_by_L_sd);

struct PowerLawFit {
  double eta = 0.0;
  double amplitude = 0.0;
  int points_used = 0;
  double residual_rms = 0.0;  // in log space
};

/// |C| ~ A r^{-eta} by least squares on (log r, log |C|). Points with r <= 0
/// or a value <= 1e-12 of the largest are dropped; fewer than 4 remaining is
/// an error.
PowerLawFit fit_power_law(std::span<const std::pair<double, double>> profile);

/// r -> (L/pi) sin(pi r / L), the distance used for periodic chains.
double chord_distance(double r, int L);

/// Profile (r, |C(0,r)|) with chord distances when `boundary` is periodic.
/// r = 0 is skipped.
std::vector<std::pair<double, double>> distance_profile(
    std::span<const std::pair<int, double>> correlator, int L, Boundary boundary);

/// Consecutive windows of `width` sizes taken from the sorted distinct sizes.
std::vector<std::vector<int>> consecutive_windows(std::vector<int> sizes, int width);

/// "6-8-10"
std::string window_label(std::span<const int> window);
std::vector<int> parse_window_label(const std::string& label);

/// Tomonaga-Luttinger parameter K = pi / (2 (pi - arccos delta)).
double luttinger_parameter(double delta);

/// Expected e^{s0} at maximal decoherence: 1 for TFIM under ZZ, 2 for TFIM
/// under X+ZZ, 2 sqrt(2K) for XXZ under ZZ. Throws InvalidInput for
/// |delta| >= 1 or a combination without a known value.
double reference_g_value(ModelKind model, double delta,
                         ChannelKind channel = ChannelKind::ZZ);

enum class Phase { Symmetric, SWSSB, StrongToTrivial };

struct PhaseThresholds {
  double c2 = 0.5;
  double c1 = 0.1;
};

struct PhaseLabel {
  Phase phase = Phase::Symmetric;
  double c2_longrange = 0.0;
  double c1_longrange = 0.0;
};

/// SWSSB when C^II is long-ranged and |C^I| is not; StrongToTrivial when
/// both are; Symmetric otherwise. Inputs are the values at r = L/2.
PhaseLabel classify_phase(double c2_longrange, double c1_longrange,
                          const PhaseThresholds& thresholds = {});

std::string_view to_string(Phase phase);

}  // namespace decoh::scaling
