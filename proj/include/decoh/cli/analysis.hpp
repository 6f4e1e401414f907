#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "decoh/scaling/collapse.hpp"
#include "decoh/scaling/fits.hpp"

namespace decoh::cli {

inline const std::vector<std::string>& fits_header() {
  static const std::vector<std::string> h = {"model", "delta", "channel", "p", "window",
                                             "alpha", "s0", "g", "residual_rms"};
  return h;
}

inline const std::vector<std::string>& reference_header() {
  static const std::vector<std::string> h = {"model",  "delta", "channel",     "p",
                                             "window", "g",     "g_reference", "rel_deviation"};
  return h;
}

inline constexpr const char* kFitsCsv = "fits.csv";
inline constexpr const char* kFitReferenceCsv = "fit_reference.csv";
inline constexpr const char* kFitReport = "fit_report.json";
inline constexpr const char* kCollapseJson = "collapse.json";

struct FitCommandOptions {
  std::filesystem::path sweep_csv;
  std::filesystem::path out_dir;
  std::vector<std::vector<int>> windows;  // empty: consecutive windows of window_width
  int window_width = 3;
};

struct FitCommandSummary {
  int fits = 0;
  int extrapolations = 0;
  int skipped_windows = 0;
};

/// Writes fits.csv (one row per group, p and window), fit_reference.csv (rows
/// at p = 1/2 that have a closed-form e^{s0}) and fit_report.json (1/L_sd
/// extrapolations wherever a p has >= 3 windows, plus skipped windows).
FitCommandSummary run_fit(const FitCommandOptions& options);

/// Standard error of s0 from the stored rms residual of a fit over `window`.
double s0_stderr(double residual_rms, const std::vector<int>& window);

struct CollapseCommandOptions {
  std::filesystem::path fits_csv;
  std::filesystem::path out_dir;
  scaling::CollapseParams init{0.4, 2.0, 0.0};
  scaling::CollapseBounds bounds;
  scaling::CollapseOptions collapse;
  std::optional<std::string> model;  // select a group when fits.csv has several
  std::optional<double> delta;
  std::optional<std::string> channel;
};

/// Builds L_sd -> (p, e^{s0}, sigma) curves from fits.csv and writes
/// collapse.json. Uncertainties come from the fit residuals, floored at 1e-4.
scaling::CollapseResult run_collapse(const CollapseCommandOptions& options);

/// Curves as collapse sees them (before any p window).
scaling::CollapseCurves read_collapse_curves(const CollapseCommandOptions& options,
                                             std::string* group_label = nullptr);

}  // namespace decoh::cli
