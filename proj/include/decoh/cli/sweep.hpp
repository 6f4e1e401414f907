#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "decoh/cli/config.hpp"

namespace decoh::cli {

inline constexpr int kSchemaVersion = 1;
std::string tool_version();

inline const std::vector<std::string>& sweep_header() {
  static const std::vector<std::string> h = {
      "model", "delta", "L", "boundary", "channel", "p_zz", "p_x", "backend",
      "chi_max", "S_SE", "chi2", "c2_half", "c1_half", "trunc_weight", "seed"};
  return h;
}

inline constexpr const char* kSweepCsv = "see_sweep.csv";
inline constexpr const char* kManifest = "manifest.jsonl";

/// One (L, p) point of a sweep.
struct SweepRow {
  int L = 0;
  double p_zz = 0.0;
  double p_x = 0.0;
  Backend backend = Backend::Dense;
  int chi_max = 0;  // 0 for the dense backend
  double S_SE = 0.0;
  double chi2 = 0.0;
  double c2_half = 0.0;  // C^II(0, L/2)
  double c1_half = 0.0;  // C^I(0, L/2)
  double trunc_weight = 0.0;
};

std::string format_row(const SweepConfig& config, const SweepRow& row);

struct SweepOverrides {
  std::optional<int> workers;
  std::optional<std::uint64_t> seed;
  std::optional<Backend> backend;
  std::optional<int> chi_max;
  std::optional<std::filesystem::path> out_dir;
};

/// Applies command-line overrides and revalidates.
SweepConfig apply_overrides(SweepConfig config, const SweepOverrides& overrides);

struct SweepSummary {
  int points = 0;
  int ok = 0;
  int failed = 0;
  int resumed = 0;  // points taken from an earlier run
  std::filesystem::path csv;
  std::filesystem::path manifest;
};

/// Runs every (L, p) point in (L, p) order. Points are computed by a worker
/// pool and written by a single writer in order: the CSV row first, then the
/// manifest line, each flushed to disk. A failed point gets an error line in
/// the manifest and no CSV row. With `resume`, an existing manifest for the
/// same config hash is trusted: its recorded points are kept, CSV rows beyond
/// them are dropped, and the remaining points are computed.
SweepSummary run_sweep(const SweepConfig& config, bool resume = false,
                       std::ostream* log = nullptr);

}  // namespace decoh::cli
