#pragma once

#include <filesystem>
#include <vector>

namespace decoh::cli {

/// Reads see_sweep.csv, fits.csv and collapse.json from `results_dir` (any
/// subset, at least one) and writes tidy data files plus matplotlib scripts
/// into `out_dir` (default results_dir/plots). Returns the files written.
/// Output depends only on the inputs.
std::vector<std::filesystem::path> run_plot(const std::filesystem::path& results_dir,
                                            std::filesystem::path out_dir = {});

}  // namespace decoh::cli
