#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <vector>

namespace decoh {

using MatVec = std::function<void(std::span<const double>, std::span<double>)>;

struct LanczosOptions {
  int max_iterations = 2000;     // total matrix-vector products across restarts
  double ritz_tolerance = 1e-12;  // beta_k * |last Ritz component|
  double residual_target = 1e-10;  // ||Hv - Ev|| required on exit
  std::uint64_t seed = 1;
  /// Krylov vectors kept before a restart; 0 picks a size from the dimension.
  int krylov_limit = 0;
};

struct EigenPair {
  double value = 0.0;
  std::vector<double> vector;
  double residual = 0.0;
  int iterations = 0;
  std::optional<double> next_value;  // second Ritz value of the first cycle
};

/// Lowest eigenpair of a real symmetric operator by Lanczos with full
/// reorthogonalization, restarted from the current Ritz vector when the Krylov
/// limit is reached. The start vector is `start` if given, else a seeded
/// random vector. Throws NumericalFailure (carrying the residual) when
/// `max_iterations` is exhausted.
EigenPair lanczos_lowest(std::size_t dimension, const MatVec& matvec,
                         const LanczosOptions& options = {},
                         std::span<const double> start = {});

}  // namespace decoh
