#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "decoh/spin/model.hpp"

namespace decoh {

/// One off-diagonal term: x[c ^ mask] contributes coeff to y[c]. When
/// `antialigned_only` is set, the term acts only if the two masked bits of c
/// differ (the XX+YY hopping).
struct FlipTerm {
  std::uint32_t mask;
  double coeff;
  bool antialigned_only;
};

/// Real symmetric spin Hamiltonian in the Z-product basis.
class SparseOperator {
 public:
  SparseOperator(ModelSpec spec, std::vector<double> diagonal,
                 std::vector<FlipTerm> flips);

  const ModelSpec& spec() const { return spec_; }
  int sites() const { return spec_.L; }
  std::size_t dimension() const { return diagonal_.size(); }

  /// Number of down spins the ground-state search is restricted to, if any.
  std::optional<int> sector() const { return sector_; }
  void set_sector(std::optional<int> down_spins) { sector_ = down_spins; }

  /// y = H x on the full 2^L space.
  void apply(std::span<const double> x, std::span<double> y) const;

  double diagonal(std::uint32_t config) const { return diagonal_[config]; }
  const std::vector<FlipTerm>& flips() const { return flips_; }

 private:
  ModelSpec spec_;
  std::vector<double> diagonal_;
  std::vector<FlipTerm> flips_;
  std::optional<int> sector_;
};

/// H_TFI = -sum_j (Z_j Z_{j+1} + X_j) or
/// H_XXZ = sum_j (X_j X_{j+1} + Y_j Y_{j+1} + delta Z_j Z_{j+1});
/// the wrap link is present iff the boundary is periodic. XXZ operators are
/// tagged with the total-Sz = 0 sector.
SparseOperator build_hamiltonian(const ModelSpec& spec,
                                 int max_sites = kChainSiteLimit);

/// Configurations with a fixed number of down spins, plus the inverse map.
class SectorBasis {
 public:
  SectorBasis(int L, int down_spins);

  std::size_t size() const { return states_.size(); }
  std::uint32_t state(std::size_t i) const { return states_[i]; }
  /// -1 when `config` is outside the sector.
  std::int64_t index(std::uint32_t config) const { return index_[config]; }
  const std::vector<std::uint32_t>& states() const { return states_; }

 private:
  std::vector<std::uint32_t> states_;
  std::vector<std::int64_t> index_;
};

/// y = H x restricted to `basis`; H must conserve the sector.
void apply_in_sector(const SparseOperator& h, const SectorBasis& basis,
                     std::span<const double> x, std::span<double> y);

}  // namespace decoh
