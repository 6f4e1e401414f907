#include "decoh/spin/hamiltonian.hpp"

#include <bit>
#include <utility>

#include "decoh/error.hpp"

namespace decoh {

SparseOperator::SparseOperator(ModelSpec spec, std::vector<double> diagonal,
                               std::vector<FlipTerm> flips)
    : spec_(spec), diagonal_(std::move(diagonal)), flips_(std::move(flips)) {}

void SparseOperator::apply(std::span<const double> x, std::span<double> y) const {
  const std::size_t dim = dimension();
  if (x.size() != dim || y.size() != dim) {
    throw InvalidInput("operator/vector dimension mismatch");
  }
  for (std::size_t c = 0; c < dim; ++c) y[c] = diagonal_[c] * x[c];
  for (const FlipTerm& term : flips_) {
    for (std::size_t c = 0; c < dim; ++c) {
      const auto cfg = static_cast<std::uint32_t>(c);
      if (term.antialigned_only && std::popcount(cfg & term.mask) != 1) continue;
      y[c] += term.coeff * x[cfg ^ term.mask];
    }
  }
}

SparseOperator build_hamiltonian(const ModelSpec& spec, int max_sites) {
  validate(spec, max_sites);
  const int L = spec.L;
  const std::size_t dim = std::size_t{1} << L;
  const int links = link_count(L, spec.boundary);

  std::vector<double> diagonal(dim, 0.0);
  std::vector<FlipTerm> flips;
  const double zz_coeff = spec.model == ModelKind::Tfim ? -1.0 : spec.delta;

  for (std::size_t c = 0; c < dim; ++c) {
    const auto cfg = static_cast<std::uint32_t>(c);
    double acc = 0.0;
    for (int j = 0; j < links; ++j) {
      acc += zz_coeff * z_value(cfg, j) * z_value(cfg, (j + 1) % L);
    }
    diagonal[c] = acc;
  }

  if (spec.model == ModelKind::Tfim) {
    for (int j = 0; j < L; ++j) flips.push_back({1u << j, -1.0, false});
  } else {
    // X_j X_k + Y_j Y_k = 2 (s+_j s-_k + s-_j s+_k): flips an antialigned pair.
    for (int j = 0; j < links; ++j) {
      const int k = (j + 1) % L;
      flips.push_back({(1u << j) | (1u << k), 2.0, true});
    }
  }

  SparseOperator h(spec, std::move(diagonal), std::move(flips));
  if (spec.model == ModelKind::Xxz) h.set_sector(L / 2);
  return h;
}

SectorBasis::SectorBasis(int L, int down_spins)
    : index_(std::size_t{1} << L, -1) {
  for (std::uint32_t c = 0; c < (1u << L); ++c) {
    if (std::popcount(c) == down_spins) {
      index_[c] = static_cast<std::int64_t>(states_.size());
      states_.push_back(c);
    }
  }
}

void apply_in_sector(const SparseOperator& h, const SectorBasis& basis,
                     std::span<const double> x, std::span<double> y) {
  const std::size_t dim = basis.size();
  for (std::size_t i = 0; i < dim; ++i) {
    const std::uint32_t c = basis.state(i);
    double acc = h.diagonal(c) * x[i];
    for (const FlipTerm& term : h.flips()) {
      if (term.antialigned_only && std::popcount(c & term.mask) != 1) continue;
      const std::int64_t partner = basis.index(c ^ term.mask);
      if (partner < 0) {
        throw InvalidInput("operator does not conserve the requested sector");
      }
      acc += term.coeff * x[static_cast<std::size_t>(partner)];
    }
    y[i] = acc;
  }
}

}  // namespace decoh
