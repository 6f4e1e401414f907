#pragma once

#include <cstdint>
#include <vector>

#include "decoh/mps/tensor.hpp"
#include "decoh/spin/ground_state.hpp"
#include "decoh/spin/model.hpp"

namespace decoh::mps {

/// Open-chain MPS with physical dimension 2 (index 1 = down).
struct ChainMps {
  std::vector<Tensor3> sites;
  int L() const { return static_cast<int>(sites.size()); }
  int max_bond() const;
};

struct DmrgOptions {
  int chi_max = 64;
  double tolerance = 1e-10;  // energy change between full sweeps
  int max_sweeps = 40;
  double svd_cutoff = 1e-14;
  std::uint64_t seed = 1;
};

struct ChainGroundState {
  ChainMps mps;  // right-canonical, unit norm on site 0
  double energy = 0.0;
  int sweeps = 0;
  double truncation_weight = 0.0;  // largest discarded weight in the last sweep
};

/// Two-site DMRG on the matrix-product form of the Hamiltonian. Only open
/// boundaries are supported. Throws NumericalFailure if the energy has not
/// settled within max_sweeps.
ChainGroundState ground_state_mps(const ModelSpec& spec, const DmrgOptions& options = {});

/// <psi|P|psi> / <psi|psi> for a Pauli string.
double chain_expectation(const ChainMps& mps, const std::vector<PauliOp>& ops);

/// Dense amplitudes in the same indexing as PureState (bit j = site j).
PureState to_pure_state(const ChainMps& mps, int max_sites = kChainSiteLimit);

/// 2x2 real matrix of a Pauli; Y is returned as -i Y (real), so products
/// carry a factor i^(number of Y).
Eigen::Matrix2d real_pauli(Axis axis);

}  // namespace decoh::mps
