#pragma once

#include <cstdint>
#include <vector>

#include "decoh/spin/hamiltonian.hpp"
#include "decoh/spin/lanczos.hpp"
#include "decoh/spin/model.hpp"

namespace decoh {

/// Lowest eigenstate of `h`. Runs in the operator's magnetization sector when
/// one is set, embedding the result into the full 2^L space. The global sign
/// is fixed so the largest-magnitude amplitude (lowest index on ties) is
/// positive. Identical seeds give bitwise-identical amplitudes.
PureState ground_state(const SparseOperator& h, std::uint64_t seed,
                       LanczosOptions options = {});

/// U_X = prod_j X_j: amplitude at c moves to the fully flipped c-bar.
PureState apply_parity(const PureState& state);

enum class Axis { X, Y, Z };

struct PauliOp {
  int site;
  Axis axis;
};

/// <phi|P|phi> for a product of single-site Paulis. Repeated (site, axis)
/// pairs cancel; the same site with two different axes is rejected.
double expectation_pauli_string(const PureState& state,
                                const std::vector<PauliOp>& ops);

}  // namespace decoh
