#pragma once

#include <vector>

#include "decoh/engine/channel.hpp"
#include "decoh/engine/doubled_state.hpp"
#include "decoh/mps/chain.hpp"
#include "decoh/mps/tensor.hpp"

namespace decoh::mps {

struct TruncationPolicy {
  int chi_max = 128;
  double svd_cutoff = 1e-12;  // discarded relative weight allowed per bond
  bool rescale = true;        // fold the norm into log_scale after every gate
  double abort_weight = 1e-6;  // per-gate discarded weight that aborts the run
  int hard_bond_cap = 4096;   // largest uncompressed bond accepted by doubled_mps

  void validate() const;
};

/// Doubled state |rho>> as an MPS on the two-leg ladder. Each site carries a
/// rung index r = 2 s_u + s_l. The represented vector is
/// exp(log_scale) * contraction(sites).
struct MpsLadder {
  std::vector<Tensor3> sites;
  int center = 0;  // orthogonality center
  double log_scale = 0.0;
  double truncation_weight = 0.0;  // sum of discarded relative weights
  double max_gate_truncation = 0.0;

  int L() const { return static_cast<int>(sites.size()); }
  int max_bond() const;
};

enum class GateOrder { LeftToRight, RightToLeft };

/// |phi*>|phi> as the exact rung-wise product: chain bond D becomes D^2.
/// Throws InvalidInput when D^2 exceeds the policy's hard cap.
MpsLadder doubled_mps(const ChainMps& mps, const TruncationPolicy& policy = {});

/// One sweep over the ladder: the single-rung X maps and the diagonal
/// two-rung ZZ gates, with an SVD truncation on every link. Open chain only.
/// Throws NumericalFailure if a link discards more than abort_weight.
MpsLadder apply_filter_gates_mps(MpsLadder ladder, const ChannelSpec& channel,
                                 const TruncationPolicy& policy = {},
                                 GateOrder order = GateOrder::LeftToRight);

double see_mps(const MpsLadder& ladder);

enum class Leg { Upper, Lower };

struct LadderPauli {
  int site;
  Leg leg;
  Axis axis;
};

/// <<rho|O|rho>> / <<rho|rho>> for a product of leg Paulis.
double mps_expectation(const MpsLadder& ladder, const std::vector<LadderPauli>& ops);

double mps_renyi2_correlator(const MpsLadder& ladder, int i, int j);

/// (2/L) sum_{r=1}^{L/2} C^II(ref, ref + r); sites past the end are skipped.
double mps_renyi2_susceptibility(const MpsLadder& ladder, int reference_site = 0);

/// <<1|Z_iu Z_ju|rho>> / <<1|rho>>.
double mps_canonical_correlator(const MpsLadder& ladder, int i, int j);

/// Largest deviation from the isometry conditions implied by `center`, plus
/// the mismatch between the center-site weight and the full norm.
double canonical_deviation(const MpsLadder& ladder);

/// Dense doubled state (for small L).
DoubledState to_doubled_state(const MpsLadder& ladder, int max_sites = 10);

ObservableReport observe_mps(const MpsLadder& ladder, const ChannelSpec& channel);

}  // namespace decoh::mps
