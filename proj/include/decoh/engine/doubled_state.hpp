#pragma once

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "decoh/engine/channel.hpp"
#include "decoh/spin/model.hpp"

namespace decoh {

/// Default largest chain whose doubled state (4^L reals) is held densely.
inline constexpr int kDoubledSiteLimit = 12;

/// Vectorized density matrix |rho>> on the two-leg ladder. The amplitude of
/// (c_u, c_l) lives at index (c_u << L) | c_l and equals rho(c_u, c_l) up to
/// the overall factor exp(log_prefactor).
struct DoubledState {
  int L = 0;
  Boundary boundary = Boundary::Periodic;
  std::vector<double> amplitudes;
  double log_prefactor = 0.0;

  std::size_t row_size() const { return std::size_t{1} << L; }
  std::span<double> row(std::uint32_t c_u) {
    return {amplitudes.data() + (std::size_t{c_u} << L), row_size()};
  }
  std::span<const double> row(std::uint32_t c_u) const {
    return {amplitudes.data() + (std::size_t{c_u} << L), row_size()};
  }
  double at(std::uint32_t c_u, std::uint32_t c_l) const {
    return amplitudes[(std::size_t{c_u} << L) | c_l];
  }

  /// Tr[rho^2] = exp(2 log_prefactor) * ||amplitudes||^2.
  double purity() const;
};

/// |rho_0>> = |phi*>|phi> for a normalized pure state.
DoubledState vectorize(const PureState& state, int max_sites = kDoubledSiteLimit);

/// Multiplies amplitude (c, c') by (1 - 2p)^m(c, c'), where m counts links
/// whose ZZ parity differs between c and c'. This is the exact action of the
/// ZZ channel; p = 1/2 keeps only m = 0 (link-parity projectors). The result
/// is renormalized with the scale folded into log_prefactor.
DoubledState apply_zz_filter(DoubledState ds, double p_zz, Boundary boundary);

/// Applies prod_j [(1 - p) I + p X_{j,u} X_{j,l}] rung by rung; p = 1/2 gives
/// the rung projectors (1 + X_u X_l)/2.
DoubledState apply_x_filter(DoubledState ds, double p_x);

/// Both filters of `channel`, X first (the two layers commute).
DoubledState apply_channel(DoubledState ds, const ChannelSpec& channel);

/// S_SE = -log Tr[rho_D^2]. Throws NumericalFailure on a zero norm.
double see(const DoubledState& ds);

/// <<rho|Z_iu Z_ju Z_il Z_jl|rho>> / <<rho|rho>>.
double renyi2_correlator(const DoubledState& ds, int i, int j);

/// (2/L) sum_{r=1}^{L/2} C^II(ref, ref + r).
double renyi2_susceptibility(const DoubledState& ds, int reference_site = 0);

/// <<1|Z_iu Z_ju|rho>> / <<1|rho>> = Tr[rho Z_i Z_j].
double canonical_correlator(const DoubledState& ds, int i, int j);

struct ObservableReport {
  double p_zz = 0.0;
  double p_x = 0.0;
  double S_SE = 0.0;
  double chi2 = 0.0;
  std::vector<std::pair<int, double>> c2_profile;  // (r, C^II(0, r)), r = 0..L/2
  std::vector<std::pair<int, double>> c1_profile;  // (r, C^I(0, r))
};

ObservableReport observe(const DoubledState& ds, const ChannelSpec& channel);

}  // namespace decoh
