#include "decoh/spin/ground_state.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <complex>
#include <map>
#include <string>

#include "decoh/error.hpp"

namespace decoh {
namespace {

// Largest |amplitude| made positive; the lowest index wins among entries
// within relative 1e-12 of the maximum.
void fix_gauge(std::vector<double>& amps) {
  double largest = 0.0;
  for (double a : amps) largest = std::max(largest, std::abs(a));
  for (double a : amps) {
    if (std::abs(a) >= largest * (1.0 - 1e-12)) {
      if (a < 0.0) {
        for (double& x : amps) x = -x;
      }
      return;
    }
  }
}

}  // namespace

PureState ground_state(const SparseOperator& h, std::uint64_t seed,
                       LanczosOptions options) {
  options.seed = seed;
  PureState state;
  state.L = h.sites();
  state.boundary = h.spec().boundary;

  EigenPair pair;
  if (h.sector()) {
    const SectorBasis basis(h.sites(), *h.sector());
    pair = lanczos_lowest(
        basis.size(),
        [&](std::span<const double> x, std::span<double> y) {
          apply_in_sector(h, basis, x, y);
        },
        options);
    state.amplitudes.assign(h.dimension(), 0.0);
    for (std::size_t i = 0; i < basis.size(); ++i) {
      state.amplitudes[basis.state(i)] = pair.vector[i];
    }
  } else {
    pair = lanczos_lowest(
        h.dimension(),
        [&](std::span<const double> x, std::span<double> y) { h.apply(x, y); },
        options);
    state.amplitudes = std::move(pair.vector);
  }
  fix_gauge(state.amplitudes);
  state.energy = pair.value;
  if (pair.next_value) state.gap = *pair.next_value - pair.value;
  return state;
}

PureState apply_parity(const PureState& state) {
  PureState out = state;
  out.energy.reset();
  out.gap.reset();
  for (std::size_t c = 0; c < state.dimension(); ++c) {
    out.amplitudes[all_flipped(static_cast<std::uint32_t>(c), state.L)] =
        state.amplitudes[c];
  }
  return out;
}

double expectation_pauli_string(const PureState& state,
                                const std::vector<PauliOp>& ops) {
  // Reduce to one axis per site; P = P^2 = I for a repeated (site, axis).
  std::map<int, std::pair<Axis, int>> per_site;
  for (const PauliOp& op : ops) {
    if (op.site < 0 || op.site >= state.L) {
      throw InvalidInput("Pauli site " + std::to_string(op.site) +
                         " out of range for L=" + std::to_string(state.L));
    }
    auto [it, inserted] = per_site.try_emplace(op.site, op.axis, 1);
    if (!inserted) {
      if (it->second.first != op.axis) {
        throw InvalidInput("conflicting Pauli axes on site " +
                           std::to_string(op.site));
      }
      ++it->second.second;
    }
  }

  std::uint32_t flip_mask = 0;
  std::uint32_t z_mask = 0;  // sites contributing a Z-like sign
  int y_count = 0;
  for (const auto& [site, entry] : per_site) {
    if (entry.second % 2 == 0) continue;
    switch (entry.first) {
      case Axis::X:
        flip_mask |= 1u << site;
        break;
      case Axis::Z:
        z_mask |= 1u << site;
        break;
      case Axis::Y:
        // Y|s> = i (-1)^s |s^1>, with the sign taken on the input bit.
        flip_mask |= 1u << site;
        z_mask |= 1u << site;
        ++y_count;
        break;
    }
  }

  // <phi|P|phi> = i^{y_count} sum_c phi(c ^ flip) (-1)^{popcount(c & z)} phi(c)
  double acc = 0.0;
  const auto& a = state.amplitudes;
  for (std::size_t c = 0; c < a.size(); ++c) {
    const auto cfg = static_cast<std::uint32_t>(c);
    const double sign = (std::popcount(cfg & z_mask) % 2) ? -1.0 : 1.0;
    acc += a[cfg ^ flip_mask] * sign * a[c];
  }
  // Real amplitudes: an odd Y count gives a purely imaginary value, whose real
  // part is zero for Hermitian P.
  switch (y_count % 4) {
    case 0:
      return acc;
    case 2:
      return -acc;
    default:
      return 0.0;
  }
}

}  // namespace decoh
