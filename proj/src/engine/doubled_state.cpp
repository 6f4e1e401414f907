#include "decoh/engine/doubled_state.hpp"

#include <array>
#include <cmath>
#include <string>

#include "decoh/error.hpp"
#include "decoh/simd/kernels.hpp"

namespace decoh {
namespace {

void check_site(const DoubledState& ds, int site) {
  if (site < 0 || site >= ds.L) {
    throw InvalidInput("site " + std::to_string(site) + " out of range for L=" +
                       std::to_string(ds.L));
  }
}

void check_probability(double p) {
  if (!(p >= 0.0 && p <= 0.5)) {
    throw InvalidInput("decoherence probability must lie in [0, 1/2], got " +
                       std::to_string(p));
  }
}

// Keeps amplitudes at unit norm; the scale moves into log_prefactor.
void renormalize(DoubledState& ds) {
  const double n2 = simd::sum_squares(ds.amplitudes);
  if (!(n2 > 0.0) || !std::isfinite(n2)) return;
  const double n = std::sqrt(n2);
  const double inv = 1.0 / n;
  for (double& a : ds.amplitudes) a *= inv;
  ds.log_prefactor += std::log(n);
}

std::vector<double> zz_signs(int L, int i, int j) {
  std::vector<double> s(std::size_t{1} << L);
  for (std::uint32_t c = 0; c < s.size(); ++c) {
    s[c] = static_cast<double>(z_value(c, i) * z_value(c, j));
  }
  return s;
}

}  // namespace

double DoubledState::purity() const {
  return std::exp(2.0 * log_prefactor) * simd::sum_squares(amplitudes);
}

DoubledState vectorize(const PureState& state, int max_sites) {
  if (state.L > max_sites) {
    throw InvalidInput("L=" + std::to_string(state.L) +
                       " exceeds the dense doubled-state limit of " +
                       std::to_string(max_sites) +
                       " sites; use the MPS backend for larger chains");
  }
  DoubledState ds;
  ds.L = state.L;
  ds.boundary = state.boundary;
  const std::size_t n = state.dimension();
  ds.amplitudes.resize(n * n);
  for (std::size_t cu = 0; cu < n; ++cu) {
    const double au = state.amplitudes[cu];
    double* row = ds.amplitudes.data() + cu * n;
    for (std::size_t cl = 0; cl < n; ++cl) row[cl] = au * state.amplitudes[cl];
  }
  return ds;
}

DoubledState apply_zz_filter(DoubledState ds, double p_zz, Boundary boundary) {
  check_probability(p_zz);
  if (p_zz == 0.0) return ds;

  std::array<double, 33> table{};
  table[0] = 1.0;
  const double factor = 1.0 - 2.0 * p_zz;
  for (int m = 1; m < 33; ++m) {
    table[m] = p_zz == 0.5 ? 0.0 : std::pow(factor, m);
  }

  const std::size_t n = ds.row_size();
  std::vector<std::uint32_t> walls(n);
  for (std::uint32_t c = 0; c < n; ++c) walls[c] = link_walls(c, ds.L, boundary);

  for (std::uint32_t cu = 0; cu < n; ++cu) {
    simd::scale_by_mismatch(ds.row(cu), walls, walls[cu], table.data());
  }
  renormalize(ds);
  return ds;
}

DoubledState apply_x_filter(DoubledState ds, double p_x) {
  check_probability(p_x);
  if (p_x == 0.0) return ds;
  const double keep = 1.0 - p_x;
  const double mix = p_x;
  const std::size_t n = ds.row_size();

  for (int j = 0; j < ds.L; ++j) {
    const std::uint32_t bit = 1u << j;
    const std::size_t stride = bit;
    for (std::uint32_t r = 0; r < n; ++r) {
      if (r & bit) continue;
      auto upper = ds.row(r);
      auto lower = ds.row(r | bit);
      for (std::size_t b0 = 0; b0 < n; b0 += 2 * stride) {
        simd::butterfly_mix(upper.subspan(b0, stride),
                            lower.subspan(b0 + stride, stride), keep, mix);
        simd::butterfly_mix(upper.subspan(b0 + stride, stride),
                            lower.subspan(b0, stride), keep, mix);
      }
    }
  }
  renormalize(ds);
  return ds;
}

DoubledState apply_channel(DoubledState ds, const ChannelSpec& channel) {
  channel.validate();
  if (channel.kind != ChannelKind::ZZ) ds = apply_x_filter(std::move(ds), channel.p_x);
  if (channel.kind != ChannelKind::X) {
    const Boundary b = ds.boundary;
    ds = apply_zz_filter(std::move(ds), channel.p_zz, b);
  }
  return ds;
}

double see(const DoubledState& ds) {
  const double n2 = simd::sum_squares(ds.amplitudes);
  if (!(n2 > 0.0) || !std::isfinite(n2)) {
    throw NumericalFailure("doubled state has zero norm");
  }
  return -(2.0 * ds.log_prefactor + std::log(n2));
}

double renyi2_correlator(const DoubledState& ds, int i, int j) {
  check_site(ds, i);
  check_site(ds, j);
  if (i == j) return 1.0;
  const auto signs = zz_signs(ds.L, i, j);
  double numerator = 0.0;
  for (std::uint32_t cu = 0; cu < signs.size(); ++cu) {
    numerator += signs[cu] * simd::weighted_sum_squares(ds.row(cu), signs);
  }
  const double n2 = simd::sum_squares(ds.amplitudes);
  if (!(n2 > 0.0)) throw NumericalFailure("doubled state has zero norm");
  return numerator / n2;
}

double renyi2_susceptibility(const DoubledState& ds, int reference_site) {
  check_site(ds, reference_site);
  double acc = 0.0;
  for (int r = 1; r <= ds.L / 2; ++r) {
    acc += renyi2_correlator(ds, reference_site, (reference_site + r) % ds.L);
  }
  return 2.0 * acc / ds.L;
}

double canonical_correlator(const DoubledState& ds, int i, int j) {
  check_site(ds, i);
  check_site(ds, j);
  double numerator = 0.0;
  double trace = 0.0;
  for (std::uint32_t c = 0; c < ds.row_size(); ++c) {
    const double diag = ds.at(c, c);
    trace += diag;
    numerator += z_value(c, i) * z_value(c, j) * diag;
  }
  if (std::abs(trace) < 1e-13 * std::sqrt(simd::sum_squares(ds.amplitudes))) {
    throw NumericalFailure("<<1|rho>> vanishes; canonical correlator undefined");
  }
  return numerator / trace;
}

ObservableReport observe(const DoubledState& ds, const ChannelSpec& channel) {
  ObservableReport report;
  report.p_zz = channel.p_zz;
  report.p_x = channel.p_x;
  report.S_SE = see(ds);
  for (int r = 0; r <= ds.L / 2; ++r) {
    report.c2_profile.emplace_back(r, renyi2_correlator(ds, 0, r));
    report.c1_profile.emplace_back(r, canonical_correlator(ds, 0, r));
  }
  double acc = 0.0;
  for (int r = 1; r <= ds.L / 2; ++r) acc += report.c2_profile[r].second;
  report.chi2 = 2.0 * acc / ds.L;
  return report;
}

}  // namespace decoh
