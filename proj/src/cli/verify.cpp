#include "decoh/cli/verify.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <optional>

#include "decoh/cli/csv.hpp"
#include "decoh/cli/sweep.hpp"
#include "decoh/engine/doubled_state.hpp"
#include "decoh/engine/oracles.hpp"
#include "decoh/mps/chain.hpp"
#include "decoh/mps/ladder.hpp"
#include "decoh/spin/ground_state.hpp"
#include "decoh/spin/hamiltonian.hpp"
#include "json.hpp"

namespace decoh::cli {

namespace {

constexpr double kIdentityTol = 1e-12;
constexpr double kInvariantTol = 1e-10;
constexpr double kEnergyTol = 1e-8;
constexpr double kExactMpsTol = 1e-10;

PureState solve(ModelKind model, double delta, int L, Boundary b, std::uint64_t seed) {
  const ModelSpec spec{model, L, model == ModelKind::Xxz ? delta : 0.0, b, true};
  return ground_state(build_hamiltonian(spec), seed);
}

CheckResult check(std::string name, int L, double value, double tol, std::string detail = {}) {
  return {std::move(name), L, value, tol, std::isfinite(value) && value <= tol,
          std::move(detail)};
}

Eigen::MatrixXd unit_trace(const Eigen::MatrixXd& m) { return m / m.trace(); }

}  // namespace

bool VerifyReport::passed() const { return failures() == 0; }

int VerifyReport::failures() const {
  return static_cast<int>(
      std::count_if(checks.begin(), checks.end(), [](const auto& c) { return !c.pass; }));
}

std::vector<CheckResult> identity_checks(ModelKind model, double delta, int L,
                                         std::uint64_t seed, bool corrupt_state) {
  std::vector<CheckResult> out;
  PureState gs = solve(model, delta, L, Boundary::Periodic, seed);
  if (corrupt_state) {
    // Break the parity-pair structure of the ground state.
    gs.amplitudes[1] += 1e-3;
    const double n = norm(gs);
    for (double& a : gs.amplitudes) a /= n;
  }

  const Eigen::MatrixXd rho = density_matrix(gs);
  const Eigen::MatrixXd beta_sum = maximal_decohere_oracle(gs);
  const Eigen::MatrixXd channel = zz_channel_dense(rho, L, Boundary::Periodic, 0.5);
  const Eigen::MatrixXd ghz = ghz_projector_sum(rho, L);
  const DoubledState ds = apply_zz_filter(vectorize(gs), 0.5, Boundary::Periodic);
  const Eigen::MatrixXd engine = unit_trace(density_matrix(ds));
  const double d_channel = (channel - beta_sum).norm();
  const double d_ghz = (ghz - beta_sum).norm();
  const double d_engine = (engine - beta_sum).norm();
  out.push_back(check("ghz_expansion", L, std::max({d_channel, d_ghz, d_engine}), kIdentityTol,
                      "Frobenius: channel-beta " + format_double(d_channel) + ", ghz-beta " +
                          format_double(d_ghz) + ", filter-beta " + format_double(d_engine)));

  const double s_se = see(ds);
  const double s_ghz = shannon_renyi2(gs, ShannonBasis::GlassyGHZ);
  const double s_z = shannon_renyi2(gs, ShannonBasis::ZProduct);
  out.push_back(check("see_equals_ghz_shannon", L, std::abs(s_se - s_ghz), kIdentityTol,
                      "S_SE(1/2)=" + format_double(s_se) + " S_S(GHZ)=" + format_double(s_ghz)));
  out.push_back(check("see_equals_z_shannon_minus_log2", L,
                      std::abs(s_se - (s_z - std::numbers::ln2)), kIdentityTol,
                      "S_S(Z)=" + format_double(s_z)));

  CheckResult sign{"parity_pair_sign", L, 0.0, 0.0, false, {}};
  try {
    const int s = parity_pair_sign(gs);
    sign.value = s;
    if (model == ModelKind::Tfim) {
      sign.pass = s == 1;
      sign.detail = s == 1 ? "sign +1" : "TFIM ground state must have sign +1";
    } else {
      sign.pass = true;
      sign.detail = "sign " + std::to_string(s);
    }
  } catch (const InvalidInput& e) {
    sign.value = std::nan("");
    sign.detail = std::string("inconsistent parity pairs: ") + e.what();
  }
  out.push_back(sign);
  return out;
}

CheckResult xxz_sign_consistency(int L, const std::vector<double>& deltas, std::uint64_t seed) {
  CheckResult r{"xxz_sign_delta_independent", L, 0.0, 0.0, true, {}};
  std::optional<int> first;
  for (double d : deltas) {
    int s = 0;
    try {
      s = parity_pair_sign(solve(ModelKind::Xxz, d, L, Boundary::Periodic, seed));
    } catch (const InvalidInput& e) {
      r.pass = false;
      r.detail += "delta=" + format_double(d) + ": " + e.what() + "; ";
      continue;
    }
    r.detail += "delta=" + format_double(d) + " sign " + std::to_string(s) + "; ";
    if (!first) first = s;
    if (s != *first) r.pass = false;
  }
  r.value = first.value_or(0);
  return r;
}

std::vector<CheckResult> channel_invariant_checks(ModelKind model, double delta, int L,
                                                  std::uint64_t seed) {
  const PureState gs = solve(model, delta, L, Boundary::Periodic, seed);
  const DoubledState pure = vectorize(gs);
  std::vector<double> c1_ref;
  double see0 = 0.0, c1_drift = 0.0, c2_diag = 0.0, maximal = 0.0;
  double purity_low = 1.0, purity_high = 0.0;
  for (int k = 0; k <= 10; ++k) {
    const double p = 0.05 * k;
    const DoubledState ds = apply_zz_filter(pure, p, Boundary::Periodic);
    if (k == 0) see0 = std::abs(see(ds));
    for (int r = 0; r <= L / 2; ++r) {
      const double c1 = canonical_correlator(ds, 0, r);
      if (k == 0) {
        c1_ref.push_back(c1);
      } else {
        c1_drift = std::max(c1_drift, std::abs(c1 - c1_ref[r]));
      }
    }
    for (int i = 0; i < L; ++i) {
      c2_diag = std::max(c2_diag, std::abs(renyi2_correlator(ds, i, i) - 1.0));
    }
    if (k == 10) {
      for (int r = 1; r < L; ++r) {
        maximal = std::max(maximal, std::abs(renyi2_correlator(ds, 0, r) - 1.0));
      }
      maximal = std::max(maximal, std::abs(renyi2_susceptibility(ds) - 1.0));
    }
    const double purity = ds.purity();
    purity_low = std::min(purity_low, purity);
    purity_high = std::max(purity_high, purity);
  }
  const double floor = std::ldexp(1.0, -L);
  const double outside =
      std::max({0.0, floor - purity_low, purity_high - 1.0});
  return {
      check("see_zero_at_p0", L, see0, kInvariantTol),
      check("canonical_correlator_p_invariant", L, c1_drift, kInvariantTol),
      check("renyi2_correlator_diagonal_one", L, c2_diag, kInvariantTol),
      check("renyi2_long_range_at_p_half", L, maximal, kInvariantTol,
            "max |C^II(0,r) - 1| and |chi^II - 1| at p = 1/2"),
      check("purity_in_range", L, outside, 1e-12,
            "purity range [" + format_double(purity_low) + ", " + format_double(purity_high) +
                "], floor 2^-L = " + format_double(floor)),
  };
}

namespace {

std::vector<CheckResult> mps_checks(const VerifyOptions& o, int L) {
  std::vector<CheckResult> out;
  const ModelSpec spec{o.model, L, o.model == ModelKind::Xxz ? o.delta : 0.0, Boundary::Open,
                       true};
  mps::DmrgOptions dmrg;
  dmrg.chi_max = std::min(o.chi_max, 64);
  dmrg.seed = o.seed;
  const auto chain = mps::ground_state_mps(spec, dmrg);
  const PureState exact = ground_state(build_hamiltonian(spec), o.seed);
  out.push_back(check("mps_ground_energy", L, std::abs(chain.energy - *exact.energy), kEnergyTol,
                      "DMRG " + format_double(chain.energy) + " vs Lanczos " +
                          format_double(*exact.energy)));

  if (L > o.mps_site_limit) return out;
  mps::TruncationPolicy policy;
  policy.chi_max = 4096;
  policy.svd_cutoff = 0.0;
  const auto ladder0 = mps::doubled_mps(chain.mps, policy);
  // Compare with the dense engine on the MPS's own state, so only the ladder
  // gates and contractions are under test.
  const DoubledState pure = vectorize(mps::to_pure_state(chain.mps));
  for (double p : {0.1, 0.3, 0.5}) {
    const auto channel = ChannelSpec::with_strength(ChannelKind::ZZ, p);
    const auto ladder = mps::apply_filter_gates_mps(ladder0, channel, policy);
    const DoubledState ds = apply_channel(pure, channel);
    double dev = std::abs(mps::see_mps(ladder) - see(ds));
    dev = std::max(dev, std::abs(mps::mps_renyi2_susceptibility(ladder) -
                                 renyi2_susceptibility(ds)));
    for (int r = 1; r <= L / 2; ++r) {
      dev = std::max(dev, std::abs(mps::mps_renyi2_correlator(ladder, 0, r) -
                                   renyi2_correlator(ds, 0, r)));
      dev = std::max(dev, std::abs(mps::mps_canonical_correlator(ladder, 0, r) -
                                   canonical_correlator(ds, 0, r)));
    }
    out.push_back(check("mps_ladder_matches_dense_p" + format_double(p), L, dev, kExactMpsTol,
                        "untruncated ladder; max deviation over S_SE, chi^II, C^II, C^I"));
  }
  return out;
}

}  // namespace

VerifyReport run_verify(const VerifyOptions& o) {
  VerifyReport report;
  report.options = o;
  if (o.sizes.empty()) throw InvalidInput("verify: no system sizes");
  for (int L : o.sizes) {
    validate(ModelSpec{o.model, L, o.delta, Boundary::Periodic, true}, kDenseMatrixSiteLimit);
  }
  for (int L : o.sizes) {
    auto ids = identity_checks(o.model, o.delta, L, o.seed, o.corrupt_state);
    report.checks.insert(report.checks.end(), ids.begin(), ids.end());
    if (o.model == ModelKind::Xxz) {
      std::vector<double> deltas = {0.15, 0.45, 0.75};
      if (std::find(deltas.begin(), deltas.end(), o.delta) == deltas.end()) {
        deltas.push_back(o.delta);
      }
      report.checks.push_back(xxz_sign_consistency(L, deltas, o.seed));
    }
    if (o.channel_invariants) {
      auto inv = channel_invariant_checks(o.model, o.delta, L, o.seed);
      report.checks.insert(report.checks.end(), inv.begin(), inv.end());
    }
    if (o.mps) {
      auto m = mps_checks(o, L);
      report.checks.insert(report.checks.end(), m.begin(), m.end());
    }
  }
  return report;
}

void write_verify_json(const VerifyReport& report, const std::filesystem::path& path) {
  using nlohmann::json;
  json checks = json::array();
  for (const auto& c : report.checks) {
    checks.push_back({{"name", c.name},
                      {"L", c.L},
                      {"value", std::isfinite(c.value) ? json(c.value) : json(nullptr)},
                      {"tolerance", c.tolerance},
                      {"pass", c.pass},
                      {"detail", c.detail}});
  }
  const json j = {{"schema_version", kSchemaVersion},
                  {"tool_version", tool_version()},
                  {"model", std::string(to_string(report.options.model))},
                  {"delta", report.options.model == ModelKind::Xxz ? report.options.delta : 0.0},
                  {"sizes", report.options.sizes},
                  {"chi_max", report.options.chi_max},
                  {"passed", report.passed()},
                  {"failures", report.failures()},
                  {"checks", checks}};
  std::ofstream out(path, std::ios::trunc);
  out << j.dump(2) << "\n";
  if (!out) throw InvalidInput("cannot write " + path.string());
}

}  // namespace decoh::cli
