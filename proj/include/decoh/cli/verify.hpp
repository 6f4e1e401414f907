#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "decoh/spin/model.hpp"

namespace decoh::cli {

inline constexpr const char* kVerifyJson = "verify.json";

struct CheckResult {
  std::string name;
  int L = 0;
  double value = 0.0;      // the measured deviation (or sign)
  double tolerance = 0.0;
  bool pass = false;
  std::string detail;
};

struct VerifyOptions {
  ModelKind model = ModelKind::Tfim;
  double delta = 0.45;
  std::vector<int> sizes = {6, 8};
  int chi_max = 64;
  std::uint64_t seed = 1;
  bool channel_invariants = true;
  bool mps = true;
  int mps_site_limit = 8;  // exact-policy ladder checks grow as 4^(L/2) in the bond
  bool corrupt_state = false;  // perturb one amplitude to exercise the failure path
};

struct VerifyReport {
  VerifyOptions options;
  std::vector<CheckResult> checks;
  bool passed() const;
  int failures() const;
};

/// Maximal-decoherence identities, sign relations and channel invariants on
/// periodic chains, plus MPS-versus-dense equivalence on open chains.
VerifyReport run_verify(const VerifyOptions& options);

/// The identity checks alone, per L (no channel sweep, no MPS).
std::vector<CheckResult> identity_checks(ModelKind model, double delta, int L,
                                         std::uint64_t seed, bool corrupt_state = false);

/// Channel invariants over p = 0, 0.05, ..., 0.5 for the ZZ channel.
std::vector<CheckResult> channel_invariant_checks(ModelKind model, double delta, int L,
                                                  std::uint64_t seed);

/// XXZ parity-pair signs over several anisotropies must agree.
CheckResult xxz_sign_consistency(int L, const std::vector<double>& deltas,
                                 std::uint64_t seed);

void write_verify_json(const VerifyReport& report, const std::filesystem::path& path);

}  // namespace decoh::cli
