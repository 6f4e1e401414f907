#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include "decoh/backend.hpp"
#include "decoh/engine/channel.hpp"
#include "decoh/error.hpp"
#include "decoh/spin/model.hpp"

namespace decoh::cli {

/// Malformed or inconsistent configuration (exit code 2).
class ConfigError : public InvalidInput {
 public:
  using InvalidInput::InvalidInput;
};

struct SweepConfig {
  ModelKind model = ModelKind::Tfim;
  double delta = 0.0;
  Boundary boundary = Boundary::Periodic;
  ChannelKind channel = ChannelKind::ZZ;
  std::vector<double> p_grid;  // sorted, distinct
  std::vector<int> sizes;      // sorted, distinct
  Backend backend = Backend::Auto;
  int chi_max = 128;
  double svd_cutoff = 1e-12;
  int dense_limit = 12;  // Auto uses Dense for L <= dense_limit
  std::uint64_t seed = 1;
  int workers = 1;
  std::filesystem::path out_dir = "results";
  std::vector<std::pair<int, double>> inject_failures;  // (L, p) points forced to fail
};

/// Parses the INI text. `source` names the file in diagnostics.
SweepConfig parse_config(const std::string& text, const std::string& source = "<config>");

/// Reads the file, then applies the DECOH_OUT_DIR environment override.
SweepConfig load_config(const std::filesystem::path& path);

/// Range and consistency checks; throws ConfigError naming the field.
void validate(const SweepConfig& config);

Backend resolve_backend(const SweepConfig& config, int L);

/// Sorted key=value lines of every field that affects results (not workers or
/// the output directory).
std::string canonical_form(const SweepConfig& config);

/// SHA-256 of canonical_form, hex encoded.
std::string config_hash(const SweepConfig& config);

std::string sha256_hex(const std::string& data);

}  // namespace decoh::cli
