#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace decoh {

enum class ModelKind { Tfim, Xxz };
enum class Boundary { Periodic, Open };

/// Largest chain handled by the exact (state-vector) solver.
inline constexpr int kChainSiteLimit = 22;

struct ModelSpec {
  ModelKind model = ModelKind::Tfim;
  int L = 8;
  double delta = 0.0;  // XXZ anisotropy; ignored for TFIM
  Boundary boundary = Boundary::Periodic;
  bool require_critical = true;  // XXZ: enforce |delta| < 1
};

/// Throws InvalidInput for odd or too small L, L above `max_sites`, or a
/// non-critical XXZ anisotropy when `require_critical` is set.
void validate(const ModelSpec& spec, int max_sites = kChainSiteLimit);

/// Real amplitudes indexed by Z-product configuration c; bit j of c set means
/// site j is down (Z_j = -1).
struct PureState {
  int L = 0;
  Boundary boundary = Boundary::Periodic;
  std::vector<double> amplitudes;
  std::optional<double> energy;
  std::optional<double> gap;  // distance to the next Ritz value, when solved

  std::size_t dimension() const { return amplitudes.size(); }
};

/// Product state |c>.
PureState basis_state(int L, std::uint32_t config,
                      Boundary boundary = Boundary::Periodic);

double norm(const PureState& state);

/// z_j(c) = +1 for up (bit clear), -1 for down.
inline int z_value(std::uint32_t config, int site) {
  return ((config >> site) & 1u) ? -1 : 1;
}

inline std::uint32_t all_flipped(std::uint32_t config, int L) {
  return config ^ ((L >= 32) ? ~0u : ((1u << L) - 1u));
}

/// Bit j set iff the link j -- j+1 carries a domain wall. Periodic chains have
/// L links (link L-1 closes the ring); open chains have L-1.
std::uint32_t link_walls(std::uint32_t config, int L, Boundary boundary);

inline int link_count(int L, Boundary boundary) {
  return boundary == Boundary::Periodic ? L : L - 1;
}

std::string_view to_string(ModelKind kind);
std::string_view to_string(Boundary boundary);
ModelKind parse_model_kind(std::string_view text);
Boundary parse_boundary(std::string_view text);

}  // namespace decoh
