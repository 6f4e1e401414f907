#include "decoh/spin/model.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <string>

#include "decoh/error.hpp"

namespace decoh {

void validate(const ModelSpec& spec, int max_sites) {
  if (spec.L < 2 || spec.L % 2 != 0) {
    throw InvalidInput("chain length must be even and >= 2, got L=" +
                       std::to_string(spec.L));
  }
  if (spec.L > max_sites) {
    throw InvalidInput("L=" + std::to_string(spec.L) +
                       " exceeds the configured limit of " +
                       std::to_string(max_sites) + " sites");
  }
  if (!std::isfinite(spec.delta)) throw InvalidInput("delta must be finite");
  if (spec.model == ModelKind::Xxz && spec.require_critical &&
      std::abs(spec.delta) >= 1.0) {
    throw InvalidInput("XXZ critical regime requires |delta| < 1");
  }
}

PureState basis_state(int L, std::uint32_t config, Boundary boundary) {
  PureState s;
  s.L = L;
  s.boundary = boundary;
  s.amplitudes.assign(std::size_t{1} << L, 0.0);
  s.amplitudes.at(config) = 1.0;
  return s;
}

double norm(const PureState& state) {
  double acc = 0.0;
  for (double a : state.amplitudes) acc += a * a;
  return std::sqrt(acc);
}

std::uint32_t link_walls(std::uint32_t config, int L, Boundary boundary) {
  std::uint32_t walls = 0;
  const int links = link_count(L, boundary);
  for (int j = 0; j < links; ++j) {
    const int k = (j + 1) % L;
    if (((config >> j) ^ (config >> k)) & 1u) walls |= 1u << j;
  }
  return walls;
}

std::string_view to_string(ModelKind kind) {
  return kind == ModelKind::Tfim ? "tfim" : "xxz";
}

std::string_view to_string(Boundary boundary) {
  return boundary == Boundary::Periodic ? "periodic" : "open";
}

namespace {
std::string lowered(std::string_view text) {
  std::string out(text);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  return out;
}
}  // namespace

ModelKind parse_model_kind(std::string_view text) {
  const auto t = lowered(text);
  if (t == "tfim") return ModelKind::Tfim;
  if (t == "xxz") return ModelKind::Xxz;
  throw InvalidInput("unknown model '" + std::string(text) +
                     "' (expected tfim or xxz)");
}

Boundary parse_boundary(std::string_view text) {
  const auto t = lowered(text);
  if (t == "periodic") return Boundary::Periodic;
  if (t == "open") return Boundary::Open;
  throw InvalidInput("unknown boundary '" + std::string(text) +
                     "' (expected periodic or open)");
}

}  // namespace decoh
