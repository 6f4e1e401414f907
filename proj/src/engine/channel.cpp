#include "decoh/engine/channel.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <limits>
#include <string>

#include "decoh/error.hpp"

namespace decoh {

double filter_tau(double p) {
  if (!(p >= 0.0 && p <= 0.5)) {
    throw InvalidInput("decoherence probability must lie in [0, 1/2], got " +
                       std::to_string(p));
  }
  if (p == 0.5) return std::numeric_limits<double>::infinity();
  return std::atanh(p / (1.0 - p));
}

ChannelSpec ChannelSpec::with_strength(ChannelKind kind, double p) {
  ChannelSpec c;
  c.kind = kind;
  if (kind != ChannelKind::X) c.p_zz = p;
  if (kind != ChannelKind::ZZ) c.p_x = p;
  c.validate();
  return c;
}

double ChannelSpec::tau_zz() const { return filter_tau(p_zz); }
double ChannelSpec::tau_x() const { return filter_tau(p_x); }

void ChannelSpec::validate() const {
  filter_tau(p_zz);
  filter_tau(p_x);
  if (kind == ChannelKind::ZZ && p_x != 0.0) {
    throw InvalidInput("ZZ channel carries a nonzero p_x");
  }
  if (kind == ChannelKind::X && p_zz != 0.0) {
    throw InvalidInput("X channel carries a nonzero p_zz");
  }
}

std::string_view to_string(ChannelKind kind) {
  switch (kind) {
    case ChannelKind::ZZ:
      return "zz";
    case ChannelKind::X:
      return "x";
    case ChannelKind::XplusZZ:
      return "x+zz";
  }
  return "?";
}

ChannelKind parse_channel_kind(std::string_view text) {
  std::string t(text);
  std::transform(t.begin(), t.end(), t.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (t == "zz") return ChannelKind::ZZ;
  if (t == "x") return ChannelKind::X;
  if (t == "x+zz" || t == "xpluszz" || t == "x_zz") return ChannelKind::XplusZZ;
  throw InvalidInput("unknown channel '" + std::string(text) +
                     "' (expected zz, x or x+zz)");
}

}  // namespace decoh
