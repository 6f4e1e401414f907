#pragma once

#include <string_view>

namespace decoh {

enum class ChannelKind { ZZ, X, XplusZZ };

/// Decoherence strengths. The filter time of each component is
/// tau = atanh(p / (1 - p)), which diverges at the maximal value p = 1/2.
struct ChannelSpec {
  ChannelKind kind = ChannelKind::ZZ;
  double p_zz = 0.0;
  double p_x = 0.0;

  /// Single-knob constructor: ZZ sets p_zz, X sets p_x, XplusZZ sets both.
  static ChannelSpec with_strength(ChannelKind kind, double p);

  double tau_zz() const;
  double tau_x() const;
  bool tau_zz_finite() const { return p_zz < 0.5; }
  bool tau_x_finite() const { return p_x < 0.5; }

  /// Probabilities in [0, 1/2]; unused components must be zero.
  void validate() const;
};

double filter_tau(double p);

std::string_view to_string(ChannelKind kind);
ChannelKind parse_channel_kind(std::string_view text);

}  // namespace decoh
