#include "decoh/mps/ladder.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "decoh/error.hpp"
#include "decoh/mps/svd.hpp"

namespace decoh::mps {
namespace {

constexpr int kRung = 4;

int upper_spin(int r) { return r >> 1; }
int lower_spin(int r) { return r & 1; }

void check_site(const MpsLadder& ladder, int site) {
  if (site < 0 || site >= ladder.L()) {
    throw InvalidInput("site " + std::to_string(site) + " out of range for L=" +
                       std::to_string(ladder.L()));
  }
}

std::string format_weight(double w) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", w);
  return buf;
}

void check_abort(double weight, const TruncationPolicy& policy, const char* where) {
  if (weight > policy.abort_weight) {
    throw NumericalFailure(std::string("truncation weight ") + format_weight(weight) +
                               " at " + where + " exceeds the abort threshold " +
                               format_weight(policy.abort_weight) +
                               "; raise chi_max",
                           weight);
  }
}

// Keeps the leading `keep` singular values. With rescaling the kept values
// get unit norm and log_scale absorbs the pre-truncation norm; without it
// they are scaled back to the pre-truncation norm.
Eigen::VectorXd kept_values(const SvdResult& f, const TruncationChoice& cut,
                            const TruncationPolicy& policy, double& log_scale) {
  Eigen::VectorXd s = f.S.head(cut.keep);
  const double full = std::sqrt(cut.total_weight);
  s /= s.norm();
  if (policy.rescale) {
    log_scale += std::log(full);
  } else {
    s *= full;
  }
  return s;
}

// Diagonal weight of the ZZ link gate between rungs r1 (site j) and r2 (j+1).
double zz_gate(int r1, int r2, double p) {
  if (p == 0.0) return 1.0;
  const bool wall_u = upper_spin(r1) != upper_spin(r2);
  const bool wall_l = lower_spin(r1) != lower_spin(r2);
  if (wall_u == wall_l) return 1.0;
  return p == 0.5 ? 0.0 : 1.0 - 2.0 * p;
}

void apply_bond_gate(MpsLadder& ladder, int j, double p, bool moving_right,
                     const TruncationPolicy& policy) {
  Tensor3& a = ladder.sites[j];
  Tensor3& b = ladder.sites[j + 1];
  const int dl = a.left;
  const int dr = b.right;
  Eigen::MatrixXd theta = a.left_grouped() * b.right_grouped();
  for (int al = 0; al < dl; ++al) {
    for (int r1 = 0; r1 < kRung; ++r1) {
      for (int r2 = 0; r2 < kRung; ++r2) {
        const double g = zz_gate(r1, r2, p);
        if (g == 1.0) continue;
        theta.block(al * kRung + r1, r2 * dr, 1, dr) *= g;
      }
    }
  }
  const SvdResult f = jacobi_svd(theta);
  const TruncationChoice cut = choose_truncation(f.S, policy.chi_max, policy.svd_cutoff);
  check_abort(cut.discarded_weight, policy, ("link " + std::to_string(j)).c_str());
  ladder.truncation_weight += cut.discarded_weight;
  ladder.max_gate_truncation = std::max(ladder.max_gate_truncation, cut.discarded_weight);

  const Eigen::VectorXd s = kept_values(f, cut, policy, ladder.log_scale);
  const int k = cut.keep;
  if (moving_right) {
    a = Tensor3::from_left_grouped(f.U.leftCols(k), kRung);
    b = Tensor3::from_right_grouped(s.asDiagonal() * f.V.leftCols(k).transpose(), kRung);
    ladder.center = j + 1;
  } else {
    a = Tensor3::from_left_grouped(f.U.leftCols(k) * s.asDiagonal(), kRung);
    b = Tensor3::from_right_grouped(f.V.leftCols(k).transpose(), kRung);
    ladder.center = j;
  }
}

Eigen::Matrix4d rung_operator(const Eigen::Matrix2d& op, Leg leg) {
  Eigen::Matrix4d m = Eigen::Matrix4d::Zero();
  for (int r = 0; r < kRung; ++r) {
    for (int rp = 0; rp < kRung; ++rp) {
      if (leg == Leg::Upper) {
        if (lower_spin(r) == lower_spin(rp)) m(r, rp) = op(upper_spin(r), upper_spin(rp));
      } else {
        if (upper_spin(r) == upper_spin(rp)) m(r, rp) = op(lower_spin(r), lower_spin(rp));
      }
    }
  }
  return m;
}

}  // namespace

void TruncationPolicy::validate() const {
  if (chi_max < 1) throw InvalidInput("chi_max must be at least 1");
  if (!(svd_cutoff >= 0.0 && svd_cutoff < 1e-2)) {
    throw InvalidInput("svd_cutoff must lie in [0, 1e-2)");
  }
  if (!(abort_weight > 0.0)) throw InvalidInput("abort threshold must be positive");
  if (hard_bond_cap < 1) throw InvalidInput("hard bond cap must be positive");
}

int MpsLadder::max_bond() const {
  int m = 1;
  for (const Tensor3& t : sites) m = std::max(m, t.right);
  return m;
}

MpsLadder doubled_mps(const ChainMps& mps, const TruncationPolicy& policy) {
  policy.validate();
  if (mps.L() < 2) throw InvalidInput("doubled_mps needs at least two sites");
  for (const Tensor3& t : mps.sites) {
    if (t.phys != 2) throw InvalidInput("chain MPS must have physical dimension 2");
    if (static_cast<long long>(t.right) * t.right > policy.hard_bond_cap) {
      throw InvalidInput("doubled bond " + std::to_string(t.right) + "^2 exceeds the hard cap " +
                         std::to_string(policy.hard_bond_cap) +
                         "; use a smaller chi_max for the chain ground state");
    }
  }
  // A right-canonical chain gives a right-canonical product ladder.
  std::vector<Tensor3> chain = mps.sites;
  const double chain_norm = right_canonicalize(chain);

  MpsLadder ladder;
  ladder.sites.reserve(chain.size());
  for (const Tensor3& t : chain) {
    const int dl = t.left;
    const int dr = t.right;
    Tensor3 d(dl * dl, kRung, dr * dr);
    for (int a = 0; a < dl; ++a)
      for (int ap = 0; ap < dl; ++ap)
        for (int su = 0; su < 2; ++su)
          for (int sl = 0; sl < 2; ++sl)
            for (int b = 0; b < dr; ++b) {
              const double x = t(a, su, b);
              if (x == 0.0) continue;
              for (int bp = 0; bp < dr; ++bp) {
                d(a * dl + ap, 2 * su + sl, b * dr + bp) = x * t(ap, sl, bp);
              }
            }
    ladder.sites.push_back(std::move(d));
  }
  ladder.center = 0;
  if (policy.rescale) {
    ladder.log_scale = 2.0 * std::log(chain_norm);
  } else {
    for (double& x : ladder.sites.front().data) x *= chain_norm * chain_norm;
  }
  return ladder;
}

MpsLadder apply_filter_gates_mps(MpsLadder ladder, const ChannelSpec& channel,
                                 const TruncationPolicy& policy, GateOrder order) {
  channel.validate();
  policy.validate();
  const int L = ladder.L();
  if (L < 2) throw InvalidInput("ladder needs at least two sites");
  if (channel.p_x == 0.0 && channel.p_zz == 0.0) return ladder;

  auto x_map = [&](int site) {
    if (channel.p_x == 0.0) return;
    const double keep = 1.0 - channel.p_x;
    const double mix = channel.p_x;
    Tensor3& t = ladder.sites[site];
    Tensor3 out(t.left, t.phys, t.right);
    for (int a = 0; a < t.left; ++a)
      for (int r = 0; r < kRung; ++r)
        for (int b = 0; b < t.right; ++b)
          out(a, r, b) = keep * t(a, r, b) + mix * t(a, r ^ 3, b);
    t = std::move(out);
  };

  // Each rung map is applied while its site is the orthogonality center and
  // each truncation happens at the center, after every operation on the
  // finished side; later operations act only on the other side.
  if (order == GateOrder::LeftToRight) {
    shift_center(ladder.sites, ladder.center, 0);
    ladder.center = 0;
    for (int j = 0; j + 1 < L; ++j) {
      x_map(j);
      apply_bond_gate(ladder, j, channel.p_zz, true, policy);
    }
    x_map(L - 1);
  } else {
    shift_center(ladder.sites, ladder.center, L - 1);
    ladder.center = L - 1;
    for (int j = L - 2; j >= 0; --j) {
      x_map(j + 1);
      apply_bond_gate(ladder, j, channel.p_zz, false, policy);
    }
    x_map(0);
  }
  // The last rung map leaves the center unnormalized.
  Tensor3& c = ladder.sites[ladder.center];
  double n2 = 0.0;
  for (double x : c.data) n2 += x * x;
  if (!(n2 > 0.0)) throw NumericalFailure("filtered ladder has zero norm");
  if (policy.rescale) {
    const double n = std::sqrt(n2);
    for (double& x : c.data) x /= n;
    ladder.log_scale += std::log(n);
  }
  return ladder;
}

double see_mps(const MpsLadder& ladder) {
  const double n2 = norm_squared(ladder.sites);
  if (!(n2 > 0.0) || !std::isfinite(n2)) throw NumericalFailure("ladder has zero norm");
  return -(2.0 * ladder.log_scale + std::log(n2));
}

double mps_expectation(const MpsLadder& ladder, const std::vector<LadderPauli>& ops) {
  const int L = ladder.L();
  std::vector<Eigen::MatrixXd> site_ops(L);
  std::vector<int> axis_at(2 * static_cast<std::size_t>(L), -1);
  int y_count = 0;
  for (const LadderPauli& op : ops) {
    check_site(ladder, op.site);
    const std::size_t slot = 2 * static_cast<std::size_t>(op.site) + (op.leg == Leg::Lower);
    const int axis = static_cast<int>(op.axis);
    if (axis_at[slot] >= 0 && axis_at[slot] != axis) {
      throw InvalidInput("two different Paulis on one leg of site " +
                         std::to_string(op.site));
    }
    axis_at[slot] = axis;
    const Eigen::Matrix4d m = rung_operator(real_pauli(op.axis), op.leg);
    Eigen::MatrixXd& acc = site_ops[op.site];
    acc = acc.size() == 0 ? Eigen::MatrixXd(m) : Eigen::MatrixXd(acc * m);
    if (op.axis == Axis::Y) ++y_count;
  }
  if (y_count % 2 == 1) return 0.0;
  const double phase = (y_count / 2) % 2 == 0 ? 1.0 : -1.0;
  const double n2 = norm_squared(ladder.sites);
  if (!(n2 > 0.0)) throw NumericalFailure("ladder has zero norm");
  return phase * transfer_expectation(ladder.sites, site_ops) / n2;
}

double mps_renyi2_correlator(const MpsLadder& ladder, int i, int j) {
  check_site(ladder, i);
  check_site(ladder, j);
  if (i == j) return 1.0;
  return mps_expectation(ladder, {{i, Leg::Upper, Axis::Z},
                                  {j, Leg::Upper, Axis::Z},
                                  {i, Leg::Lower, Axis::Z},
                                  {j, Leg::Lower, Axis::Z}});
}

double mps_renyi2_susceptibility(const MpsLadder& ladder, int reference_site) {
  check_site(ladder, reference_site);
  double acc = 0.0;
  for (int r = 1; r <= ladder.L() / 2; ++r) {
    const int j = reference_site + r;
    if (j >= ladder.L()) break;
    acc += mps_renyi2_correlator(ladder, reference_site, j);
  }
  return 2.0 * acc / ladder.L();
}

double mps_canonical_correlator(const MpsLadder& ladder, int i, int j) {
  check_site(ladder, i);
  check_site(ladder, j);
  // Contract with the rung vector <<1| = sum over r in {up-up, down-down}.
  Eigen::RowVectorXd num = Eigen::RowVectorXd::Ones(1);
  Eigen::RowVectorXd den = Eigen::RowVectorXd::Ones(1);
  double log_guard = 0.0;
  for (int k = 0; k < ladder.L(); ++k) {
    const Tensor3& t = ladder.sites[k];
    Eigen::RowVectorXd next_num = Eigen::RowVectorXd::Zero(t.right);
    Eigen::RowVectorXd next_den = Eigen::RowVectorXd::Zero(t.right);
    for (int r : {0, 3}) {
      const Eigen::MatrixXd a = t.slice(r);
      double z = 1.0;
      if (k == i) z *= upper_spin(r) ? -1.0 : 1.0;
      if (k == j) z *= upper_spin(r) ? -1.0 : 1.0;
      next_num += z * (num * a);
      next_den += den * a;
    }
    const double scale = next_den.cwiseAbs().maxCoeff();
    const double guard = scale > 0.0 ? scale : 1.0;
    log_guard += std::log(guard);
    num = next_num / guard;
    den = next_den / guard;
  }
  const double trace = den(0);
  const double log_norm = 0.5 * std::log(norm_squared(ladder.sites));
  if (trace == 0.0 || std::log(std::abs(trace)) + log_guard - log_norm < std::log(1e-13)) {
    throw NumericalFailure("<<1|rho>> vanishes; canonical correlator undefined");
  }
  return num(0) / trace;
}

double canonical_deviation(const MpsLadder& ladder) {
  double worst = 0.0;
  for (int k = 0; k < ladder.L(); ++k) {
    if (k == ladder.center) continue;
    const Tensor3& t = ladder.sites[k];
    if (k < ladder.center) {
      const Eigen::MatrixXd g = t.left_grouped().transpose() * t.left_grouped();
      worst = std::max(worst, (g - Eigen::MatrixXd::Identity(t.right, t.right))
                                  .cwiseAbs().maxCoeff());
    } else {
      const Eigen::MatrixXd g = t.right_grouped() * t.right_grouped().transpose();
      worst = std::max(worst, (g - Eigen::MatrixXd::Identity(t.left, t.left))
                                  .cwiseAbs().maxCoeff());
    }
  }
  const Tensor3& c = ladder.sites[ladder.center];
  double center_weight = 0.0;
  for (double x : c.data) center_weight += x * x;
  const double n2 = norm_squared(ladder.sites);
  worst = std::max(worst, std::abs(center_weight - n2) / n2);
  return worst;
}

DoubledState to_doubled_state(const MpsLadder& ladder, int max_sites) {
  const int L = ladder.L();
  if (L > max_sites) {
    throw InvalidInput("L=" + std::to_string(L) + " too large to expand densely");
  }
  const std::vector<double> flat = contract_to_vector(ladder.sites);
  DoubledState ds;
  ds.L = L;
  ds.boundary = Boundary::Open;
  ds.log_prefactor = ladder.log_scale;
  ds.amplitudes.assign(flat.size(), 0.0);
  for (std::size_t idx = 0; idx < flat.size(); ++idx) {
    std::uint32_t cu = 0;
    std::uint32_t cl = 0;
    std::size_t rest = idx;
    for (int k = 0; k < L; ++k) {
      const int r = static_cast<int>(rest % kRung);
      rest /= kRung;
      cu |= static_cast<std::uint32_t>(upper_spin(r)) << k;
      cl |= static_cast<std::uint32_t>(lower_spin(r)) << k;
    }
    ds.amplitudes[(std::size_t{cu} << L) | cl] = flat[idx];
  }
  return ds;
}

ObservableReport observe_mps(const MpsLadder& ladder, const ChannelSpec& channel) {
  ObservableReport report;
  report.p_zz = channel.p_zz;
  report.p_x = channel.p_x;
  report.S_SE = see_mps(ladder);
  for (int r = 0; r <= ladder.L() / 2; ++r) {
    report.c2_profile.emplace_back(r, mps_renyi2_correlator(ladder, 0, r));
    report.c1_profile.emplace_back(r, mps_canonical_correlator(ladder, 0, r));
  }
  double acc = 0.0;
  for (int r = 1; r <= ladder.L() / 2; ++r) acc += report.c2_profile[r].second;
  report.chi2 = 2.0 * acc / ladder.L();
  return report;
}

}  // namespace decoh::mps
