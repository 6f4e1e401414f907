#include "decoh/mps/chain.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

#include "decoh/error.hpp"
#include "decoh/mps/svd.hpp"
#include "decoh/spin/lanczos.hpp"

namespace decoh::mps {
namespace {

// Bulk MPO tensor. The left boundary selects the last row, the right
// boundary the first column.
struct Mpo {
  int dim = 0;
  std::vector<Eigen::Matrix2d> op;  // op[row * dim + col]
  std::vector<bool> nonzero;

  const Eigen::Matrix2d& at(int row, int col) const { return op[row * dim + col]; }
  bool has(int row, int col) const { return nonzero[row * dim + col]; }
};

Mpo build_mpo(const ModelSpec& spec) {
  const Eigen::Matrix2d id = Eigen::Matrix2d::Identity();
  const Eigen::Matrix2d x = real_pauli(Axis::X);
  const Eigen::Matrix2d z = real_pauli(Axis::Z);
  Eigen::Matrix2d raise;  // |up><down|
  raise << 0, 1, 0, 0;
  const Eigen::Matrix2d lower = raise.transpose();

  Mpo w;
  w.dim = spec.model == ModelKind::Tfim ? 3 : 5;
  w.op.assign(static_cast<std::size_t>(w.dim * w.dim), Eigen::Matrix2d::Zero());
  w.nonzero.assign(w.op.size(), false);
  auto set = [&](int r, int c, const Eigen::Matrix2d& m) {
    w.op[r * w.dim + c] = m;
    w.nonzero[r * w.dim + c] = true;
  };
  set(0, 0, id);
  set(w.dim - 1, w.dim - 1, id);
  if (spec.model == ModelKind::Tfim) {
    // -sum Z Z - sum X
    set(1, 0, z);
    set(2, 0, -x);
    set(2, 1, -z);
  } else {
    // sum XX + YY + delta ZZ = sum 2(s+ s- + s- s+) + delta ZZ
    set(1, 0, raise);
    set(2, 0, lower);
    set(3, 0, z);
    set(4, 1, 2.0 * lower);
    set(4, 2, 2.0 * raise);
    set(4, 3, spec.delta * z);
  }
  return w;
}

using Env = std::vector<Eigen::MatrixXd>;  // one bra x ket matrix per MPO index

Env left_boundary(const Mpo& w) {
  Env e(w.dim, Eigen::MatrixXd::Zero(1, 1));
  e[w.dim - 1](0, 0) = 1.0;
  return e;
}

Env right_boundary(const Mpo& w) {
  Env e(w.dim, Eigen::MatrixXd::Zero(1, 1));
  e[0](0, 0) = 1.0;
  return e;
}

Env grow_left(const Env& e, const Tensor3& t, const Mpo& w) {
  const Eigen::MatrixXd a[2] = {t.slice(0), t.slice(1)};
  Env out(w.dim, Eigen::MatrixXd::Zero(t.right, t.right));
  for (int w1 = 0; w1 < w.dim; ++w1) {
    if (e[w1].isZero(0.0)) continue;
    Eigen::MatrixXd ea[2] = {e[w1] * a[0], e[w1] * a[1]};
    for (int w2 = 0; w2 < w.dim; ++w2) {
      if (!w.has(w1, w2)) continue;
      const Eigen::Matrix2d& o = w.at(w1, w2);
      for (int s = 0; s < 2; ++s) {
        for (int sp = 0; sp < 2; ++sp) {
          if (o(s, sp) != 0.0) out[w2].noalias() += o(s, sp) * a[s].transpose() * ea[sp];
        }
      }
    }
  }
  return out;
}

Env grow_right(const Env& e, const Tensor3& t, const Mpo& w) {
  const Eigen::MatrixXd a[2] = {t.slice(0), t.slice(1)};
  Env out(w.dim, Eigen::MatrixXd::Zero(t.left, t.left));
  for (int w2 = 0; w2 < w.dim; ++w2) {
    if (e[w2].isZero(0.0)) continue;
    Eigen::MatrixXd ea[2] = {e[w2] * a[0].transpose(), e[w2] * a[1].transpose()};
    for (int w1 = 0; w1 < w.dim; ++w1) {
      if (!w.has(w1, w2)) continue;
      const Eigen::Matrix2d& o = w.at(w1, w2);
      for (int s = 0; s < 2; ++s) {
        for (int sp = 0; sp < 2; ++sp) {
          if (o(s, sp) != 0.0) out[w1].noalias() += o(s, sp) * a[s] * ea[sp];
        }
      }
    }
  }
  return out;
}

// Two-site effective Hamiltonian acting on theta(a, s1, s2, b).
class TwoSiteOperator {
 public:
  TwoSiteOperator(const Env& left, const Env& right, const Mpo& w, int dl, int dr)
      : left_(left), right_(right), dl_(dl), dr_(dr) {
    for (int w1 = 0; w1 < w.dim; ++w1) {
      for (int w3 = 0; w3 < w.dim; ++w3) {
        Eigen::Matrix4d k = Eigen::Matrix4d::Zero();
        bool any = false;
        for (int w2 = 0; w2 < w.dim; ++w2) {
          if (!w.has(w1, w2) || !w.has(w2, w3)) continue;
          any = true;
          for (int s1 = 0; s1 < 2; ++s1)
            for (int s2 = 0; s2 < 2; ++s2)
              for (int t1 = 0; t1 < 2; ++t1)
                for (int t2 = 0; t2 < 2; ++t2)
                  k(2 * s1 + s2, 2 * t1 + t2) += w.at(w1, w2)(s1, t1) * w.at(w2, w3)(s2, t2);
        }
        if (any && !k.isZero(0.0) && !left_[w1].isZero(0.0) && !right_[w3].isZero(0.0)) {
          terms_.push_back({w1, w3, k});
        }
      }
    }
  }

  std::size_t dimension() const { return static_cast<std::size_t>(dl_) * 4 * dr_; }

  void apply(std::span<const double> in, std::span<double> out) const {
    Eigen::MatrixXd theta[4];
    for (int s = 0; s < 4; ++s) theta[s].resize(dl_, dr_);
    for (int a = 0; a < dl_; ++a)
      for (int s = 0; s < 4; ++s)
        for (int b = 0; b < dr_; ++b) theta[s](a, b) = in[(a * 4 + s) * dr_ + b];

    Eigen::MatrixXd result[4];
    for (int s = 0; s < 4; ++s) result[s] = Eigen::MatrixXd::Zero(dl_, dr_);
    Eigen::MatrixXd projected;
    for (const Term& term : terms_) {
      const Eigen::MatrixXd rt = right_[term.w3].transpose();
      for (int sp = 0; sp < 4; ++sp) {
        if (term.k.col(sp).isZero(0.0)) continue;
        projected.noalias() = left_[term.w1] * theta[sp] * rt;
        for (int s = 0; s < 4; ++s) {
          if (term.k(s, sp) != 0.0) result[s] += term.k(s, sp) * projected;
        }
      }
    }
    for (int a = 0; a < dl_; ++a)
      for (int s = 0; s < 4; ++s)
        for (int b = 0; b < dr_; ++b) out[(a * 4 + s) * dr_ + b] = result[s](a, b);
  }

 private:
  struct Term {
    int w1;
    int w3;
    Eigen::Matrix4d k;
  };
  const Env& left_;
  const Env& right_;
  int dl_;
  int dr_;
  std::vector<Term> terms_;
};

ChainMps random_chain(int L, int chi_max, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  auto bond = [&](int k) {
    const int exponent = std::min(k, L - k);
    const long long full = exponent >= 30 ? (1LL << 30) : (1LL << exponent);
    return static_cast<int>(std::min<long long>(full, chi_max));
  };
  ChainMps mps;
  for (int k = 0; k < L; ++k) {
    Tensor3 t(bond(k), 2, bond(k + 1));
    for (double& x : t.data) x = normal(rng);
    mps.sites.push_back(std::move(t));
  }
  right_canonicalize(mps.sites);
  return mps;
}

}  // namespace

int ChainMps::max_bond() const {
  int m = 1;
  for (const Tensor3& t : sites) m = std::max(m, t.right);
  return m;
}

Eigen::Matrix2d real_pauli(Axis axis) {
  Eigen::Matrix2d m;
  switch (axis) {
    case Axis::X:
      m << 0, 1, 1, 0;
      break;
    case Axis::Y:
      m << 0, -1, 1, 0;
      break;
    case Axis::Z:
      m << 1, 0, 0, -1;
      break;
  }
  return m;
}

ChainGroundState ground_state_mps(const ModelSpec& spec, const DmrgOptions& options) {
  if (spec.boundary != Boundary::Open) {
    throw InvalidInput("the MPS ground-state solver supports open boundaries only");
  }
  validate(spec, 1 << 16);
  if (options.chi_max < 2) throw InvalidInput("chi_max must be at least 2");
  if (!(options.tolerance > 0.0)) throw InvalidInput("DMRG tolerance must be positive");

  const int L = spec.L;
  const Mpo w = build_mpo(spec);
  ChainGroundState out;
  out.mps = random_chain(L, options.chi_max, options.seed);
  auto& sites = out.mps.sites;

  std::vector<Env> lenv(L + 1), renv(L + 1);
  lenv[0] = left_boundary(w);
  renv[L] = right_boundary(w);
  for (int k = L - 1; k >= 2; --k) renv[k] = grow_right(renv[k + 1], sites[k], w);

  LanczosOptions lopt;
  lopt.max_iterations = 4000;
  lopt.residual_target = 1e-9;
  lopt.seed = options.seed;

  auto optimize = [&](int j, bool moving_right) {
    const Tensor3& a = sites[j];
    const Tensor3& b = sites[j + 1];
    const int dl = a.left;
    const int dr = b.right;
    const Eigen::MatrixXd theta0 = a.left_grouped() * b.right_grouped();
    std::vector<double> start(theta0.size());
    Eigen::Map<RowMatrix>(start.data(), theta0.rows(), theta0.cols()) = theta0;

    const TwoSiteOperator h(lenv[j], renv[j + 2], w, dl, dr);
    const EigenPair pair = lanczos_lowest(
        h.dimension(),
        [&h](std::span<const double> x, std::span<double> y) { h.apply(x, y); },
        lopt, start);

    const Eigen::MatrixXd m =
        Eigen::Map<const RowMatrix>(pair.vector.data(), dl * 2, 2 * dr);
    const SvdResult f = jacobi_svd(m);
    const TruncationChoice cut = choose_truncation(f.S, options.chi_max, options.svd_cutoff);
    const int k = cut.keep;
    Eigen::VectorXd s = f.S.head(k);
    s /= s.norm();
    if (moving_right) {
      sites[j] = Tensor3::from_left_grouped(f.U.leftCols(k), 2);
      sites[j + 1] = Tensor3::from_right_grouped(
          s.asDiagonal() * f.V.leftCols(k).transpose(), 2);
      lenv[j + 1] = grow_left(lenv[j], sites[j], w);
    } else {
      sites[j] = Tensor3::from_left_grouped(f.U.leftCols(k) * s.asDiagonal(), 2);
      sites[j + 1] = Tensor3::from_right_grouped(f.V.leftCols(k).transpose(), 2);
      renv[j + 1] = grow_right(renv[j + 2], sites[j + 1], w);
    }
    out.truncation_weight = std::max(out.truncation_weight, cut.discarded_weight);
    return pair.value;
  };

  double previous = std::numeric_limits<double>::infinity();
  for (int sweep = 1; sweep <= options.max_sweeps; ++sweep) {
    out.truncation_weight = 0.0;
    double energy = 0.0;
    for (int j = 0; j + 1 < L; ++j) energy = optimize(j, true);
    for (int j = L - 2; j >= 0; --j) energy = optimize(j, false);
    out.energy = energy;
    out.sweeps = sweep;
    if (sweep >= 2 && std::abs(energy - previous) < options.tolerance) return out;
    previous = energy;
  }
  throw NumericalFailure("DMRG energy did not settle within " +
                             std::to_string(options.max_sweeps) + " sweeps",
                         std::abs(out.energy - previous));
}

double chain_expectation(const ChainMps& mps, const std::vector<PauliOp>& ops) {
  std::vector<Eigen::MatrixXd> site_ops(mps.L());
  int y_count = 0;
  std::vector<int> axis_at(mps.L(), -1);
  for (const PauliOp& op : ops) {
    if (op.site < 0 || op.site >= mps.L()) {
      throw InvalidInput("site " + std::to_string(op.site) + " out of range");
    }
    const int axis = static_cast<int>(op.axis);
    if (axis_at[op.site] >= 0 && axis_at[op.site] != axis) {
      throw InvalidInput("two different Paulis on site " + std::to_string(op.site));
    }
    axis_at[op.site] = axis;
    Eigen::MatrixXd& m = site_ops[op.site];
    const Eigen::Matrix2d p = real_pauli(op.axis);
    m = m.size() == 0 ? Eigen::MatrixXd(p) : Eigen::MatrixXd(m * p);
    if (op.axis == Axis::Y) ++y_count;
  }
  if (y_count % 2 == 1) return 0.0;
  // Y Y = -(real Y)(real Y) per pair, so the sign flips per pair of Y.
  const double phase = (y_count / 2) % 2 == 0 ? 1.0 : -1.0;
  const double n2 = norm_squared(mps.sites);
  return phase * transfer_expectation(mps.sites, site_ops) / n2;
}

PureState to_pure_state(const ChainMps& mps, int max_sites) {
  if (mps.L() > max_sites) {
    throw InvalidInput("L=" + std::to_string(mps.L()) + " too large to expand densely");
  }
  PureState state;
  state.L = mps.L();
  state.boundary = Boundary::Open;
  state.amplitudes = contract_to_vector(mps.sites);
  return state;
}

}  // namespace decoh::mps
