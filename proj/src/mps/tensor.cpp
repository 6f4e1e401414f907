#include "decoh/mps/tensor.hpp"

#include <cmath>

#include "decoh/error.hpp"

namespace decoh::mps {
namespace {

struct ThinQr {
  Eigen::MatrixXd q;  // m x k
  Eigen::MatrixXd r;  // k x n
};

ThinQr thin_qr(const Eigen::MatrixXd& m) {
  const Eigen::Index k = std::min(m.rows(), m.cols());
  Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
  ThinQr out;
  out.q = qr.householderQ() * Eigen::MatrixXd::Identity(m.rows(), k);
  out.r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
  return out;
}

// Site k becomes left-orthonormal; the remainder moves into site k + 1.
void left_step(std::vector<Tensor3>& sites, int k) {
  Tensor3& t = sites[k];
  const ThinQr f = thin_qr(Eigen::MatrixXd(t.left_grouped()));
  Tensor3& next = sites[k + 1];
  const Eigen::MatrixXd carried = f.r * Eigen::MatrixXd(next.right_grouped());
  t = Tensor3::from_left_grouped(f.q, t.phys);
  next = Tensor3::from_right_grouped(carried, next.phys);
}

// Site k becomes right-orthonormal; the remainder moves into site k - 1.
void right_step(std::vector<Tensor3>& sites, int k) {
  Tensor3& t = sites[k];
  const ThinQr f = thin_qr(Eigen::MatrixXd(t.right_grouped()).transpose());
  Tensor3& prev = sites[k - 1];
  const Eigen::MatrixXd carried =
      Eigen::MatrixXd(prev.left_grouped()) * f.r.transpose();
  t = Tensor3::from_right_grouped(f.q.transpose(), t.phys);
  prev = Tensor3::from_left_grouped(carried, prev.phys);
}

double normalize_site(Tensor3& t) {
  double n2 = 0.0;
  for (double x : t.data) n2 += x * x;
  const double n = std::sqrt(n2);
  if (!(n > 0.0) || !std::isfinite(n)) throw NumericalFailure("MPS has zero norm");
  for (double& x : t.data) x /= n;
  return n;
}

}  // namespace

Eigen::MatrixXd Tensor3::slice(int s) const {
  Eigen::MatrixXd m(left, right);
  for (int a = 0; a < left; ++a) {
    for (int b = 0; b < right; ++b) m(a, b) = (*this)(a, s, b);
  }
  return m;
}

Tensor3 Tensor3::from_left_grouped(const Eigen::MatrixXd& m, int phys) {
  Tensor3 t(static_cast<int>(m.rows()) / phys, phys, static_cast<int>(m.cols()));
  t.left_grouped() = m;
  return t;
}

Tensor3 Tensor3::from_right_grouped(const Eigen::MatrixXd& m, int phys) {
  Tensor3 t(static_cast<int>(m.rows()), phys, static_cast<int>(m.cols()) / phys);
  t.right_grouped() = m;
  return t;
}

double norm_squared(std::span<const Tensor3> sites) {
  return transfer_expectation(sites, {});
}

double transfer_expectation(std::span<const Tensor3> sites,
                            std::span<const Eigen::MatrixXd> ops) {
  Eigen::MatrixXd env = Eigen::MatrixXd::Ones(1, 1);
  for (std::size_t k = 0; k < sites.size(); ++k) {
    const Tensor3& t = sites[k];
    const bool identity = k >= ops.size() || ops[k].size() == 0;
    std::vector<Eigen::MatrixXd> slices;
    slices.reserve(t.phys);
    for (int s = 0; s < t.phys; ++s) slices.push_back(t.slice(s));
    Eigen::MatrixXd next = Eigen::MatrixXd::Zero(t.right, t.right);
    for (int s = 0; s < t.phys; ++s) {
      if (identity) {
        next.noalias() += slices[s].transpose() * env * slices[s];
        continue;
      }
      Eigen::MatrixXd ket = Eigen::MatrixXd::Zero(t.left, t.right);
      for (int sp = 0; sp < t.phys; ++sp) {
        const double o = ops[k](s, sp);
        if (o != 0.0) ket += o * slices[sp];
      }
      next.noalias() += slices[s].transpose() * env * ket;
    }
    env = std::move(next);
  }
  return env(0, 0);
}

std::vector<double> contract_to_vector(std::span<const Tensor3> sites) {
  // rows: configurations of the sites so far; cols: open right bond.
  Eigen::MatrixXd acc = Eigen::MatrixXd::Ones(1, 1);
  for (const Tensor3& t : sites) {
    const Eigen::Index rows = acc.rows();
    Eigen::MatrixXd next(rows * t.phys, t.right);
    for (int s = 0; s < t.phys; ++s) {
      const Eigen::MatrixXd block = acc * t.slice(s);
      for (Eigen::Index c = 0; c < rows; ++c) next.row(s * rows + c) = block.row(c);
    }
    acc = std::move(next);
  }
  return {acc.data(), acc.data() + acc.rows()};
}

void shift_center(std::vector<Tensor3>& sites, int from, int to) {
  for (int k = from; k < to; ++k) left_step(sites, k);
  for (int k = from; k > to; --k) right_step(sites, k);
}

double right_canonicalize(std::vector<Tensor3>& sites) {
  for (int k = static_cast<int>(sites.size()) - 1; k > 0; --k) right_step(sites, k);
  return normalize_site(sites.front());
}

double left_canonicalize(std::vector<Tensor3>& sites) {
  for (int k = 0; k + 1 < static_cast<int>(sites.size()); ++k) left_step(sites, k);
  return normalize_site(sites.back());
}

}  // namespace decoh::mps
