#include "decoh/mps/svd.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <span>

#include "decoh/error.hpp"
#include "decoh/simd/kernels.hpp"

namespace decoh::mps {
namespace {

constexpr int kMaxSweeps = 80;

std::span<double> column(Eigen::MatrixXd& m, Eigen::Index j) {
  return {m.data() + j * m.rows(), static_cast<std::size_t>(m.rows())};
}

// Square or tall input (rows >= cols).
SvdResult hestenes(const Eigen::MatrixXd& a) {
  const Eigen::Index n = a.cols();
  Eigen::MatrixXd w = a;
  Eigen::MatrixXd v = Eigen::MatrixXd::Identity(n, n);
  const double eps = std::numeric_limits<double>::epsilon();
  const double tol = eps * std::sqrt(static_cast<double>(a.rows()));
  // Columns this small relative to the whole matrix are rounding noise.
  const double floor2 = std::pow(eps * a.norm(), 2);

  bool converged = n < 2;
  for (int sweep = 0; sweep < kMaxSweeps && !converged; ++sweep) {
    converged = true;
    for (Eigen::Index p = 0; p + 1 < n; ++p) {
      for (Eigen::Index q = p + 1; q < n; ++q) {
        auto wp = column(w, p);
        auto wq = column(w, q);
        const double alpha = simd::sum_squares(wp);
        const double beta = simd::sum_squares(wq);
        const double gamma = simd::dot(wp, wq);
        if (alpha <= floor2 || beta <= floor2) continue;
        if (std::abs(gamma) <= tol * std::sqrt(alpha) * std::sqrt(beta)) continue;
        converged = false;
        const double zeta = (beta - alpha) / (2.0 * gamma);
        const double t = (zeta >= 0.0 ? 1.0 : -1.0) /
                         (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
        const double c = 1.0 / std::sqrt(1.0 + t * t);
        const double s = c * t;
        simd::rotate(wp, wq, c, s);
        simd::rotate(column(v, p), column(v, q), c, s);
      }
    }
  }
  if (!converged) throw NumericalFailure("Jacobi SVD did not converge");

  Eigen::VectorXd sigma(n);
  for (Eigen::Index j = 0; j < n; ++j) sigma(j) = std::sqrt(simd::sum_squares(column(w, j)));
  std::vector<Eigen::Index> order(static_cast<std::size_t>(n));
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](Eigen::Index x, Eigen::Index y) { return sigma(x) > sigma(y); });

  SvdResult out;
  out.U = Eigen::MatrixXd::Zero(a.rows(), n);
  out.S.resize(n);
  out.V.resize(n, n);
  for (Eigen::Index k = 0; k < n; ++k) {
    const Eigen::Index j = order[static_cast<std::size_t>(k)];
    out.S(k) = sigma(j);
    out.V.col(k) = v.col(j);
    if (sigma(j) > 0.0) out.U.col(k) = w.col(j) / sigma(j);
  }
  return out;
}

}  // namespace

SvdResult jacobi_svd(const Eigen::MatrixXd& a) {
  if (a.size() == 0) throw InvalidInput("SVD of an empty matrix");
  if (!a.allFinite()) throw NumericalFailure("SVD input contains non-finite values");
  if (a.rows() < a.cols()) {
    SvdResult t = jacobi_svd(a.transpose());
    std::swap(t.U, t.V);
    return t;
  }
  if (a.rows() > a.cols()) {
    const Eigen::Index k = a.cols();
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(a);
    const Eigen::MatrixXd r = qr.matrixQR().topRows(k).triangularView<Eigen::Upper>();
    SvdResult inner = hestenes(r);
    const Eigen::MatrixXd q = qr.householderQ() * Eigen::MatrixXd::Identity(a.rows(), k);
    inner.U = q * inner.U;
    return inner;
  }
  return hestenes(a);
}

TruncationChoice choose_truncation(const Eigen::VectorXd& s, int chi_max,
                                   double cutoff) {
  if (chi_max < 1) throw InvalidInput("chi_max must be at least 1");
  TruncationChoice out;
  const int n = static_cast<int>(s.size());
  out.total_weight = s.squaredNorm();
  if (!(out.total_weight > 0.0)) throw NumericalFailure("all singular values vanish");

  // Values below 1e-14 of the largest are rounding noise; their singular
  // vectors are not reliable.
  int keep = n;
  while (keep > 1 && s(keep - 1) <= 1e-14 * s(0)) --keep;
  double dropped = 0.0;
  while (keep > 1) {
    const double w = s(keep - 1) * s(keep - 1);
    if ((dropped + w) / out.total_weight > cutoff) break;
    dropped += w;
    --keep;
  }
  keep = std::min(keep, chi_max);
  double discarded = 0.0;
  for (int k = n - 1; k >= keep; --k) discarded += s(k) * s(k);
  out.keep = keep;
  out.discarded_weight = discarded / out.total_weight;
  return out;
}

}  // namespace decoh::mps
