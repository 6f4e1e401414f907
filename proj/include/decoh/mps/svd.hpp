#pragma once

#include <Eigen/Dense>

namespace decoh::mps {

/// A = U diag(S) V^T with S sorted in descending order.
struct SvdResult {
  Eigen::MatrixXd U;
  Eigen::VectorXd S;
  Eigen::MatrixXd V;
};

/// Thin SVD by one-sided (Hestenes) Jacobi rotations on the columns. Tall
/// inputs are first reduced with a Householder QR; wide inputs are handled
/// through their transpose.
SvdResult jacobi_svd(const Eigen::MatrixXd& a);

struct TruncationChoice {
  int keep = 0;
  double discarded_weight = 0.0;  // relative: discarded sum s^2 / total
  double total_weight = 0.0;      // sum over all s^2
};

/// Drops the smallest singular values while the cumulative relative weight
/// stays <= cutoff, then caps the count at chi_max. Values below 1e-14 of the
/// largest are always dropped, but at least one value is kept.
TruncationChoice choose_truncation(const Eigen::VectorXd& s, int chi_max,
                                   double cutoff);

}  // namespace decoh::mps
