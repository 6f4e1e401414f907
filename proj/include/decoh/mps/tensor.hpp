#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

namespace decoh::mps {

using RowMatrix = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

/// Site tensor T(a, s, b) with left bond a, physical index s, right bond b,
/// stored row-major as ((a * phys) + s) * right + b.
struct Tensor3 {
  int left = 1;
  int phys = 1;
  int right = 1;
  std::vector<double> data;

  Tensor3() = default;
  Tensor3(int l, int d, int r)
      : left(l), phys(d), right(r), data(static_cast<std::size_t>(l) * d * r, 0.0) {}

  double& operator()(int a, int s, int b) {
    return data[(static_cast<std::size_t>(a) * phys + s) * right + b];
  }
  double operator()(int a, int s, int b) const {
    return data[(static_cast<std::size_t>(a) * phys + s) * right + b];
  }

  /// (left * phys) x right view.
  Eigen::Map<RowMatrix> left_grouped() { return {data.data(), left * phys, right}; }
  Eigen::Map<const RowMatrix> left_grouped() const {
    return {data.data(), left * phys, right};
  }
  /// left x (phys * right) view.
  Eigen::Map<RowMatrix> right_grouped() { return {data.data(), left, phys * right}; }
  Eigen::Map<const RowMatrix> right_grouped() const {
    return {data.data(), left, phys * right};
  }

  /// left x right matrix at physical index s.
  Eigen::MatrixXd slice(int s) const;

  static Tensor3 from_left_grouped(const Eigen::MatrixXd& m, int phys);
  static Tensor3 from_right_grouped(const Eigen::MatrixXd& m, int phys);
};

/// <psi|psi> by left-to-right transfer contraction.
double norm_squared(std::span<const Tensor3> sites);

/// <psi| prod_k O_k |psi> with one phys x phys matrix per site (an empty
/// matrix means identity).
double transfer_expectation(std::span<const Tensor3> sites,
                            std::span<const Eigen::MatrixXd> ops);

/// Full amplitude vector; the site-0 physical index is the least significant
/// digit in base phys.
std::vector<double> contract_to_vector(std::span<const Tensor3> sites);

/// Moves the orthogonality center from `from` to `to` with exact QR steps.
void shift_center(std::vector<Tensor3>& sites, int from, int to);

/// Right-canonical form with the whole norm on site 0; returns that norm.
double right_canonicalize(std::vector<Tensor3>& sites);

/// Left-canonical form with the whole norm on the last site; returns it.
double left_canonicalize(std::vector<Tensor3>& sites);

}  // namespace decoh::mps
