#include "decoh/spin/lanczos.hpp"

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "decoh/error.hpp"
#include "decoh/simd/kernels.hpp"

namespace decoh {
namespace {

void scale(std::span<double> v, double factor) {
  for (double& x : v) x *= factor;
}

void axpy(double a, std::span<const double> x, std::span<double> y) {
  for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

int default_krylov_limit(std::size_t dimension) {
  constexpr std::size_t kBudget = std::size_t{1} << 26;  // doubles held in V
  const std::size_t by_memory = std::max<std::size_t>(30, kBudget / dimension);
  return static_cast<int>(std::min<std::size_t>({dimension, 2000, by_memory}));
}

}  // namespace

EigenPair lanczos_lowest(std::size_t dimension, const MatVec& matvec,
                         const LanczosOptions& options,
                         std::span<const double> start) {
  if (dimension == 0) throw InvalidInput("Lanczos on an empty space");
  const int krylov_limit = options.krylov_limit > 0
                               ? std::min<int>(options.krylov_limit,
                                               static_cast<int>(dimension))
                               : default_krylov_limit(dimension);

  std::vector<double> current(dimension);
  if (!start.empty()) {
    if (start.size() != dimension) throw InvalidInput("start vector size mismatch");
    std::copy(start.begin(), start.end(), current.begin());
  } else {
    std::mt19937_64 rng(options.seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (double& x : current) x = dist(rng);
  }
  {
    const double nrm = std::sqrt(simd::sum_squares(current));
    if (!(nrm > 0.0)) throw InvalidInput("Lanczos start vector has zero norm");
    scale(current, 1.0 / nrm);
  }

  EigenPair result;
  std::vector<double> w(dimension);
  std::vector<double> hx(dimension);
  int iterations = 0;
  bool first_cycle = true;
  double last_residual = std::numeric_limits<double>::infinity();

  while (true) {
    std::vector<std::vector<double>> basis;
    std::vector<double> alpha;
    std::vector<double> beta;
    basis.push_back(current);

    Eigen::VectorXd ritz_vector;
    double ritz_value = 0.0;

    for (int j = 0;; ++j) {
      const std::vector<double>& v = basis[j];
      matvec(v, w);
      ++iterations;
      const double a = simd::dot(v, w);
      alpha.push_back(a);
      axpy(-a, v, w);
      if (j > 0) axpy(-beta[j - 1], basis[j - 1], w);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& u : basis) axpy(-simd::dot(u, w), u, w);
      }
      const double b = std::sqrt(simd::sum_squares(w));

      const int m = j + 1;
      const bool at_end = b < 1e-14 * (std::abs(a) + 1.0) || m >= krylov_limit ||
                          static_cast<std::size_t>(m) >= dimension ||
                          iterations >= options.max_iterations;
      if (at_end || m < 20 || m % 5 == 0) {
        Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(alpha.data(), m);
        Eigen::VectorXd sub(std::max(m - 1, 0));
        for (int k = 0; k + 1 < m; ++k) sub(k) = beta[k];
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri;
        tri.computeFromTridiagonal(diag, sub, Eigen::ComputeEigenvectors);
        ritz_value = tri.eigenvalues()(0);
        ritz_vector = tri.eigenvectors().col(0);
        if (first_cycle && m >= 2) result.next_value = tri.eigenvalues()(1);
        const double estimate = b * std::abs(ritz_vector(m - 1));
        if (at_end || estimate < options.ritz_tolerance) break;
      }
      beta.push_back(b);
      std::vector<double> next(w);
      scale(next, 1.0 / b);
      basis.push_back(std::move(next));
    }
    first_cycle = false;

    std::fill(current.begin(), current.end(), 0.0);
    for (Eigen::Index k = 0; k < ritz_vector.size(); ++k) {
      axpy(ritz_vector(k), basis[static_cast<std::size_t>(k)], current);
    }
    scale(current, 1.0 / std::sqrt(simd::sum_squares(current)));

    matvec(current, hx);
    ++iterations;
    axpy(-ritz_value, current, hx);
    last_residual = std::sqrt(simd::sum_squares(hx));

    if (last_residual < options.residual_target) {
      result.value = ritz_value;
      result.vector = std::move(current);
      result.residual = last_residual;
      result.iterations = iterations;
      return result;
    }
    if (iterations >= options.max_iterations) {
      throw NumericalFailure("Lanczos did not converge after " +
                                 std::to_string(iterations) +
                                 " iterations (residual " +
                                 std::to_string(last_residual) + ")",
                             last_residual);
    }
  }
}

}  // namespace decoh
