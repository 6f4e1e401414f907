#include "decoh/engine/oracles.hpp"

#include <cmath>
#include <string>

#include "decoh/error.hpp"

namespace decoh {
namespace {

void check_dense_limit(int L, int max_sites) {
  if (L > max_sites) {
    throw InvalidInput("L=" + std::to_string(L) +
                       " exceeds the dense-matrix limit of " +
                       std::to_string(max_sites) + " sites");
  }
}

// Diagonal of Z_j Z_{j+1} in the Z-product basis.
Eigen::VectorXd link_parity(int L, int link) {
  const std::size_t n = std::size_t{1} << L;
  Eigen::VectorXd d(n);
  for (std::uint32_t c = 0; c < n; ++c) {
    d(c) = z_value(c, link) * z_value(c, (link + 1) % L);
  }
  return d;
}

}  // namespace

Eigen::MatrixXd density_matrix(const PureState& state, int max_sites) {
  check_dense_limit(state.L, max_sites);
  const Eigen::Map<const Eigen::VectorXd> phi(state.amplitudes.data(),
                                              state.amplitudes.size());
  return phi * phi.transpose();
}

Eigen::MatrixXd density_matrix(const DoubledState& ds, int max_sites) {
  check_dense_limit(ds.L, max_sites);
  const auto n = static_cast<Eigen::Index>(ds.row_size());
  Eigen::MatrixXd rho(n, n);
  const double scale = std::exp(ds.log_prefactor);
  for (Eigen::Index cu = 0; cu < n; ++cu) {
    for (Eigen::Index cl = 0; cl < n; ++cl) {
      rho(cu, cl) = scale * ds.at(static_cast<std::uint32_t>(cu),
                                  static_cast<std::uint32_t>(cl));
    }
  }
  return rho;
}

DoubledState vectorize(const Eigen::MatrixXd& rho, int L, Boundary boundary) {
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << L);
  if (rho.rows() != n || rho.cols() != n) {
    throw InvalidInput("density matrix dimension does not match L");
  }
  DoubledState ds;
  ds.L = L;
  ds.boundary = boundary;
  ds.amplitudes.resize(static_cast<std::size_t>(n * n));
  for (Eigen::Index cu = 0; cu < n; ++cu) {
    for (Eigen::Index cl = 0; cl < n; ++cl) {
      ds.amplitudes[static_cast<std::size_t>(cu * n + cl)] = rho(cu, cl);
    }
  }
  return ds;
}

Eigen::MatrixXd maximal_decohere_oracle(const PureState& state, int max_sites) {
  check_dense_limit(state.L, max_sites);
  const int L = state.L;
  const int links = link_count(L, state.boundary);
  const Eigen::MatrixXd rho0 = density_matrix(state, max_sites);
  const auto n = rho0.rows();

  std::vector<Eigen::VectorXd> parity;
  for (int j = 0; j < links; ++j) parity.push_back(link_parity(L, j));

  // Periodic: beta_{L-1} is fixed by the others, so 2^{L-1} free patterns.
  // Open: L-1 links, all patterns free.
  const int free_links = state.boundary == Boundary::Periodic ? links - 1 : links;
  Eigen::MatrixXd rho_d = Eigen::MatrixXd::Zero(n, n);
  for (std::uint64_t pattern = 0; pattern < (std::uint64_t{1} << free_links);
       ++pattern) {
    std::vector<int> beta(links);
    int product = 1;
    for (int j = 0; j < free_links; ++j) {
      beta[j] = ((pattern >> j) & 1u) ? -1 : 1;
      product *= beta[j];
    }
    if (state.boundary == Boundary::Periodic) beta[links - 1] = product;

    Eigen::VectorXd projector = Eigen::VectorXd::Ones(n);
    for (int j = 0; j < links; ++j) {
      projector = projector.cwiseProduct(
          (Eigen::VectorXd::Ones(n) + beta[j] * parity[j]) * 0.5);
    }
    rho_d += projector.asDiagonal() * rho0 * projector.asDiagonal();
  }
  return rho_d;
}

Eigen::MatrixXd ghz_projector_sum(const Eigen::MatrixXd& rho, int L) {
  const auto n = static_cast<Eigen::Index>(std::size_t{1} << L);
  if (rho.rows() != n || rho.cols() != n) {
    throw InvalidInput("density matrix dimension does not match L");
  }
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(n, n);
  const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
  for (std::uint32_t c = 0; c < n; ++c) {
    const std::uint32_t cbar = all_flipped(c, L);
    if (cbar < c) continue;
    for (int alpha : {1, -1}) {
      Eigen::VectorXd g = Eigen::VectorXd::Zero(n);
      g(c) = inv_sqrt2;
      g(cbar) = alpha * inv_sqrt2;
      const double weight = g.dot(rho * g);
      out += weight * g * g.transpose();
    }
  }
  return out;
}

Eigen::MatrixXd zz_channel_dense(const Eigen::MatrixXd& rho, int L,
                                 Boundary boundary, double p_zz) {
  filter_tau(p_zz);
  Eigen::MatrixXd out = rho;
  for (int j = 0; j < link_count(L, boundary); ++j) {
    const Eigen::VectorXd d = link_parity(L, j);
    out = (1.0 - p_zz) * out + p_zz * (d.asDiagonal() * out * d.asDiagonal());
  }
  return out;
}

Eigen::MatrixXd x_channel_dense(const Eigen::MatrixXd& rho, int L, double p_x) {
  filter_tau(p_x);
  const auto n = rho.rows();
  Eigen::MatrixXd out = rho;
  for (int j = 0; j < L; ++j) {
    Eigen::MatrixXd flip = Eigen::MatrixXd::Zero(n, n);
    for (std::uint32_t c = 0; c < n; ++c) flip(c ^ (1u << j), c) = 1.0;
    out = (1.0 - p_x) * out + p_x * (flip * out * flip.transpose());
  }
  return out;
}

double shannon_renyi2(const PureState& state, ShannonBasis basis) {
  const auto& a = state.amplitudes;
  double acc = 0.0;
  if (basis == ShannonBasis::ZProduct) {
    for (double x : a) {
      const double p = x * x;
      acc += p * p;
    }
  } else {
    for (std::uint32_t c = 0; c < a.size(); ++c) {
      const std::uint32_t cbar = all_flipped(c, state.L);
      if (cbar < c) continue;
      for (double alpha : {1.0, -1.0}) {
        const double overlap = (a[c] + alpha * a[cbar]) / std::sqrt(2.0);
        const double p = overlap * overlap;
        acc += p * p;
      }
    }
  }
  return -std::log(acc);
}

int parity_pair_sign(const PureState& state) {
  const auto& a = state.amplitudes;
  double largest = 0.0;
  std::uint32_t pivot = 0;
  for (std::uint32_t c = 0; c < a.size(); ++c) {
    if (std::abs(a[c]) > largest) {
      largest = std::abs(a[c]);
      pivot = c;
    }
  }
  if (largest == 0.0) throw InvalidInput("parity sign of a zero state");
  const double partner = a[all_flipped(pivot, state.L)];
  const int sign = partner * a[pivot] >= 0.0 ? 1 : -1;

  const double tol = 1e-9 * largest;
  for (std::uint32_t c = 0; c < a.size(); ++c) {
    const double mismatch = std::abs(a[all_flipped(c, state.L)] - sign * a[c]);
    if (mismatch > tol) {
      throw InvalidInput("state is not a U_X eigenstate: configuration " +
                         std::to_string(c) + " breaks the parity-pair relation (" +
                         std::to_string(mismatch / largest) + " relative)");
    }
  }
  return sign;
}

}  // namespace decoh
