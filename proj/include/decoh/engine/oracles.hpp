#pragma once
// Dense density-matrix routes used to cross-check the doubled-space engine,
// plus the Shannon-entropy and parity-pair identities at maximal decoherence.

#include <Eigen/Dense>

#include "decoh/engine/doubled_state.hpp"
#include "decoh/spin/model.hpp"

namespace decoh {

/// Largest chain for which 2^L x 2^L density matrices are formed.
inline constexpr int kDenseMatrixSiteLimit = 10;

/// rho_0 = |phi><phi|.
Eigen::MatrixXd density_matrix(const PureState& state,
                               int max_sites = kDenseMatrixSiteLimit);

/// exp(log_prefactor) * amplitudes reshaped to rho(c_u, c_l).
Eigen::MatrixXd density_matrix(const DoubledState& ds,
                               int max_sites = kDenseMatrixSiteLimit);

/// Doubled state of an arbitrary real density matrix.
DoubledState vectorize(const Eigen::MatrixXd& rho, int L, Boundary boundary);

/// sum over outcome patterns beta of P^beta rho_0 P^beta with
/// P^beta = prod_j (1 + beta_j Z_j Z_{j+1}) / 2. Periodic chains enumerate the
/// 2^{L-1} patterns with beta_{L-1} = prod_{j<L-1} beta_j.
Eigen::MatrixXd maximal_decohere_oracle(const PureState& state,
                                        int max_sites = kDenseMatrixSiteLimit);

/// sum_{g, alpha} P^{(g,alpha)} rho P^{(g,alpha)} over the glassy GHZ states
/// (|c> + alpha |c-bar>)/sqrt(2).
Eigen::MatrixXd ghz_projector_sum(const Eigen::MatrixXd& rho, int L);

/// Kraus-form ZZ channel applied link by link to a density matrix.
Eigen::MatrixXd zz_channel_dense(const Eigen::MatrixXd& rho, int L,
                                 Boundary boundary, double p_zz);

/// Kraus-form single-site X channel on every site.
Eigen::MatrixXd x_channel_dense(const Eigen::MatrixXd& rho, int L, double p_x);

enum class ShannonBasis { ZProduct, GlassyGHZ };

/// -log sum_l p_l^2 with p_l = |<e_l|phi>|^2.
double shannon_renyi2(const PureState& state, ShannonBasis basis);

/// The uniform sign s with phi(c-bar) = s phi(c). Throws InvalidInput when the
/// pairs disagree beyond 1e-9 relative to the largest amplitude.
int parity_pair_sign(const PureState& state);

}  // namespace decoh
