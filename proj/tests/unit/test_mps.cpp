#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "dense_oracle.hpp"
#include "decoh/engine/doubled_state.hpp"
#include "decoh/error.hpp"
#include "decoh/mps/chain.hpp"
#include "decoh/mps/ladder.hpp"
#include "decoh/mps/svd.hpp"

namespace {

using decoh::Axis;
using decoh::Boundary;
using decoh::ChannelKind;
using decoh::ChannelSpec;
using decoh::ModelKind;
using decoh::ModelSpec;
namespace mps = decoh::mps;

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::MatrixXd m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = n(rng);
  return m;
}

ModelSpec open_chain(ModelKind model, int L, double delta = 0.45) {
  return {model, L, delta, Boundary::Open, true};
}

// Shared small-chain fixtures so DMRG runs once per model.
const mps::ChainGroundState& chain_state(ModelKind model) {
  static const auto tfim = mps::ground_state_mps(open_chain(ModelKind::Tfim, 8));
  static const auto xxz = mps::ground_state_mps(open_chain(ModelKind::Xxz, 8));
  return model == ModelKind::Tfim ? tfim : xxz;
}

TEST(JacobiSvd, ReconstructsAndMatchesEigen) {
  const std::vector<std::pair<int, int>> shapes = {{5, 3}, {3, 5}, {8, 8}, {40, 12}, {1, 6}};
  std::uint64_t seed = 1;
  for (auto [r, c] : shapes) {
    const Eigen::MatrixXd a = random_matrix(r, c, seed++);
    const auto f = mps::jacobi_svd(a);
    const Eigen::MatrixXd back = f.U * f.S.asDiagonal() * f.V.transpose();
    EXPECT_LT((back - a).cwiseAbs().maxCoeff(), 1e-12);
    const auto k = f.S.size();
    EXPECT_LT((f.U.transpose() * f.U - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff(),
              1e-12);
    EXPECT_LT((f.V.transpose() * f.V - Eigen::MatrixXd::Identity(k, k)).cwiseAbs().maxCoeff(),
              1e-12);
    Eigen::JacobiSVD<Eigen::MatrixXd> ref(a);
    EXPECT_LT((ref.singularValues() - f.S).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(JacobiSvd, RankDeficientInput) {
  const Eigen::MatrixXd u = random_matrix(10, 2, 5);
  const Eigen::MatrixXd v = random_matrix(7, 2, 6);
  const Eigen::MatrixXd a = u * v.transpose();
  const auto f = mps::jacobi_svd(a);
  EXPECT_LT(f.S(2), 1e-12 * f.S(0));
  const Eigen::MatrixXd back = f.U * f.S.asDiagonal() * f.V.transpose();
  EXPECT_LT((back - a).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Truncation, CutoffAndCap) {
  Eigen::VectorXd s(5);
  s << 1.0, 0.5, 1e-3, 1e-7, 0.0;
  auto t = mps::choose_truncation(s, 10, 1e-10);
  EXPECT_EQ(t.keep, 3);
  EXPECT_NEAR(t.discarded_weight, 1e-14 / 1.25, 1e-20);
  t = mps::choose_truncation(s, 2, 0.0);
  EXPECT_EQ(t.keep, 2);
  EXPECT_NEAR(t.discarded_weight, (1e-6 + 1e-14) / (1.25 + 1e-6 + 1e-14), 1e-16);
  EXPECT_THROW(mps::choose_truncation(s, 0, 0.0), decoh::InvalidInput);
}

TEST(Dmrg, MatchesDenseDiagonalization) {
  for (ModelKind model : {ModelKind::Tfim, ModelKind::Xxz}) {
    const ModelSpec spec = open_chain(model, 8);
    const auto& gs = chain_state(model);
    const auto ref = oracle::lowest(oracle::hamiltonian(spec));
    EXPECT_NEAR(gs.energy, ref.e0, 1e-9);
    const auto dense = mps::to_pure_state(gs.mps);
    EXPECT_GT(oracle::overlap(dense.amplitudes, ref.ground), 1.0 - 1e-9);
  }
}

// Open critical TFIM maps to free fermions: E0 = -sum of the singular values
// of the bidiagonal matrix with unit diagonal and unit superdiagonal.
double free_fermion_open_tfim(int L) {
  const Eigen::MatrixXd m = Eigen::MatrixXd::Identity(L, L) +
                            Eigen::MatrixXd::Identity(L, L + 1).rightCols(L);
  return -Eigen::JacobiSVD<Eigen::MatrixXd>(m).singularValues().sum();
}

TEST(Dmrg, FreeFermionOracleAgreesWithDense) {
  const auto ref = oracle::lowest(oracle::hamiltonian(open_chain(ModelKind::Tfim, 8)));
  EXPECT_NEAR(free_fermion_open_tfim(8), ref.e0, 1e-12);
}

TEST(Dmrg, LongerChainAgainstFreeFermions) {
  mps::DmrgOptions opt;
  opt.chi_max = 32;
  for (int L : {12, 20}) {
    const auto gs = mps::ground_state_mps(open_chain(ModelKind::Tfim, L), opt);
    EXPECT_NEAR(gs.energy, free_fermion_open_tfim(L), 1e-8) << "L=" << L;
  }
}

TEST(Dmrg, RejectsPeriodic) {
  ModelSpec spec = open_chain(ModelKind::Tfim, 8);
  spec.boundary = Boundary::Periodic;
  EXPECT_THROW(mps::ground_state_mps(spec), decoh::InvalidInput);
}

TEST(Dmrg, ExpectationMatchesDenseState) {
  const auto& gs = chain_state(ModelKind::Xxz);
  const auto dense = mps::to_pure_state(gs.mps);
  const std::vector<std::vector<decoh::PauliOp>> strings = {
      {{1, Axis::Z}, {4, Axis::Z}},
      {{2, Axis::X}, {3, Axis::X}},
      {{2, Axis::Y}, {3, Axis::Y}},
      {{0, Axis::Y}, {1, Axis::X}, {2, Axis::X}, {3, Axis::Y}},
  };
  for (const auto& ops : strings) {
    EXPECT_NEAR(mps::chain_expectation(gs.mps, ops),
                decoh::expectation_pauli_string(dense, ops), 1e-12);
  }
}

TEST(Doubling, MatchesDenseVectorization) {
  const auto& gs = chain_state(ModelKind::Tfim);
  const auto ladder = mps::doubled_mps(gs.mps);
  EXPECT_LT(mps::canonical_deviation(ladder), 1e-10);
  const auto dense = decoh::vectorize(mps::to_pure_state(gs.mps));
  const auto from_mps = mps::to_doubled_state(ladder);
  const Eigen::Map<const Eigen::VectorXd> a(dense.amplitudes.data(), dense.amplitudes.size());
  const Eigen::Map<const Eigen::VectorXd> b(from_mps.amplitudes.data(),
                                            from_mps.amplitudes.size());
  const double overlap = std::abs(a.dot(b)) / (a.norm() * b.norm());
  EXPECT_GT(overlap, 1.0 - 1e-10);
  EXPECT_LT((a - std::exp(from_mps.log_prefactor) * b).cwiseAbs().maxCoeff(), 1e-12);
  for (int k = 0; k < ladder.L(); ++k) {
    EXPECT_EQ(ladder.sites[k].right, gs.mps.sites[k].right * gs.mps.sites[k].right);
  }
  EXPECT_NEAR(mps::see_mps(ladder), 0.0, 1e-10);
}

TEST(Doubling, HardCapRejectsLargeChainBonds) {
  const auto& gs = chain_state(ModelKind::Tfim);
  mps::TruncationPolicy policy;
  policy.hard_bond_cap = 8;
  EXPECT_THROW(mps::doubled_mps(gs.mps, policy), decoh::InvalidInput);
}

struct GateCase {
  ModelKind model;
  ChannelKind channel;
  double p;
  // <<1|rho>> weighs every diagonal entry equally, so C^I feels truncation
  // more than the other observables; XXZ at chi 128 sits near 1e-5.
  double c1_tolerance = 1e-6;
};

class GatesVsDense : public ::testing::TestWithParam<GateCase> {};

TEST_P(GatesVsDense, ObservablesAgree) {
  const auto c = GetParam();
  const auto& gs = chain_state(c.model);
  const ChannelSpec channel = ChannelSpec::with_strength(c.channel, c.p);
  const auto ladder = mps::apply_filter_gates_mps(mps::doubled_mps(gs.mps), channel);
  const auto dense =
      decoh::apply_channel(decoh::vectorize(mps::to_pure_state(gs.mps)), channel);

  EXPECT_NEAR(mps::see_mps(ladder), decoh::see(dense), 1e-6);
  for (int r = 1; r <= 4; ++r) {
    EXPECT_NEAR(mps::mps_renyi2_correlator(ladder, 0, r), decoh::renyi2_correlator(dense, 0, r),
                1e-6);
    EXPECT_NEAR(mps::mps_canonical_correlator(ladder, 0, r),
                decoh::canonical_correlator(dense, 0, r), c.c1_tolerance);
  }
  EXPECT_NEAR(mps::mps_renyi2_susceptibility(ladder, 2),
              decoh::renyi2_susceptibility(dense, 2), 1e-6);
  EXPECT_LT(mps::canonical_deviation(ladder), 1e-10);

  // Without a cutoff nothing is discarded and agreement is at rounding level.
  mps::TruncationPolicy exact;
  exact.svd_cutoff = 0.0;
  exact.chi_max = 4096;
  const auto full = mps::apply_filter_gates_mps(mps::doubled_mps(gs.mps, exact), channel, exact);
  EXPECT_LT(full.truncation_weight, 1e-20);
  EXPECT_NEAR(mps::see_mps(full), decoh::see(dense), 1e-10);
  EXPECT_NEAR(std::exp(-mps::see_mps(full)), dense.purity(), 1e-10);
  for (int r = 1; r <= 4; ++r) {
    EXPECT_NEAR(mps::mps_renyi2_correlator(full, 0, r), decoh::renyi2_correlator(dense, 0, r),
                1e-10);
    EXPECT_NEAR(mps::mps_canonical_correlator(full, 0, r),
                decoh::canonical_correlator(dense, 0, r), 1e-10);
  }
}

INSTANTIATE_TEST_SUITE_P(
    Channels, GatesVsDense,
    ::testing::Values(GateCase{ModelKind::Tfim, ChannelKind::ZZ, 0.1},
                      GateCase{ModelKind::Tfim, ChannelKind::ZZ, 0.3},
                      GateCase{ModelKind::Tfim, ChannelKind::ZZ, 0.5},
                      GateCase{ModelKind::Xxz, ChannelKind::ZZ, 0.25, 2e-5},
                      GateCase{ModelKind::Xxz, ChannelKind::X, 0.2},
                      GateCase{ModelKind::Tfim, ChannelKind::X, 0.5},
                      GateCase{ModelKind::Tfim, ChannelKind::XplusZZ, 0.15}));

TEST(Gates, SweepOrderDoesNotMatter) {
  const auto& gs = chain_state(ModelKind::Xxz);
  const auto start = mps::doubled_mps(gs.mps);
  const auto channel = ChannelSpec::with_strength(ChannelKind::ZZ, 0.35);
  const auto a = mps::apply_filter_gates_mps(start, channel, {}, mps::GateOrder::LeftToRight);
  const auto b = mps::apply_filter_gates_mps(start, channel, {}, mps::GateOrder::RightToLeft);
  const double bound = 10.0 * (a.truncation_weight + b.truncation_weight) + 1e-13;
  EXPECT_NEAR(std::exp(-mps::see_mps(a)), std::exp(-mps::see_mps(b)), bound);

  mps::TruncationPolicy exact;
  exact.svd_cutoff = 0.0;
  exact.chi_max = 4096;
  const auto start_exact = mps::doubled_mps(gs.mps, exact);
  const auto c =
      mps::apply_filter_gates_mps(start_exact, channel, exact, mps::GateOrder::LeftToRight);
  const auto d =
      mps::apply_filter_gates_mps(start_exact, channel, exact, mps::GateOrder::RightToLeft);
  EXPECT_NEAR(mps::see_mps(c), mps::see_mps(d), 1e-12);
  EXPECT_NEAR(mps::mps_renyi2_correlator(c, 1, 5), mps::mps_renyi2_correlator(d, 1, 5), 1e-12);
}

TEST(Gates, ZeroStrengthLeavesLadderUnchanged) {
  const auto& gs = chain_state(ModelKind::Tfim);
  const auto start = mps::doubled_mps(gs.mps);
  const auto out = mps::apply_filter_gates_mps(start, ChannelSpec{});
  ASSERT_EQ(out.L(), start.L());
  for (int k = 0; k < out.L(); ++k) EXPECT_EQ(out.sites[k].data, start.sites[k].data);
  EXPECT_EQ(out.log_scale, start.log_scale);
}

TEST(Gates, RescalingDoesNotChangeObservables) {
  const auto& gs = chain_state(ModelKind::Tfim);
  const auto channel = ChannelSpec::with_strength(ChannelKind::XplusZZ, 0.3);
  mps::TruncationPolicy plain;
  plain.rescale = false;
  const auto a = mps::apply_filter_gates_mps(mps::doubled_mps(gs.mps), channel);
  const auto b = mps::apply_filter_gates_mps(mps::doubled_mps(gs.mps, plain), channel, plain);
  EXPECT_NEAR(mps::see_mps(a), mps::see_mps(b), 1e-10);
  EXPECT_EQ(b.log_scale, 0.0);
}

TEST(Gates, SmallBondAbortsOrReportsTruncation) {
  const auto& gs = chain_state(ModelKind::Xxz);
  const auto channel = ChannelSpec::with_strength(ChannelKind::ZZ, 0.2);
  mps::TruncationPolicy tight;
  tight.chi_max = 2;
  EXPECT_THROW(mps::apply_filter_gates_mps(mps::doubled_mps(gs.mps, tight), channel, tight),
               decoh::NumericalFailure);
  tight.abort_weight = 1.0;
  const auto out = mps::apply_filter_gates_mps(mps::doubled_mps(gs.mps, tight), channel, tight);
  EXPECT_GT(out.truncation_weight, 0.0);
  EXPECT_LE(out.max_bond(), 2);
}

TEST(LadderExpectation, PureLadderFactorizes) {
  const auto& gs = chain_state(ModelKind::Xxz);
  const auto ladder = mps::doubled_mps(gs.mps);
  const double xx = mps::chain_expectation(gs.mps, {{2, Axis::X}, {3, Axis::X}});
  const double zz = mps::chain_expectation(gs.mps, {{0, Axis::Z}, {5, Axis::Z}});
  EXPECT_NEAR(mps::mps_expectation(ladder, {{2, mps::Leg::Upper, Axis::X},
                                            {3, mps::Leg::Upper, Axis::X},
                                            {0, mps::Leg::Lower, Axis::Z},
                                            {5, mps::Leg::Lower, Axis::Z}}),
              xx * zz, 1e-10);
  EXPECT_THROW(mps::mps_expectation(ladder, {{1, mps::Leg::Upper, Axis::X},
                                             {1, mps::Leg::Upper, Axis::Z}}),
               decoh::InvalidInput);
}

}  // namespace
