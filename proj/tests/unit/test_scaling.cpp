#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "planted_collapse.hpp"
#include "decoh/engine/doubled_state.hpp"
#include "decoh/engine/oracles.hpp"
#include "decoh/error.hpp"
#include "decoh/scaling/collapse.hpp"
#include "decoh/scaling/fits.hpp"
#include "decoh/scaling/nelder_mead.hpp"
#include "decoh/spin/ground_state.hpp"
#include "decoh/spin/hamiltonian.hpp"

namespace {

using namespace decoh::scaling;
using decoh::Axis;
using decoh::Boundary;
using decoh::ModelKind;

std::vector<SeeSample> linear_samples(double alpha, double s0, std::vector<int> sizes) {
  std::vector<SeeSample> out;
  for (int L : sizes) out.push_back({L, 0.5, alpha * L - s0});
  return out;
}

// Critical TFIM on the infinite chain: <Z_0 Z_r> is the r x r Toeplitz
// determinant with symbol entries 2 / (pi (2n + 1)).
double ising_zz_infinite(int r) {
  Eigen::MatrixXd t(r, r);
  for (int i = 0; i < r; ++i) {
    for (int j = 0; j < r; ++j) t(i, j) = 2.0 / (std::numbers::pi * (2 * (i - j) + 1));
  }
  return t.determinant();
}

std::vector<std::pair<int, double>> zz_profile(const decoh::PureState& gs, int r_max) {
  std::vector<std::pair<int, double>> out;
  for (int r = 1; r <= r_max; ++r) {
    out.emplace_back(r, decoh::expectation_pauli_string(gs, {{0, Axis::Z}, {r, Axis::Z}}));
  }
  return out;
}

decoh::PureState periodic_ground_state(ModelKind model, int L, double delta) {
  const decoh::ModelSpec spec{model, L, delta, Boundary::Periodic, true};
  return decoh::ground_state(decoh::build_hamiltonian(spec), 5);
}

TEST(LinearFit, ExactLinearData) {
  const auto samples = linear_samples(0.3, 0.7, {6, 8, 10, 12});
  const FitResult fit = fit_linear_s0(samples);
  EXPECT_NEAR(fit.alpha, 0.3, 1e-14);
  EXPECT_NEAR(fit.s0, 0.7, 1e-13);
  EXPECT_LT(fit.residual_rms, 1e-14);
  EXPECT_LT(fit.s0_stderr, 1e-13);
  EXPECT_EQ(fit.L_window, (std::vector<int>{6, 8, 10, 12}));
  EXPECT_NEAR(fit.g(), std::exp(0.7), 1e-13);
}

TEST(LinearFit, StandardErrorMatchesClosedForm) {
  // (+e, -2e, +e) on L = 6, 8, 10 is orthogonal to the line, so the fit is
  // unchanged and these are the residuals: SSR = 6e^2 with one degree of
  // freedom, var(intercept) = SSR * (1/3 + 64/8).
  const double e = 1e-3;
  std::vector<SeeSample> s = linear_samples(0.2, 0.1, {6, 8, 10});
  s[0].S_SE += e;
  s[1].S_SE -= 2 * e;
  s[2].S_SE += e;
  const FitResult fit = fit_linear_s0(s);
  EXPECT_NEAR(fit.alpha, 0.2, 1e-14);
  EXPECT_NEAR(fit.s0, 0.1, 1e-13);
  EXPECT_NEAR(fit.s0_stderr, std::sqrt(6 * e * e * (1.0 / 3.0 + 8.0)), 1e-12);
  EXPECT_NEAR(fit.residual_rms, std::sqrt(2.0) * e, 1e-15);
}

TEST(LinearFit, RejectsDegenerateInput) {
  EXPECT_THROW(fit_linear_s0(linear_samples(0.3, 0.7, {8, 8, 8})), decoh::InvalidInput);
  EXPECT_THROW(fit_linear_s0(linear_samples(0.3, 0.7, {6, 8})), decoh::InvalidInput);
  auto dup = linear_samples(0.3, 0.7, {6, 8, 10, 10});
  EXPECT_NO_THROW(fit_linear_s0(dup));
  dup[3].S_SE += 1e-6;
  EXPECT_THROW(fit_linear_s0(dup), decoh::InvalidInput);
  auto mixed = linear_samples(0.3, 0.7, {6, 8, 10});
  mixed[1].p = 0.25;
  EXPECT_THROW(fit_linear_s0(mixed), decoh::InvalidInput);
  auto backend = linear_samples(0.3, 0.7, {6, 8, 10});
  backend[2].backend = decoh::Backend::Mps;
  EXPECT_THROW(fit_linear_s0(backend), decoh::InvalidInput);
  auto negative = linear_samples(0.3, 0.7, {6, 8, 10});
  negative[0].S_SE = -1e-3;
  EXPECT_THROW(fit_linear_s0(negative), decoh::InvalidInput);
}

TEST(Extrapolation, RecoversLineInInverseSize) {
  std::vector<std::pair<int, double>> pts;
  for (int L : {6, 8, 10, 12}) pts.emplace_back(L, -0.44 / L + 0.01);
  const LineFit line = extrapolate_s0(pts);
  EXPECT_NEAR(line.slope, -0.44, 1e-12);
  EXPECT_NEAR(line.intercept, 0.01, 1e-13);

  const LineFit flat = extrapolate_s0(std::vector<std::pair<int, double>>{
      {6, 0.25}, {8, 0.25}, {10, 0.25}});
  EXPECT_NEAR(flat.slope, 0.0, 1e-13);
  EXPECT_NEAR(flat.intercept, 0.25, 1e-14);

  EXPECT_THROW(extrapolate_s0(std::vector<std::pair<int, double>>{{6, 0.1}, {8, 0.2}}),
               decoh::InvalidInput);
}

TEST(Windows, ConsecutiveAndLabels) {
  const auto w = consecutive_windows({12, 6, 10, 8, 8}, 3);
  ASSERT_EQ(w.size(), 2u);
  EXPECT_EQ(w[0], (std::vector<int>{6, 8, 10}));
  EXPECT_EQ(w[1], (std::vector<int>{8, 10, 12}));
  EXPECT_EQ(window_label(w[1]), "8-10-12");
  EXPECT_EQ(parse_window_label("6-8-10-12"), (std::vector<int>{6, 8, 10, 12}));
  EXPECT_THROW(parse_window_label("6-8"), decoh::InvalidInput);
  EXPECT_THROW(parse_window_label("6-x-10"), decoh::InvalidInput);
  EXPECT_THROW(parse_window_label("10-8-6"), decoh::InvalidInput);
}

TEST(PowerLaw, ExactSyntheticExponent) {
  std::vector<std::pair<double, double>> pts;
  for (int r = 1; r <= 8; ++r) pts.emplace_back(r, 3.0 * std::pow(r, -0.5));
  pts.emplace_back(9.0, 0.0);
  pts.emplace_back(10.0, -0.1);
  const PowerLawFit fit = fit_power_law(pts);
  EXPECT_NEAR(fit.eta, 0.5, 1e-13);
  EXPECT_NEAR(fit.amplitude, 3.0, 1e-12);
  EXPECT_EQ(fit.points_used, 8);
  pts.resize(3);
  EXPECT_THROW(fit_power_law(pts), decoh::InvalidInput);
}

TEST(PowerLaw, ChordDistance) {
  EXPECT_NEAR(chord_distance(6, 12), 12 / std::numbers::pi, 1e-14);
  EXPECT_NEAR(chord_distance(1, 1000), 1.0, 1e-5);
  const std::vector<std::pair<int, double>> c = {{0, 1.0}, {1, -0.5}, {2, 0.25}};
  const auto open = distance_profile(c, 8, Boundary::Open);
  ASSERT_EQ(open.size(), 2u);
  EXPECT_EQ(open[0], (std::pair<double, double>{1.0, 0.5}));
  const auto ring = distance_profile(c, 8, Boundary::Periodic);
  EXPECT_NEAR(ring[1].first, chord_distance(2, 8), 1e-15);
}

TEST(PowerLaw, CriticalIsingExponentFromFreeFermions) {
  // Infinite-chain oracle: the log-log slope between r = 64 and 128.
  const double eta_inf =
      -std::log(ising_zz_infinite(128) / ising_zz_infinite(64)) / std::log(2.0);
  EXPECT_NEAR(eta_inf, 0.25, 1e-3);
  EXPECT_NEAR(ising_zz_infinite(1), 2.0 / std::numbers::pi, 1e-14);

  const auto gs = periodic_ground_state(ModelKind::Tfim, 12, 0.0);
  const auto fit = fit_power_law(distance_profile(zz_profile(gs, 6), 12, Boundary::Periodic));
  EXPECT_LT(std::abs(fit.eta - eta_inf) / eta_inf, 0.3);
}

TEST(PowerLaw, XxChainExponentIndependentOfStrength) {
  // C^I is invariant under the ZZ channel, so the fitted exponent is too. The
  // even-distance correlators of the XX chain vanish; both halves of the ring
  // supply the odd distances.
  const auto gs = periodic_ground_state(ModelKind::Xxz, 12, 0.0);
  const auto pure = decoh::vectorize(gs);
  std::vector<double> etas;
  for (double p : {0.0, 0.25, 0.5}) {
    const auto ds = decoh::apply_zz_filter(pure, p, Boundary::Periodic);
    std::vector<std::pair<int, double>> c;
    for (int r = 1; r < 12; ++r) c.emplace_back(r, decoh::canonical_correlator(ds, 0, r));
    const auto fit = fit_power_law(distance_profile(c, 12, Boundary::Periodic));
    EXPECT_EQ(fit.points_used, 6);
    etas.push_back(fit.eta);
  }
  EXPECT_NEAR(etas[1], etas[0], 1e-8);
  EXPECT_NEAR(etas[2], etas[0], 1e-8);
}

TEST(References, ClosedForms) {
  EXPECT_DOUBLE_EQ(luttinger_parameter(0.0), 1.0);
  EXPECT_NEAR(reference_g_value(ModelKind::Xxz, 0.0), 2.0 * std::sqrt(2.0), 1e-14);
  const double k = std::numbers::pi / (2.0 * (std::numbers::pi - std::acos(0.45)));
  EXPECT_NEAR(luttinger_parameter(0.45), k, 1e-15);
  EXPECT_NEAR(reference_g_value(ModelKind::Xxz, 0.45), 2.483, 5e-4);
  EXPECT_EQ(reference_g_value(ModelKind::Tfim, 0.0), 1.0);
  EXPECT_EQ(reference_g_value(ModelKind::Tfim, 0.0, decoh::ChannelKind::XplusZZ), 2.0);
  EXPECT_THROW(reference_g_value(ModelKind::Xxz, 1.0), decoh::InvalidInput);
  EXPECT_THROW(reference_g_value(ModelKind::Xxz, -1.5), decoh::InvalidInput);
  EXPECT_THROW(reference_g_value(ModelKind::Xxz, 0.3, decoh::ChannelKind::X),
               decoh::InvalidInput);
}

TEST(References, DecreasingInAnisotropy) {
  double previous = std::numeric_limits<double>::infinity();
  for (double d = -0.99; d < 0.995; d += 0.01) {
    const double g = reference_g_value(ModelKind::Xxz, d);
    EXPECT_LT(g, previous);
    previous = g;
  }
  EXPECT_NEAR(reference_g_value(ModelKind::Xxz, 1.0 - 1e-12), 2.0, 1e-5);
}

TEST(Phase, Definitions) {
  EXPECT_EQ(classify_phase(1.0, 0.0).phase, Phase::SWSSB);
  EXPECT_EQ(classify_phase(0.9, 0.9).phase, Phase::StrongToTrivial);
  EXPECT_EQ(classify_phase(0.2, 0.0).phase, Phase::Symmetric);
  EXPECT_EQ(classify_phase(0.9, -0.05).phase, Phase::SWSSB);
  const PhaseLabel l = classify_phase(0.7, 0.02);
  EXPECT_EQ(l.c2_longrange, 0.7);
  EXPECT_EQ(l.c1_longrange, 0.02);
}

TEST(Phase, MonotoneInRenyiCorrelator) {
  for (double c1 : {0.0, 0.05, 0.1, 0.3, 1.0}) {
    Phase previous = Phase::Symmetric;
    for (double c2 = 0.0; c2 <= 1.0; c2 += 0.05) {
      const Phase now = classify_phase(c2, c1).phase;
      if (previous != Phase::Symmetric) EXPECT_NE(now, Phase::Symmetric);
      previous = now;
    }
  }
}

TEST(Phase, MaximalDecoherenceOfXxzChain) {
  const auto gs = periodic_ground_state(ModelKind::Xxz, 10, 0.45);
  const auto ds = decoh::apply_zz_filter(decoh::vectorize(gs), 0.5, Boundary::Periodic);
  const double c2 = decoh::renyi2_correlator(ds, 0, 5);
  const double c1 = decoh::canonical_correlator(ds, 0, 5);
  EXPECT_NEAR(c2, 1.0, 1e-10);
  EXPECT_EQ(classify_phase(c2, c1).phase, Phase::SWSSB);
}

TEST(NelderMead, MinimizesRosenbrock) {
  auto f = [](const std::vector<double>& x) {
    return 100.0 * std::pow(x[1] - x[0] * x[0], 2) + std::pow(1.0 - x[0], 2);
  };
  SimplexOptions o;
  o.max_evaluations = 20000;
  const auto r = nelder_mead(f, {-1.2, 1.0}, {0.1, 0.1}, o);
  EXPECT_TRUE(r.converged);
  EXPECT_NEAR(r.x[0], 1.0, 1e-5);
  EXPECT_NEAR(r.x[1], 1.0, 1e-5);
}

TEST(NelderMead, RespectsInfiniteWalls) {
  auto f = [](const std::vector<double>& x) {
    return x[0] < 0.5 ? std::numeric_limits<double>::infinity() : x[0] * x[0];
  };
  const auto r = nelder_mead(f, {2.0}, {0.3});
  EXPECT_GE(r.x[0], 0.5);
  EXPECT_NEAR(r.x[0], 0.5, 1e-6);
}

// Noise-free curves with a fixed 1% uncertainty, so the quality at the truth
// only carries the local-line interpolation error.
CollapseCurves exact_curves(std::initializer_list<int> sizes = {8, 16, 32, 64}) {
  auto curves = fixture::planted_curves(0.44, 2.5, 0.0, 0.0, 1, sizes);
  for (auto& [L, pts] : curves) {
    for (auto& pt : pts) pt.sigma = 0.01 * pt.y;
  }
  return curves;
}

TEST(Collapse, QualityMinimalAtTruthForCollapsedData) {
  const auto curves = exact_curves();
  const double at_truth = collapse_quality(curves, {0.44, 2.5, 0.0}).quality;
  EXPECT_LT(at_truth, 0.05);
  for (const CollapseParams& q : {CollapseParams{0.42, 2.5, 0.0}, CollapseParams{0.44, 2.0, 0.0},
                                  CollapseParams{0.44, 2.5, 0.05},
                                  CollapseParams{0.46, 3.0, -0.05}}) {
    EXPECT_LE(at_truth, collapse_quality(curves, q).quality);
  }
}

TEST(Collapse, IdenticalCurvesCollapseWithoutShift) {
  // With zeta = 0 and identical curves in p, p_c is irrelevant only if the
  // argument does not depend on L; large nu makes L^{1/nu} nearly flat.
  CollapseCurves curves;
  for (int L : {6, 8, 10}) {
    for (int k = 0; k <= 10; ++k) {
      const double p = 0.2 + 0.03 * k;
      curves[L].push_back({p, 1.0 + p * p, 1e-3});
    }
  }
  EXPECT_LT(collapse_quality(curves, {0.35, 6.0, 0.0}).quality,
            collapse_quality(curves, {0.35, 0.8, 0.0}).quality);
}

TEST(Collapse, AddingExactSizeDoesNotRaiseQuality) {
  const auto base = exact_curves();
  auto more = base;
  more.merge(exact_curves({128}));
  const CollapseParams truth{0.44, 2.5, 0.0};
  // A normalized quality of order 1 is the noise level; interpolation error
  // of the exact data stays two orders below it either way.
  EXPECT_LT(collapse_quality(base, truth).quality, 0.01);
  EXPECT_LT(collapse_quality(more, truth).quality, 0.01);
}

TEST(Collapse, RecoversPlantedParameters) {
  const auto curves = fixture::planted_curves(0.44, 2.5, 0.0, 0.005, 2024);
  CollapseBounds bounds;
  const CollapseResult r = fss_collapse(curves, {0.35, 1.5, 0.1}, bounds);
  EXPECT_LT(std::abs(r.p_c - 0.44) / 0.44, 0.02);
  EXPECT_LT(std::abs(r.nu - 2.5) / 2.5, 0.10);
  EXPECT_LT(std::abs(r.zeta), 0.05);
  EXPECT_EQ(r.trace.size(), 16u);
  EXPECT_TRUE(std::isfinite(r.quality));
  EXPECT_GE(r.quality, 0.0);
}

TEST(Collapse, DeterministicForSeed) {
  const auto curves = fixture::planted_curves(0.44, 2.5, 0.0, 0.005, 11);
  CollapseOptions o;
  o.restarts = 4;
  const auto a = fss_collapse(curves, {0.4, 2.0, 0.0}, {}, o);
  const auto b = fss_collapse(curves, {0.4, 2.0, 0.0}, {}, o);
  EXPECT_EQ(a.p_c, b.p_c);
  EXPECT_EQ(a.nu, b.nu);
  EXPECT_EQ(a.zeta, b.zeta);
  EXPECT_EQ(a.total_evaluations, b.total_evaluations);
}

TEST(Collapse, WindowRestrictsData) {
  const auto curves = fixture::planted_curves(0.44, 2.5, 0.0, 0.005, 5);
  CollapseOptions o;
  o.restarts = 2;
  o.p_window = std::pair{0.3, 0.5};
  const auto r = fss_collapse(curves, {0.4, 2.0, 0.0}, {}, o);
  EXPECT_GE(r.p_c, 0.3);
  EXPECT_LE(r.p_c, 0.5);
}

TEST(Collapse, RejectsBadInput) {
  auto curves = fixture::planted_curves(0.44, 2.5, 0.0, 0.0, 1, {8, 16});
  EXPECT_THROW(fss_collapse(curves, {0.4, 2.0, 0.0}, {}), decoh::InvalidInput);

  // Disjoint p ranges never overlap after scaling near the start point.
  CollapseCurves apart;
  for (int i = 0; i < 3; ++i) {
    for (int k = 0; k < 4; ++k) {
      const double p = 0.05 + 0.15 * i + 0.01 * k;
      apart[6 + 2 * i].push_back({p, 1.0 + p, 1e-3});
    }
  }
  try {
    fss_collapse(apart, {0.2, 2.0, 0.0}, {});
    FAIL() << "expected an overlap error";
  } catch (const decoh::InvalidInput& e) {
    EXPECT_NE(std::string(e.what()).find("overlap"), std::string::npos);
  }
  auto ok = fixture::planted_curves(0.44, 2.5, 0.0, 0.0, 1);
  EXPECT_THROW(fss_collapse(ok, {0.44, 9.0, 0.0}, {}), decoh::InvalidInput);
}

}  // namespace
