#include <gtest/gtest.h>

#include <array>
#include <bit>
#include <cmath>
#include <random>
#include <vector>

#include "decoh/error.hpp"
#include "decoh/simd/kernels.hpp"

namespace {

using decoh::simd::Isa;
using decoh::simd::KernelTable;

std::vector<double> random_vector(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> v(n);
  for (double& x : v) x = u(rng);
  return v;
}

const KernelTable* avx2_or_skip() {
  if (!decoh::simd::available(Isa::Avx2)) return nullptr;
  return decoh::simd::avx2_kernels();
}

// Lengths cover empty input, pure tails and the multi-accumulator path.
const std::array<std::size_t, 9> kLengths = {0, 1, 3, 4, 7, 8, 15, 64, 1027};

TEST(ScalarKernels, SumSquaresMatchesDirectLoop) {
  const auto& s = decoh::simd::scalar_kernels();
  auto a = random_vector(37, 1);
  double expect = 0.0;
  for (double x : a) expect += x * x;
  EXPECT_NEAR(s.sum_squares(a.data(), a.size()), expect, 1e-14);
}

TEST(ScalarKernels, ScaleByMismatchUsesPopcount) {
  const auto& s = decoh::simd::scalar_kernels();
  std::array<double, 33> table{};
  for (int m = 0; m < 33; ++m) table[m] = std::pow(0.5, m);
  std::vector<std::uint32_t> walls = {0b0000, 0b0001, 0b0110, 0b1111};
  std::vector<double> a(4, 1.0);
  s.scale_by_mismatch(a.data(), walls.data(), 0b0011, table.data(), a.size());
  EXPECT_DOUBLE_EQ(a[0], 0.25);   // 2 mismatches
  EXPECT_DOUBLE_EQ(a[1], 0.5);    // 1
  EXPECT_DOUBLE_EQ(a[2], 0.25);   // 2
  EXPECT_DOUBLE_EQ(a[3], 0.25);   // 2
}

TEST(ScalarKernels, ButterflyAndRotate) {
  const auto& s = decoh::simd::scalar_kernels();
  std::vector<double> x = {1.0, 2.0};
  std::vector<double> y = {3.0, -1.0};
  s.butterfly_mix(x.data(), y.data(), 2, 0.75, 0.25);
  EXPECT_DOUBLE_EQ(x[0], 1.5);
  EXPECT_DOUBLE_EQ(y[0], 2.5);
  EXPECT_DOUBLE_EQ(x[1], 1.25);
  EXPECT_DOUBLE_EQ(y[1], -0.25);

  std::vector<double> p = {1.0};
  std::vector<double> q = {0.0};
  s.rotate(p.data(), q.data(), 1, 0.6, 0.8);
  EXPECT_DOUBLE_EQ(p[0], 0.6);
  EXPECT_DOUBLE_EQ(q[0], 0.8);
}

TEST(KernelEquivalence, ReductionsAgreeToRounding) {
  const KernelTable* v = avx2_or_skip();
  if (v == nullptr) GTEST_SKIP() << "AVX2 variants not available";
  const auto& s = decoh::simd::scalar_kernels();
  for (std::size_t n : kLengths) {
    auto a = random_vector(n, 10 + n);
    auto b = random_vector(n, 20 + n);
    const double scale = n == 0 ? 1.0 : static_cast<double>(n);
    EXPECT_NEAR(v->sum_squares(a.data(), n), s.sum_squares(a.data(), n), 1e-14 * scale);
    EXPECT_NEAR(v->dot(a.data(), b.data(), n), s.dot(a.data(), b.data(), n), 1e-14 * scale);
    EXPECT_NEAR(v->weighted_sum_squares(a.data(), b.data(), n),
                s.weighted_sum_squares(a.data(), b.data(), n), 1e-14 * scale);
  }
}

TEST(KernelEquivalence, ElementwiseKernelsAreBitwiseIdentical) {
  const KernelTable* v = avx2_or_skip();
  if (v == nullptr) GTEST_SKIP() << "AVX2 variants not available";
  const auto& s = decoh::simd::scalar_kernels();
  std::array<double, 33> table{};
  for (int m = 0; m < 33; ++m) table[m] = std::pow(0.83, m);

  for (std::size_t n : kLengths) {
    std::mt19937 rng(static_cast<unsigned>(n));
    std::vector<std::uint32_t> walls(n);
    for (auto& w : walls) w = rng();
    auto a1 = random_vector(n, n);
    auto a2 = a1;
    s.scale_by_mismatch(a1.data(), walls.data(), 0xdeadbeef, table.data(), n);
    v->scale_by_mismatch(a2.data(), walls.data(), 0xdeadbeef, table.data(), n);
    EXPECT_EQ(a1, a2) << "scale_by_mismatch n=" << n;

    auto x1 = random_vector(n, 3 * n + 1);
    auto y1 = random_vector(n, 3 * n + 2);
    auto x2 = x1;
    auto y2 = y1;
    s.butterfly_mix(x1.data(), y1.data(), n, 0.7, 0.3);
    v->butterfly_mix(x2.data(), y2.data(), n, 0.7, 0.3);
    EXPECT_EQ(x1, x2);
    EXPECT_EQ(y1, y2);

    s.rotate(x1.data(), y1.data(), n, 0.28, 0.96);
    v->rotate(x2.data(), y2.data(), n, 0.28, 0.96);
    EXPECT_EQ(x1, x2);
    EXPECT_EQ(y1, y2);
  }
}

TEST(KernelDispatch, SelectAndReset) {
  decoh::simd::select(Isa::Scalar);
  EXPECT_EQ(decoh::simd::active().isa, Isa::Scalar);
  decoh::simd::reset_selection();
  if (decoh::simd::available(Isa::Avx2)) {
    EXPECT_EQ(decoh::simd::active().isa, Isa::Avx2);
  } else {
    EXPECT_EQ(decoh::simd::active().isa, Isa::Scalar);
    EXPECT_THROW(decoh::simd::select(Isa::Avx2), decoh::InvalidInput);
  }
}

}  // namespace
