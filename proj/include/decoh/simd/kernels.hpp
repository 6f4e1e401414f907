#pragma once
// Data-parallel kernels used by the doubled-space engine and the Jacobi SVD.
//
// Every kernel has a portable scalar reference implementation. When the build
// includes the AVX2 variants and the CPU reports AVX2+FMA support, the AVX2
// table is selected at first use. Elementwise kernels are bitwise identical
// across variants; reductions agree to rounding.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string_view>

namespace decoh::simd {

enum class Isa { Scalar, Avx2 };

struct KernelTable {
  Isa isa;

  /// sum_k a[k]^2
  double (*sum_squares)(const double* a, std::size_t n);
  /// sum_k w[k] * a[k]^2
  double (*weighted_sum_squares)(const double* a, const double* w, std::size_t n);
  /// sum_k a[k] * b[k]
  double (*dot)(const double* a, const double* b, std::size_t n);
  /// a[k] *= table[popcount(walls[k] ^ row_walls)]; table has 33 entries.
  void (*scale_by_mismatch)(double* a, const std::uint32_t* walls,
                            std::uint32_t row_walls, const double* table,
                            std::size_t n);
  /// (x, y) <- (keep*x + mix*y, keep*y + mix*x)
  void (*butterfly_mix)(double* x, double* y, std::size_t n, double keep,
                        double mix);
  /// (x, y) <- (c*x - s*y, s*x + c*y)
  void (*rotate)(double* x, double* y, std::size_t n, double c, double s);
};

const KernelTable& scalar_kernels();

/// nullptr when the AVX2 variants were not compiled in.
const KernelTable* avx2_kernels();

bool cpu_supports_avx2();

/// True when `isa` was compiled in and the CPU can run it.
bool available(Isa isa);

/// The table used by the wrappers below.
const KernelTable& active();

/// Pin the active table. Throws InvalidInput if the ISA is unavailable.
void select(Isa isa);

/// Return to automatic selection (best available).
void reset_selection();

std::string_view name(Isa isa);

inline double sum_squares(std::span<const double> a) {
  return active().sum_squares(a.data(), a.size());
}

inline double weighted_sum_squares(std::span<const double> a,
                                   std::span<const double> w) {
  return active().weighted_sum_squares(a.data(), w.data(), a.size());
}

inline double dot(std::span<const double> a, std::span<const double> b) {
  return active().dot(a.data(), b.data(), a.size());
}

inline void scale_by_mismatch(std::span<double> a,
                              std::span<const std::uint32_t> walls,
                              std::uint32_t row_walls, const double* table) {
  active().scale_by_mismatch(a.data(), walls.data(), row_walls, table, a.size());
}

inline void butterfly_mix(std::span<double> x, std::span<double> y, double keep,
                          double mix) {
  active().butterfly_mix(x.data(), y.data(), x.size(), keep, mix);
}

inline void rotate(std::span<double> x, std::span<double> y, double c, double s) {
  active().rotate(x.data(), y.data(), x.size(), c, s);
}

}  // namespace decoh::simd
