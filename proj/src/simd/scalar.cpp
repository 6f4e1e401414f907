#include <bit>

#include "decoh/simd/kernels.hpp"

namespace decoh::simd {
namespace {

double sum_squares_scalar(const double* a, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k] * a[k];
  return acc;
}

double weighted_sum_squares_scalar(const double* a, const double* w,
                                   std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += w[k] * (a[k] * a[k]);
  return acc;
}

double dot_scalar(const double* a, const double* b, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

void scale_by_mismatch_scalar(double* a, const std::uint32_t* walls,
                              std::uint32_t row_walls, const double* table,
                              std::size_t n) {
  for (std::size_t k = 0; k < n; ++k) {
    a[k] *= table[std::popcount(walls[k] ^ row_walls)];
  }
}

void butterfly_mix_scalar(double* x, double* y, std::size_t n, double keep,
                          double mix) {
  for (std::size_t k = 0; k < n; ++k) {
    const double xv = x[k];
    const double yv = y[k];
    x[k] = keep * xv + mix * yv;
    y[k] = keep * yv + mix * xv;
  }
}

void rotate_scalar(double* x, double* y, std::size_t n, double c, double s) {
  for (std::size_t k = 0; k < n; ++k) {
    const double xv = x[k];
    const double yv = y[k];
    x[k] = c * xv - s * yv;
    y[k] = s * xv + c * yv;
  }
}

constexpr KernelTable kScalarTable{
    Isa::Scalar,          sum_squares_scalar,   weighted_sum_squares_scalar,
    dot_scalar,           scale_by_mismatch_scalar,
    butterfly_mix_scalar, rotate_scalar,
};

}  // namespace

const KernelTable& scalar_kernels() { return kScalarTable; }

}  // namespace decoh::simd
