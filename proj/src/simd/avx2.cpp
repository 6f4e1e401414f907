// AVX2 + FMA variants. This translation unit is compiled with -mavx2 -mfma
// and -ffp-contract=off; it is only entered after a runtime CPU check.

#include <immintrin.h>

#include <bit>

#include "decoh/simd/kernels.hpp"

namespace decoh::simd {
namespace {

inline double horizontal_sum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

double sum_squares_avx2(const double* a, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    const __m256d v0 = _mm256_loadu_pd(a + k);
    const __m256d v1 = _mm256_loadu_pd(a + k + 4);
    acc0 = _mm256_fmadd_pd(v0, v0, acc0);
    acc1 = _mm256_fmadd_pd(v1, v1, acc1);
  }
  double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += a[k] * a[k];
  return acc;
}

double weighted_sum_squares_avx2(const double* a, const double* w,
                                 std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    const __m256d v0 = _mm256_loadu_pd(a + k);
    const __m256d v1 = _mm256_loadu_pd(a + k + 4);
    const __m256d w0 = _mm256_loadu_pd(w + k);
    const __m256d w1 = _mm256_loadu_pd(w + k + 4);
    acc0 = _mm256_fmadd_pd(_mm256_mul_pd(w0, v0), v0, acc0);
    acc1 = _mm256_fmadd_pd(_mm256_mul_pd(w1, v1), v1, acc1);
  }
  double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += w[k] * (a[k] * a[k]);
  return acc;
}

double dot_avx2(const double* a, const double* b, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k), _mm256_loadu_pd(b + k), acc0);
    acc1 = _mm256_fmadd_pd(_mm256_loadu_pd(a + k + 4),
                           _mm256_loadu_pd(b + k + 4), acc1);
  }
  double acc = horizontal_sum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += a[k] * b[k];
  return acc;
}

// Per-lane popcount of eight 32-bit integers (nibble lookup).
inline __m256i popcount_epi32(__m256i v) {
  const __m256i lut = _mm256_setr_epi8(0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3, 2, 3,
                                       3, 4, 0, 1, 1, 2, 1, 2, 2, 3, 1, 2, 2, 3,
                                       2, 3, 3, 4);
  const __m256i low_nibble = _mm256_set1_epi8(0x0f);
  const __m256i lo = _mm256_and_si256(v, low_nibble);
  const __m256i hi = _mm256_and_si256(_mm256_srli_epi16(v, 4), low_nibble);
  const __m256i bytes = _mm256_add_epi8(_mm256_shuffle_epi8(lut, lo),
                                        _mm256_shuffle_epi8(lut, hi));
  const __m256i pairs = _mm256_maddubs_epi16(bytes, _mm256_set1_epi8(1));
  return _mm256_madd_epi16(pairs, _mm256_set1_epi16(1));
}

void scale_by_mismatch_avx2(double* a, const std::uint32_t* walls,
                            std::uint32_t row_walls, const double* table,
                            std::size_t n) {
  const __m256i row = _mm256_set1_epi32(static_cast<int>(row_walls));
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    const __m256i w =
        _mm256_loadu_si256(reinterpret_cast<const __m256i*>(walls + k));
    const __m256i counts = popcount_epi32(_mm256_xor_si256(w, row));
    const __m256d f0 =
        _mm256_i32gather_pd(table, _mm256_castsi256_si128(counts), 8);
    const __m256d f1 =
        _mm256_i32gather_pd(table, _mm256_extracti128_si256(counts, 1), 8);
    _mm256_storeu_pd(a + k, _mm256_mul_pd(_mm256_loadu_pd(a + k), f0));
    _mm256_storeu_pd(a + k + 4, _mm256_mul_pd(_mm256_loadu_pd(a + k + 4), f1));
  }
  for (; k < n; ++k) a[k] *= table[std::popcount(walls[k] ^ row_walls)];
}

void butterfly_mix_avx2(double* x, double* y, std::size_t n, double keep,
                        double mix) {
  const __m256d kv = _mm256_set1_pd(keep);
  const __m256d mv = _mm256_set1_pd(mix);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d xv = _mm256_loadu_pd(x + k);
    const __m256d yv = _mm256_loadu_pd(y + k);
    _mm256_storeu_pd(x + k, _mm256_add_pd(_mm256_mul_pd(kv, xv), _mm256_mul_pd(mv, yv)));
    _mm256_storeu_pd(y + k, _mm256_add_pd(_mm256_mul_pd(kv, yv), _mm256_mul_pd(mv, xv)));
  }
  for (; k < n; ++k) {
    const double xv = x[k];
    const double yv = y[k];
    x[k] = keep * xv + mix * yv;
    y[k] = keep * yv + mix * xv;
  }
}

void rotate_avx2(double* x, double* y, std::size_t n, double c, double s) {
  const __m256d cv = _mm256_set1_pd(c);
  const __m256d sv = _mm256_set1_pd(s);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) {
    const __m256d xv = _mm256_loadu_pd(x + k);
    const __m256d yv = _mm256_loadu_pd(y + k);
    _mm256_storeu_pd(x + k, _mm256_sub_pd(_mm256_mul_pd(cv, xv), _mm256_mul_pd(sv, yv)));
    _mm256_storeu_pd(y + k, _mm256_add_pd(_mm256_mul_pd(sv, xv), _mm256_mul_pd(cv, yv)));
  }
  for (; k < n; ++k) {
    const double xv = x[k];
    const double yv = y[k];
    x[k] = c * xv - s * yv;
    y[k] = s * xv + c * yv;
  }
}

constexpr KernelTable kAvx2Table{
    Isa::Avx2,          sum_squares_avx2,   weighted_sum_squares_avx2,
    dot_avx2,           scale_by_mismatch_avx2,
    butterfly_mix_avx2, rotate_avx2,
};

}  // namespace

const KernelTable* avx2_kernels() { return &kAvx2Table; }

}  // namespace decoh::simd
