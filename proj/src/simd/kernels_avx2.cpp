// Compiled with -mavx2 and without FMA; see the summation contract in
// kernels.hpp.
#include <immintrin.h>

#include "lobbylink/simd/kernels.hpp"

namespace lobbylink::simd {
namespace {

inline double finish(__m256d lo, __m256d hi, const double* a, const double* b, std::size_t i,
                     std::size_t d) {
  alignas(32) double lane[kLanes];
  _mm256_store_pd(lane, lo);
  _mm256_store_pd(lane + 4, hi);
  for (std::size_t k = 0; i < d; ++i, ++k) lane[k] += a[i] * b[i];
  return reduce_lanes(lane);
}

}  // namespace

double dot_avx2(const double* a, const double* b, std::size_t d) {
  __m256d lo = _mm256_setzero_pd();
  __m256d hi = _mm256_setzero_pd();
  std::size_t i = 0;
  for (; i + kLanes <= d; i += kLanes) {
    lo = _mm256_add_pd(lo, _mm256_mul_pd(_mm256_loadu_pd(a + i), _mm256_loadu_pd(b + i)));
    hi = _mm256_add_pd(hi, _mm256_mul_pd(_mm256_loadu_pd(a + i + 4), _mm256_loadu_pd(b + i + 4)));
  }
  return finish(lo, hi, a, b, i, d);
}

// One left row against four right rows per pass, so each left load feeds
// four independent accumulator pairs.
void block_dot_avx2(const double* left, std::size_t left_rows, const double* right,
                    std::size_t right_rows, std::size_t d, double* out) {
  for (std::size_t r = 0; r < left_rows; ++r) {
    const double* a = left + r * d;
    double* row_out = out + r * right_rows;
    std::size_t c = 0;
    for (; c + 4 <= right_rows; c += 4) {
      const double* b0 = right + (c + 0) * d;
      const double* b1 = right + (c + 1) * d;
      const double* b2 = right + (c + 2) * d;
      const double* b3 = right + (c + 3) * d;
      __m256d lo0 = _mm256_setzero_pd(), hi0 = _mm256_setzero_pd();
      __m256d lo1 = _mm256_setzero_pd(), hi1 = _mm256_setzero_pd();
      __m256d lo2 = _mm256_setzero_pd(), hi2 = _mm256_setzero_pd();
      __m256d lo3 = _mm256_setzero_pd(), hi3 = _mm256_setzero_pd();
      std::size_t i = 0;
      for (; i + kLanes <= d; i += kLanes) {
        const __m256d alo = _mm256_loadu_pd(a + i);
        const __m256d ahi = _mm256_loadu_pd(a + i + 4);
        lo0 = _mm256_add_pd(lo0, _mm256_mul_pd(alo, _mm256_loadu_pd(b0 + i)));
        hi0 = _mm256_add_pd(hi0, _mm256_mul_pd(ahi, _mm256_loadu_pd(b0 + i + 4)));
        lo1 = _mm256_add_pd(lo1, _mm256_mul_pd(alo, _mm256_loadu_pd(b1 + i)));
        hi1 = _mm256_add_pd(hi1, _mm256_mul_pd(ahi, _mm256_loadu_pd(b1 + i + 4)));
        lo2 = _mm256_add_pd(lo2, _mm256_mul_pd(alo, _mm256_loadu_pd(b2 + i)));
        hi2 = _mm256_add_pd(hi2, _mm256_mul_pd(ahi, _mm256_loadu_pd(b2 + i + 4)));
        lo3 = _mm256_add_pd(lo3, _mm256_mul_pd(alo, _mm256_loadu_pd(b3 + i)));
        hi3 = _mm256_add_pd(hi3, _mm256_mul_pd(ahi, _mm256_loadu_pd(b3 + i + 4)));
      }
      row_out[c + 0] = finish(lo0, hi0, a, b0, i, d);
      row_out[c + 1] = finish(lo1, hi1, a, b1, i, d);
      row_out[c + 2] = finish(lo2, hi2, a, b2, i, d);
      row_out[c + 3] = finish(lo3, hi3, a, b3, i, d);
    }
    for (; c < right_rows; ++c) row_out[c] = dot_avx2(a, right + c * d, d);
  }
}

}  // namespace lobbylink::simd
