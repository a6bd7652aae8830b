// AArch64 variant. vmulq/vaddq keep multiply and add as separate roundings.
#include <arm_neon.h>

#include "lobbylink/simd/kernels.hpp"

namespace lobbylink::simd {

double dot_neon(const double* a, const double* b, std::size_t d) {
  float64x2_t acc0 = vdupq_n_f64(0.0), acc1 = vdupq_n_f64(0.0);
  float64x2_t acc2 = vdupq_n_f64(0.0), acc3 = vdupq_n_f64(0.0);
  std::size_t i = 0;
  for (; i + kLanes <= d; i += kLanes) {
    acc0 = vaddq_f64(acc0, vmulq_f64(vld1q_f64(a + i), vld1q_f64(b + i)));
    acc1 = vaddq_f64(acc1, vmulq_f64(vld1q_f64(a + i + 2), vld1q_f64(b + i + 2)));
    acc2 = vaddq_f64(acc2, vmulq_f64(vld1q_f64(a + i + 4), vld1q_f64(b + i + 4)));
    acc3 = vaddq_f64(acc3, vmulq_f64(vld1q_f64(a + i + 6), vld1q_f64(b + i + 6)));
  }
  double lane[kLanes];
  vst1q_f64(lane, acc0);
  vst1q_f64(lane + 2, acc1);
  vst1q_f64(lane + 4, acc2);
  vst1q_f64(lane + 6, acc3);
  for (std::size_t k = 0; i < d; ++i, ++k) lane[k] += a[i] * b[i];
  return reduce_lanes(lane);
}

void block_dot_neon(const double* left, std::size_t left_rows, const double* right,
                    std::size_t right_rows, std::size_t d, double* out) {
  for (std::size_t i = 0; i < left_rows; ++i)
    for (std::size_t j = 0; j < right_rows; ++j)
      out[i * right_rows + j] = dot_neon(left + i * d, right + j * d, d);
}

}  // namespace lobbylink::simd
