#include "lobbylink/simd/kernels.hpp"

namespace lobbylink::simd {

double dot_scalar(const double* a, const double* b, std::size_t d) {
  double lane[kLanes] = {0, 0, 0, 0, 0, 0, 0, 0};
  for (std::size_t i = 0; i < d; ++i) lane[i % kLanes] += a[i] * b[i];
  return reduce_lanes(lane);
}

void block_dot_scalar(const double* left, std::size_t left_rows, const double* right,
                      std::size_t right_rows, std::size_t d, double* out) {
  for (std::size_t i = 0; i < left_rows; ++i)
    for (std::size_t j = 0; j < right_rows; ++j)
      out[i * right_rows + j] = dot_scalar(left + i * d, right + j * d, d);
}

}  // namespace lobbylink::simd
