#pragma once

#include <cstddef>

namespace lobbylink::simd {

// Every kernel computes a dot product in the same fixed order: element i is
// accumulated into lane (i mod 8) in increasing i, and the eight lanes are
// then reduced as ((l0+l1)+(l2+l3)) + ((l4+l5)+(l6+l7)). Multiplication and
// addition are separate roundings (no FMA). Under that contract the scalar
// and vector variants are bit-for-bit identical.

inline constexpr std::size_t kLanes = 8;

enum class Isa { scalar, avx2, neon };

const char* to_string(Isa isa);

/// True when this build contains the variant and the running CPU supports it.
bool supported(Isa isa);

/// Best supported variant. LOBBYLINK_ISA=scalar|avx2|neon overrides when the
/// requested variant is supported.
Isa detect();

using DotFn = double (*)(const double* a, const double* b, std::size_t d);

/// out[i * right_rows + j] = dot(left row i, right row j); rows are
/// contiguous with stride d.
using BlockDotFn = void (*)(const double* left, std::size_t left_rows, const double* right,
                            std::size_t right_rows, std::size_t d, double* out);

struct KernelTable {
  Isa isa;
  DotFn dot;
  BlockDotFn block_dot;
};

const KernelTable& kernels(Isa isa);

/// The process-wide active table (detect() on first use).
const KernelTable& active();
void set_active(Isa isa);

inline double reduce_lanes(const double* lane) {
  return ((lane[0] + lane[1]) + (lane[2] + lane[3])) + ((lane[4] + lane[5]) + (lane[6] + lane[7]));
}

// Variant entry points; only the ones compiled into this build are defined.
double dot_scalar(const double* a, const double* b, std::size_t d);
void block_dot_scalar(const double* left, std::size_t left_rows, const double* right,
                      std::size_t right_rows, std::size_t d, double* out);
double dot_avx2(const double* a, const double* b, std::size_t d);
void block_dot_avx2(const double* left, std::size_t left_rows, const double* right,
                    std::size_t right_rows, std::size_t d, double* out);
double dot_neon(const double* a, const double* b, std::size_t d);
void block_dot_neon(const double* left, std::size_t left_rows, const double* right,
                    std::size_t right_rows, std::size_t d, double* out);

}  // namespace lobbylink::simd
