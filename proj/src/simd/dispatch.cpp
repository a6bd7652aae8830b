#include <atomic>
#include <cstdlib>
#include <string_view>

#include "lobbylink/error.hpp"
#include "lobbylink/simd/kernels.hpp"

namespace lobbylink::simd {
namespace {

constexpr KernelTable kScalar{Isa::scalar, &dot_scalar, &block_dot_scalar};
#if defined(LOBBYLINK_HAVE_AVX2)
constexpr KernelTable kAvx2{Isa::avx2, &dot_avx2, &block_dot_avx2};
#endif
#if defined(LOBBYLINK_HAVE_NEON)
constexpr KernelTable kNeon{Isa::neon, &dot_neon, &block_dot_neon};
#endif

std::atomic<const KernelTable*> g_active{nullptr};

}  // namespace

const char* to_string(Isa isa) {
  switch (isa) {
    case Isa::scalar: return "scalar";
    case Isa::avx2: return "avx2";
    case Isa::neon: return "neon";
  }
  return "scalar";
}

bool supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(LOBBYLINK_HAVE_AVX2)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::neon:
#if defined(LOBBYLINK_HAVE_NEON)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa detect() {
  if (const char* env = std::getenv("LOBBYLINK_ISA")) {
    const std::string_view want(env);
    for (Isa isa : {Isa::scalar, Isa::avx2, Isa::neon})
      if (want == to_string(isa) && supported(isa)) return isa;
  }
  if (supported(Isa::avx2)) return Isa::avx2;
  if (supported(Isa::neon)) return Isa::neon;
  return Isa::scalar;
}

const KernelTable& kernels(Isa isa) {
  if (!supported(isa))
    throw Error(ErrorKind::invalid_argument, std::string("kernel variant not available: ") + to_string(isa));
  switch (isa) {
#if defined(LOBBYLINK_HAVE_AVX2)
    case Isa::avx2: return kAvx2;
#endif
#if defined(LOBBYLINK_HAVE_NEON)
    case Isa::neon: return kNeon;
#endif
    default: return kScalar;
  }
}

const KernelTable& active() {
  const KernelTable* t = g_active.load(std::memory_order_acquire);
  if (!t) {
    t = &kernels(detect());
    g_active.store(t, std::memory_order_release);
  }
  return *t;
}

void set_active(Isa isa) { g_active.store(&kernels(isa), std::memory_order_release); }

}  // namespace lobbylink::simd
