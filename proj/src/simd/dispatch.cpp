#include <atomic>
#include <cstdlib>

#include "latcover/simd/kernels.hpp"

namespace latcover::simd {

namespace {

constexpr KernelTable kScalarTable{&scalar::min_sq_dist, &scalar::covered_mask,
                                   &scalar::min_max_vertex_sq_dist};
#if defined(__x86_64__) || defined(_M_X64)
constexpr KernelTable kAvx2Table{&avx2::min_sq_dist, &avx2::covered_mask,
                                 &avx2::min_max_vertex_sq_dist};
#endif
#if defined(__aarch64__)
constexpr KernelTable kNeonTable{&neon::min_sq_dist, &neon::covered_mask,
                                 &neon::min_max_vertex_sq_dist};
#endif

// -1 = automatic, otherwise an Isa value.
std::atomic<int> g_forced{-1};

Isa detect_best() noexcept {
  if (isa_available(Isa::Avx2)) return Isa::Avx2;
  if (isa_available(Isa::Neon)) return Isa::Neon;
  return Isa::Scalar;
}

Isa from_environment() noexcept {
  static const Isa chosen = [] {
    if (const char* env = std::getenv("LATCOVER_SIMD")) {
      if (auto isa = parse_isa(env); isa && isa_available(*isa)) return *isa;
    }
    return detect_best();
  }();
  return chosen;
}

}  // namespace

std::string_view to_string(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return "scalar";
    case Isa::Avx2: return "avx2";
    case Isa::Neon: return "neon";
  }
  return "scalar";
}

std::optional<Isa> parse_isa(std::string_view name) noexcept {
  if (name == "scalar") return Isa::Scalar;
  if (name == "avx2") return Isa::Avx2;
  if (name == "neon") return Isa::Neon;
  return std::nullopt;
}

bool isa_available(Isa isa) noexcept {
  switch (isa) {
    case Isa::Scalar: return true;
    case Isa::Avx2:
#if defined(__x86_64__) || defined(_M_X64)
      return __builtin_cpu_supports("avx2");
#else
      return false;
#endif
    case Isa::Neon:
#if defined(__aarch64__)
      return true;
#else
      return false;
#endif
  }
  return false;
}

Isa active_isa() noexcept {
  const int forced = g_forced.load(std::memory_order_relaxed);
  if (forced >= 0) return static_cast<Isa>(forced);
  return from_environment();
}

void force_isa(std::optional<Isa> isa) noexcept {
  if (!isa) {
    g_forced.store(-1, std::memory_order_relaxed);
  } else if (isa_available(*isa)) {
    g_forced.store(static_cast<int>(*isa), std::memory_order_relaxed);
  }
}

const KernelTable& kernels(Isa isa) {
  switch (isa) {
#if defined(__x86_64__) || defined(_M_X64)
    case Isa::Avx2: return kAvx2Table;
#endif
#if defined(__aarch64__)
    case Isa::Neon: return kNeonTable;
#endif
    default: return kScalarTable;
  }
}

}  // namespace latcover::simd
