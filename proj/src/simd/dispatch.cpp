#include "hobipb/simd/row_kernels.hpp"

#include <atomic>
#include <cstdlib>
#include <stdexcept>
#include <string>

namespace hobipb::simd {

#if !defined(HOBIPB_HAVE_AVX2)
RowSums row_sums_avx2(const Target&, const SourceBatch&, const KernelConstants&) {
  throw std::logic_error("AVX2 row kernel not compiled into this build");
}
#endif

namespace {

Isa initial_isa() {
  if (const char* env = std::getenv("HOBIPB_ISA")) {
    const std::string v(env);
    if (v == "scalar") return Isa::scalar;
    if (v == "avx2" && isa_supported(Isa::avx2)) return Isa::avx2;
  }
  return detect_isa();
}

std::atomic<Isa>& active() {
  static std::atomic<Isa> isa{initial_isa()};
  return isa;
}

}  // namespace

std::string_view isa_name(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return "scalar";
    case Isa::avx2:
      return "avx2";
  }
  return "unknown";
}

bool isa_supported(Isa isa) {
  switch (isa) {
    case Isa::scalar:
      return true;
    case Isa::avx2:
#if defined(HOBIPB_HAVE_AVX2) && (defined(__GNUC__) || defined(__clang__))
      return __builtin_cpu_supports("avx2") && __builtin_cpu_supports("fma");
#else
      return false;
#endif
  }
  return false;
}

Isa detect_isa() { return isa_supported(Isa::avx2) ? Isa::avx2 : Isa::scalar; }

Isa active_isa() { return active().load(std::memory_order_relaxed); }

void set_active_isa(Isa isa) {
  if (!isa_supported(isa)) throw std::invalid_argument("instruction set '" + std::string(isa_name(isa)) + "' is not available");
  active().store(isa, std::memory_order_relaxed);
}

RowSums row_sums(const Target& t, const SourceBatch& src, const KernelConstants& k) {
  if (active_isa() == Isa::avx2) return row_sums_avx2(t, src, k);
  return row_sums_scalar(t, src, k);
}

}  // namespace hobipb::simd
