#pragma once

// Row reductions of the boundary operator: for one target point, accumulate
// sum_m K1*a_m + K2*b_m and sum_m K3*a_m + K4*b_m over a batch of source
// points. This is the inner loop of every matvec and of the energy
// evaluation. A scalar reference and an AVX2/FMA variant are provided; the
// variant is chosen once at runtime.

#include <cstddef>
#include <string_view>

namespace hobipb::simd {

/// Structure-of-arrays view of source points. `a` multiplies K1/K3 (the
/// weighted normal derivative), `b` multiplies K2/K4 (the weighted potential).
struct SourceBatch {
  const double* x;
  const double* y;
  const double* z;
  const double* nx;
  const double* ny;
  const double* nz;
  const double* a;
  const double* b;
  std::size_t size;

  SourceBatch slice(std::size_t begin, std::size_t end) const {
    return {x + begin, y + begin, z + begin, nx + begin, ny + begin, nz + begin, a + begin, b + begin, end - begin};
  }
};

struct Target {
  double x, y, z;
  double nx, ny, nz;
};

struct KernelConstants {
  double eps;
  double inv_eps;
  double kappa;
};

struct RowSums {
  double first = 0.0;   // sum K1 a + K2 b
  double second = 0.0;  // sum K3 a + K4 b
};

enum class Isa { scalar, avx2 };

std::string_view isa_name(Isa isa);

/// Best variant supported by this CPU and build.
Isa detect_isa();
bool isa_supported(Isa isa);

/// Variant used by row_sums(). Defaults to detect_isa(); the HOBIPB_ISA
/// environment variable ("scalar" / "avx2") overrides the default.
Isa active_isa();
/// Throws std::invalid_argument when `isa` is not supported here.
void set_active_isa(Isa isa);

RowSums row_sums_scalar(const Target& t, const SourceBatch& src, const KernelConstants& k);
RowSums row_sums_avx2(const Target& t, const SourceBatch& src, const KernelConstants& k);

/// Dispatches to the active variant.
RowSums row_sums(const Target& t, const SourceBatch& src, const KernelConstants& k);

}  // namespace hobipb::simd
