#include "hobipb/kernels.hpp"
#include "hobipb/simd/row_kernels.hpp"

namespace hobipb::simd {

RowSums row_sums_scalar(const Target& t, const SourceBatch& src, const KernelConstants& k) {
  const KernelFormula f{k.eps, k.inv_eps, k.kappa};
  RowSums acc;
  for (std::size_t m = 0; m < src.size; ++m) {
    const KernelValues kv = f(t.x - src.x[m], t.y - src.y[m], t.z - src.z[m], t.nx, t.ny, t.nz, src.nx[m], src.ny[m],
                              src.nz[m]);
    acc.first += kv.k1 * src.a[m] + kv.k2 * src.b[m];
    acc.second += kv.k3 * src.a[m] + kv.k4 * src.b[m];
  }
  return acc;
}

}  // namespace hobipb::simd
