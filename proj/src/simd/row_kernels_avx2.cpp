// Compiled with -mavx2 -mfma. Must not call inline functions shared with
// translation units built for the baseline ISA.

#include "hobipb/simd/row_kernels.hpp"

#include <immintrin.h>

#include <numbers>

namespace hobipb::simd {

namespace {

// exp(x) for x <= 0: x = k ln2 + r, |r| <= ln2/2, Taylor degree 13 on r and
// 2^k assembled in the exponent field. Relative error a few ulp; exp(0) == 1.
inline __m256d exp_nonpositive(__m256d x) {
  const __m256d lo_clamp = _mm256_set1_pd(-708.0);
  x = _mm256_max_pd(x, lo_clamp);
  const __m256d log2e = _mm256_set1_pd(std::numbers::log2e);
  const __m256d ln2_hi = _mm256_set1_pd(6.93147180369123816490e-01);
  const __m256d ln2_lo = _mm256_set1_pd(1.90821492927058770002e-10);
  const __m256d k = _mm256_round_pd(_mm256_mul_pd(x, log2e), _MM_FROUND_TO_NEAREST_INT | _MM_FROUND_NO_EXC);
  __m256d r = _mm256_fnmadd_pd(k, ln2_hi, x);
  r = _mm256_fnmadd_pd(k, ln2_lo, r);

  static constexpr double c[] = {
      1.0 / 6227020800.0, 1.0 / 479001600.0, 1.0 / 39916800.0, 1.0 / 3628800.0, 1.0 / 362880.0,
      1.0 / 40320.0,      1.0 / 5040.0,      1.0 / 720.0,      1.0 / 120.0,     1.0 / 24.0,
      1.0 / 6.0,          0.5,               1.0,              1.0,
  };
  __m256d p = _mm256_set1_pd(c[0]);
  for (int i = 1; i < 14; ++i) p = _mm256_fmadd_pd(p, r, _mm256_set1_pd(c[i]));

  // 2^k: place (k + 1023) in the exponent bits via the 2^52 integer trick.
  const __m256d magic = _mm256_set1_pd(4503599627370496.0);
  const __m256d biased = _mm256_add_pd(_mm256_add_pd(k, _mm256_set1_pd(1023.0)), magic);
  const __m256i bits = _mm256_slli_epi64(_mm256_castpd_si256(biased), 52);
  return _mm256_mul_pd(p, _mm256_castsi256_pd(bits));
}

struct Lanes {
  __m256d first;
  __m256d second;
};

inline void accumulate(Lanes& acc, __m256d tx, __m256d ty, __m256d tz, __m256d tnx, __m256d tny, __m256d tnz,
                       __m256d sx, __m256d sy, __m256d sz, __m256d snx, __m256d sny, __m256d snz, __m256d a,
                       __m256d b, __m256d eps, __m256d inv_eps, __m256d kappa) {
  const __m256d one = _mm256_set1_pd(1.0);
  const __m256d three = _mm256_set1_pd(3.0);
  const __m256d inv4pi = _mm256_set1_pd(0.25 / std::numbers::pi);

  const __m256d dx = _mm256_sub_pd(tx, sx);
  const __m256d dy = _mm256_sub_pd(ty, sy);
  const __m256d dz = _mm256_sub_pd(tz, sz);
  const __m256d r2 = _mm256_fmadd_pd(dz, dz, _mm256_fmadd_pd(dy, dy, _mm256_mul_pd(dx, dx)));
  const __m256d r = _mm256_sqrt_pd(r2);
  const __m256d inv_r = _mm256_div_pd(one, r);
  const __m256d inv_r2 = _mm256_mul_pd(inv_r, inv_r);
  const __m256d g = _mm256_mul_pd(inv4pi, inv_r);
  const __m256d t0 = _mm256_mul_pd(g, inv_r2);
  const __m256d kr = _mm256_mul_pd(kappa, r);
  const __m256d e = exp_nonpositive(_mm256_sub_pd(_mm256_setzero_pd(), kr));
  const __m256d av = _mm256_add_pd(one, kr);
  const __m256d ea = _mm256_mul_pd(e, av);
  const __m256d tk = _mm256_mul_pd(t0, ea);
  const __m256d dnx = _mm256_fmadd_pd(dz, tnz, _mm256_fmadd_pd(dy, tny, _mm256_mul_pd(dx, tnx)));
  const __m256d dny = _mm256_fmadd_pd(dz, snz, _mm256_fmadd_pd(dy, sny, _mm256_mul_pd(dx, snx)));
  const __m256d nn = _mm256_fmadd_pd(tnz, snz, _mm256_fmadd_pd(tny, sny, _mm256_mul_pd(tnx, snx)));

  const __m256d k1 = _mm256_mul_pd(g, _mm256_sub_pd(one, e));
  const __m256d k2 = _mm256_mul_pd(dny, _mm256_fmsub_pd(eps, tk, t0));
  const __m256d k3 = _mm256_mul_pd(dnx, _mm256_fmsub_pd(inv_eps, tk, t0));
  const __m256d poly = _mm256_fmsub_pd(e, _mm256_fmadd_pd(kr, kr, _mm256_mul_pd(three, av)), three);
  const __m256d cross = _mm256_mul_pd(_mm256_mul_pd(dnx, dny), inv_r2);
  const __m256d k4 = _mm256_mul_pd(t0, _mm256_fmsub_pd(_mm256_sub_pd(ea, one), nn, _mm256_mul_pd(poly, cross)));

  acc.first = _mm256_fmadd_pd(k1, a, acc.first);
  acc.first = _mm256_fmadd_pd(k2, b, acc.first);
  acc.second = _mm256_fmadd_pd(k3, a, acc.second);
  acc.second = _mm256_fmadd_pd(k4, b, acc.second);
}

inline double hsum(__m256d v) {
  alignas(32) double lanes[4];
  _mm256_store_pd(lanes, v);
  return (lanes[0] + lanes[1]) + (lanes[2] + lanes[3]);
}

}  // namespace

RowSums row_sums_avx2(const Target& t, const SourceBatch& src, const KernelConstants& k) {
  const __m256d tx = _mm256_set1_pd(t.x), ty = _mm256_set1_pd(t.y), tz = _mm256_set1_pd(t.z);
  const __m256d tnx = _mm256_set1_pd(t.nx), tny = _mm256_set1_pd(t.ny), tnz = _mm256_set1_pd(t.nz);
  const __m256d eps = _mm256_set1_pd(k.eps);
  const __m256d inv_eps = _mm256_set1_pd(k.inv_eps);
  const __m256d kappa = _mm256_set1_pd(k.kappa);

  Lanes acc{_mm256_setzero_pd(), _mm256_setzero_pd()};
  std::size_t m = 0;
  for (; m + 4 <= src.size; m += 4) {
    accumulate(acc, tx, ty, tz, tnx, tny, tnz, _mm256_loadu_pd(src.x + m), _mm256_loadu_pd(src.y + m),
               _mm256_loadu_pd(src.z + m), _mm256_loadu_pd(src.nx + m), _mm256_loadu_pd(src.ny + m),
               _mm256_loadu_pd(src.nz + m), _mm256_loadu_pd(src.a + m), _mm256_loadu_pd(src.b + m), eps, inv_eps,
               kappa);
  }
  if (m < src.size) {
    // Masked tail: inactive lanes get a source one unit away from the target
    // and zero weights, so they contribute exactly zero.
    const long long rem = static_cast<long long>(src.size - m);
    const __m256i mask = _mm256_cmpgt_epi64(_mm256_set1_epi64x(rem), _mm256_setr_epi64x(0, 1, 2, 3));
    const __m256d mpd = _mm256_castsi256_pd(mask);
    const __m256d away = _mm256_add_pd(tx, _mm256_set1_pd(1.0));
    accumulate(acc, tx, ty, tz, tnx, tny, tnz, _mm256_blendv_pd(away, _mm256_maskload_pd(src.x + m, mask), mpd),
               _mm256_blendv_pd(ty, _mm256_maskload_pd(src.y + m, mask), mpd),
               _mm256_blendv_pd(tz, _mm256_maskload_pd(src.z + m, mask), mpd), _mm256_maskload_pd(src.nx + m, mask),
               _mm256_maskload_pd(src.ny + m, mask), _mm256_maskload_pd(src.nz + m, mask),
               _mm256_maskload_pd(src.a + m, mask), _mm256_maskload_pd(src.b + m, mask), eps, inv_eps, kappa);
  }
  return {hsum(acc.first), hsum(acc.second)};
}

}  // namespace hobipb::simd
