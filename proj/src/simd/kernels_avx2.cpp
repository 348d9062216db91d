#include "kljn/simd/kernels.hpp"

#include <immintrin.h>

#include <cmath>

namespace kljn::simd {
namespace {

// Lane-wise copy of simd::terminate. The header's inline version is not used
// here so that no -mavx2 instantiation of it can leak into scalar callers.
void terminate_lane(double u, double incoming, double r, double z0, double& v, double& i,
                    double& outgoing) {
  const double den = r + z0;
  i = (u - incoming) / den;
  v = u - r * i;
  outgoing = v + z0 * i;
}

inline __m256d abs_pd(__m256d x) {
  return _mm256_andnot_pd(_mm256_set1_pd(-0.0), x);
}

inline double hsum(__m256d v) {
  const __m128d lo = _mm256_castpd256_pd128(v);
  const __m128d hi = _mm256_extractf128_pd(v, 1);
  const __m128d s = _mm_add_pd(lo, hi);
  return _mm_cvtsd_f64(_mm_add_sd(s, _mm_unpackhi_pd(s, s)));
}

void propagate(const Terminations& t, const double* u_a, const double* u_b,
               double* wave_ab, double* wave_ba, double* v_a, double* v_b,
               double* i_a, double* i_b, std::size_t count) {
  const __m256d ra = _mm256_set1_pd(t.r_a);
  const __m256d rb = _mm256_set1_pd(t.r_b);
  const __m256d z0 = _mm256_set1_pd(t.z0);
  const __m256d den_a = _mm256_add_pd(ra, z0);
  const __m256d den_b = _mm256_add_pd(rb, z0);

  std::size_t j = 0;
  for (; j + 4 <= count; j += 4) {
    const __m256d arriving_a = _mm256_loadu_pd(wave_ba + j);
    const __m256d arriving_b = _mm256_loadu_pd(wave_ab + j);
    const __m256d ua = _mm256_loadu_pd(u_a + j);
    const __m256d ub = _mm256_loadu_pd(u_b + j);

    const __m256d ia = _mm256_div_pd(_mm256_sub_pd(ua, arriving_a), den_a);
    const __m256d va = _mm256_sub_pd(ua, _mm256_mul_pd(ra, ia));
    const __m256d out_a = _mm256_add_pd(va, _mm256_mul_pd(z0, ia));

    const __m256d ib = _mm256_div_pd(_mm256_sub_pd(ub, arriving_b), den_b);
    const __m256d vb = _mm256_sub_pd(ub, _mm256_mul_pd(rb, ib));
    const __m256d out_b = _mm256_add_pd(vb, _mm256_mul_pd(z0, ib));

    _mm256_storeu_pd(i_a + j, ia);
    _mm256_storeu_pd(v_a + j, va);
    _mm256_storeu_pd(i_b + j, ib);
    _mm256_storeu_pd(v_b + j, vb);
    _mm256_storeu_pd(wave_ab + j, out_a);
    _mm256_storeu_pd(wave_ba + j, out_b);
  }
  for (; j < count; ++j) {
    const double arriving_a = wave_ba[j];
    const double arriving_b = wave_ab[j];
    terminate_lane(u_a[j], arriving_a, t.r_a, t.z0, v_a[j], i_a[j], wave_ab[j]);
    terminate_lane(u_b[j], arriving_b, t.r_b, t.z0, v_b[j], i_b[j], wave_ba[j]);
  }
}

double sum_squares(const double* x, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    const __m256d a = _mm256_loadu_pd(x + k);
    const __m256d b = _mm256_loadu_pd(x + k + 4);
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(a, a));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(b, b));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += x[k] * x[k];
  return acc;
}

double dot(const double* x, const double* y, std::size_t n) {
  __m256d acc0 = _mm256_setzero_pd();
  __m256d acc1 = _mm256_setzero_pd();
  std::size_t k = 0;
  for (; k + 8 <= n; k += 8) {
    acc0 = _mm256_add_pd(acc0, _mm256_mul_pd(_mm256_loadu_pd(x + k), _mm256_loadu_pd(y + k)));
    acc1 = _mm256_add_pd(acc1, _mm256_mul_pd(_mm256_loadu_pd(x + k + 4),
                                             _mm256_loadu_pd(y + k + 4)));
  }
  double acc = hsum(_mm256_add_pd(acc0, acc1));
  for (; k < n; ++k) acc += x[k] * y[k];
  return acc;
}

void scale(double* x, std::size_t n, double factor) {
  const __m256d f = _mm256_set1_pd(factor);
  std::size_t k = 0;
  for (; k + 4 <= n; k += 4) _mm256_storeu_pd(x + k, _mm256_mul_pd(_mm256_loadu_pd(x + k), f));
  for (; k < n; ++k) x[k] *= factor;
}

ScanHit find_start(const double* s, std::size_t begin, std::size_t end,
                   const StartScan& scan) {
  const __m256d target_value = _mm256_set1_pd(scan.target_value);
  const __m256d value_tol = _mm256_set1_pd(scan.value_tol);
  const __m256d target_slope = _mm256_set1_pd(scan.target_slope);
  const __m256d slope_tol = _mm256_set1_pd(scan.slope_tol_rel);
  const __m256d two_dt = _mm256_set1_pd(scan.two_dt);
  const __m256d one = _mm256_set1_pd(1.0);

  std::size_t k = begin;
  for (; k + 4 <= end; k += 4) {
    const __m256d here = _mm256_loadu_pd(s + k);
    const __m256d slope =
        _mm256_div_pd(_mm256_sub_pd(_mm256_loadu_pd(s + k + 1), _mm256_loadu_pd(s + k - 1)), two_dt);
    const __m256d ratio = _mm256_div_pd(slope, target_slope);

    const __m256d direct = _mm256_and_pd(
        _mm256_cmp_pd(abs_pd(_mm256_sub_pd(here, target_value)), value_tol, _CMP_LE_OQ),
        _mm256_cmp_pd(abs_pd(_mm256_sub_pd(ratio, one)), slope_tol, _CMP_LE_OQ));
    const unsigned direct_mask = static_cast<unsigned>(_mm256_movemask_pd(direct));

    unsigned negated_mask = 0;
    if (scan.allow_negation) {
      const __m256d negated = _mm256_and_pd(
          _mm256_cmp_pd(abs_pd(_mm256_add_pd(here, target_value)), value_tol, _CMP_LE_OQ),
          _mm256_cmp_pd(abs_pd(_mm256_add_pd(ratio, one)), slope_tol, _CMP_LE_OQ));
      negated_mask = static_cast<unsigned>(_mm256_movemask_pd(negated));
    }

    const unsigned any = direct_mask | negated_mask;
    if (any != 0) {
      const unsigned lane = static_cast<unsigned>(__builtin_ctz(any));
      const bool is_direct = (direct_mask >> lane) & 1u;
      return {k + lane, !is_direct};
    }
  }
  if (k < end) return scalar_kernels().find_start(s, k, end, scan);
  return {};
}

}  // namespace

const KernelTable& avx2_kernels_table() {
  static const KernelTable table{"avx2", propagate, sum_squares, dot, scale, find_start};
  return table;
}

}  // namespace kljn::simd
