#include "kljn/simd/kernels.hpp"

#include <cmath>

namespace kljn::simd {
namespace {

void propagate(const Terminations& t, const double* u_a, const double* u_b,
               double* wave_ab, double* wave_ba, double* v_a, double* v_b,
               double* i_a, double* i_b, std::size_t count) {
  for (std::size_t j = 0; j < count; ++j) {
    const double arriving_a = wave_ba[j];
    const double arriving_b = wave_ab[j];
    terminate(u_a[j], arriving_a, t.r_a, t.z0, v_a[j], i_a[j], wave_ab[j]);
    terminate(u_b[j], arriving_b, t.r_b, t.z0, v_b[j], i_b[j], wave_ba[j]);
  }
}

double sum_squares(const double* x, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += x[k] * x[k];
  return acc;
}

double dot(const double* x, const double* y, std::size_t n) {
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += x[k] * y[k];
  return acc;
}

void scale(double* x, std::size_t n, double factor) {
  for (std::size_t k = 0; k < n; ++k) x[k] *= factor;
}

ScanHit find_start(const double* s, std::size_t begin, std::size_t end,
                   const StartScan& scan) {
  for (std::size_t k = begin; k < end; ++k) {
    const double slope = (s[k + 1] - s[k - 1]) / scan.two_dt;
    const double ratio = slope / scan.target_slope;
    if (std::fabs(s[k] - scan.target_value) <= scan.value_tol &&
        std::fabs(ratio - 1.0) <= scan.slope_tol_rel) {
      return {k, false};
    }
    // Negated record: value -s, slope -slope.
    if (scan.allow_negation && std::fabs(s[k] + scan.target_value) <= scan.value_tol &&
        std::fabs(ratio + 1.0) <= scan.slope_tol_rel) {
      return {k, true};
    }
  }
  return {};
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{"scalar", propagate, sum_squares, dot, scale, find_start};
  return table;
}

}  // namespace kljn::simd
