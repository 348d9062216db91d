#pragma once

// Data-parallel inner loops of the simulator.
//
// Every kernel exists as a scalar reference and, on x86-64, as an AVX2
// variant. The active table is picked once at startup from the CPU features;
// setting KLJN_KERNELS=scalar in the environment forces the reference path.
//
// The line and search kernels use the same sequence of IEEE operations in
// both variants (no FMA), so their results are bit-identical. Reductions
// differ only by summation order.

#include <cstddef>
#include <limits>

namespace kljn::simd {

inline constexpr std::size_t kNoMatch = std::numeric_limits<std::size_t>::max();

/// Resistive Thevenin terminations at both cable ends.
struct Terminations {
  double r_a;
  double r_b;
  double z0;
};

/// One resistive end of a traveling-wave line. `incoming` is the doubled
/// backward wave arriving at this end; the outgoing doubled wave is returned
/// through `outgoing`.
inline void terminate(double u, double incoming, double r, double z0,
                      double& v, double& i, double& outgoing) {
  const double den = r + z0;
  i = (u - incoming) / den;
  v = u - r * i;
  outgoing = v + z0 * i;
}

/// Scan parameters for a start-point search. `value_tol` is absolute (V);
/// `slope_tol_rel` is relative to `target_slope` and may be +inf.
struct StartScan {
  double target_value;
  double value_tol;
  double target_slope;
  double slope_tol_rel;
  double two_dt;
  bool allow_negation;
};

struct ScanHit {
  std::size_t index = kNoMatch;
  bool negate = false;
};

struct KernelTable {
  const char* name;

  /// Advances `count` lanes of the line. Lane j reads wave_ab[j] (arriving
  /// at B) and wave_ba[j] (arriving at A) and overwrites them with the waves
  /// launched from A and B respectively.
  void (*propagate)(const Terminations& t, const double* u_a, const double* u_b,
                    double* wave_ab, double* wave_ba, double* v_a, double* v_b,
                    double* i_a, double* i_b, std::size_t count);

  double (*sum_squares)(const double* x, std::size_t n);
  double (*dot)(const double* x, const double* y, std::size_t n);
  void (*scale)(double* x, std::size_t n, double factor);

  /// Earliest index in [begin, end) matching the scan; requires
  /// 1 <= begin and end <= n - 1 so the central difference is defined.
  ScanHit (*find_start)(const double* s, std::size_t begin, std::size_t end,
                        const StartScan& scan);
};

const KernelTable& scalar_kernels();

/// nullptr when the CPU lacks AVX2 or the variant was not compiled in.
const KernelTable* avx2_kernels();

/// The table used by the library.
const KernelTable& kernels();

}  // namespace kljn::simd
