#pragma once

// Band-limited Gaussian generator noise and the defense's start-point search.

#include <cstddef>
#include <cstdint>
#include <limits>
#include <optional>
#include <span>
#include <vector>

namespace kljn {

inline constexpr double kBoltzmann = 1.380649e-23;  // J/K

/// Sampled voltage of one noise generator.
struct NoiseRecord {
  std::vector<double> samples;  // V
  double dt = 0.0;              // s
  double bandwidth = 0.0;       // Hz, upper band edge
  double target_rms = 0.0;      // V, ensemble RMS
  std::uint64_t seed_tag = 0;

  std::size_t size() const { return samples.size(); }
  std::span<const double> view() const { return samples; }
};

/// A sample where a record may be connected to the cable.
///
/// `value` and `slope` are those of the record as it will be driven, i.e.
/// after negation when `negate` is set. The achieved tolerances are the
/// measured deviations from the search targets.
struct StartPoint {
  std::size_t index = 0;
  double value = 0.0;
  double slope = 0.0;
  double achieved_value_tol = 0.0;  // |value - target| / target_rms
  double achieved_slope_tol = 0.0;  // |slope / target - 1|
  bool negate = false;
};

struct StartSearch {
  double target_value = 0.0;
  double value_tol_rel = 1e-3;  // relative to the record's target_rms
  double target_slope = 1.0;    // V/s, must be nonzero
  double slope_tol_rel = 1e-2;  // +inf leaves the slope unconstrained
  bool allow_negation = true;
  /// Only indices below this bound are considered (e.g. to leave room for a
  /// trial's samples after the start point).
  std::size_t limit = std::numeric_limits<std::size_t>::max();
};

/// RMS open-circuit Johnson noise voltage sqrt(4kTRB).
double johnson_rms(double temperature, double resistance, double bandwidth);

/// Stationary Gaussian record, flat on (0, B] and exactly zero above B.
///
/// Built in the frequency domain: independent complex Gaussian coefficients
/// on the in-band bins, Hermitian symmetric, inverse real transform. The
/// result is scaled so its sample mean square is exactly sigma^2.
NoiseRecord synthesize_record(std::uint64_t seed, std::size_t n, double dt, double bandwidth,
                              double sigma);

/// RMS time derivative of flat-band noise, sigma * 2*pi*B / sqrt(3).
double slope_rms(double bandwidth, double sigma);

/// Central difference (s[i+1] - s[i-1]) / (2 dt).
double estimate_slope(const NoiseRecord& record, std::size_t index);

/// Earliest interior index matching the search, or nullopt.
std::optional<StartPoint> find_start_point(const NoiseRecord& record, const StartSearch& search);

}  // namespace kljn
