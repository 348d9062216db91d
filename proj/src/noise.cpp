#include "kljn/noise.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <string>

#include "kljn/errors.hpp"
#include "kljn/simd/kernels.hpp"
#include "kljn/spectrum.hpp"

namespace kljn {

double johnson_rms(double temperature, double resistance, double bandwidth) {
  if (!(temperature > 0.0) || !(resistance > 0.0) || !(bandwidth > 0.0)) {
    throw InvalidParameter("johnson_rms: temperature, resistance and bandwidth must be positive");
  }
  return std::sqrt(4.0 * kBoltzmann * temperature * resistance * bandwidth);
}

NoiseRecord synthesize_record(std::uint64_t seed, std::size_t n, double dt, double bandwidth,
                              double sigma) {
  if (n < 2) throw InvalidParameter("synthesize_record: need at least 2 samples");
  if (!(dt > 0.0) || !(bandwidth > 0.0)) {
    throw InvalidParameter("synthesize_record: dt and bandwidth must be positive");
  }
  if (!(sigma >= 0.0)) throw InvalidParameter("synthesize_record: sigma must be non-negative");
  if (!(bandwidth < 0.5 / dt)) {
    throw InvalidParameter("synthesize_record: bandwidth must be below the Nyquist frequency 1/(2dt)");
  }
  const double in_band = static_cast<double>(n) * dt * bandwidth;
  if (in_band < 10.0) {
    throw InvalidParameter("synthesize_record: record too short, n*dt*B = " +
                           std::to_string(in_band) + " < 10");
  }

  // Bin k sits at k / (n dt); keep 1 <= k <= n dt B.
  const std::size_t last_bin = static_cast<std::size_t>(std::floor(in_band * (1.0 + 1e-12)));

  NoiseRecord record;
  record.dt = dt;
  record.bandwidth = bandwidth;
  record.target_rms = sigma;
  record.seed_tag = seed;

  std::mt19937_64 engine(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<std::complex<double>> half(std::min(last_bin, n / 2 - 1) + 1);
  for (std::size_t k = 1; k < half.size(); ++k) {
    const double re = gauss(engine);
    const double im = gauss(engine);
    half[k] = {re, im};
  }
  record.samples = inverse_real_dft(half, n);

  const auto& kern = simd::kernels();
  const double mean_square = kern.sum_squares(record.samples.data(), n) / static_cast<double>(n);
  const double factor = mean_square > 0.0 ? sigma / std::sqrt(mean_square) : 0.0;
  kern.scale(record.samples.data(), n, factor);
  return record;
}

double slope_rms(double bandwidth, double sigma) {
  if (!(bandwidth > 0.0) || !(sigma >= 0.0)) {
    throw InvalidParameter("slope_rms: bandwidth must be positive and sigma non-negative");
  }
  return sigma * 2.0 * std::numbers::pi * bandwidth / std::sqrt(3.0);
}

double estimate_slope(const NoiseRecord& record, std::size_t index) {
  if (index < 1 || index + 1 >= record.size()) {
    throw InvalidParameter("estimate_slope: index " + std::to_string(index) +
                           " has no two-sided neighbourhood");
  }
  return (record.samples[index + 1] - record.samples[index - 1]) / (2.0 * record.dt);
}

std::optional<StartPoint> find_start_point(const NoiseRecord& record, const StartSearch& search) {
  if (!(search.value_tol_rel > 0.0) || !(search.slope_tol_rel > 0.0)) {
    throw InvalidParameter("find_start_point: tolerances must be positive");
  }
  if (search.target_slope == 0.0 || !std::isfinite(search.target_slope)) {
    throw InvalidParameter("find_start_point: target slope must be finite and nonzero");
  }
  if (record.size() < 3) return std::nullopt;

  const std::size_t end = std::min(search.limit, record.size() - 1);
  if (end <= 1) return std::nullopt;

  const simd::StartScan scan{search.target_value, search.value_tol_rel * record.target_rms,
                             search.target_slope, search.slope_tol_rel, 2.0 * record.dt,
                             search.allow_negation};
  const simd::ScanHit hit = simd::kernels().find_start(record.samples.data(), 1, end, scan);
  if (hit.index == simd::kNoMatch) return std::nullopt;

  const double sign = hit.negate ? -1.0 : 1.0;
  StartPoint point;
  point.index = hit.index;
  point.negate = hit.negate;
  point.value = sign * record.samples[hit.index];
  point.slope = sign * estimate_slope(record, hit.index);
  point.achieved_value_tol = record.target_rms > 0.0
                                 ? std::fabs(point.value - search.target_value) / record.target_rms
                                 : 0.0;
  point.achieved_slope_tol = std::fabs(point.slope / search.target_slope - 1.0);
  return point;
}

}  // namespace kljn
