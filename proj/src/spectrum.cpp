#include "kljn/spectrum.hpp"

#include <fftw3.h>

#include <algorithm>
#include <map>
#include <mutex>
#include <utility>

#include "kljn/errors.hpp"

namespace kljn {
namespace {

// FFTW planning is not thread-safe; execution with the new-array interface
// is. Plans are made once per (direction, size) on fftw_malloc'd arrays and
// executed on per-thread fftw_malloc'd scratch of the same alignment.
class PlanCache {
 public:
  ~PlanCache() {
    for (auto& [key, plan] : plans_) fftw_destroy_plan(plan);
  }

  fftw_plan get(bool forward, std::size_t n, double* real, fftw_complex* half) {
    std::lock_guard lock(mutex_);
    const auto key = std::make_pair(forward, n);
    if (auto it = plans_.find(key); it != plans_.end()) return it->second;
    const int size = static_cast<int>(n);
    fftw_plan plan = forward ? fftw_plan_dft_r2c_1d(size, real, half, FFTW_ESTIMATE)
                             : fftw_plan_dft_c2r_1d(size, half, real, FFTW_ESTIMATE);
    if (plan == nullptr) throw SimulationError("FFTW could not create a plan");
    plans_.emplace(key, plan);
    return plan;
  }

 private:
  std::mutex mutex_;
  std::map<std::pair<bool, std::size_t>, fftw_plan> plans_;
};

PlanCache& plan_cache() {
  static PlanCache cache;
  return cache;
}

struct Scratch {
  std::size_t n = 0;
  double* real = nullptr;
  fftw_complex* half = nullptr;

  ~Scratch() { release(); }

  void release() {
    fftw_free(real);
    fftw_free(half);
    real = nullptr;
    half = nullptr;
    n = 0;
  }

  void ensure(std::size_t size) {
    if (size == n) return;
    release();
    real = fftw_alloc_real(size);
    half = fftw_alloc_complex(size / 2 + 1);
    if (real == nullptr || half == nullptr) throw SimulationError("FFT scratch allocation failed");
    n = size;
  }
};

Scratch& scratch_for(std::size_t n) {
  thread_local Scratch scratch;
  scratch.ensure(n);
  return scratch;
}

}  // namespace

std::vector<double> inverse_real_dft(std::span<const std::complex<double>> half_spectrum,
                                     std::size_t n) {
  if (n < 2 || half_spectrum.size() > n / 2 + 1) {
    throw InvalidParameter("inverse_real_dft: at most n/2+1 bins");
  }
  Scratch& s = scratch_for(n);
  auto* bins = reinterpret_cast<std::complex<double>*>(s.half);
  std::copy(half_spectrum.begin(), half_spectrum.end(), bins);
  std::fill(bins + half_spectrum.size(), bins + n / 2 + 1, std::complex<double>{});
  fftw_execute_dft_c2r(plan_cache().get(false, n, s.real, s.half), s.half, s.real);
  return std::vector<double>(s.real, s.real + n);
}

std::vector<double> power_spectrum(std::span<const double> x) {
  const std::size_t n = x.size();
  if (n < 2) throw InvalidParameter("power_spectrum: need at least two samples");
  Scratch& s = scratch_for(n);
  std::copy(x.begin(), x.end(), s.real);
  fftw_execute_dft_r2c(plan_cache().get(true, n, s.real, s.half), s.real, s.half);
  const auto* bins = reinterpret_cast<const std::complex<double>*>(s.half);
  std::vector<double> power(n / 2 + 1);
  for (std::size_t k = 0; k < power.size(); ++k) power[k] = std::norm(bins[k]);
  return power;
}

}  // namespace kljn
