#include "kljn/attack.hpp"

#include <cmath>
#include <string>

#include "kljn/errors.hpp"
#include "kljn/parallel.hpp"
#include "kljn/simd/kernels.hpp"
#include "kljn/streams.hpp"

namespace kljn {

namespace {

std::size_t window_length(double tau, double dt) {
  if (!(tau > 0.0) || !(dt > 0.0)) throw InvalidParameter("tau and dt must be positive");
  const long long n = std::llround(tau / dt);
  if (n < 1) throw InvalidParameter("averaging window is shorter than one sample");
  return static_cast<std::size_t>(n);
}

}  // namespace

double mean_square_window(std::span<const double> series, double tau, double dt) {
  const std::size_t n = window_length(tau, dt);
  if (n > series.size()) {
    throw InvalidParameter("mean_square_window: window of " + std::to_string(n) +
                           " samples exceeds series of " + std::to_string(series.size()));
  }
  return simd::kernels().sum_squares(series.data(), n) / static_cast<double>(n);
}

double rho_u(const TrialWaveforms& w, double tau) {
  return mean_square_window(w.v_a, tau, w.dt) - mean_square_window(w.v_b, tau, w.dt);
}

double rho_i(const TrialWaveforms& w, double tau) {
  return mean_square_window(w.i_a, tau, w.dt) - mean_square_window(w.i_b, tau, w.dt);
}

AttackStat attack_stat(const TrialWaveforms& w, double tau) {
  return {rho_u(w, tau), rho_i(w, tau), tau, window_length(tau, w.dt)};
}

Sign sign_from_samples(std::span<const double> rho) {
  const std::size_t n = rho.size();
  if (n < 2) return Sign::Uninformative;
  double mean = 0.0;
  for (double r : rho) mean += r;
  mean /= static_cast<double>(n);
  double var = 0.0;
  for (double r : rho) var += (r - mean) * (r - mean);
  var /= static_cast<double>(n - 1);
  const double se = std::sqrt(var / static_cast<double>(n));
  if (mean == 0.0 || std::fabs(mean) < 2.0 * se) return Sign::Uninformative;
  return mean > 0.0 ? Sign::Positive : Sign::Negative;
}

std::vector<DecisionSign> calibrate_sign(ScenarioKind scenario, std::span<const double> taus,
                                         const PhysicalConfig& config,
                                         const SimulationOptions& options, std::size_t n_cal,
                                         std::uint64_t master_seed, unsigned jobs) {
  if (n_cal < 50) throw InvalidParameter("calibrate_sign: n_cal must be at least 50");
  if (taus.empty()) throw InvalidParameter("calibrate_sign: no observation times");
  double longest = 0.0;
  for (double t : taus) longest = std::max(longest, t);

  const std::size_t m = taus.size();
  std::vector<double> ru(n_cal * m), ri(n_cal * m);
  parallel_for(n_cal, jobs, [&](std::size_t trial) {
    const PartySeeds seeds{party_seed(master_seed, Phase::Calibration, trial, Party::Alice),
                           party_seed(master_seed, Phase::Calibration, trial, Party::Bob)};
    const BepTrial t = run_bep_trial(scenario, BitState::HL, config, options, seeds, longest);
    for (std::size_t k = 0; k < m; ++k) {
      ru[k * n_cal + trial] = rho_u(t.waveforms, taus[k]);
      ri[k * n_cal + trial] = rho_i(t.waveforms, taus[k]);
    }
  });

  std::vector<DecisionSign> signs(m);
  for (std::size_t k = 0; k < m; ++k) {
    signs[k].scenario = scenario;
    signs[k].tau = taus[k];
    signs[k].sign_u = sign_from_samples(std::span(ru).subspan(k * n_cal, n_cal));
    signs[k].sign_i = sign_from_samples(std::span(ri).subspan(k * n_cal, n_cal));
  }
  return signs;
}

BitState eve_decide(const AttackStat& stat, const DecisionSign& sign, Channel channel,
                    bool coin_says_hl) {
  const Sign s = channel == Channel::Voltage ? sign.sign_u : sign.sign_i;
  const double rho = channel == Channel::Voltage ? stat.rho_u : stat.rho_i;
  const double score = static_cast<int>(s) * rho;
  if (score > 0.0) return BitState::HL;
  if (score < 0.0) return BitState::LH;
  return coin_says_hl ? BitState::HL : BitState::LH;
}

}  // namespace kljn
