#pragma once

// Eve's transient attack: windowed mean squares at both cable ends, their
// differences rho_u and rho_i, and a sign calibrated on labeled rehearsal
// runs that maps rho to an HL/LH guess.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "kljn/line.hpp"
#include "kljn/protocol.hpp"

namespace kljn {

enum class Channel { Voltage, Current };

struct AttackStat {
  double rho_u = 0.0;  // V^2
  double rho_i = 0.0;  // A^2
  double tau = 0.0;    // s
  std::size_t window_samples = 0;
};

enum class Sign : int { Negative = -1, Uninformative = 0, Positive = 1 };

/// Which sign of rho indicates HL, per channel.
struct DecisionSign {
  Sign sign_u = Sign::Uninformative;
  Sign sign_i = Sign::Uninformative;
  ScenarioKind scenario = ScenarioKind::NoDefense;
  double tau = 0.0;
};

/// Mean of squared samples over [0, tau), i.e. the first round(tau/dt).
double mean_square_window(std::span<const double> series, double tau, double dt);

double rho_u(const TrialWaveforms& w, double tau);
double rho_i(const TrialWaveforms& w, double tau);
AttackStat attack_stat(const TrialWaveforms& w, double tau);

/// Sign of the sample mean, or Uninformative when |mean| < 2 standard errors.
Sign sign_from_samples(std::span<const double> rho);

/// Runs n_cal labeled HL trials (calibration streams of `master_seed`) and
/// calibrates one DecisionSign per tau; every tau is a prefix of the same
/// trial of length max(taus).
std::vector<DecisionSign> calibrate_sign(ScenarioKind scenario, std::span<const double> taus,
                                         const PhysicalConfig& config,
                                         const SimulationOptions& options, std::size_t n_cal,
                                         std::uint64_t master_seed, unsigned jobs = 1);

/// HL iff sign * rho > 0; a zero rho or an uninformative sign falls back to
/// the coin. One coin per trial and tau is shared by both channels.
BitState eve_decide(const AttackStat& stat, const DecisionSign& sign, Channel channel,
                    bool coin_says_hl);

}  // namespace kljn
