#pragma once

// Experiment harness: repeated independent bit exchanges, Eve's success
// probabilities with standard errors, and steady-state checks of the
// equilibrium identities.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "kljn/attack.hpp"
#include "kljn/protocol.hpp"

namespace kljn {

struct ExperimentOptions {
  std::size_t n_trials = 1000;
  std::size_t n_cal = 200;
  std::uint64_t master_seed = 1;
  bool random_state = false;  // HL only unless set
  unsigned jobs = 1;
  SimulationOptions simulation;
};

struct SummaryRow {
  ScenarioKind scenario = ScenarioKind::NoDefense;
  double tau = 0.0;
  double p_ev = 0.0, se_v = 0.0;
  double p_ei = 0.0, se_i = 0.0;
  std::size_t n = 0;
  double loosened_fraction = 0.0;
};

/// Per-trial outcome, kept for audits such as the first-fly-time identity.
struct TrialRecord {
  BitState truth = BitState::HL;
  bool loosened = false;
  std::vector<AttackStat> stats;  // one per tau
  std::vector<BitState> guess_v;
  std::vector<BitState> guess_i;
};

struct ExperimentSummary {
  std::vector<SummaryRow> rows;  // tau_list order
  std::uint64_t master_seed = 0;
  std::vector<DecisionSign> signs;
  std::vector<TrialRecord> trials;
  std::size_t loosened_trials = 0;
};

/// sqrt(p (1 - p) / n).
double standard_error(double p, std::size_t n);

/// Calibrates Eve's signs, then runs n_trials evaluation trials. Every tau
/// must be a multiple of dt; all taus are prefixes of one trial.
ExperimentSummary run_experiment(const PhysicalConfig& config, ScenarioKind scenario,
                                 std::span<const double> taus, const ExperimentOptions& options);

/// One line of a validation report. Passes iff |measured - expected| <= tolerance.
struct Check {
  std::string name;
  double measured = 0.0;
  double expected = 0.0;
  double standard_error = 0.0;
  double tolerance = 0.0;
  bool pass = false;
};

struct SteadyStateReport {
  double duration = 0.0;
  std::vector<Check> checks;
  bool passed() const;
};

/// Time averages at both cable ends of a long run, with batch-means
/// standard errors.
struct EndMoments {
  double ms_v_a = 0, ms_v_b = 0, ms_i_a = 0, ms_i_b = 0, power_a = 0, power_b = 0;
  double se_v_a = 0, se_v_b = 0, se_i_a = 0, se_i_b = 0, se_power_a = 0, se_power_b = 0;
};

/// Runs the line with free-running generators for n samples (the first 1%
/// is discarded as settling).
EndMoments steady_state_moments(const PhysicalConfig& config, BitState state,
                                const PartySeeds& seeds, std::size_t n);

/// Expected moments of steady_state_moments from the line's exact
/// frequency response summed over the in-band bins of an n-sample record.
EndMoments cable_loaded_moments(const PhysicalConfig& config, BitState state, std::size_t n);

/// Checks wire mean squares against the ideal-wire values 4kT R_p B and
/// 4kT B / R_s (2%), the HL-LH differences and mean power flows (3 standard
/// errors), and the measured moments against the cable-loaded expectation
/// (3 standard errors). Requires duration >= 1000 / B.
SteadyStateReport validate_steady_state(const PhysicalConfig& config, double duration,
                                        std::uint64_t seed);

}  // namespace kljn
