#pragma once

// Commands behind the kljn_sim executable. Each writes into
// config.output and echoes the effective configuration there.

#include <filesystem>
#include <iosfwd>
#include <vector>

#include "kljn/config.hpp"
#include "kljn/montecarlo.hpp"

namespace kljn {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidationFailed = 1;
inline constexpr int kExitConfigError = 2;

/// CSV with header scenario,tau_s,p_ev,se_v,p_ei,se_i,n,loosened_fraction;
/// probabilities to 4 decimals.
void write_summary_csv(std::ostream& out, const ExperimentSummary& summary);

/// TSV with header time_s, ugen_a, ugen_b, v_a, v_b, i_a, i_b; 9 significant digits.
void write_waveforms_tsv(std::ostream& out, const TrialWaveforms& w);

std::filesystem::path write_effective_config(const RunConfig& config);

/// Runs every configured scenario; returns the scenario<k>.csv paths.
std::vector<std::filesystem::path> cmd_tables(const RunConfig& config);

/// One HL trial over the waveform window; returns the TSV path.
std::filesystem::path cmd_waveforms(const RunConfig& config, ScenarioKind scenario,
                                    std::uint64_t seed);

/// Steady-state identities plus line-engine oracle checks; the report goes
/// to `out`. Returns kExitOk iff every check passes.
int cmd_validate(const RunConfig& config, std::ostream& out);

/// Line-engine checks used by cmd_validate: bounce-diagram equivalence and
/// the first-fly-time v = z0 i identity.
std::vector<Check> line_oracle_checks(const PhysicalConfig& config);

}  // namespace kljn
