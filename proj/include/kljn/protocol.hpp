#pragma once

// KLJN bit exchange: resistor states, the four start-up scenarios, the
// defense's start-point targets and the steady-state identities.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string_view>

#include "kljn/line.hpp"
#include "kljn/noise.hpp"
#include "kljn/physical_config.hpp"

namespace kljn {

/// (Alice's resistor, Bob's resistor).
enum class BitState { HL, LH, HH, LL };

/// The four start-up scenarios, in demonstration order.
enum class ScenarioKind {
  NoDefense = 1,              // random start values
  ZeroStartOnly = 2,          // zero start, arbitrary slope
  RatioStartNonzero = 3,      // nonzero start, values and slopes in ratio m_HL
  ZeroStartSlopeMatched = 4,  // zero start, slopes in ratio m_HL
};

inline constexpr ScenarioKind kAllScenarios[] = {
    ScenarioKind::NoDefense, ScenarioKind::ZeroStartOnly, ScenarioKind::RatioStartNonzero,
    ScenarioKind::ZeroStartSlopeMatched};

inline bool is_secure(BitState s) { return s == BitState::HL || s == BitState::LH; }
inline int scenario_number(ScenarioKind s) { return static_cast<int>(s); }
ScenarioKind scenario_from_number(int n);
std::string_view to_string(BitState s);
std::string_view to_string(ScenarioKind s);

/// Start-point search tolerances and public targets.
struct DefenseTolerances {
  double zero_value_tol = 1e-3;          // of the generator RMS
  double slope_tol = 1e-2;               // of the agreed slope
  double nonzero_value_tol = 1e-2;       // of the agreed nonzero start value
  double nonzero_start_fraction = 0.5;   // agreed L-side start value / sigma_L
  std::size_t max_regenerations = 10;
};

struct SimulationOptions {
  std::size_t record_length = std::size_t{1} << 20;
  DefenseTolerances tolerances;
  /// Multiplies every generator RMS; 0 silences the generators.
  double noise_scale = 1.0;
};

struct ResultantResistances {
  double parallel;
  double serial;
};

ResultantResistances resultant_resistances(double r_h, double r_l);

/// m_HL = (R_H + Z0) / (R_L + Z0): required ratio of the starting slopes (and,
/// in scenario 3, start values) of the H-side and L-side generators.
double slope_ratio(double r_h, double r_l, double z0);

/// Base seeds of the two parties' generators for one trial.
struct PartySeeds {
  std::uint64_t alice;
  std::uint64_t bob;
};

struct GeneratorSetup {
  NoiseRecord record;
  StartPoint start;
  double resistance = 0.0;
  std::size_t regenerations = 0;
  bool loosened = false;
  double value_tol_used = 0.0;
  double slope_tol_used = 0.0;
};

struct TrialGenerators {
  GeneratorSetup alice;
  GeneratorSetup bob;
  bool loosened() const { return alice.loosened || bob.loosened; }
};

/// Synthesizes both parties' records and picks their start points. Records
/// are searched only where n_steps samples remain after the start.
///
/// A failed search regenerates the record from a fresh derived seed up to
/// max_regenerations times, then doubles the tolerances on the last record
/// until a match is found; the result is marked `loosened`.
TrialGenerators prepare_generators(ScenarioKind scenario, BitState state,
                                   const PhysicalConfig& config, const SimulationOptions& options,
                                   const PartySeeds& seeds, std::size_t n_steps);

struct BepTrial {
  TrialWaveforms waveforms;
  bool loosened = false;
};

/// One bit-exchange transient of round(duration / dt) samples on a cold line.
BepTrial run_bep_trial(ScenarioKind scenario, BitState state, const PhysicalConfig& config,
                       const SimulationOptions& options, const PartySeeds& seeds, double duration);

/// Key bit of a secure state given the public bit assigned to HL; nullopt for
/// the discarded HH and LL states.
std::optional<int> interpret_bep(BitState state, int hl_bit);

/// Mean-square wire voltage 4kT R_p B of each state with an ideal
/// (zero-length) wire.
struct SteadyStateLevels {
  double hh, hl, lh, ll;
};

SteadyStateLevels steady_state_levels(const PhysicalConfig& config);

}  // namespace kljn
