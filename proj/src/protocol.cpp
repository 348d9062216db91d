#include "kljn/protocol.hpp"

#include <cmath>
#include <limits>
#include <random>
#include <string>

#include "kljn/errors.hpp"
#include "kljn/streams.hpp"

namespace kljn {

void PhysicalConfig::validate() const {
  if (!(r_l > 0.0)) throw InvalidParameter("r_l must be positive");
  if (!(r_h > r_l)) throw InvalidParameter("r_h must be greater than r_l");
  if (!(z0 > 0.0)) throw InvalidParameter("z0 must be positive");
  if (!(temperature > 0.0)) throw InvalidParameter("temperature must be positive");
  if (!(bandwidth > 0.0)) throw InvalidParameter("bandwidth must be positive");
  if (!(t_f > 0.0)) throw InvalidParameter("t_f must be positive");
  if (dt_divisor < 10) throw InvalidParameter("dt_divisor must be at least 10");
  if (!(bandwidth < 0.5 / dt())) {
    throw InvalidParameter("bandwidth must be below the Nyquist frequency of t_f/dt_divisor");
  }
}

ScenarioKind scenario_from_number(int n) {
  if (n < 1 || n > 4) throw InvalidParameter("scenario must be 1..4, got " + std::to_string(n));
  return static_cast<ScenarioKind>(n);
}

std::string_view to_string(BitState s) {
  switch (s) {
    case BitState::HL: return "HL";
    case BitState::LH: return "LH";
    case BitState::HH: return "HH";
    case BitState::LL: return "LL";
  }
  return "?";
}

std::string_view to_string(ScenarioKind s) {
  switch (s) {
    case ScenarioKind::NoDefense: return "no-defense";
    case ScenarioKind::ZeroStartOnly: return "zero-start-only";
    case ScenarioKind::RatioStartNonzero: return "ratio-start-nonzero";
    case ScenarioKind::ZeroStartSlopeMatched: return "zero-start-slope-matched";
  }
  return "?";
}

ResultantResistances resultant_resistances(double r_h, double r_l) {
  if (!(r_h > 0.0) || !(r_l > 0.0)) {
    throw InvalidParameter("resultant_resistances: resistances must be positive");
  }
  return {r_h * r_l / (r_h + r_l), r_h + r_l};
}

double slope_ratio(double r_h, double r_l, double z0) {
  if (!(r_h > 0.0) || !(r_l > 0.0) || !(z0 > 0.0)) {
    throw InvalidParameter("slope_ratio: inputs must be positive");
  }
  return (r_h + z0) / (r_l + z0);
}

namespace {

struct PartyPlan {
  double resistance;
  double sigma;
  bool high;  // terminated by R_H
};

// Search targets for one party. The L side uses the public targets; the H
// side multiplies them by m_HL.
StartSearch search_for(ScenarioKind scenario, const PartyPlan& party, const PhysicalConfig& config,
                       const SimulationOptions& options) {
  const DefenseTolerances& tol = options.tolerances;
  const double sigma_l =
      johnson_rms(config.temperature, config.r_l, config.bandwidth) * options.noise_scale;
  const double factor = party.high ? slope_ratio(config.r_h, config.r_l, config.z0) : 1.0;
  const double agreed_slope = factor * slope_rms(config.bandwidth, sigma_l);
  if (!(agreed_slope > 0.0) || !(party.sigma > 0.0)) {
    throw InvalidParameter("defended start-up scenarios need nonzero generator noise");
  }

  StartSearch s;
  s.target_slope = agreed_slope;
  switch (scenario) {
    case ScenarioKind::ZeroStartOnly:
      s.target_value = 0.0;
      s.value_tol_rel = tol.zero_value_tol;
      s.slope_tol_rel = std::numeric_limits<double>::infinity();
      s.allow_negation = false;
      break;
    case ScenarioKind::RatioStartNonzero:
      s.target_value = factor * tol.nonzero_start_fraction * sigma_l;
      // Tolerance proportional to the target keeps the two parties' relative
      // start errors identically distributed.
      s.value_tol_rel = tol.nonzero_value_tol * std::fabs(s.target_value) / party.sigma;
      s.slope_tol_rel = tol.slope_tol;
      s.allow_negation = true;
      break;
    case ScenarioKind::ZeroStartSlopeMatched:
      s.target_value = 0.0;
      s.value_tol_rel = tol.zero_value_tol;
      s.slope_tol_rel = tol.slope_tol;
      s.allow_negation = true;
      break;
    case ScenarioKind::NoDefense:
      break;
  }
  return s;
}

GeneratorSetup prepare_party(ScenarioKind scenario, const PartyPlan& party,
                             const PhysicalConfig& config, const SimulationOptions& options,
                             std::uint64_t seed, std::size_t n_steps) {
  const std::size_t n = options.record_length;
  if (n < n_steps + 2) {
    throw InvalidParameter("record_length must exceed the trial length by at least 2 samples");
  }
  const double dt = config.dt();

  GeneratorSetup setup;
  setup.resistance = party.resistance;

  auto synthesize = [&](std::uint64_t attempt) {
    return synthesize_record(derive_seed({seed, static_cast<std::uint64_t>(Purpose::Record), attempt}),
                             n, dt, config.bandwidth, party.sigma);
  };

  if (scenario == ScenarioKind::NoDefense) {
    setup.record = synthesize(0);
    auto engine = make_engine(seed, Purpose::StartIndex);
    std::uniform_int_distribution<std::size_t> pick(1, n - n_steps - 1);
    StartPoint& sp = setup.start;
    sp.index = pick(engine);
    sp.value = setup.record.samples[sp.index];
    sp.slope = estimate_slope(setup.record, sp.index);
    return setup;
  }

  StartSearch search = search_for(scenario, party, config, options);
  search.limit = n - n_steps + 1;
  setup.value_tol_used = search.value_tol_rel;
  setup.slope_tol_used = search.slope_tol_rel;

  for (std::size_t attempt = 0; attempt <= options.tolerances.max_regenerations; ++attempt) {
    setup.record = synthesize(attempt);
    setup.regenerations = attempt;
    if (auto sp = find_start_point(setup.record, search)) {
      setup.start = *sp;
      return setup;
    }
  }

  // Keep the last record and widen the search until it succeeds.
  const bool loosen_value =
      scenario == ScenarioKind::RatioStartNonzero || std::isinf(search.slope_tol_rel);
  for (int doubling = 0; doubling < 40; ++doubling) {
    search.slope_tol_rel *= 2.0;
    if (loosen_value) search.value_tol_rel *= 2.0;
    if (auto sp = find_start_point(setup.record, search)) {
      setup.start = *sp;
      setup.loosened = true;
      setup.value_tol_used = search.value_tol_rel;
      setup.slope_tol_used = search.slope_tol_rel;
      return setup;
    }
  }
  throw SimulationError("start-point search failed for scenario " +
                        std::string(to_string(scenario)));
}

}  // namespace

TrialGenerators prepare_generators(ScenarioKind scenario, BitState state,
                                   const PhysicalConfig& config, const SimulationOptions& options,
                                   const PartySeeds& seeds, std::size_t n_steps) {
  if (!is_secure(state)) {
    throw InvalidParameter("prepare_generators: only HL and LH states are exchanged");
  }
  if (!(options.noise_scale >= 0.0)) throw InvalidParameter("noise_scale must be non-negative");
  const bool alice_high = state == BitState::HL;
  const auto plan = [&](bool high) {
    const double r = high ? config.r_h : config.r_l;
    return PartyPlan{r, johnson_rms(config.temperature, r, config.bandwidth) * options.noise_scale,
                     high};
  };
  TrialGenerators g;
  g.alice = prepare_party(scenario, plan(alice_high), config, options, seeds.alice, n_steps);
  g.bob = prepare_party(scenario, plan(!alice_high), config, options, seeds.bob, n_steps);
  return g;
}

BepTrial run_bep_trial(ScenarioKind scenario, BitState state, const PhysicalConfig& config,
                       const SimulationOptions& options, const PartySeeds& seeds, double duration) {
  const double dt = config.dt();
  if (!(duration >= dt)) throw InvalidParameter("run_bep_trial: duration must be at least dt");
  const auto n_steps = static_cast<std::size_t>(std::llround(duration / dt));
  const TrialGenerators g = prepare_generators(scenario, state, config, options, seeds, n_steps);
  BepTrial trial;
  trial.waveforms = run_transient(config, drive_of(g.alice.record, g.alice.start),
                                  g.alice.resistance, drive_of(g.bob.record, g.bob.start),
                                  g.bob.resistance, n_steps);
  trial.loosened = g.loosened();
  return trial;
}

std::optional<int> interpret_bep(BitState state, int hl_bit) {
  switch (state) {
    case BitState::HL: return hl_bit;
    case BitState::LH: return hl_bit == 0 ? 1 : 0;
    default: return std::nullopt;
  }
}

SteadyStateLevels steady_state_levels(const PhysicalConfig& config) {
  const auto level = [&](double ra, double rb) {
    const double rp = ra * rb / (ra + rb);
    return 4.0 * config.boltzmann * config.temperature * rp * config.bandwidth;
  };
  return {level(config.r_h, config.r_h), level(config.r_h, config.r_l),
          level(config.r_l, config.r_h), level(config.r_l, config.r_l)};
}

}  // namespace kljn
