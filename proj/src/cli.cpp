#include "kljn/cli.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <ostream>
#include <string>

#include "kljn/errors.hpp"
#include "kljn/streams.hpp"

namespace kljn {
namespace {

std::string fmt(const char* spec, double v) {
  char buf[48];
  std::snprintf(buf, sizeof buf, spec, v);
  return buf;
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw SimulationError("cannot write " + path.string());
  return out;
}

const char* sign_name(Sign s) {
  switch (s) {
    case Sign::Positive: return "+1";
    case Sign::Negative: return "-1";
    case Sign::Uninformative: return "uninformative";
  }
  return "?";
}

}  // namespace

void write_summary_csv(std::ostream& out, const ExperimentSummary& summary) {
  out << "scenario,tau_s,p_ev,se_v,p_ei,se_i,n,loosened_fraction\n";
  for (const SummaryRow& r : summary.rows) {
    out << scenario_number(r.scenario) << ',' << fmt("%.6g", r.tau) << ','
        << fmt("%.4f", r.p_ev) << ',' << fmt("%.4f", r.se_v) << ',' << fmt("%.4f", r.p_ei) << ','
        << fmt("%.4f", r.se_i) << ',' << r.n << ',' << fmt("%.4f", r.loosened_fraction) << '\n';
  }
}

void write_waveforms_tsv(std::ostream& out, const TrialWaveforms& w) {
  out << "time_s\tugen_a\tugen_b\tv_a\tv_b\ti_a\ti_b\n";
  for (std::size_t n = 0; n < w.size(); ++n) {
    out << fmt("%.9g", static_cast<double>(n) * w.dt) << '\t' << fmt("%.9g", w.ugen_a[n]) << '\t'
        << fmt("%.9g", w.ugen_b[n]) << '\t' << fmt("%.9g", w.v_a[n]) << '\t'
        << fmt("%.9g", w.v_b[n]) << '\t' << fmt("%.9g", w.i_a[n]) << '\t'
        << fmt("%.9g", w.i_b[n]) << '\n';
  }
}

std::filesystem::path write_effective_config(const RunConfig& config) {
  std::filesystem::create_directories(config.output);
  const auto path = std::filesystem::path(config.output) / "effective_config.txt";
  open_output(path) << to_config_text(config);
  return path;
}

std::vector<std::filesystem::path> cmd_tables(const RunConfig& config) {
  config.validate();
  write_effective_config(config);
  const auto taus = config.taus();
  ExperimentOptions options;
  options.n_trials = config.n_trials;
  options.n_cal = config.n_cal;
  options.master_seed = config.master_seed;
  options.random_state = config.random_state;
  options.jobs = config.jobs;
  options.simulation = config.simulation;

  std::vector<std::filesystem::path> files;
  auto meta = open_output(std::filesystem::path(config.output) / "run_metadata.txt");
  meta << "# calibrated decision signs (which sign of rho indicates HL)\n"
       << "scenario\ttau_s\tsign_u\tsign_i\tloosened_trials\n";
  for (ScenarioKind scenario : config.scenarios) {
    const ExperimentSummary summary = run_experiment(config.physical, scenario, taus, options);
    const auto path = std::filesystem::path(config.output) /
                      ("scenario" + std::to_string(scenario_number(scenario)) + ".csv");
    auto out = open_output(path);
    write_summary_csv(out, summary);
    files.push_back(path);
    for (const DecisionSign& s : summary.signs) {
      meta << scenario_number(scenario) << '\t' << fmt("%.6g", s.tau) << '\t'
           << sign_name(s.sign_u) << '\t' << sign_name(s.sign_i) << '\t'
           << summary.loosened_trials << '\n';
    }
  }
  return files;
}

std::filesystem::path cmd_waveforms(const RunConfig& config, ScenarioKind scenario,
                                    std::uint64_t seed) {
  config.validate();
  write_effective_config(config);
  const PartySeeds seeds{party_seed(seed, Phase::Waveform, 0, Party::Alice),
                         party_seed(seed, Phase::Waveform, 0, Party::Bob)};
  const BepTrial trial = run_bep_trial(scenario, BitState::HL, config.physical, config.simulation,
                                       seeds, config.waveform_duration());
  const auto path = std::filesystem::path(config.output) /
                    ("waveforms_scenario" + std::to_string(scenario_number(scenario)) + ".tsv");
  auto out = open_output(path);
  write_waveforms_tsv(out, trial.waveforms);
  return path;
}

std::vector<Check> line_oracle_checks(const PhysicalConfig& config) {
  std::vector<Check> checks;
  const double dt = config.dt();
  const std::size_t d = config.dt_divisor;
  const std::size_t n = 20 * d;

  // Unit step from Alice through R_H into a cold line loaded by R_L.
  std::vector<double> ones(n, 1.0), zeros(n, 0.0);
  const TrialWaveforms w = run_transient(config, {ones, 0, false}, config.r_h, {zeros, 0, false},
                                         config.r_l, n);
  double worst = 0.0;
  for (std::size_t k = 0; k < n; ++k) {
    const double t = (static_cast<double>(k) + 0.5) * dt;
    const LatticeResponse ref =
        lattice_step_response(1.0, config.r_h, config.r_l, config.z0, config.t_f, t, 0.25 * dt);
    for (auto [sim, exact] : {std::pair{w.v_a[k], ref.v_src}, std::pair{w.v_b[k], ref.v_load},
                              std::pair{w.i_a[k], ref.i_src}, std::pair{w.i_b[k], ref.i_load}}) {
      const double scale = std::max(std::fabs(exact), 1e-300);
      if (exact != 0.0 || sim != 0.0) worst = std::max(worst, std::fabs(sim - exact) / scale);
    }
  }
  checks.push_back({"step response vs bounce diagram (max relative error)", worst, 0.0, 0.0, 1e-9,
                    worst <= 1e-9});

  // During the first fly time only outgoing waves exist: v = z0 i at each end.
  std::vector<double> ramp(d), other(d);
  for (std::size_t k = 0; k < d; ++k) {
    ramp[k] = 1.0 + 0.01 * static_cast<double>(k);
    other[k] = -0.5 + 0.003 * static_cast<double>(k * k);
  }
  const TrialWaveforms first = run_transient(config, {ramp, 0, false}, config.r_h,
                                             {other, 0, false}, config.r_l, d);
  double identity = 0.0;
  for (std::size_t k = 0; k < d; ++k) {
    identity = std::max(identity, std::fabs(first.v_a[k] - config.z0 * first.i_a[k]) /
                                      std::fabs(first.v_a[k]));
    identity = std::max(identity, std::fabs(first.v_b[k] - config.z0 * first.i_b[k]) /
                                      std::fabs(first.v_b[k]));
  }
  checks.push_back({"first fly time v = z0*i (max relative deviation)", identity, 0.0, 0.0, 1e-12,
                    identity <= 1e-12});
  return checks;
}

int cmd_validate(const RunConfig& config, std::ostream& out) {
  config.validate();
  write_effective_config(config);
  std::vector<Check> checks = line_oracle_checks(config.physical);
  const SteadyStateReport steady =
      validate_steady_state(config.physical, config.steady_duration, config.master_seed);
  checks.insert(checks.end(), steady.checks.begin(), steady.checks.end());

  bool all = true;
  out << "steady-state run: " << fmt("%.6g", config.steady_duration) << " s per state\n";
  for (const Check& c : checks) {
    all = all && c.pass;
    out << (c.pass ? "PASS  " : "FAIL  ") << c.name << ": measured " << fmt("%.6g", c.measured)
        << ", expected " << fmt("%.6g", c.expected) << ", tolerance " << fmt("%.3g", c.tolerance);
    if (c.standard_error > 0.0) out << ", se " << fmt("%.3g", c.standard_error);
    out << '\n';
  }
  out << (all ? "all checks passed\n" : "some checks failed\n");
  return all ? kExitOk : kExitValidationFailed;
}

}  // namespace kljn
