// kljn_sim: transient attack on the KLJN key exchanger and its defense.
//
//   kljn_sim tables    [--config F] [--seed N] [--out DIR] [--scenario K] [--trials N] [--jobs N]
//   kljn_sim waveforms [--config F] [--seed N] [--out DIR] [--scenario K]
//   kljn_sim validate  [--config F] [--seed N] [--out DIR]
//
// Exit codes: 0 success, 1 validation failure or runtime error, 2 bad configuration.

#include <CLI11.hpp>

#include <iostream>
#include <optional>

#include "kljn/cli.hpp"
#include "kljn/errors.hpp"

namespace {

struct Flags {
  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  std::optional<int> scenario;
  std::optional<std::size_t> trials;
  std::optional<unsigned> jobs;
};

void add_common(CLI::App* cmd, Flags& f, bool scenario_and_trials) {
  cmd->add_option("--config", f.config_path, "key = value configuration file");
  cmd->add_option("--seed", f.seed, "master seed");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--jobs", f.jobs, "worker threads (does not change results)");
  if (scenario_and_trials) {
    cmd->add_option("--scenario", f.scenario, "start-up scenario 1..4")->check(CLI::Range(1, 4));
    cmd->add_option("--trials", f.trials, "evaluation trials per scenario");
  }
}

kljn::RunConfig effective_config(const Flags& f) {
  kljn::RunConfig config = f.config_path.empty() ? kljn::parse_config("")
                                                 : kljn::load_config_file(f.config_path);
  if (f.seed) config.master_seed = *f.seed;
  if (f.out) config.output = *f.out;
  if (f.trials) config.n_trials = *f.trials;
  if (f.jobs) config.jobs = *f.jobs;
  if (f.scenario) config.scenarios = {kljn::scenario_from_number(*f.scenario)};
  config.validate();
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"KLJN transient attack and defense simulator"};
  app.require_subcommand(1);
  Flags tables_flags, waveform_flags, validate_flags;
  auto* tables = app.add_subcommand("tables", "Eve's success probability per scenario and tau");
  auto* waveforms = app.add_subcommand("waveforms", "dump one trial's waveforms as TSV");
  auto* validate = app.add_subcommand("validate", "steady-state identities and line checks");
  add_common(tables, tables_flags, true);
  add_common(waveforms, waveform_flags, true);
  add_common(validate, validate_flags, false);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kljn::kExitOk : kljn::kExitConfigError;
  }

  try {
    if (tables->parsed()) {
      const auto config = effective_config(tables_flags);
      for (const auto& path : kljn::cmd_tables(config)) std::cout << path.string() << '\n';
      return kljn::kExitOk;
    }
    if (waveforms->parsed()) {
      auto config = effective_config(waveform_flags);
      const auto scenario = waveform_flags.scenario
                                ? kljn::scenario_from_number(*waveform_flags.scenario)
                                : config.scenarios.front();
      std::cout << kljn::cmd_waveforms(config, scenario, config.master_seed).string() << '\n';
      return kljn::kExitOk;
    }
    const auto config = effective_config(validate_flags);
    return kljn::cmd_validate(config, std::cout);
  } catch (const kljn::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return kljn::kExitConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kljn::kExitValidationFailed;
  }
}
