#pragma once

// Run configuration in a flat `key = value` text format:
//
//   # comment
//   r_h = 11e3
//   scenarios = 1, 2, 3, 4
//
// Omitted keys take the demonstration defaults; unknown keys are errors.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "kljn/physical_config.hpp"
#include "kljn/protocol.hpp"

namespace kljn {

/// Invalid configuration; the message names the offending key.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& message)
      : std::runtime_error(key.empty() ? message : key + ": " + message), key_(std::move(key)) {}
  const std::string& key() const { return key_; }

 private:
  std::string key_;
};

struct RunConfig {
  PhysicalConfig physical;
  std::vector<ScenarioKind> scenarios{std::begin(kAllScenarios), std::end(kAllScenarios)};
  std::vector<double> tau_multipliers{1.0, 2.0, 3.0, 4.0};  // of t_f
  std::size_t n_trials = 1000;
  std::size_t n_cal = 200;
  std::uint64_t master_seed = 1;
  std::string output = "kljn_out";
  SimulationOptions simulation;
  bool random_state = false;
  double steady_duration = 0.4;          // s
  double waveform_tau_multiplier = 2.0;  // of t_f
  unsigned jobs = 1;

  std::vector<double> taus() const;
  double waveform_duration() const { return waveform_tau_multiplier * physical.t_f; }

  /// Throws ConfigError naming the key whose value is invalid.
  void validate() const;
};

RunConfig parse_config(std::string_view text);
RunConfig load_config_file(const std::filesystem::path& path);

/// Every key with its effective value; parse_config(to_config_text(c))
/// reproduces c exactly.
std::string to_config_text(const RunConfig& config);

}  // namespace kljn
