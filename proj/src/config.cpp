#include "kljn/config.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "kljn/errors.hpp"

namespace kljn {
namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

double parse_double(const std::string& key, std::string_view text) {
  double value = 0.0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end || !std::isfinite(value)) {
    throw ConfigError(key, "malformed number '" + std::string(text) + "'");
  }
  return value;
}

template <typename Int>
Int parse_integer(const std::string& key, std::string_view text) {
  Int value = 0;
  const auto* end = text.data() + text.size();
  const auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    throw ConfigError(key, "malformed integer '" + std::string(text) + "'");
  }
  return value;
}

bool parse_bool(const std::string& key, std::string_view text) {
  if (text == "true" || text == "1") return true;
  if (text == "false" || text == "0") return false;
  throw ConfigError(key, "expected true or false, got '" + std::string(text) + "'");
}

std::vector<std::string_view> split_list(std::string_view text) {
  std::vector<std::string_view> items;
  std::size_t start = 0;
  while (start <= text.size()) {
    const auto comma = text.find(',', start);
    const auto item = trim(text.substr(start, comma == std::string_view::npos ? text.npos
                                                                              : comma - start));
    items.push_back(item);
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return items;
}

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

struct Field {
  std::function<void(RunConfig&, const std::string&, std::string_view)> set;
  std::function<std::string(const RunConfig&)> get;
};

template <typename Member>
Field double_field(Member member) {
  return {[member](RunConfig& c, const std::string& k, std::string_view v) {
            member(c) = parse_double(k, v);
          },
          [member](const RunConfig& c) { return format_double(member(c)); }};
}

template <typename Int, typename Member>
Field integer_field(Member member) {
  return {[member](RunConfig& c, const std::string& k, std::string_view v) {
            member(c) = parse_integer<Int>(k, v);
          },
          [member](const RunConfig& c) { return std::to_string(member(c)); }};
}

const std::map<std::string, Field>& fields() {
  static const std::map<std::string, Field> table = [] {
    std::map<std::string, Field> t;
    t["r_h"] = double_field([](auto& c) -> auto& { return c.physical.r_h; });
    t["r_l"] = double_field([](auto& c) -> auto& { return c.physical.r_l; });
    t["z0"] = double_field([](auto& c) -> auto& { return c.physical.z0; });
    t["temperature"] = double_field([](auto& c) -> auto& { return c.physical.temperature; });
    t["bandwidth"] = double_field([](auto& c) -> auto& { return c.physical.bandwidth; });
    t["t_f"] = double_field([](auto& c) -> auto& { return c.physical.t_f; });
    t["dt_divisor"] = integer_field<std::size_t>(
        [](auto& c) -> auto& { return c.physical.dt_divisor; });
    t["n_trials"] =
        integer_field<std::size_t>([](auto& c) -> auto& { return c.n_trials; });
    t["n_cal"] = integer_field<std::size_t>([](auto& c) -> auto& { return c.n_cal; });
    t["master_seed"] =
        integer_field<std::uint64_t>([](auto& c) -> auto& { return c.master_seed; });
    t["record_length"] = integer_field<std::size_t>(
        [](auto& c) -> auto& { return c.simulation.record_length; });
    t["max_regenerations"] = integer_field<std::size_t>(
        [](auto& c) -> auto& { return c.simulation.tolerances.max_regenerations; });
    t["jobs"] = integer_field<unsigned>([](auto& c) -> auto& { return c.jobs; });
    t["zero_value_tol"] = double_field(
        [](auto& c) -> auto& { return c.simulation.tolerances.zero_value_tol; });
    t["slope_tol"] =
        double_field([](auto& c) -> auto& { return c.simulation.tolerances.slope_tol; });
    t["nonzero_value_tol"] = double_field(
        [](auto& c) -> auto& { return c.simulation.tolerances.nonzero_value_tol; });
    t["nonzero_start_fraction"] = double_field(
        [](auto& c) -> auto& { return c.simulation.tolerances.nonzero_start_fraction; });
    t["noise_scale"] =
        double_field([](auto& c) -> auto& { return c.simulation.noise_scale; });
    t["steady_duration"] =
        double_field([](auto& c) -> auto& { return c.steady_duration; });
    t["waveform_tau_multiplier"] =
        double_field([](auto& c) -> auto& { return c.waveform_tau_multiplier; });
    t["output"] = {[](RunConfig& c, const std::string& k, std::string_view v) {
                     if (v.empty()) throw ConfigError(k, "empty path");
                     c.output = std::string(v);
                   },
                   [](const RunConfig& c) { return c.output; }};
    t["random_state"] = {[](RunConfig& c, const std::string& k, std::string_view v) {
                           c.random_state = parse_bool(k, v);
                         },
                         [](const RunConfig& c) {
                           return std::string(c.random_state ? "true" : "false");
                         }};
    t["scenarios"] = {[](RunConfig& c, const std::string& k, std::string_view v) {
                        c.scenarios.clear();
                        for (auto item : split_list(v)) {
                          const int n = parse_integer<int>(k, item);
                          if (n < 1 || n > 4) throw ConfigError(k, "scenario must be 1..4");
                          c.scenarios.push_back(static_cast<ScenarioKind>(n));
                        }
                      },
                      [](const RunConfig& c) {
                        std::string s;
                        for (auto sc : c.scenarios) {
                          if (!s.empty()) s += ", ";
                          s += std::to_string(scenario_number(sc));
                        }
                        return s;
                      }};
    t["tau_multipliers"] = {[](RunConfig& c, const std::string& k, std::string_view v) {
                              c.tau_multipliers.clear();
                              for (auto item : split_list(v)) {
                                c.tau_multipliers.push_back(parse_double(k, item));
                              }
                            },
                            [](const RunConfig& c) {
                              std::string s;
                              for (double m : c.tau_multipliers) {
                                if (!s.empty()) s += ", ";
                                s += format_double(m);
                              }
                              return s;
                            }};
    return t;
  }();
  return table;
}

bool is_multiple_of(double value, double step) {
  const double ratio = value / step;
  const double rounded = std::round(ratio);
  return rounded >= 1.0 && std::fabs(ratio - rounded) <= 1e-9 * rounded;
}

}  // namespace

std::vector<double> RunConfig::taus() const {
  std::vector<double> out;
  out.reserve(tau_multipliers.size());
  for (double m : tau_multipliers) out.push_back(m * physical.t_f);
  return out;
}

void RunConfig::validate() const {
  try {
    physical.validate();
  } catch (const InvalidParameter& e) {
    const std::string message = e.what();
    throw ConfigError(message.substr(0, message.find(' ')), message);
  }
  const double dt = physical.dt();
  if (scenarios.empty()) throw ConfigError("scenarios", "at least one scenario is required");
  if (tau_multipliers.empty()) throw ConfigError("tau_multipliers", "at least one tau is required");
  double longest = waveform_duration();
  for (double tau : taus()) {
    if (!is_multiple_of(tau, dt)) {
      throw ConfigError("tau_multipliers", "every tau must be a positive multiple of dt");
    }
    longest = std::max(longest, tau);
  }
  if (!is_multiple_of(waveform_duration(), dt)) {
    throw ConfigError("waveform_tau_multiplier", "waveform window must be a multiple of dt");
  }
  if (n_trials < 1) throw ConfigError("n_trials", "must be at least 1");
  if (n_cal < 50) throw ConfigError("n_cal", "must be at least 50");
  if (jobs < 1) throw ConfigError("jobs", "must be at least 1");

  const auto& tol = simulation.tolerances;
  if (!(tol.zero_value_tol > 0.0)) throw ConfigError("zero_value_tol", "must be positive");
  if (!(tol.slope_tol > 0.0)) throw ConfigError("slope_tol", "must be positive");
  if (!(tol.nonzero_value_tol > 0.0)) throw ConfigError("nonzero_value_tol", "must be positive");
  if (!(tol.nonzero_start_fraction > 0.0)) {
    throw ConfigError("nonzero_start_fraction", "must be positive");
  }
  if (!(simulation.noise_scale >= 0.0)) throw ConfigError("noise_scale", "must be non-negative");

  const auto max_steps = static_cast<std::size_t>(std::llround(longest / dt));
  if (simulation.record_length < max_steps + 2) {
    throw ConfigError("record_length", "must exceed the longest trial (" +
                                           std::to_string(max_steps) + " samples) by 2");
  }
  if (static_cast<double>(simulation.record_length) * dt * physical.bandwidth < 10.0) {
    throw ConfigError("record_length", "record must span at least 10 in-band frequency bins");
  }
  const double minimum = 1000.0 / physical.bandwidth;
  if (!(steady_duration >= minimum)) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.6g", minimum);
    throw ConfigError("steady_duration",
                      std::string("must be at least 1000/B = ") + buf + " s");
  }
}

RunConfig parse_config(std::string_view text) {
  RunConfig config;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto eol = text.find('\n', pos);
    std::string_view line = text.substr(pos, eol == text.npos ? text.npos : eol - pos);
    pos = eol == text.npos ? text.size() + 1 : eol + 1;
    ++line_no;

    if (const auto hash = line.find('#'); hash != line.npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;

    const auto eq = line.find('=');
    if (eq == line.npos) {
      throw ConfigError("", "line " + std::to_string(line_no) + ": expected 'key = value'");
    }
    const std::string key(trim(line.substr(0, eq)));
    const std::string_view value = trim(line.substr(eq + 1));
    const auto field = fields().find(key);
    if (field == fields().end()) throw ConfigError(key, "unknown key");
    if (!seen.insert(key).second) throw ConfigError(key, "given more than once");
    field->second.set(config, key, value);
  }
  config.validate();
  return config;
}

RunConfig load_config_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("", "cannot read config file " + path.string());
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return parse_config(buffer.str());
}

std::string to_config_text(const RunConfig& config) {
  std::string out = "# effective configuration\n";
  for (const auto& [key, field] : fields()) out += key + " = " + field.get(config) + "\n";
  return out;
}

}  // namespace kljn
