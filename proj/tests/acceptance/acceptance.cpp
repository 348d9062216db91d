// Acceptance suite: one PASS/FAIL line per criterion, default parameters
// throughout. Usage: kljn_acceptance [--criterion N] [--jobs N]
//
// Exit status is 0 iff every selected criterion passed.

#include <sys/wait.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "kljn/cli.hpp"
#include "kljn/montecarlo.hpp"
#include "kljn/noise.hpp"
#include "kljn/spectrum.hpp"
#include "kljn/streams.hpp"

namespace fs = std::filesystem;

namespace {

using kljn::BitState;
using kljn::ScenarioKind;

struct Verdict {
  bool pass = true;
  std::vector<std::string> details;

  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    details.push_back(std::string(ok ? "ok    " : "FAIL  ") + what);
  }
  void note(const std::string& what) { details.push_back("      " + what); }
};

std::string fmt(const char* spec, auto... args) {
  char buf[256];
  std::snprintf(buf, sizeof buf, spec, args...);
  return buf;
}

unsigned g_jobs = std::max(1u, std::thread::hardware_concurrency());

const kljn::PhysicalConfig kDefaults{};

std::vector<double> default_taus() {
  return {kDefaults.t_f, 2 * kDefaults.t_f, 3 * kDefaults.t_f, 4 * kDefaults.t_f};
}

struct TimedSummary {
  kljn::ExperimentSummary summary;
  double seconds = 0.0;
};

// Default experiment per scenario: 1000 trials, 4 taus, seed 1.
const TimedSummary& experiment(ScenarioKind scenario) {
  static std::map<ScenarioKind, TimedSummary> cache;
  auto it = cache.find(scenario);
  if (it != cache.end()) return it->second;
  kljn::ExperimentOptions o;
  o.jobs = g_jobs;
  const auto taus = default_taus();
  const auto start = std::chrono::steady_clock::now();
  TimedSummary t;
  t.summary = kljn::run_experiment(kDefaults, scenario, taus, o);
  t.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return cache.emplace(scenario, std::move(t)).first->second;
}

void describe_rows(Verdict& v, const kljn::ExperimentSummary& s) {
  for (const auto& r : s.rows) {
    v.note(fmt("tau = %.0e s: p_EV = %.3f +- %.3f, p_EI = %.3f +- %.3f", r.tau, r.p_ev, r.se_v,
               r.p_ei, r.se_i));
  }
}

void check_loosened(Verdict& v, const kljn::ExperimentSummary& s) {
  const double frac = static_cast<double>(s.loosened_trials) / static_cast<double>(s.trials.size());
  v.check(frac < 0.05, fmt("loosened-search trials %.3f < 0.05", frac));
}

double rel_err(double got, double want) {
  return std::abs(got - want) / std::max(std::abs(want), 1e-300);
}

// 1. Line engine vs closed-form bounce diagram.
Verdict criterion_1() {
  Verdict v;
  const auto start = std::chrono::steady_clock::now();
  const std::size_t d = kDefaults.dt_divisor;
  const std::size_t n = 40 * d;
  std::vector<double> ones(n, 1.0), zeros(n, 0.0);
  double worst = 0.0;
  std::size_t compared = 0;
  for (auto [rs, rl] : {std::pair{kDefaults.r_h, kDefaults.r_l}, std::pair{kDefaults.r_l, kDefaults.r_h},
                        std::pair{kDefaults.r_h, kDefaults.r_h}, std::pair{kDefaults.r_l, kDefaults.r_l},
                        std::pair{kDefaults.z0, kDefaults.r_h}}) {
    const auto w = kljn::run_transient(kDefaults, {ones, 0, false}, rs, {zeros, 0, false}, rl, n);
    for (std::size_t k = 0; k < n; ++k) {
      // Sample k holds the state on (k dt, (k+1) dt); arrivals land on the grid.
      const double t = (static_cast<double>(k) + 0.5) * kDefaults.dt();
      const auto o = kljn::lattice_step_response(1.0, rs, rl, kDefaults.z0, kDefaults.t_f, t,
                                                 0.25 * kDefaults.dt());
      for (auto [sim, exact] : {std::pair{w.v_a[k], o.v_src}, std::pair{w.v_b[k], o.v_load},
                                std::pair{w.i_a[k], o.i_src}, std::pair{w.i_b[k], o.i_load}}) {
        if (sim == 0.0 && exact == 0.0) continue;
        worst = std::max(worst, rel_err(sim, exact));
        ++compared;
      }
    }
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  v.check(worst <= 1e-9, fmt("max relative error %.3g <= 1e-9 over %zu samples", worst, compared));
  v.check(seconds < 1.0, fmt("runtime %.3f s < 1 s", seconds));
  return v;
}

// 2. Identical voltage and current decisions at tau = t_f.
Verdict criterion_2() {
  Verdict v;
  for (auto scenario : kljn::kAllScenarios) {
    const auto& s = experiment(scenario).summary;
    std::size_t same = 0;
    for (const auto& t : s.trials) same += t.guess_v[0] == t.guess_i[0];
    v.check(same == s.trials.size(),
            fmt("scenario %d: %zu / %zu identical decisions at tau = t_f (p_EV %.3f, p_EI %.3f)",
                kljn::scenario_number(scenario), same, s.trials.size(), s.rows[0].p_ev,
                s.rows[0].p_ei));
  }
  return v;
}

// 3. Scenario 1 leak magnitude.
Verdict criterion_3() {
  Verdict v;
  const auto& t = experiment(ScenarioKind::NoDefense);
  describe_rows(v, t.summary);
  const double p1 = t.summary.rows[0].p_ei;
  v.check(std::abs(p1 - 0.89) <= 0.06, fmt("p_EI(t_f) = %.3f within 0.89 +- 0.06", p1));
  for (const auto& r : t.summary.rows) {
    v.check(r.p_ei >= 0.85, fmt("p_EI(%.0e s) = %.3f >= 0.85", r.tau, r.p_ei));
  }
  v.check(t.seconds < 120.0, fmt("runtime %.1f s < 120 s (1000 trials x 4 taus, %u jobs)",
                                 t.seconds, g_jobs));
  return v;
}

// 4. Scenario 2 leak magnitude.
Verdict criterion_4() {
  Verdict v;
  const auto& s = experiment(ScenarioKind::ZeroStartOnly).summary;
  describe_rows(v, s);
  const double p1 = s.rows[0].p_ev;
  v.check(std::abs(p1 - 0.949) <= 0.05, fmt("p_EV(t_f) = %.3f within 0.949 +- 0.05", p1));
  for (const auto& r : s.rows) {
    v.check(r.p_ev >= 0.85, fmt("p_EV(%.0e s) = %.3f >= 0.85", r.tau, r.p_ev));
  }
  check_loosened(v, s);
  return v;
}

// 5. Scenario 3 partial defense.
Verdict criterion_5() {
  Verdict v;
  const auto& s = experiment(ScenarioKind::RatioStartNonzero).summary;
  describe_rows(v, s);
  v.check(std::abs(s.rows[0].p_ev - 0.50) <= 0.05,
          fmt("p_EV(t_f) = %.3f within 0.50 +- 0.05", s.rows[0].p_ev));
  v.check(std::abs(s.rows[0].p_ei - 0.50) <= 0.05,
          fmt("p_EI(t_f) = %.3f within 0.50 +- 0.05", s.rows[0].p_ei));
  v.check(s.rows[1].p_ev >= 0.60 && s.rows[1].p_ev <= 0.85,
          fmt("p_EV(2 t_f) = %.3f in [0.60, 0.85]", s.rows[1].p_ev));
  check_loosened(v, s);
  return v;
}

// 6. Scenario 4 full defense.
Verdict criterion_6() {
  Verdict v;
  const auto& s = experiment(ScenarioKind::ZeroStartSlopeMatched).summary;
  describe_rows(v, s);
  for (const auto& r : s.rows) {
    v.check(r.p_ev <= 0.58, fmt("p_EV(%.0e s) = %.3f <= 0.58", r.tau, r.p_ev));
    v.check(r.p_ei <= 0.58, fmt("p_EI(%.0e s) = %.3f <= 0.58", r.tau, r.p_ei));
  }
  check_loosened(v, s);
  return v;
}

// 7. Steady-state identities over a 0.4 s run per state.
Verdict criterion_7() {
  Verdict v;
  const double duration = 0.4;
  const auto report = kljn::validate_steady_state(kDefaults, duration, 1);
  v.note(fmt("run length %.2f s per state (>= 0.2 s)", duration));
  // The first six checks are the criterion; the rest compare against the
  // cable-loaded expectation and are reported for diagnosis.
  for (std::size_t k = 0; k < report.checks.size(); ++k) {
    const auto& c = report.checks[k];
    const std::string line = fmt("%s: measured %.5g, expected %.5g, tolerance %.3g", c.name.c_str(),
                                 c.measured, c.expected, c.tolerance);
    if (k < 6) {
      v.check(c.pass, line);
    } else {
      v.note(std::string(c.pass ? "[diagnostic ok] " : "[diagnostic FAIL] ") + line);
    }
  }
  return v;
}

// 8. Noise quality of synthesized records.
Verdict criterion_8() {
  Verdict v;
  const std::size_t n = std::size_t{1} << 20;
  const double dt = kDefaults.dt(), bw = kDefaults.bandwidth;
  const double sigma = kljn::johnson_rms(kDefaults.temperature, kDefaults.r_l, bw);
  const auto edge = static_cast<std::size_t>(std::floor(static_cast<double>(n) * dt * bw));

  double worst_rms = 0.0, worst_oob = 0.0;
  std::vector<double> mean_power(n / 2 + 1, 0.0);
  const int records = 8;
  for (int r = 0; r < records; ++r) {
    const auto rec = kljn::synthesize_record(
        kljn::derive_seed({1, 8, static_cast<std::uint64_t>(r)}), n, dt, bw, sigma);
    double ms = 0.0;
    for (double x : rec.samples) ms += x * x;
    worst_rms = std::max(worst_rms, std::abs(std::sqrt(ms / static_cast<double>(n)) / sigma - 1.0));
    const auto p = kljn::power_spectrum(rec.samples);
    double in_band = 0.0, out_band = 0.0;
    for (std::size_t k = 0; k < p.size(); ++k) {
      (k >= 1 && k <= edge ? in_band : out_band) += p[k];
      mean_power[k] += p[k] / records;
    }
    worst_oob = std::max(worst_oob, out_band / in_band);
  }
  v.check(worst_oob <= 1e-20,
          fmt("out-of-band / in-band power %.3g (zero to rounding, <= 1e-20)", worst_oob));
  v.check(worst_rms <= 0.01, fmt("sample RMS within %.2e of target over %d records of 2^20 (<= 1%%)",
                                 worst_rms, records));

  // One long record so the estimate resolves +-0.1 (its spread is ~0.03).
  const auto long_rec = kljn::synthesize_record(kljn::derive_seed({1, 8, 100}), n << 4, dt, bw, sigma);
  long double m2 = 0, m4 = 0;
  for (double x : long_rec.samples) {
    const long double x2 = static_cast<long double>(x) * x;
    m2 += x2;
    m4 += x2 * x2;
  }
  m2 /= long_rec.size();
  m4 /= long_rec.size();
  const double kurt = static_cast<double>(m4 / (m2 * m2)) - 3.0;
  v.check(std::abs(kurt) <= 0.1, fmt("excess kurtosis %.4f within +-0.1 (2^24 samples)", kurt));

  // Autocorrelation from the averaged power spectrum.
  std::vector<std::complex<double>> half(mean_power.begin(), mean_power.end());
  const auto acf = kljn::inverse_real_dft(half, n);
  double decay = -1.0;
  for (std::size_t lag = 1; lag < n / 2; ++lag) {
    if (acf[lag] / acf[0] <= std::exp(-1.0)) {
      const double a = acf[lag - 1] / acf[0], b = acf[lag] / acf[0];
      decay = (static_cast<double>(lag - 1) + (a - std::exp(-1.0)) / (a - b)) * dt;
      break;
    }
  }
  v.check(std::abs(decay - 1e-4) <= 0.2e-4,
          fmt("autocorrelation 1/e lag %.3e s within 1e-4 +- 20%%", decay));
  const double x_e = 2.19911485751;  // sin(x)/x = 1/e
  v.note(fmt("flat-band sinc prediction of the 1/e lag: %.3e s; first zero at 1/(2B) = %.3e s",
             x_e / (2 * 3.14159265358979 * bw), 0.5 / bw));
  return v;
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(KLJN_SIM_PATH) + " " + args + " > /dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

// 9. Property suite.
Verdict criterion_9() {
  Verdict v;
  const auto taus = default_taus();

  // Temperature scaling: sigma scales by sqrt(gamma) = 0.5 or 2, rho by
  // gamma, decisions not at all.
  {
    kljn::ExperimentOptions o;
    o.n_trials = 100;
    o.n_cal = 50;
    o.random_state = true;
    o.jobs = g_jobs;
    for (auto scenario : kljn::kAllScenarios) {
      const auto base = kljn::run_experiment(kDefaults, scenario, taus, o);
      for (double gamma : {0.25, 4.0}) {
        kljn::PhysicalConfig c = kDefaults;
        c.temperature *= gamma;
        const auto scaled = kljn::run_experiment(c, scenario, taus, o);
        bool same = true;
        for (std::size_t k = 0; k < taus.size(); ++k) {
          same = same && scaled.signs[k].sign_u == base.signs[k].sign_u &&
                 scaled.signs[k].sign_i == base.signs[k].sign_i;
        }
        for (std::size_t t = 0; t < base.trials.size(); ++t) {
          const auto &a = base.trials[t], &b = scaled.trials[t];
          same = same && a.guess_v == b.guess_v && a.guess_i == b.guess_i;
          for (std::size_t k = 0; k < taus.size(); ++k) {
            same = same && b.stats[k].rho_u == gamma * a.stats[k].rho_u &&
                   b.stats[k].rho_i == gamma * a.stats[k].rho_i;
          }
        }
        v.check(same, fmt("scenario %d, gamma = %g: identical decisions, rho scaled exactly",
                          kljn::scenario_number(scenario), gamma));
      }
    }
  }

  // Mirror antisymmetry: swapping the parties' resistors and seeds negates rho.
  {
    bool exact = true;
    for (auto scenario : kljn::kAllScenarios) {
      for (std::uint64_t trial = 0; trial < 10; ++trial) {
        const auto a = kljn::party_seed(9, kljn::Phase::Evaluation, trial, kljn::Party::Alice);
        const auto b = kljn::party_seed(9, kljn::Phase::Evaluation, trial, kljn::Party::Bob);
        const auto hl = kljn::run_bep_trial(scenario, BitState::HL, kDefaults, {}, {a, b}, taus.back());
        const auto lh = kljn::run_bep_trial(scenario, BitState::LH, kDefaults, {}, {b, a}, taus.back());
        for (double tau : taus) {
          exact = exact && kljn::rho_u(lh.waveforms, tau) == -kljn::rho_u(hl.waveforms, tau) &&
                  kljn::rho_i(lh.waveforms, tau) == -kljn::rho_i(hl.waveforms, tau);
        }
      }
    }
    v.check(exact, "mirror: rho(LH, swapped seeds) == -rho(HL) exactly, 40 trials x 4 taus");
  }

  // Linearity (exact for power-of-two gains) and superposition (to rounding).
  {
    const std::size_t n = 4 * kDefaults.dt_divisor;
    const auto ga = kljn::synthesize_record(41, std::size_t{1} << 20, kDefaults.dt(), kDefaults.bandwidth, 4.6);
    const auto gb = kljn::synthesize_record(42, std::size_t{1} << 20, kDefaults.dt(), kDefaults.bandwidth, 1.9);
    std::vector<double> ua(ga.samples.begin() + 1000, ga.samples.begin() + 1000 + n);
    std::vector<double> ub(gb.samples.begin() + 5000, gb.samples.begin() + 5000 + n);
    std::vector<double> zero(n, 0.0), ua8(n), ub8(n);
    for (std::size_t k = 0; k < n; ++k) ua8[k] = 0.125 * ua[k], ub8[k] = 0.125 * ub[k];
    const auto run = [&](const std::vector<double>& x, const std::vector<double>& y) {
      return kljn::run_transient(kDefaults, {x, 0, false}, kDefaults.r_h, {y, 0, false}, kDefaults.r_l, n);
    };
    const auto both = run(ua, ub), only_a = run(ua, zero), only_b = run(zero, ub);
    const auto scaled = run(ua8, ub8);
    bool linear = true;
    double worst = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
      linear = linear && scaled.v_a[k] == 0.125 * both.v_a[k] && scaled.v_b[k] == 0.125 * both.v_b[k] &&
               scaled.i_a[k] == 0.125 * both.i_a[k] && scaled.i_b[k] == 0.125 * both.i_b[k];
      const double scale_v = std::abs(only_a.v_a[k]) + std::abs(only_b.v_a[k]) + 1e-300;
      worst = std::max(worst, std::abs(both.v_a[k] - only_a.v_a[k] - only_b.v_a[k]) / scale_v);
      const double scale_vb = std::abs(only_a.v_b[k]) + std::abs(only_b.v_b[k]) + 1e-300;
      worst = std::max(worst, std::abs(both.v_b[k] - only_a.v_b[k] - only_b.v_b[k]) / scale_vb);
    }
    v.check(linear, "linearity: gain 1/8 on both generators scales every output exactly");
    v.check(worst <= 1e-12, fmt("superposition: max relative residual %.2e (rounding, <= 1e-12)", worst));
  }

  // Determinism of the CLI under --jobs 1 and 8.
  {
    const fs::path dir = fs::temp_directory_path() / "kljn_acceptance_jobs";
    fs::remove_all(dir);
    fs::create_directories(dir);
    std::ofstream(dir / "cfg.txt") << "n_cal = 50\nrandom_state = true\n";
    const std::string common = "tables --config " + (dir / "cfg.txt").string() + " --trials 40 --seed 3";
    const int a = run_cli(common + " --jobs 1 --out " + (dir / "j1").string());
    const int b = run_cli(common + " --jobs 8 --out " + (dir / "j8").string());
    bool identical = a == 0 && b == 0;
    for (int k = 1; k <= 4 && identical; ++k) {
      const std::string f = "scenario" + std::to_string(k) + ".csv";
      identical = fs::exists(dir / "j1" / f) && slurp(dir / "j1" / f) == slurp(dir / "j8" / f);
    }
    identical = identical && slurp(dir / "j1" / "run_metadata.txt") == slurp(dir / "j8" / "run_metadata.txt");
    v.check(identical, "determinism: tables output byte-identical under --jobs 1 and --jobs 8");
  }
  return v;
}

std::vector<std::vector<double>> read_tsv(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::getline(in, line);
  std::vector<std::vector<double>> rows;
  while (std::getline(in, line)) {
    std::istringstream s(line);
    std::vector<double> row;
    double x;
    while (s >> x) row.push_back(x);
    rows.push_back(row);
  }
  return rows;
}

// 10. Reflection step in the scenario-1 dump, none in scenario 4.
Verdict criterion_10() {
  Verdict v;
  const fs::path dir = fs::temp_directory_path() / "kljn_acceptance_waveforms";
  fs::remove_all(dir);
  for (int scenario : {1, 4}) {
    const int code = run_cli("waveforms --scenario " + std::to_string(scenario) + " --out " + dir.string());
    const auto rows = read_tsv(dir / ("waveforms_scenario" + std::to_string(scenario) + ".tsv"));
    if (code != 0 || rows.size() < 2 * kDefaults.dt_divisor) {
      v.check(false, fmt("scenario %d: waveform dump missing (exit %d)", scenario, code));
      continue;
    }
    const std::size_t d = kDefaults.dt_divisor;
    std::vector<double> steps;
    for (std::size_t k = 1; k < rows.size(); ++k) steps.push_back(std::abs(rows[k][3] - rows[k - 1][3]));
    const double jump = steps[d - 1];  // v_a at t_f minus the sample before
    std::vector<double> sorted = steps;
    std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2, sorted.end());
    const double median = sorted[sorted.size() / 2];
    const double ratio = jump / median;
    if (scenario == 1) {
      v.check(ratio > 10.0, fmt("scenario 1: jump at t_f = %.3g V is %.1f x the median step (> 10)", jump, ratio));
    } else {
      v.check(ratio <= 10.0, fmt("scenario 4: jump at t_f = %.3g V is %.2f x the median step (<= 10)", jump, ratio));
    }
  }
  return v;
}

const std::map<int, std::pair<const char*, std::function<Verdict()>>>& criteria() {
  static const std::map<int, std::pair<const char*, std::function<Verdict()>>> table{
      {1, {"line engine matches bounce-diagram oracle", criterion_1}},
      {2, {"first-fly-time decision identity", criterion_2}},
      {3, {"scenario 1 leak magnitude", criterion_3}},
      {4, {"scenario 2 leak magnitude", criterion_4}},
      {5, {"scenario 3 partial defense", criterion_5}},
      {6, {"scenario 4 full defense", criterion_6}},
      {7, {"steady-state identities", criterion_7}},
      {8, {"noise quality", criterion_8}},
      {9, {"property suite", criterion_9}},
      {10, {"reflection step signature in waveform dumps", criterion_10}},
  };
  return table;
}

}  // namespace

int main(int argc, char** argv) {
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    const std::string arg = argv[i];
    if (arg == "--criterion" && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else if (arg == "--jobs" && i + 1 < argc) {
      g_jobs = static_cast<unsigned>(std::max(1, std::atoi(argv[++i])));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]... [--jobs N]\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty()) {
    for (const auto& [n, c] : criteria()) selected.push_back(n);
  }

  bool all = true;
  for (int n : selected) {
    const auto it = criteria().find(n);
    if (it == criteria().end()) {
      std::fprintf(stderr, "no criterion %d\n", n);
      return 2;
    }
    Verdict v;
    try {
      v = it->second.second();
    } catch (const std::exception& e) {
      v.check(false, std::string("exception: ") + e.what());
    }
    all = all && v.pass;
    std::printf("criterion %d: %s  %s\n", n, v.pass ? "PASS" : "FAIL", it->second.first);
    for (const auto& d : v.details) std::printf("    %s\n", d.c_str());
    std::fflush(stdout);
  }
  return all ? 0 : 1;
}
