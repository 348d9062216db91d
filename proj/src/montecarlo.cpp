#include "kljn/montecarlo.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <random>
#include <tuple>

#include "kljn/errors.hpp"
#include "kljn/parallel.hpp"
#include "kljn/simd/kernels.hpp"
#include "kljn/streams.hpp"

namespace kljn {

double standard_error(double p, std::size_t n) {
  if (!(p >= 0.0 && p <= 1.0)) throw InvalidParameter("standard_error: p must lie in [0, 1]");
  if (n < 1) throw InvalidParameter("standard_error: n must be at least 1");
  return std::sqrt(p * (1.0 - p) / static_cast<double>(n));
}

ExperimentSummary run_experiment(const PhysicalConfig& config, ScenarioKind scenario,
                                 std::span<const double> taus, const ExperimentOptions& options) {
  config.validate();
  if (options.n_trials < 1) throw InvalidParameter("run_experiment: n_trials must be at least 1");
  if (taus.empty()) throw InvalidParameter("run_experiment: empty tau list");
  const double dt = config.dt();
  double longest = 0.0;
  for (double tau : taus) {
    const double steps = tau / dt;
    if (!(tau > 0.0) || std::fabs(steps - std::round(steps)) > 1e-9 * std::round(steps)) {
      throw InvalidParameter("run_experiment: every tau must be a positive multiple of dt");
    }
    longest = std::max(longest, tau);
  }

  ExperimentSummary summary;
  summary.master_seed = options.master_seed;
  summary.signs = calibrate_sign(scenario, taus, config, options.simulation, options.n_cal,
                                 options.master_seed, options.jobs);

  const std::size_t m = taus.size();
  summary.trials.resize(options.n_trials);
  parallel_for(options.n_trials, options.jobs, [&](std::size_t trial) {
    const std::uint64_t trial_seed =
        derive_seed({options.master_seed, static_cast<std::uint64_t>(Phase::Evaluation), trial});
    BitState truth = BitState::HL;
    if (options.random_state) {
      auto engine = make_engine(trial_seed, Purpose::State);
      truth = std::bernoulli_distribution(0.5)(engine) ? BitState::HL : BitState::LH;
    }
    const PartySeeds seeds{party_seed(options.master_seed, Phase::Evaluation, trial, Party::Alice),
                           party_seed(options.master_seed, Phase::Evaluation, trial, Party::Bob)};
    const BepTrial bep = run_bep_trial(scenario, truth, config, options.simulation, seeds, longest);

    TrialRecord& rec = summary.trials[trial];
    rec.truth = truth;
    rec.loosened = bep.loosened;
    for (std::size_t k = 0; k < m; ++k) {
      const AttackStat stat = attack_stat(bep.waveforms, taus[k]);
      auto coin_engine = make_engine(trial_seed, Purpose::Coin, k);
      const bool coin = std::bernoulli_distribution(0.5)(coin_engine);
      rec.stats.push_back(stat);
      rec.guess_v.push_back(eve_decide(stat, summary.signs[k], Channel::Voltage, coin));
      rec.guess_i.push_back(eve_decide(stat, summary.signs[k], Channel::Current, coin));
    }
  });

  for (const TrialRecord& rec : summary.trials) summary.loosened_trials += rec.loosened ? 1 : 0;
  const auto n = options.n_trials;
  const double loosened_fraction =
      static_cast<double>(summary.loosened_trials) / static_cast<double>(n);
  for (std::size_t k = 0; k < m; ++k) {
    std::size_t right_v = 0, right_i = 0;
    for (const TrialRecord& rec : summary.trials) {
      right_v += rec.guess_v[k] == rec.truth ? 1 : 0;
      right_i += rec.guess_i[k] == rec.truth ? 1 : 0;
    }
    SummaryRow row;
    row.scenario = scenario;
    row.tau = taus[k];
    row.n = n;
    row.p_ev = static_cast<double>(right_v) / static_cast<double>(n);
    row.p_ei = static_cast<double>(right_i) / static_cast<double>(n);
    row.se_v = standard_error(row.p_ev, n);
    row.se_i = standard_error(row.p_ei, n);
    row.loosened_fraction = loosened_fraction;
    summary.rows.push_back(row);
  }
  return summary;
}

bool SteadyStateReport::passed() const {
  for (const Check& c : checks) {
    if (!c.pass) return false;
  }
  return !checks.empty();
}

namespace {

// Running sums of the six steady-state products, split into equal batches.
class BatchMoments {
 public:
  BatchMoments(std::size_t samples, std::size_t batches)
      : per_batch_(samples / batches), sums_(batches, std::array<double, 6>{}) {}

  std::size_t capacity() const { return per_batch_ * sums_.size(); }

  void add(std::size_t index, std::span<const double> va, std::span<const double> vb,
           std::span<const double> ia, std::span<const double> ib) {
    const auto& kern = simd::kernels();
    std::size_t offset = 0;
    while (offset < va.size() && index < capacity()) {
      const std::size_t batch = index / per_batch_;
      const std::size_t count =
          std::min({va.size() - offset, per_batch_ - index % per_batch_, capacity() - index});
      auto& s = sums_[batch];
      s[0] += kern.sum_squares(va.data() + offset, count);
      s[1] += kern.sum_squares(vb.data() + offset, count);
      s[2] += kern.sum_squares(ia.data() + offset, count);
      s[3] += kern.sum_squares(ib.data() + offset, count);
      s[4] += kern.dot(va.data() + offset, ia.data() + offset, count);
      s[5] += kern.dot(vb.data() + offset, ib.data() + offset, count);
      offset += count;
      index += count;
    }
  }

  // Mean and standard error of quantity q over batch means.
  std::pair<double, double> stat(std::size_t q) const {
    const double nb = static_cast<double>(sums_.size());
    double mean = 0.0;
    for (const auto& s : sums_) mean += s[q] / static_cast<double>(per_batch_);
    mean /= nb;
    double var = 0.0;
    for (const auto& s : sums_) {
      const double d = s[q] / static_cast<double>(per_batch_) - mean;
      var += d * d;
    }
    var /= nb - 1.0;
    return {mean, std::sqrt(var / nb)};
  }

 private:
  std::size_t per_batch_;
  std::vector<std::array<double, 6>> sums_;
};

struct Ends {
  double r_a, r_b;
};

Ends ends_of(const PhysicalConfig& config, BitState state) {
  switch (state) {
    case BitState::HL: return {config.r_h, config.r_l};
    case BitState::LH: return {config.r_l, config.r_h};
    case BitState::HH: return {config.r_h, config.r_h};
    case BitState::LL: return {config.r_l, config.r_l};
  }
  return {config.r_h, config.r_l};
}

constexpr std::size_t kBatches = 100;

}  // namespace

EndMoments steady_state_moments(const PhysicalConfig& config, BitState state,
                                const PartySeeds& seeds, std::size_t n) {
  const Ends ends = ends_of(config, state);
  const double dt = config.dt();
  const auto record_for = [&](std::uint64_t seed, double r) {
    return synthesize_record(derive_seed({seed, static_cast<std::uint64_t>(Purpose::Record), 0}),
                             n, dt, config.bandwidth,
                             johnson_rms(config.temperature, r, config.bandwidth));
  };
  const NoiseRecord gen_a = record_for(seeds.alice, ends.r_a);
  const NoiseRecord gen_b = record_for(seeds.bob, ends.r_b);

  const std::size_t settle = n / 100;
  BatchMoments acc(n - settle, kBatches);
  TransmissionLine line(config.z0, config.t_f, dt);
  constexpr std::size_t kChunk = 1 << 16;
  std::vector<double> va(kChunk), vb(kChunk), ia(kChunk), ib(kChunk);
  for (std::size_t start = 0; start < n; start += kChunk) {
    const std::size_t count = std::min(kChunk, n - start);
    line.advance(std::span(gen_a.samples).subspan(start, count), ends.r_a,
                 std::span(gen_b.samples).subspan(start, count), ends.r_b,
                 std::span(va).first(count), std::span(vb).first(count),
                 std::span(ia).first(count), std::span(ib).first(count));
    // Skip the settling prefix.
    std::size_t skip = start < settle ? std::min(count, settle - start) : 0;
    if (skip < count) {
      const std::size_t len = count - skip;
      acc.add(start + skip - settle, std::span(va).subspan(skip, len),
              std::span(vb).subspan(skip, len), std::span(ia).subspan(skip, len),
              std::span(ib).subspan(skip, len));
    }
  }

  EndMoments m;
  std::tie(m.ms_v_a, m.se_v_a) = acc.stat(0);
  std::tie(m.ms_v_b, m.se_v_b) = acc.stat(1);
  std::tie(m.ms_i_a, m.se_i_a) = acc.stat(2);
  std::tie(m.ms_i_b, m.se_i_b) = acc.stat(3);
  std::tie(m.power_a, m.se_power_a) = acc.stat(4);
  std::tie(m.power_b, m.se_power_b) = acc.stat(5);
  return m;
}

EndMoments cable_loaded_moments(const PhysicalConfig& config, BitState state, std::size_t n) {
  using cplx = std::complex<double>;
  const Ends ends = ends_of(config, state);
  const double dt = config.dt();
  const double z0 = config.z0;
  const double var_a = std::pow(johnson_rms(config.temperature, ends.r_a, config.bandwidth), 2);
  const double var_b = std::pow(johnson_rms(config.temperature, ends.r_b, config.bandwidth), 2);
  const double gamma_a = reflection_coefficient(ends.r_a, z0);
  const double gamma_b = reflection_coefficient(ends.r_b, z0);
  const double launch_a = 2.0 * z0 / (ends.r_a + z0);
  const double launch_b = 2.0 * z0 / (ends.r_b + z0);

  // Same in-band bins as synthesize_record; each carries an equal share of
  // its generator's variance.
  const double in_band = static_cast<double>(n) * dt * config.bandwidth;
  const auto bins = static_cast<std::size_t>(std::floor(in_band * (1.0 + 1e-12)));

  struct Port {
    cplx v_a, i_a, v_b, i_b;
  };
  // Response to unit phasors (u_a, u_b) in the doubled-wave convention of the
  // time-domain engine.
  const auto respond = [&](cplx delay, cplx u_a, cplx u_b) {
    const cplx den = 1.0 - gamma_a * gamma_b * delay * delay;
    const cplx out_a = (launch_a * u_a + gamma_a * launch_b * delay * u_b) / den;
    const cplx out_b = (launch_b * u_b + gamma_b * launch_a * delay * u_a) / den;
    Port p;
    p.i_a = (u_a - out_b * delay) / (ends.r_a + z0);
    p.v_a = u_a - ends.r_a * p.i_a;
    p.i_b = (u_b - out_a * delay) / (ends.r_b + z0);
    p.v_b = u_b - ends.r_b * p.i_b;
    return p;
  };

  EndMoments m;
  for (std::size_t k = 1; k <= bins && k < n / 2; ++k) {
    const double f = static_cast<double>(k) / (static_cast<double>(n) * dt);
    const cplx delay = std::polar(1.0, -2.0 * std::numbers::pi * f * config.t_f);
    const double wa = var_a / static_cast<double>(bins);
    const double wb = var_b / static_cast<double>(bins);
    const Port from_a = respond(delay, 1.0, 0.0);
    const Port from_b = respond(delay, 0.0, 1.0);
    m.ms_v_a += wa * std::norm(from_a.v_a) + wb * std::norm(from_b.v_a);
    m.ms_v_b += wa * std::norm(from_a.v_b) + wb * std::norm(from_b.v_b);
    m.ms_i_a += wa * std::norm(from_a.i_a) + wb * std::norm(from_b.i_a);
    m.ms_i_b += wa * std::norm(from_a.i_b) + wb * std::norm(from_b.i_b);
    m.power_a += wa * std::real(from_a.v_a * std::conj(from_a.i_a)) +
                 wb * std::real(from_b.v_a * std::conj(from_b.i_a));
    m.power_b += wa * std::real(from_a.v_b * std::conj(from_a.i_b)) +
                 wb * std::real(from_b.v_b * std::conj(from_b.i_b));
  }
  return m;
}

SteadyStateReport validate_steady_state(const PhysicalConfig& config, double duration,
                                        std::uint64_t seed) {
  config.validate();
  const double minimum = 1000.0 / config.bandwidth;
  if (!(duration >= minimum)) {
    throw InvalidParameter("validate_steady_state: duration must be at least 1000/B = " +
                           std::to_string(minimum) + " s");
  }
  const auto n = static_cast<std::size_t>(std::llround(duration / config.dt()));

  const PartySeeds hl_seeds{party_seed(seed, Phase::SteadyState, 0, Party::Alice),
                            party_seed(seed, Phase::SteadyState, 0, Party::Bob)};
  const PartySeeds lh_seeds{party_seed(seed, Phase::SteadyState, 1, Party::Alice),
                            party_seed(seed, Phase::SteadyState, 1, Party::Bob)};
  const EndMoments hl = steady_state_moments(config, BitState::HL, hl_seeds, n);
  const EndMoments lh = steady_state_moments(config, BitState::LH, lh_seeds, n);
  const EndMoments model = cable_loaded_moments(config, BitState::HL, n);

  const ResultantResistances rr = resultant_resistances(config.r_h, config.r_l);
  const double ideal_v = steady_state_levels(config).hl;
  const double ideal_i = 4.0 * config.boltzmann * config.temperature * config.bandwidth / rr.serial;

  SteadyStateReport report;
  report.duration = duration;
  const auto relative = [&](std::string name, double measured, double se, double expected) {
    const double tol = 0.02 * std::fabs(expected);
    report.checks.push_back(
        {std::move(name), measured, expected, se, tol, std::fabs(measured - expected) <= tol});
  };
  const auto within_se = [&](std::string name, double measured, double se, double expected) {
    const double tol = 3.0 * se;
    report.checks.push_back(
        {std::move(name), measured, expected, se, tol, std::fabs(measured - expected) <= tol});
  };
  const auto combined = [](double a, double b) { return std::sqrt(a * a + b * b); };

  relative("HL wire voltage mean square (Alice end) vs 4kT*Rp*B", hl.ms_v_a, hl.se_v_a, ideal_v);
  relative("HL wire current mean square (Alice end) vs 4kT*B/Rs", hl.ms_i_a, hl.se_i_a, ideal_i);
  within_se("HL-LH wire voltage mean-square difference (Alice end)", hl.ms_v_a - lh.ms_v_a,
            combined(hl.se_v_a, lh.se_v_a), 0.0);
  within_se("HL-LH wire current mean-square difference (Alice end)", hl.ms_i_a - lh.ms_i_a,
            combined(hl.se_i_a, lh.se_i_a), 0.0);
  within_se("HL mean power flow into cable (Alice end)", hl.power_a, hl.se_power_a, 0.0);
  within_se("HL mean power flow into cable (Bob end)", hl.power_b, hl.se_power_b, 0.0);
  within_se("HL voltage mean square (Alice end) vs cable-loaded model", hl.ms_v_a, hl.se_v_a,
            model.ms_v_a);
  within_se("HL voltage mean square (Bob end) vs cable-loaded model", hl.ms_v_b, hl.se_v_b,
            model.ms_v_b);
  within_se("HL current mean square (Alice end) vs cable-loaded model", hl.ms_i_a, hl.se_i_a,
            model.ms_i_a);
  within_se("HL current mean square (Bob end) vs cable-loaded model", hl.ms_i_b, hl.se_i_b,
            model.ms_i_b);
  return report;
}

}  // namespace kljn
