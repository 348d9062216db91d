#include "kljn/line.hpp"

#include <cmath>
#include <string>

#include "kljn/errors.hpp"
#include "kljn/simd/kernels.hpp"

namespace kljn {

double reflection_coefficient(double r, double z0) {
  if (!(z0 > 0.0)) throw InvalidParameter("reflection_coefficient: z0 must be positive");
  if (!(r >= 0.0)) throw InvalidParameter("reflection_coefficient: resistance must be non-negative");
  return (r - z0) / (r + z0);
}

void TrialWaveforms::resize(std::size_t n) {
  for (auto* series : {&ugen_a, &ugen_b, &v_a, &v_b, &i_a, &i_b}) series->assign(n, 0.0);
}

TransmissionLine::TransmissionLine(double z0, double delay, double dt)
    : z0_(z0), delay_(delay), dt_(dt) {
  if (!(z0 > 0.0)) throw InvalidParameter("TransmissionLine: z0 must be positive");
  if (!(dt > 0.0) || !(delay > 0.0)) {
    throw InvalidParameter("TransmissionLine: delay and dt must be positive");
  }
  const double ratio = delay / dt;
  const double steps = std::round(ratio);
  if (steps < 1.0 || std::fabs(ratio - steps) > 1e-9 * steps) {
    throw InvalidParameter("TransmissionLine: delay/dt = " + std::to_string(ratio) +
                           " is not a positive integer");
  }
  wave_ab_.assign(static_cast<std::size_t>(steps), 0.0);
  wave_ba_.assign(static_cast<std::size_t>(steps), 0.0);
}

void TransmissionLine::reset() {
  std::fill(wave_ab_.begin(), wave_ab_.end(), 0.0);
  std::fill(wave_ba_.begin(), wave_ba_.end(), 0.0);
  cursor_ = 0;
}

std::pair<EndState, EndState> TransmissionLine::step(double u_a, double r_a, double u_b,
                                                     double r_b) {
  EndState a, b;
  const double arriving_a = wave_ba_[cursor_];
  const double arriving_b = wave_ab_[cursor_];
  simd::terminate(u_a, arriving_a, r_a, z0_, a.v, a.i, wave_ab_[cursor_]);
  simd::terminate(u_b, arriving_b, r_b, z0_, b.v, b.i, wave_ba_[cursor_]);
  cursor_ = (cursor_ + 1) % wave_ab_.size();
  return {a, b};
}

void TransmissionLine::advance(std::span<const double> u_a, double r_a,
                               std::span<const double> u_b, double r_b, std::span<double> v_a,
                               std::span<double> v_b, std::span<double> i_a,
                               std::span<double> i_b) {
  const std::size_t n = u_a.size();
  if (u_b.size() != n || v_a.size() != n || v_b.size() != n || i_a.size() != n ||
      i_b.size() != n) {
    throw InvalidParameter("TransmissionLine::advance: series lengths differ");
  }
  const auto& kern = simd::kernels();
  const simd::Terminations terms{r_a, r_b, z0_};
  const std::size_t lanes = wave_ab_.size();

  // Lanes cursor..cursor+count-1 never wrap, so every lane reads a wave that
  // was written a full delay earlier.
  std::size_t done = 0;
  while (done < n) {
    const std::size_t count = std::min(lanes - cursor_, n - done);
    kern.propagate(terms, u_a.data() + done, u_b.data() + done, wave_ab_.data() + cursor_,
                   wave_ba_.data() + cursor_, v_a.data() + done, v_b.data() + done,
                   i_a.data() + done, i_b.data() + done, count);
    done += count;
    cursor_ = (cursor_ + count) % lanes;
  }
}

LatticeResponse lattice_step_response(double U, double r_src, double r_load, double z0, double t_f,
                                      double t, double guard) {
  if (!(z0 > 0.0) || !(t_f > 0.0) || !(r_src > 0.0) || !(r_load > 0.0)) {
    throw InvalidParameter("lattice_step_response: z0, t_f and resistances must be positive");
  }
  if (!(t >= 0.0)) throw InvalidParameter("lattice_step_response: t must be non-negative");
  const double nearest = std::round(t / t_f);
  if (nearest >= 1.0 && std::fabs(t - nearest * t_f) < guard) {
    throw InvalidParameter("lattice_step_response: t is at an arrival instant");
  }

  const double gamma_src = reflection_coefficient(r_src, z0);
  const double gamma_load = reflection_coefficient(r_load, z0);
  const double launch = U * z0 / (r_src + z0);

  // Arrivals at the load at (2k+1) t_f carry launch * (gl gs)^k; arrivals back
  // at the source at 2k t_f carry launch * gl^k gs^(k-1).
  const auto load_arrivals = static_cast<long>(std::floor((t + t_f) / (2.0 * t_f)));
  const auto src_arrivals = static_cast<long>(std::floor(t / (2.0 * t_f)));

  LatticeResponse r;
  double incident = launch;
  for (long k = 0; k < load_arrivals; ++k) {
    r.v_load += (1.0 + gamma_load) * incident;
    incident *= gamma_load * gamma_src;
  }
  r.v_src = launch;
  incident = launch * gamma_load;
  for (long k = 1; k <= src_arrivals; ++k) {
    r.v_src += (1.0 + gamma_src) * incident;
    incident *= gamma_src * gamma_load;
  }
  r.i_src = (U - r.v_src) / r_src;
  r.i_load = -r.v_load / r_load;
  return r;
}

TrialWaveforms run_transient(const PhysicalConfig& config, const GeneratorDrive& gen_a, double r_a,
                             const GeneratorDrive& gen_b, double r_b, std::size_t n_steps) {
  if (!(r_a > 0.0) || !(r_b > 0.0)) {
    throw InvalidParameter("run_transient: terminating resistances must be positive");
  }
  for (const GeneratorDrive* g : {&gen_a, &gen_b}) {
    if (g->start > g->samples.size() || g->samples.size() - g->start < n_steps) {
      throw SimulationError("run_transient: generator record exhausted before " +
                            std::to_string(n_steps) + " steps");
    }
  }

  TransmissionLine line(config.z0, config.t_f, config.dt());
  TrialWaveforms w;
  w.dt = config.dt();
  w.resize(n_steps);
  const auto fill = [n_steps](const GeneratorDrive& g, std::vector<double>& out) {
    const double sign = g.negate ? -1.0 : 1.0;
    for (std::size_t k = 0; k < n_steps; ++k) out[k] = sign * g.samples[g.start + k];
  };
  fill(gen_a, w.ugen_a);
  fill(gen_b, w.ugen_b);
  line.advance(w.ugen_a, r_a, w.ugen_b, r_b, w.v_a, w.v_b, w.i_a, w.i_b);
  return w;
}

}  // namespace kljn
