#pragma once

// Lossless transmission line with resistive Thevenin terminations, stepped
// on a fixed grid that divides the fly time exactly.
//
// The state is the pair of doubled traveling waves in flight: a wave launched
// from one end at step n arrives at the other end at step n + delay/dt. At an
// end with generator u, series resistance r and arriving doubled wave b:
//   i = (u - b) / (r + z0),  v = u - r i,  launched doubled wave = v + z0 i,
// with i positive when flowing from the terminating network into the cable.

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include "kljn/noise.hpp"
#include "kljn/physical_config.hpp"

namespace kljn {

/// (R - z0) / (R + z0).
double reflection_coefficient(double r, double z0);

struct EndState {
  double v = 0.0;  // V
  double i = 0.0;  // A, into the cable
};

/// Time series of one bit-exchange transient, sample n at t = n * dt.
struct TrialWaveforms {
  double dt = 0.0;
  std::vector<double> ugen_a, ugen_b;
  std::vector<double> v_a, v_b;
  std::vector<double> i_a, i_b;

  std::size_t size() const { return v_a.size(); }
  void resize(std::size_t n);
};

class TransmissionLine {
 public:
  /// Throws InvalidParameter unless z0 > 0, dt > 0 and delay/dt is a positive
  /// integer (to 1e-9 relative).
  TransmissionLine(double z0, double delay, double dt);

  double z0() const { return z0_; }
  double delay() const { return delay_; }
  double dt() const { return dt_; }
  std::size_t delay_steps() const { return wave_ab_.size(); }

  /// Back to an idle cable.
  void reset();

  /// One time step; returns the states at A and B.
  std::pair<EndState, EndState> step(double u_a, double r_a, double u_b, double r_b);

  /// u_a.size() steps at once; outputs must have the same length.
  void advance(std::span<const double> u_a, double r_a, std::span<const double> u_b, double r_b,
               std::span<double> v_a, std::span<double> v_b, std::span<double> i_a,
               std::span<double> i_b);

 private:
  double z0_;
  double delay_;
  double dt_;
  std::vector<double> wave_ab_;  // launched at A, in flight to B
  std::vector<double> wave_ba_;  // launched at B, in flight to A
  std::size_t cursor_ = 0;
};

/// Closed-form bounce-diagram response of a cold line to a source step U
/// applied at t = 0 through r_src, far end terminated by r_load.
struct LatticeResponse {
  double v_src = 0.0;
  double v_load = 0.0;
  double i_src = 0.0;   // into the cable at the source end
  double i_load = 0.0;  // into the cable at the load end
};

/// Throws InvalidParameter if t lies within `guard` of an arrival instant
/// k * t_f (k >= 1), where the response is discontinuous.
LatticeResponse lattice_step_response(double U, double r_src, double r_load, double z0, double t_f,
                                      double t, double guard);

/// A generator as driven during a trial: samples from `start` onward, negated
/// if requested. The value before the start instant is irrelevant because
/// the cable is connected at step 0.
struct GeneratorDrive {
  std::span<const double> samples;
  std::size_t start = 0;
  bool negate = false;
};

inline GeneratorDrive drive_of(const NoiseRecord& record, const StartPoint& start) {
  return {record.view(), start.index, start.negate};
}

/// Runs a cold line for n_steps with both generators connected at step 0.
/// Throws SimulationError if a generator runs out of samples.
TrialWaveforms run_transient(const PhysicalConfig& config, const GeneratorDrive& gen_a, double r_a,
                             const GeneratorDrive& gen_b, double r_b, std::size_t n_steps);

}  // namespace kljn
