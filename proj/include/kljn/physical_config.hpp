#pragma once

#include <cstddef>

#include "kljn/noise.hpp"

namespace kljn {

/// Physical parameters of one KLJN link. Defaults are the demonstration
/// setup: R_H = 11 kOhm, R_L = 2 kOhm, Z0 = 50 Ohm, T = 7e15 K, B = 5 kHz,
/// t_f = 10 us, sampled at t_f / 100.
struct PhysicalConfig {
  double r_h = 11e3;           // Ohm
  double r_l = 2e3;            // Ohm
  double z0 = 50.0;            // Ohm
  double temperature = 7e15;   // K
  double bandwidth = 5e3;      // Hz
  double t_f = 1e-5;           // s, one-way fly time
  std::size_t dt_divisor = 100;
  double boltzmann = kBoltzmann;

  double dt() const { return t_f / static_cast<double>(dt_divisor); }

  /// Throws InvalidParameter naming the offending field.
  void validate() const;
};

}  // namespace kljn
