#pragma once

// Reproducible random streams. Every random quantity in a run is drawn from
// an engine seeded by a tuple of integers (master seed, phase, trial, party,
// purpose, ...), so results never depend on scheduling or worker count.

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace kljn {

enum class Phase : std::uint64_t { Evaluation = 1, Calibration = 2, SteadyState = 3, Waveform = 4 };
enum class Party : std::uint64_t { Alice = 0, Bob = 1 };
enum class Purpose : std::uint64_t { Record = 1, StartIndex = 2, Coin = 3, State = 4 };

inline std::uint64_t derive_seed(std::initializer_list<std::uint64_t> words) {
  std::vector<std::uint32_t> halves;
  halves.reserve(2 * words.size());
  for (std::uint64_t w : words) {
    halves.push_back(static_cast<std::uint32_t>(w & 0xffffffffu));
    halves.push_back(static_cast<std::uint32_t>(w >> 32));
  }
  std::seed_seq seq(halves.begin(), halves.end());
  std::uint32_t out[2];
  seq.generate(out, out + 2);
  return (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
}

/// Base seed of one party's generator in one trial.
inline std::uint64_t party_seed(std::uint64_t master, Phase phase, std::uint64_t trial, Party party) {
  return derive_seed({master, static_cast<std::uint64_t>(phase), trial, static_cast<std::uint64_t>(party)});
}

inline std::mt19937_64 make_engine(std::uint64_t base, Purpose purpose, std::uint64_t index = 0) {
  return std::mt19937_64(derive_seed({base, static_cast<std::uint64_t>(purpose), index}));
}

}  // namespace kljn
