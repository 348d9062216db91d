#pragma once

#include <stdexcept>
#include <string>

namespace kljn {

/// A parameter violated an operation's precondition.
class InvalidParameter : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A simulation could not proceed (exhausted record, failed search).
class SimulationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace kljn
