#pragma once

#include <stdexcept>
#include <string>

namespace cavcoord {

/// Malformed or invariant-violating scenario / geometry input.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// No feasible (or no safe) exit time exists for a vehicle.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Reading or writing run artifacts failed.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cavcoord
