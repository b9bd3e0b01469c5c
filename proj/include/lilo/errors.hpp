#pragma once

#include <stdexcept>
#include <string>

namespace lilo {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Bad input: malformed config, scene, or CLI usage. CLI maps this to exit code 2.
struct ConfigError : Error {
  using Error::Error;
};

/// A state or result violated an internal contract. CLI maps this to exit code 3.
struct InvariantViolation : Error {
  using Error::Error;
};

struct UnknownObject : Error {
  explicit UnknownObject(const std::string& id) : Error("unknown object id: " + id) {}
};

struct MissingOffset : Error {
  using Error::Error;
};

struct AngleNearPi : Error {
  AngleNearPi() : Error("rotation angle too close to pi for a stable logarithm") {}
};

struct DimensionMismatch : Error {
  using Error::Error;
};

struct EmptyResults : Error {
  EmptyResults() : Error("metrics require at least one trial result") {}
};

struct TooLarge : Error {
  using Error::Error;
};

struct NotIndependentPairs : Error {
  using Error::Error;
};

struct NoPriorPick : Error {
  using Error::Error;
};

}  // namespace lilo
