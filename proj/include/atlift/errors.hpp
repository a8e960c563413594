#pragma once

#include <stdexcept>
#include <string>

namespace atlift {

// Argument outside its mathematical domain (t outside [0,1], z < 0, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Field/grid shape mismatch.
struct DimensionError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Invalid scenario or option combination (unknown metric, unbalanced
// charges, unknown function tag, bad config file, ...).
struct ConfigError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Iterative solver failed to reach its tolerance.
struct SolverError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Line search could not find a decreasing step.
struct StepError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Enumeration problem exceeds the enforced size bound.
struct SizeError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Inputs that were required to agree do not (e.g. liftings of different
// base maps).
struct ConsistencyError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// A plaquette edge difference of exactly +-pi: winding undefined.
struct DegeneratePlaquetteError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Recovery layers of two jump curves overlap at this epsilon.
struct LayerCollisionError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

} // namespace atlift
