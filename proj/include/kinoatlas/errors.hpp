#pragma once

#include <stdexcept>
#include <string>

namespace kinoatlas {

/// Constraint Jacobian (or the augmented dynamics matrix) lost rank at a
/// configuration; the tangent space is not well defined there.
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Newton iteration for the chart inverse map did not converge; the requested
/// parameter vector is not covered by the chart.
struct LiftDivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Broyden iteration for an implicit integration step did not converge.
struct StepDivergedError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Step-size control would need |h| below the configured minimum.
struct StepTooSmallError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A parameter vector left its chart through the ball boundary, so no
/// neighboring chart covers it.
struct NoNeighborError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace kinoatlas
