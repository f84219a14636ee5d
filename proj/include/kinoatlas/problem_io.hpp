#pragma once

#include <nlohmann/json_fwd.hpp>
#include <string>

#include "kinoatlas/planner.hpp"

namespace kinoatlas {

/// A fully loaded planning problem. Query states have been projected onto the
/// manifold (the file fails to load when the projection cannot reach eta_F).
struct Problem {
  std::shared_ptr<Mechanism> mechanism;
  ConstraintSystem cs;
  World world;
  VectorX x_start;
  VectorX x_goal;
  PlannerParams params;
};

std::shared_ptr<Mechanism> parse_mechanism(const nlohmann::json& j);
World parse_world(const nlohmann::json& j, Index nq);
Problem parse_problem(const nlohmann::json& j);

/// Loads a problem file; throws std::runtime_error with the failing field
/// named in the message.
Problem load_problem(const std::string& path);

}  // namespace kinoatlas
