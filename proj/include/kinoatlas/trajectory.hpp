#pragma once

#include <iosfwd>
#include <vector>

#include "kinoatlas/mechanism.hpp"

namespace kinoatlas {

struct ActionSegment {
  Action u;
  Scalar duration = 0.0;  // positive, forward time
};
using ActionSchedule = std::vector<ActionSegment>;

struct TrajectorySample {
  Scalar t = 0.0;
  VectorX x;
  Action u;  // action applied on [t, t_next)
};

struct Trajectory {
  std::vector<TrajectorySample> samples;  // t strictly increasing from 0
  ActionSchedule schedule;                // replay recipe
  Scalar total_time = 0.0;
};

/// Tab-separated trajectory: header `t q0.. qdot0.. u0..`, one sample per
/// line, full precision (round-trips exactly).
void write_trajectory_tsv(std::ostream& os, const Trajectory& traj, Index nq, Index nu);

/// Tab-separated action schedule: header `duration u0..`.
void write_actions_tsv(std::ostream& os, const ActionSchedule& schedule, Index nu);

/// Reads a schedule from either file format. Trajectory files are collapsed
/// into contiguous constant-action segments (replay-equivalent).
ActionSchedule read_action_schedule(std::istream& is);

/// Full-precision decimal formatting used by every TSV writer.
std::string format_scalar(Scalar v);

}  // namespace kinoatlas
