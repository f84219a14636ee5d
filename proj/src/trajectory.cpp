#include "kinoatlas/trajectory.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>

namespace kinoatlas {

std::string format_scalar(Scalar v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void write_trajectory_tsv(std::ostream& os, const Trajectory& traj, Index nq, Index nu) {
  os << "t";
  for (Index i = 0; i < nq; ++i) os << "\tq" << i;
  for (Index i = 0; i < nq; ++i) os << "\tqdot" << i;
  for (Index i = 0; i < nu; ++i) os << "\tu" << i;
  os << "\n";
  for (const TrajectorySample& s : traj.samples) {
    os << format_scalar(s.t);
    for (Index i = 0; i < 2 * nq; ++i) os << "\t" << format_scalar(s.x[i]);
    for (Index i = 0; i < nu; ++i)
      os << "\t" << format_scalar(s.u.size() == nu ? s.u[i] : 0.0);
    os << "\n";
  }
}

void write_actions_tsv(std::ostream& os, const ActionSchedule& schedule, Index nu) {
  os << "duration";
  for (Index i = 0; i < nu; ++i) os << "\tu" << i;
  os << "\n";
  for (const ActionSegment& seg : schedule) {
    os << format_scalar(seg.duration);
    for (Index i = 0; i < nu; ++i) os << "\t" << format_scalar(seg.u[i]);
    os << "\n";
  }
}

ActionSchedule read_action_schedule(std::istream& is) {
  std::string header;
  if (!std::getline(is, header)) throw std::runtime_error("action file: missing header");

  std::vector<std::string> cols;
  {
    std::istringstream hs(header);
    std::string c;
    while (std::getline(hs, c, '\t')) cols.push_back(c);
  }
  std::vector<int> u_cols;
  int time_col = -1;
  bool durations = false;
  for (size_t i = 0; i < cols.size(); ++i) {
    if (cols[i].rfind("u", 0) == 0 && cols[i].size() > 1) u_cols.push_back(static_cast<int>(i));
    if (cols[i] == "t") time_col = static_cast<int>(i);
    if (cols[i] == "duration") {
      time_col = static_cast<int>(i);
      durations = true;
    }
  }
  if (time_col < 0 || u_cols.empty())
    throw std::runtime_error("action file: need a t/duration column and u columns");

  ActionSchedule schedule;
  std::string line;
  Scalar prev_t = 0.0;
  bool have_prev = false;
  Action prev_u;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream ls(line);
    std::vector<Scalar> vals;
    std::string tok;
    while (std::getline(ls, tok, '\t')) vals.push_back(std::stod(tok));
    if (vals.size() != cols.size()) throw std::runtime_error("action file: ragged row");
    Action u(static_cast<Index>(u_cols.size()));
    for (size_t i = 0; i < u_cols.size(); ++i) u[static_cast<Index>(i)] = vals[u_cols[i]];
    const Scalar tv = vals[static_cast<size_t>(time_col)];
    if (durations) {
      schedule.push_back({u, tv});
      continue;
    }
    // trajectory file: the action column holds the action applied from this
    // sample until the next one
    if (have_prev) {
      const Scalar dt = tv - prev_t;
      if (dt <= 0.0) throw std::runtime_error("action file: time not increasing");
      if (!schedule.empty() && schedule.back().u == prev_u)
        schedule.back().duration += dt;
      else
        schedule.push_back({prev_u, dt});
    }
    prev_t = tv;
    prev_u = u;
    have_prev = true;
  }
  return schedule;
}

}  // namespace kinoatlas
