#include <filesystem>
#include <fstream>
#include <iostream>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "kinoatlas/models.hpp"
#include "kinoatlas/planner.hpp"
#include "kinoatlas/problem_io.hpp"
#include "kinoatlas/simulate.hpp"

namespace fs = std::filesystem;
using namespace kinoatlas;

namespace {

void write_stats_tsv(std::ostream& os, const RunStats& s) {
  // wall time is reported on stdout only, keeping the file byte-reproducible
  os << "samples\tcharts\tnodes_fwd\tnodes_bwd\titerations\tsuccess\n";
  os << s.samples << "\t" << s.charts << "\t" << s.nodes_fwd << "\t" << s.nodes_bwd << "\t"
     << s.iterations << "\t" << (s.success ? 1 : 0) << "\n";
}

void print_stats(const RunStats& s) {
  std::cout << "samples=" << s.samples << " charts=" << s.charts << " nodes_fwd=" << s.nodes_fwd
            << " nodes_bwd=" << s.nodes_bwd << " iterations=" << s.iterations
            << " wall_time_s=" << s.wall_time_s << " success=" << (s.success ? 1 : 0) << "\n";
}

std::ofstream open_out(const fs::path& p) {
  std::ofstream f(p);
  if (!f) throw std::runtime_error("cannot write '" + p.string() + "'");
  return f;
}

int cmd_plan(const std::string& problem_path, long seed, long max_iter, const std::string& out_dir,
             bool atlas_dump) {
  Problem p;
  try {
    p = load_problem(problem_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (seed >= 0) p.params.seed = static_cast<std::uint64_t>(seed);
  if (max_iter > 0) p.params.max_iterations = max_iter;

  fs::create_directories(out_dir);
  try {
    PlanResult res = plan(*p.mechanism, p.cs, p.world, p.x_start, p.x_goal, p.params);
    {
      auto f = open_out(fs::path(out_dir) / "trajectory.tsv");
      write_trajectory_tsv(f, res.trajectory, p.cs.nq, p.mechanism->nu());
    }
    {
      auto f = open_out(fs::path(out_dir) / "actions.tsv");
      write_actions_tsv(f, res.trajectory.schedule, p.mechanism->nu());
    }
    {
      auto f = open_out(fs::path(out_dir) / "stats.tsv");
      write_stats_tsv(f, res.stats);
    }
    if (atlas_dump) {
      auto f = open_out(fs::path(out_dir) / "atlas.txt");
      res.atlas.dump(f);
    }
    print_stats(res.stats);
    return 0;
  } catch (const PlanningTimeoutError& e) {
    auto f = open_out(fs::path(out_dir) / "stats.tsv");
    write_stats_tsv(f, e.stats);
    print_stats(e.stats);
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}

int cmd_simulate(const std::string& problem_path, const std::string& actions_path, Scalar free_time,
                 const std::string& integrator, Scalar h, const std::string& out_dir) {
  Problem p;
  ActionSchedule schedule;
  try {
    p = load_problem(problem_path);
    if (!actions_path.empty()) {
      std::ifstream in(actions_path);
      if (!in) throw std::runtime_error("cannot open '" + actions_path + "'");
      schedule = read_action_schedule(in);
      for (const ActionSegment& seg : schedule)
        if (seg.u.size() != p.mechanism->nu())
          throw std::runtime_error("action file: action width does not match the mechanism");
    } else {
      schedule.push_back({p.mechanism->zero_action(), free_time});
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  std::vector<TimedState> series;
  int status = 0;
  try {
    if (integrator == "rk4-ode") {
      integrate_ode_rk4(*p.mechanism, p.cs, p.x_start, schedule, h > 0.0 ? h : 1e-2, series);
    } else {
      SimOptions opts;
      opts.spawn = p.params.spawn_params();
      opts.integrator = p.params.integrator;
      opts.integrator.delta = p.params.delta;
      opts.rho_s = p.params.rho_s;
      opts.eta = p.params.eta_F;
      if (h > 0.0) opts.fixed_h = h;
      integrate_charted(*p.mechanism, p.cs, p.x_start, schedule, opts, series);
    }
  } catch (const std::exception& e) {
    std::cerr << "error: simulation failed after step " << (series.empty() ? 0 : series.size() - 1)
              << (series.empty() ? std::string()
                                 : " (t=" + format_scalar(series.back().t) + ")")
              << ": " << e.what() << "\n";
    status = 3;
  }

  fs::create_directories(out_dir);
  auto f = open_out(fs::path(out_dir) / "series.tsv");
  const Index nq = p.cs.nq;
  f << "t";
  for (Index i = 0; i < nq; ++i) f << "\tq" << i;
  for (Index i = 0; i < nq; ++i) f << "\tqdot" << i;
  f << "\tF_norm\tenergy\n";
  for (const TimedState& s : series) {
    f << format_scalar(s.t);
    for (Index i = 0; i < 2 * nq; ++i) f << "\t" << format_scalar(s.x[i]);
    f << "\t" << format_scalar(eval_F(p.cs, s.x).lpNorm<Eigen::Infinity>()) << "\t"
      << format_scalar(p.mechanism->total_energy(s.x)) << "\n";
  }
  if (!series.empty()) {
    Scalar max_drift = 0.0;
    for (const TimedState& s : series)
      max_drift = std::max(max_drift, eval_F(p.cs, s.x).lpNorm<Eigen::Infinity>());
    std::cout << "steps=" << series.size() - 1 << " t_end=" << series.back().t
              << " max_F_norm=" << max_drift << "\n";
  }
  return status;
}

int cmd_bench(const std::string& problem_path, std::vector<long> seeds,
              std::vector<Scalar> torque_sweep, const std::string& out_dir) {
  nlohmann::json root;
  try {
    std::ifstream in(problem_path);
    if (!in) throw std::runtime_error("cannot open '" + problem_path + "'");
    root = nlohmann::json::parse(in);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  if (seeds.empty()) seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};

  struct Row {
    Scalar tau;
    long runs = 0, successes = 0;
    Scalar sum_samples = 0, sum_charts = 0, sum_time = 0;
  };
  std::vector<Row> rows;
  bool any_success = false;

  auto run_one = [&](nlohmann::json j, Scalar tau, long seed, Row& row) {
    if (tau > 0.0) {
      auto& mj = j.at("mechanism");
      if (mj.contains("tau_max"))
        for (auto& v : mj.at("tau_max")) v = tau;
      else
        mj["torque_max"] = tau;
    }
    j["params"]["seed"] = seed;
    Problem p = parse_problem(j);
    ++row.runs;
    try {
      PlanResult res = plan(*p.mechanism, p.cs, p.world, p.x_start, p.x_goal, p.params);
      ++row.successes;
      any_success = true;
      row.sum_samples += static_cast<Scalar>(res.stats.samples);
      row.sum_charts += static_cast<Scalar>(res.stats.charts);
      row.sum_time += res.stats.wall_time_s;
      std::cout << "tau=" << tau << " seed=" << seed << " ";
      print_stats(res.stats);
    } catch (const PlanningTimeoutError& e) {
      std::cout << "tau=" << tau << " seed=" << seed << " TIMEOUT ";
      print_stats(e.stats);
    }
  };

  std::vector<Scalar> taus = torque_sweep;
  if (taus.empty()) taus = {-1.0};  // keep the file's torque limit
  for (Scalar tau : taus) {
    Row row;
    row.tau = tau;
    for (long seed : seeds) {
      try {
        run_one(root, tau, seed, row);
      } catch (const std::exception& e) {
        std::cerr << "error: tau=" << tau << " seed=" << seed << ": " << e.what() << "\n";
      }
    }
    rows.push_back(row);
  }

  fs::create_directories(out_dir);
  auto f = open_out(fs::path(out_dir) / "bench.tsv");
  f << "tau_max\truns\tsuccesses\tmean_samples\tmean_charts\tmean_time_s\n";
  for (const Row& r : rows) {
    const Scalar n = static_cast<Scalar>(std::max<long>(r.successes, 1));
    f << format_scalar(r.tau) << "\t" << r.runs << "\t" << r.successes << "\t"
      << format_scalar(r.sum_samples / n) << "\t" << format_scalar(r.sum_charts / n) << "\t"
      << format_scalar(r.sum_time / n) << "\n";
  }
  return any_success ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Kinodynamic RRT planning on constraint manifolds"};
  app.require_subcommand(1);

  std::string problem, out_dir = ".", actions_path, integrator = "atlas-trap";
  long seed = -1, max_iter = -1;
  bool atlas_dump = false;
  Scalar h = -1.0, free_time = 1.0;
  std::vector<long> seeds;
  std::vector<Scalar> torques;

  auto* plan_cmd = app.add_subcommand("plan", "plan a trajectory for a problem file");
  plan_cmd->add_option("problem", problem, "problem JSON file")->required();
  plan_cmd->add_option("--seed", seed, "RNG seed (overrides the file)");
  plan_cmd->add_option("--max-iter", max_iter, "iteration cap (overrides the file)");
  plan_cmd->add_option("--out", out_dir, "output directory");
  plan_cmd->add_flag("--atlas-dump", atlas_dump, "also write atlas.txt");

  auto* sim_cmd = app.add_subcommand("simulate", "replay an action sequence");
  sim_cmd->add_option("problem", problem, "problem JSON file")->required();
  sim_cmd->add_option("actions", actions_path, "actions.tsv or trajectory.tsv");
  sim_cmd->add_option("--free", free_time, "simulate the zero action for this long instead");
  sim_cmd->add_option("--integrator", integrator, "atlas-trap (default) or rk4-ode")
      ->check(CLI::IsMember({"atlas-trap", "rk4-ode"}));
  sim_cmd->add_option("--h", h, "fixed step size (default: adaptive / 1e-2 for rk4)");
  sim_cmd->add_option("--out", out_dir, "output directory");

  auto* bench_cmd = app.add_subcommand("bench", "seed/torque sweep");
  bench_cmd->add_option("problem", problem, "problem JSON file")->required();
  bench_cmd->add_option("--seeds", seeds, "seeds to run (default 1..10)");
  bench_cmd->add_option("--torque-sweep", torques, "tau_max values to sweep");
  bench_cmd->add_option("--out", out_dir, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (plan_cmd->parsed()) return cmd_plan(problem, seed, max_iter, out_dir, atlas_dump);
    if (sim_cmd->parsed())
      return cmd_simulate(problem, actions_path, free_time, integrator, h, out_dir);
    if (bench_cmd->parsed()) return cmd_bench(problem, seeds, torques, out_dir);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 1;
}
