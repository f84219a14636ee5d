#include "kinoatlas/problem_io.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "kinoatlas/planar_linkage.hpp"
#include "kinoatlas/point_on_circle.hpp"

namespace kinoatlas {

using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& where, const std::string& what) {
  throw std::runtime_error("problem file: " + where + ": " + what);
}

const json& req(const json& j, const char* key, const std::string& where) {
  auto it = j.find(key);
  if (it == j.end()) fail(where, std::string("missing field '") + key + "'");
  return *it;
}

Scalar num(const json& j, const char* key, const std::string& where) {
  const json& v = req(j, key, where);
  if (!v.is_number()) fail(where, std::string("field '") + key + "' must be a number");
  return v.get<Scalar>();
}

Scalar num_or(const json& j, const char* key, Scalar dflt) {
  return j.contains(key) ? j.at(key).get<Scalar>() : dflt;
}

Vector2 vec2(const json& j, const char* key, const std::string& where) {
  const json& v = req(j, key, where);
  if (!v.is_array() || v.size() != 2) fail(where, std::string("field '") + key + "' must be [x, y]");
  return Vector2(v[0].get<Scalar>(), v[1].get<Scalar>());
}

Vector2 vec2_or(const json& j, const char* key, const Vector2& dflt) {
  return j.contains(key) ? Vector2(j.at(key)[0].get<Scalar>(), j.at(key)[1].get<Scalar>()) : dflt;
}

VectorX vecx(const json& j, const char* key, const std::string& where) {
  const json& v = req(j, key, where);
  if (!v.is_array()) fail(where, std::string("field '") + key + "' must be an array");
  VectorX out(static_cast<Index>(v.size()));
  for (size_t i = 0; i < v.size(); ++i) out[static_cast<Index>(i)] = v[i].get<Scalar>();
  return out;
}

JointType joint_type(const json& j, const std::string& where) {
  const std::string t = j.value("type", "revolute");
  if (t == "revolute") return JointType::Revolute;
  if (t == "prismatic") return JointType::Prismatic;
  fail(where, "joint type must be 'revolute' or 'prismatic'");
}

std::shared_ptr<Mechanism> parse_linkage(const json& j) {
  LinkageSpec s;
  s.name = j.value("name", "linkage");
  s.gravity = vec2_or(j, "gravity", Vector2(0.0, -9.81));

  for (const json& lj : req(j, "links", "mechanism")) {
    LinkSpec l;
    l.name = lj.value("name", "");
    l.mass = num(lj, "mass", "mechanism.links");
    l.length = num(lj, "length", "mechanism.links");
    l.inertia = num_or(lj, "inertia", l.mass * l.length * l.length / 12.0);
    l.com = vec2_or(lj, "com", Vector2(0.5 * l.length, 0.0));
    s.links.push_back(l);
  }
  for (const json& jj : req(j, "joints", "mechanism")) {
    JointSpec jt;
    jt.type = joint_type(jj, "mechanism.joints");
    jt.parent = jj.value("parent", -1);
    jt.child = static_cast<int>(num(jj, "child", "mechanism.joints"));
    jt.anchor = vec2(jj, "anchor", "mechanism.joints");
    jt.mount_angle = num_or(jj, "mount_angle", 0.0);
    jt.axis = vec2_or(jj, "axis", Vector2(1.0, 0.0));
    s.joints.push_back(jt);
  }
  for (const json& cj : req(j, "loop_closures", "mechanism")) {
    ClosureSpec cl;
    cl.type = joint_type(cj, "mechanism.loop_closures");
    cl.link_a = static_cast<int>(num(cj, "link_a", "mechanism.loop_closures"));
    cl.link_b = cj.value("link_b", -1);
    cl.anchor_a = vec2(cj, "anchor_a", "mechanism.loop_closures");
    cl.anchor_b = vec2(cj, "anchor_b", "mechanism.loop_closures");
    cl.mount_angle = num_or(cj, "mount_angle", 0.0);
    cl.axis = vec2_or(cj, "axis", Vector2(1.0, 0.0));
    s.closures.push_back(cl);
  }
  for (const json& a : req(j, "actuated", "mechanism")) s.actuated.push_back(a.get<int>());
  s.tau_max = vecx(j, "tau_max", "mechanism");
  if (j.contains("springs")) {
    for (const json& sj : j.at("springs")) {
      SpringSpec sp;
      const std::string t = sj.value("type", "linear");
      sp.stiffness = num(sj, "stiffness", "mechanism.springs");
      sp.rest = num_or(sj, "rest", 0.0);
      if (t == "torsional") {
        sp.type = SpringSpec::Type::Torsional;
        sp.coord = static_cast<int>(num(sj, "coord", "mechanism.springs"));
      } else if (t == "linear") {
        sp.type = SpringSpec::Type::Linear;
        sp.link_a = static_cast<int>(num(sj, "link_a", "mechanism.springs"));
        sp.link_b = sj.value("link_b", -1);
        sp.point_a = vec2(sj, "point_a", "mechanism.springs");
        sp.point_b = vec2(sj, "point_b", "mechanism.springs");
      } else {
        fail("mechanism.springs", "spring type must be 'torsional' or 'linear'");
      }
      s.springs.push_back(sp);
    }
  }
  try {
    return std::make_shared<PlanarLinkage>(std::move(s));
  } catch (const std::invalid_argument& e) {
    fail("mechanism", e.what());
  }
}

}  // namespace

std::shared_ptr<Mechanism> parse_mechanism(const json& j) {
  const std::string type = req(j, "type", "mechanism").get<std::string>();
  if (type == "planar_linkage") return parse_linkage(j);
  if (type == "point_on_circle") {
    PointOnCircle::Params p;
    p.mass = num_or(j, "mass", 1.0);
    p.length = num_or(j, "length", 1.0);
    p.torque_max = num_or(j, "torque_max", 6.0);
    p.gravity = vec2_or(j, "gravity", Vector2(0.0, -9.81));
    return std::make_shared<PointOnCircle>(p);
  }
  fail("mechanism", "unknown type '" + type + "'");
}

World parse_world(const json& j, Index nq) {
  World w;
  if (j.contains("obstacles")) {
    for (const json& oj : j.at("obstacles")) {
      const std::string t = req(oj, "type", "world.obstacles").get<std::string>();
      if (t == "circle") {
        CircleObstacle o{vec2(oj, "center", "world.obstacles"),
                         num(oj, "radius", "world.obstacles")};
        if (o.radius <= 0.0) fail("world.obstacles", "circle radius must be positive");
        w.circles.push_back(o);
      } else if (t == "segment") {
        w.segments.push_back({vec2(oj, "a", "world.obstacles"), vec2(oj, "b", "world.obstacles"),
                              num_or(oj, "radius", 0.0)});
      } else if (t == "box") {
        BoxObstacle o{vec2(oj, "min", "world.obstacles"), vec2(oj, "max", "world.obstacles")};
        if (o.lo.x() >= o.hi.x() || o.lo.y() >= o.hi.y())
          fail("world.obstacles", "box needs min < max componentwise");
        w.boxes.push_back(o);
      } else {
        fail("world.obstacles", "unknown obstacle type '" + t + "'");
      }
    }
  }
  if (j.contains("workspace_box")) {
    const json& bj = j.at("workspace_box");
    WorkspaceBox b{vec2(bj, "min", "world.workspace_box"), vec2(bj, "max", "world.workspace_box")};
    if (b.lo.x() >= b.hi.x() || b.lo.y() >= b.hi.y())
      fail("world.workspace_box", "needs min < max componentwise");
    w.workspace = b;
  }
  if (j.contains("joint_limits")) {
    for (const json& lj : j.at("joint_limits")) {
      JointLimit l;
      l.coord = static_cast<int>(num(lj, "coord", "world.joint_limits"));
      l.lo = num(lj, "min", "world.joint_limits");
      l.hi = num(lj, "max", "world.joint_limits");
      if (l.coord < 0 || l.coord >= nq) fail("world.joint_limits", "coord out of range");
      if (l.lo >= l.hi) fail("world.joint_limits", "needs min < max");
      w.joint_limits.push_back(l);
    }
  }
  if (j.contains("self_collision_pairs")) {
    for (const json& pj : j.at("self_collision_pairs"))
      w.self_collision_pairs.emplace_back(pj[0].get<int>(), pj[1].get<int>());
  }
  return w;
}

Problem parse_problem(const json& j) {
  Problem p;
  p.mechanism = parse_mechanism(req(j, "mechanism", "root"));
  p.cs = p.mechanism->constraint_system();
  p.world = j.contains("world") ? parse_world(j.at("world"), p.cs.nq) : World{};

  const json& pj = j.contains("params") ? j.at("params") : json::object();
  PlannerParams& pp = p.params;
  pp.beta = num_or(pj, "beta", 0.1);
  pp.delta = num_or(pj, "delta", 0.05);
  pp.t_m = num_or(pj, "t_m", 0.1);
  pp.rho_s = num_or(pj, "rho_s", static_cast<Scalar>(p.cs.dim_c()));
  pp.rho = num_or(pj, "rho", pp.rho_s / 2.0);
  pp.cos_alpha = num_or(pj, "cos_alpha", 0.1);
  pp.epsilon = num_or(pj, "epsilon", 0.1);
  pp.max_iterations = pj.contains("max_iterations")
                          ? pj.at("max_iterations").get<long>()
                          : 200000;
  pp.seed = pj.contains("seed") ? pj.at("seed").get<std::uint64_t>() : 1;
  pp.parallel_actions = pj.value("parallel_actions", true);

  const json& ij = j.contains("integrator") ? j.at("integrator") : json::object();
  pp.integrator.delta = pp.delta;
  pp.integrator.h_init = num_or(ij, "h_init", 1e-3);
  pp.integrator.h_min = num_or(ij, "h_min", 1e-6);
  pp.integrator.h_max = num_or(ij, "h_max", 5e-2);
  pp.eta_F = num_or(ij, "eta_f", 1e-8);
  pp.integrator.solve_tol = num_or(ij, "solve_tol", 1e-11);
  pp.integrator.broyden_max_iters =
      ij.contains("broyden_max_iters") ? ij.at("broyden_max_iters").get<int>() : 50;
  try {
    pp.validate();
  } catch (const std::invalid_argument& e) {
    fail("params", e.what());
  }

  const json& qj = req(j, "query", "root");
  const VectorX qs = vecx(qj, "q_start", "query");
  const VectorX vs = vecx(qj, "qdot_start", "query");
  const VectorX qg = vecx(qj, "q_goal", "query");
  const VectorX vg = vecx(qj, "qdot_goal", "query");
  if (qs.size() != p.cs.nq || vs.size() != p.cs.nq)
    fail("query.q_start", "length must equal n_q");
  if (qg.size() != p.cs.nq || vg.size() != p.cs.nq) fail("query.q_goal", "length must equal n_q");

  auto project = [&](const VectorX& q, const VectorX& v, const char* which) {
    auto x = project_to_manifold(p.cs, stack_state(q, v), pp.eta_F);
    if (!x) fail(std::string("query.") + which, "projection onto the state manifold failed");
    return *x;
  };
  p.x_start = project(qs, vs, "q_start");
  p.x_goal = project(qg, vg, "q_goal");
  return p;
}

Problem load_problem(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("problem file: cannot open '" + path + "'");
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw std::runtime_error("problem file: invalid JSON: " + std::string(e.what()));
  }
  return parse_problem(j);
}

}  // namespace kinoatlas
