// SPDX-License-Identifier: Apache-2.0

#include <cmath>

#include "json.hpp"
#include "mtlplan/scenario.hpp"

namespace mtlplan::scenario {

namespace {

using nlohmann::json;

Eigen::VectorXd to_vec(const json& a) {
  Eigen::VectorXd v(a.size());
  for (size_t i = 0; i < a.size(); ++i) v(i) = a[i].get<double>();
  return v;
}

json from_vec(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

// Axis-aligned box as halfspaces over the axes present in lo/hi; axes with
// lo = -inf / hi = +inf are left open.
ws::ConvexPolytope box(int dim, const std::vector<double>& lo,
                       const std::vector<double>& hi) {
  ws::ConvexPolytope p;
  for (int k = 0; k < dim; ++k) {
    if (std::isfinite(hi[k])) {
      ws::Halfspace f;
      f.h = Eigen::VectorXd::Zero(dim);
      f.h(k) = 1.0;
      f.a = hi[k];
      p.faces.push_back(f);
    }
    if (std::isfinite(lo[k])) {
      ws::Halfspace f;
      f.h = Eigen::VectorXd::Zero(dim);
      f.h(k) = -1.0;
      f.a = -lo[k];
      p.faces.push_back(f);
    }
  }
  return p;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

Scenario load_scenario(const std::string& json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario JSON parse error: ") + e.what());
  }
  try {
    Scenario s;
    s.workspace = ws::load_workspace(j.at("workspace").dump());
    s.dt = j.value("dt", 0.2);
    if (j.contains("quad_params")) {
      const auto& q = j["quad_params"];
      s.params.mass = q.value("mass", s.params.mass);
      s.params.gravity = q.value("gravity", s.params.gravity);
      s.params.r_safe = q.value("r_safe", s.params.r_safe);
      s.params.rho = q.value("rho", s.params.rho);
      s.params.max_altitude = q.value("max_altitude", s.params.max_altitude);
      if (q.contains("inertia"))
        s.params.inertia = to_vec(q["inertia"]).asDiagonal();
    }
    for (const auto& mj : j.at("missions")) {
      MissionSpec m;
      m.uav = mj.at("uav").get<int>();
      Eigen::VectorXd start = to_vec(mj.at("start"));
      if (start.size() == 3) {
        m.start = Eigen::VectorXd::Zero(dyn::kNumStates);
        m.start.head(3) = start;
      } else if (start.size() == dyn::kNumStates) {
        m.start = start;
      } else {
        throw ScenarioError("mission start must have 3 or 10 entries");
      }
      m.total_steps = mj.at("total_steps").get<int>();
      m.start_delay = mj.value("start_delay", 0);
      for (const auto& tj : mj.at("subtasks")) {
        SubTaskSpec st;
        st.label = tj.at("label").get<std::string>();
        st.formula = tj.at("formula").get<std::string>();
        st.mode = dyn::mode_from_name(tj.at("mode").get<std::string>());
        st.horizon = tj.at("horizon").get<int>();
        if (st.horizon <= 0) throw ScenarioError("sub-task horizon must be positive");
        m.subtasks.push_back(std::move(st));
      }
      if (m.subtasks.empty()) throw ScenarioError("mission without sub-tasks");
      s.missions.push_back(std::move(m));
    }
    if (s.missions.empty()) throw ScenarioError("scenario without missions");
    return s;
  } catch (const json::exception& e) {
    throw ScenarioError(std::string("scenario JSON schema error: ") + e.what());
  }
}

std::string scenario_to_json(const Scenario& s) {
  json j;
  j["dt"] = s.dt;
  j["quad_params"] = {
      {"mass", s.params.mass},
      {"gravity", s.params.gravity},
      {"r_safe", s.params.r_safe},
      {"rho", s.params.rho},
      {"max_altitude", s.params.max_altitude},
      {"inertia", from_vec(s.params.inertia.diagonal())},
  };
  json wsj;
  wsj["bounds"] = {{"min", from_vec(s.workspace.min_corner())},
                   {"max", from_vec(s.workspace.max_corner())}};
  wsj["regions"] = json::array();
  const auto& obst = s.workspace.obstacle_names();
  for (const auto& [name, r] : s.workspace.regions()) {
    json rj;
    rj["name"] = name;
    rj["parts"] = json::array();
    for (const auto& p : r.parts) {
      json pj = json::array();
      for (const auto& f : p.faces)
        pj.push_back({{"h", from_vec(f.h)}, {"a", f.a}});
      rj["parts"].push_back(pj);
    }
    if (r.has_z_prime()) rj["z_prime"] = r.z_prime;
    if (std::find(obst.begin(), obst.end(), name) != obst.end())
      rj["obstacle"] = true;
    wsj["regions"].push_back(rj);
  }
  j["workspace"] = wsj;
  j["missions"] = json::array();
  for (const auto& m : s.missions) {
    json mj;
    mj["uav"] = m.uav;
    mj["start"] = from_vec(m.start);
    mj["total_steps"] = m.total_steps;
    if (m.start_delay > 0) mj["start_delay"] = m.start_delay;
    mj["subtasks"] = json::array();
    for (const auto& st : m.subtasks)
      mj["subtasks"].push_back({{"label", st.label},
                                {"formula", st.formula},
                                {"mode", dyn::mode_name(st.mode)},
                                {"horizon", st.horizon}});
    j["missions"].push_back(mj);
  }
  return j.dump(2) + "\n";
}

Scenario build_rescue_scenario(int n) {
  if (n < 1 || n > 10)
    throw ScenarioError("built-in rescue scenario supports 1..10 vehicles");

  Scenario s;
  Eigen::VectorXd lo(3), hi(3);
  lo << 0.0, 0.0, 0.0;
  hi << 10.0, 10.0, 3.0;
  s.workspace = ws::Workspace(lo, hi);

  const double half = 0.4;  // slot box half-width

  // Wall with a window. The wall region is pre-inflated by r_safe so planning
  // against the vehicle's center point keeps the body clear of the physical
  // wall (y in [4.9, 5.1], window gap x in [4.85, 5.15] between the inflated
  // parts).
  {
    ws::Region wall;
    wall.name = "O";
    wall.parts.push_back(
        box(3, {-kInf, 4.55, -kInf}, {4.85, 5.45, kInf}));
    wall.parts.push_back(box(3, {5.15, 4.55, -kInf}, {kInf, 5.45, kInf}));
    s.workspace.add_region(std::move(wall), /*obstacle=*/true);
  }
  {
    ws::Region window;
    window.name = "E";
    window.parts.push_back(box(3, {4.85, 4.55, -kInf}, {5.15, 5.45, kInf}));
    s.workspace.add_region(std::move(window));
  }
  {
    ws::Region stage;
    stage.name = "C";
    // Staging sits directly below the window so the crossing leg is a
    // straight run in y with only a small lateral correction after the wall.
    // The floor at y = 3.8 keeps even the worst staging endpoint close
    // enough for the fixed-length crossing that follows.
    stage.parts.push_back(box(3, {4.7, 3.8, -kInf}, {5.3, 4.5, kInf}));
    s.workspace.add_region(std::move(stage));
  }

  // Target and safe rows sit well behind the wall so a parked vehicle never
  // blocks the window exit, with >= 0.75 m separation between any two slots.
  const std::vector<std::pair<double, double>> starts = {
      {4.9, 1.8}, {4.0, 1.8}, {5.8, 1.8}, {3.2, 2.8}, {6.8, 2.8},
      {3.2, 3.7}, {6.8, 3.7}, {3.1, 1.8}, {6.7, 1.8}, {4.9, 0.9}};
  // Pickup targets sit in columns outside the window corridor: even the
  // slot edge nearest the window keeps more than a vehicle diameter of
  // clearance from the exit lane, so a parked vehicle never constrains a
  // follower's crossing. Columns alternate right/left, moving outward: the
  // outer columns are farther than a 14-step crossing can reach, which is
  // what caps the feasible fleet size. Safe slots share the column, one
  // row back.
  const std::vector<std::pair<double, double>> targets = {
      {6.6, 7.4},  {3.4, 7.4},  {7.35, 7.4}, {2.65, 7.4}, {8.1, 7.4},
      {1.9, 7.4},  {8.85, 7.4}, {1.15, 7.4}, {9.6, 7.4},  {0.4, 7.4}};
  const std::vector<std::pair<double, double>> safes = {
      {6.6, 8.6},  {3.4, 8.6},  {7.35, 8.6}, {2.65, 8.6}, {8.1, 8.6},
      {1.9, 8.6},  {8.85, 8.6}, {1.15, 8.6}, {9.6, 8.6},  {0.4, 8.6}};

  auto start_name = [&](int i) {
    if (n <= 2) return std::string(i == 0 ? "A" : "B");
    return "A" + std::to_string(i + 1);
  };
  auto target_name = [&](int i) {
    if (n <= 2) return std::string(i == 0 ? "F" : "G");
    return "F" + std::to_string(i + 1);
  };
  auto safe_name = [&](int i) { return "H" + std::to_string(i + 1); };

  auto add_slot = [&](const std::string& name, std::pair<double, double> c,
                      double z_prime) {
    ws::Region r;
    r.name = name;
    r.parts.push_back(box(3, {c.first - half, c.second - half, -kInf},
                          {c.first + half, c.second + half, kInf}));
    r.z_prime = z_prime;
    s.workspace.add_region(std::move(r));
    // Shrunken core of the slot: crossing legs pin their endpoint here so
    // the hand-off state has room to drift one step before braking bites,
    // keeping the next sub-task's "stay in the slot" invariant feasible.
    ws::Region core;
    core.name = name + "_c";
    const double ch = half - 0.1;
    core.parts.push_back(box(3, {c.first - ch, c.second - ch, -kInf},
                             {c.first + ch, c.second + ch, kInf}));
    s.workspace.add_region(std::move(core));
  };

  for (int i = 0; i < n; ++i) {
    add_slot(start_name(i), starts[i], 0.5);
    add_slot(target_name(i), targets[i], 1.3);
    add_slot(safe_name(i), safes[i], 0.5);
  }

  for (int i = 0; i < n; ++i) {
    MissionSpec m;
    m.uav = i;
    m.start = Eigen::VectorXd::Zero(dyn::kNumStates);
    m.start(0) = starts[i].first;
    m.start(1) = starts[i].second;
    // Later vehicles depart later, so the window is used one at a time.
    // Departures are staggered far enough apart that the leader has cleared
    // the window and parked at its pickup slot before the follower crosses.
    m.start_delay = 14 * i;
    // Middle columns sit farther from the window and need a longer crossing
    // leg; the outermost columns keep the base horizon, which they cannot
    // meet -- that is the designed fleet-capacity limit.
    const int cross_h[] = {14, 14, 16, 16, 18, 18, 14, 14, 14, 14};
    const int ch = cross_h[i];
    m.total_steps = 44 + ch + m.start_delay;
    const std::string S = start_name(i), R = target_name(i), H = safe_name(i);
    // Crossing legs pin the final step inside the goal region so the next
    // sub-task's invariant ("G <region>") holds from its first step.
    m.subtasks = {
        {"lift-off", "G " + S + " & F[0,5] " + S + "_prime",
         dyn::ModeId::TakeOff, 5},
        {"stage", "G !O & F[10,10] C", dyn::ModeId::Steer, 10},
        {"cross-to-victim",
         "G !O & F[" + std::to_string(ch) + "," + std::to_string(ch) + "] " +
             R + "_c",
         dyn::ModeId::Steer, ch},
        {"pick-up", "G " + R + " & F[0,10] " + R + "_prime",
         dyn::ModeId::Grasp, 10},
        {"cross-to-safety", "G !O & F[14,14] " + H + "_c", dyn::ModeId::Steer,
         14},
        {"set-down", "G " + H, dyn::ModeId::Land, 5},
    };
    s.missions.push_back(std::move(m));
  }
  return s;
}

}  // namespace mtlplan::scenario
