// SPDX-License-Identifier: Apache-2.0
//
// mtlplan command line: plan multi-vehicle missions, evaluate MTL formulas
// on label traces, export sub-task MILPs, and run the encoder property suite.

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "mtlplan/lp_format.hpp"
#include "mtlplan/oracle_check.hpp"
#include "mtlplan/plan.hpp"
#include "mtlplan/scenario.hpp"

namespace fs = std::filesystem;
using namespace mtlplan;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

scenario::Scenario resolve_scenario(const std::string& file,
                                    const std::string& builtin, int n) {
  if (!file.empty()) return scenario::load_scenario(slurp(file));
  if (builtin == "rescue") return scenario::build_rescue_scenario(n);
  throw std::runtime_error("unknown built-in scenario: " + builtin);
}

std::string csv_of(const plan::FleetPlan& fp) {
  std::ostringstream os;
  os << "uav,t,x,y,z,mode\n";
  char buf[160];
  for (const auto& m : fp.missions) {
    if (!m.success) continue;
    for (size_t t = 0; t < m.traj.states.size(); ++t) {
      const auto& x = m.traj.states[t];
      dyn::ModeId mode = t < m.traj.step_modes.size()
                             ? m.traj.step_modes[t]
                             : dyn::ModeId::Land;
      std::snprintf(buf, sizeof(buf), "%d,%zu,%.9g,%.9g,%.9g,%s\n", m.uav, t,
                    x(0), x(1), x(2), dyn::mode_name(mode).c_str());
      os << buf;
    }
  }
  return os.str();
}

// Labeled trace of one vehicle from an exported trajectory CSV.
mtl::Trace trace_from_csv(const std::string& text, int uav,
                          const ws::Workspace& w) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "uav,t,x,y,z,mode")
    throw std::runtime_error(
        "trajectory CSV schema mismatch: expected header uav,t,x,y,z,mode");
  std::set<std::string> props;
  for (const auto& [name, r] : w.regions()) {
    props.insert(name);
    if (r.has_z_prime()) props.insert(name + "_prime");
  }
  mtl::Trace tr;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream row(line);
    std::string cell;
    std::vector<std::string> cells;
    while (std::getline(row, cell, ',')) cells.push_back(cell);
    if (cells.size() != 6)
      throw std::runtime_error("trajectory CSV schema mismatch: bad row '" +
                               line + "'");
    if (std::stoi(cells[0]) != uav) continue;
    Eigen::Vector3d p(std::stod(cells[2]), std::stod(cells[3]),
                      std::stod(cells[4]));
    mtl::LabelSet L;
    for (const auto& prop : props)
      for (const auto& part : w.polytopes_for(prop))
        if (part.contains(p)) {
          L.insert(prop);
          break;
        }
    tr.labels.push_back(std::move(L));
  }
  if (tr.labels.empty())
    throw std::runtime_error("no rows for uav " + std::to_string(uav));
  return tr;
}

std::string report_of(const plan::FleetPlan& fp, double dt) {
  std::ostringstream os;
  os << "fleet plan: " << (fp.success() ? "success" : "FAILED") << "\n\n";
  for (const auto& m : fp.missions) {
    os << "uav " << m.uav << ": "
       << (m.success ? "success" : "failed (" + m.failure + ")") << "\n";
    os << "  sub-task            start waits flown reach  nodes bins status    cpu_s\n";
    for (const auto& st : m.subtasks) {
      char line[200];
      const char* status =
          st.status == solver::MilpStatus::Optimal        ? "optimal"
          : st.status == solver::MilpStatus::BudgetFeasible ? "feasible"
                                                            : "none";
      std::snprintf(line, sizeof(line),
                    "  %-18s %5d %5d %5d %5d %6ld %4d %-8s %6.2f\n",
                    st.label.c_str(), st.start_step, st.waits, st.horizon,
                    st.reach_step, st.nodes, st.binaries, status, st.cpu_sec);
      os << line;
    }
    if (m.success) {
      os << "  total steps: " << m.traj.steps() << "  ("
         << m.traj.steps() * dt << " s)\n";
    }
  }
  return os.str();
}

void write_file(const fs::path& p, const std::string& content) {
  std::ofstream out(p);
  if (!out) throw std::runtime_error("cannot write " + p.string());
  out << content;
}

// Exports every first-attempt sub-task MILP of the scenario, unsolved.
void export_models(const scenario::Scenario& s, const fs::path& dir,
                   const encode::BigMConfig& bigm) {
  dyn::HybridModel model(s.params, s.dt);
  const auto pi = [&] {
    std::set<std::string> names;
    for (const auto& [n, r] : s.workspace.regions()) {
      names.insert(n);
      if (r.has_z_prime()) names.insert(n + "_prime");
    }
    return names;
  }();
  fs::create_directories(dir);
  for (const auto& m : s.missions) {
    Eigen::VectorXd x = m.start;
    for (size_t k = 0; k < m.subtasks.size(); ++k) {
      const auto& st = m.subtasks[k];
      const dyn::LinearMode& env = st.mode == dyn::ModeId::Grasp
                                       ? model.grasp_envelope()
                                       : model.mode(st.mode);
      const dyn::LinearMode* next =
          k + 1 < m.subtasks.size()
              ? (m.subtasks[k + 1].mode == dyn::ModeId::Grasp
                     ? &model.grasp_envelope()
                     : &model.mode(m.subtasks[k + 1].mode))
              : nullptr;
      auto enc = encode::encode_subtask_problem(
          s.workspace, env, mtl::parse_mtl(st.formula, pi), x, st.horizon,
          bigm, next);
      std::string name = "uav" + std::to_string(m.uav) + "_" +
                         std::to_string(k) + "_" + st.label;
      write_file(dir / (name + ".lp"),
                 lp_format::export_lp_text(enc.model, name));
      // Only the first sub-task's start state is known without solving.
      break;
    }
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"MTL mission planning for quadrotor fleets"};
  app.require_subcommand(1);

  std::string scenario_file, builtin = "rescue", out_dir, export_dir;
  int n = 2;
  double gap = 1e-6, time_budget = 60.0;
  bool capacity_sweep = false, no_avoidance = false;

  auto add_scenario_flags = [&](CLI::App* c) {
    c->add_option("--scenario", scenario_file, "scenario JSON file");
    c->add_option("--builtin", builtin, "built-in scenario name (rescue)");
    c->add_option("-N,--fleet-size", n, "fleet size for built-in scenarios");
  };

  CLI::App* cmd_plan = app.add_subcommand("plan", "plan a fleet mission");
  add_scenario_flags(cmd_plan);
  cmd_plan->add_option("--gap", gap, "MILP relative optimality gap");
  cmd_plan->add_option("--time-budget", time_budget,
                       "per-sub-task solver budget in seconds");
  cmd_plan->add_option("--out", out_dir, "directory for plan.csv and report.txt");
  cmd_plan->add_option("--export-lp", export_dir,
                       "also export sub-task models in LP format");
  cmd_plan->add_flag("--capacity-sweep", capacity_sweep,
                     "grow the fleet until planning fails and report the "
                     "largest feasible size");
  cmd_plan->add_flag("--no-avoidance", no_avoidance,
                     "disable inter-vehicle keep-out constraints");

  std::string formula_text, trace_text, csv_file;
  int at_step = 0, check_uav = 0;
  CLI::App* cmd_check =
      app.add_subcommand("check-trace", "evaluate an MTL formula on a trace");
  add_scenario_flags(cmd_check);
  cmd_check->add_option("--formula", formula_text, "MTL formula")->required();
  cmd_check->add_option(
      "--trace", trace_text,
      "semicolon-separated steps, comma-separated labels, e.g. "
      "\"A;A,C;C\" (empty step: '-')");
  cmd_check->add_option(
      "--csv", csv_file,
      "trajectory CSV (uav,t,x,y,z,mode); labeled via the scenario workspace");
  cmd_check->add_option("--uav", check_uav, "vehicle to check in the CSV");
  cmd_check->add_option("--at", at_step, "evaluation step (default 0)");

  CLI::App* cmd_export =
      app.add_subcommand("export-lp", "export sub-task MILPs in LP format");
  add_scenario_flags(cmd_export);
  cmd_export->add_option("--out", out_dir, "output directory")->required();

  int cases = 500;
  unsigned seed = 1;
  CLI::App* cmd_prop = app.add_subcommand(
      "prop-suite", "randomized encoder-vs-semantics equivalence suite");
  cmd_prop->add_option("--cases", cases, "number of property cases");
  cmd_prop->add_option("--seed", seed, "RNG seed");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*cmd_plan) {
      plan::PlannerOptions opts;
      opts.milp.gap = gap;
      opts.milp.time_budget_sec = time_budget;
      opts.avoidance = !no_avoidance;

      if (capacity_sweep) {
        int best = 0;
        std::ostringstream sweep;
        sweep << "n,success,detail\n";
        for (int k = 1; k <= 10; ++k) {
          auto s = scenario::build_rescue_scenario(k);
          auto fp = plan::plan_fleet(s, opts);
          std::string detail;
          for (const auto& m : fp.missions)
            if (!m.success) detail = "uav " + std::to_string(m.uav) + ": " + m.failure;
          sweep << k << "," << (fp.success() ? 1 : 0) << "," << detail << "\n";
          std::cout << "fleet size " << k << ": "
                    << (fp.success() ? "feasible" : "infeasible — " + detail)
                    << std::endl;
          if (!fp.success()) break;
          best = k;
        }
        std::cout << "largest feasible fleet size: " << best << std::endl;
        if (!out_dir.empty()) {
          fs::create_directories(out_dir);
          write_file(fs::path(out_dir) / "capacity.csv", sweep.str());
        }
        return best > 0 ? 0 : 1;
      }

      auto s = resolve_scenario(scenario_file, builtin, n);
      if (!export_dir.empty())
        export_models(s, export_dir, opts.bigm);
      auto fp = plan::plan_fleet(s, opts);
      auto problems = plan::verify_fleet(s, fp);
      std::string report = report_of(fp, s.dt);
      if (!problems.empty()) {
        report += "\nverification problems:\n";
        for (const auto& p : problems) report += "  " + p + "\n";
      } else if (fp.success()) {
        report += "\nverification: clean\n";
      }
      std::cout << report;
      if (!out_dir.empty()) {
        fs::create_directories(out_dir);
        write_file(fs::path(out_dir) / "plan.csv", csv_of(fp));
        write_file(fs::path(out_dir) / "report.txt", report);
      }
      return fp.success() && problems.empty() ? 0 : 1;
    }

    if (*cmd_check) {
      mtl::Formula f = mtl::parse_mtl(formula_text, {});
      mtl::Trace tr;
      if (!csv_file.empty()) {
        auto s = resolve_scenario(scenario_file, builtin, n);
        tr = trace_from_csv(slurp(csv_file), check_uav, s.workspace);
      } else if (!trace_text.empty()) {
        std::stringstream steps(trace_text);
        std::string step;
        while (std::getline(steps, step, ';')) {
          mtl::LabelSet L;
          std::stringstream labels(step);
          std::string label;
          while (std::getline(labels, label, ','))
            if (!label.empty() && label != "-") L.insert(label);
          tr.labels.push_back(std::move(L));
        }
      } else {
        throw std::runtime_error("check-trace needs --csv or --trace");
      }
      mtl::Formula bound =
          mtl::bind_horizon(mtl::to_nnf(f), tr.length() - 1 - at_step);
      bool sat = mtl::evaluate_at(bound, tr, at_step);
      if (sat) {
        std::cout << "satisfied" << std::endl;
        return 0;
      }
      // First step from which the (re-clamped) formula fails.
      int first = at_step;
      for (int t = at_step; t < tr.length(); ++t) {
        mtl::Formula g = mtl::bind_horizon(mtl::to_nnf(f), tr.length() - 1 - t);
        if (!mtl::evaluate_at(g, tr, t)) {
          first = t;
          break;
        }
      }
      std::cout << "violated at t=" << first << std::endl;
      return 1;
    }

    if (*cmd_export) {
      auto s = resolve_scenario(scenario_file, builtin, n);
      export_models(s, out_dir, {});
      std::cout << "models written to " << out_dir << std::endl;
      return 0;
    }

    if (*cmd_prop) {
      auto stats = oracle::run_equivalence_suite(cases, seed);
      std::cout << "cases: " << stats.cases << " (sat " << stats.satisfied
                << ", unsat " << stats.falsified << ")\n";
      for (const auto& fmsg : stats.failures) std::cout << fmsg << "\n";
      std::cout << (stats.ok() ? "equivalence holds" : "MISMATCHES FOUND")
                << std::endl;
      return stats.ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << std::endl;
    return 2;
  }
  return 2;
}
