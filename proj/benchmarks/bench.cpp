// Microbenchmarks for the hot paths: LP pivoting, MILP search, and the
// formula encoding.

#include <benchmark/benchmark.h>

#include "mtlplan/encode.hpp"
#include "mtlplan/scenario.hpp"
#include "mtlplan/solver.hpp"

using namespace mtlplan;

namespace {

// Dense transportation-style LP with n supply and n demand nodes.
milp::MilpModel transport_lp(int n) {
  milp::MilpModel m;
  std::vector<std::vector<int>> x(n, std::vector<int>(n));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      x[i][j] = m.add_continuous(0, milp::kInf, "x");
      m.obj_coef(x[i][j], 1.0 + ((i * 7 + j * 3) % 5));
    }
  for (int i = 0; i < n; ++i) {
    std::vector<milp::LinTerm> row, col;
    for (int j = 0; j < n; ++j) {
      row.push_back({x[i][j], 1.0});
      col.push_back({x[j][i], 1.0});
    }
    m.add_le(std::move(row), 10.0);
    m.add_ge(std::move(col), 5.0);
  }
  return m;
}

milp::MilpModel knapsack(int n) {
  milp::MilpModel m;
  std::vector<milp::LinTerm> cap;
  for (int i = 0; i < n; ++i) {
    int v = m.add_binary("b");
    cap.push_back({v, 2.0 + (i * 5) % 7});
    m.obj_coef(v, -(3.0 + (i * 11) % 9));
  }
  m.add_le(std::move(cap), 1.5 * n);
  return m;
}

void BM_SimplexTransport(benchmark::State& state) {
  auto m = transport_lp(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto s = solver::solve_lp(m);
    benchmark::DoNotOptimize(s.objective);
  }
}
BENCHMARK(BM_SimplexTransport)->Arg(5)->Arg(10)->Arg(15);

void BM_BranchAndBoundKnapsack(benchmark::State& state) {
  auto m = knapsack(static_cast<int>(state.range(0)));
  for (auto _ : state) {
    auto s = solver::solve_milp(m);
    benchmark::DoNotOptimize(s.objective);
  }
}
BENCHMARK(BM_BranchAndBoundKnapsack)->Arg(10)->Arg(16)->Arg(22);

void BM_EncodeSubtask(benchmark::State& state) {
  auto s = scenario::build_rescue_scenario(1);
  dyn::HybridModel model(s.params, s.dt);
  std::set<std::string> pi;
  for (const auto& [name, r] : s.workspace.regions()) {
    pi.insert(name);
    if (r.has_z_prime()) pi.insert(name + "_prime");
  }
  auto f = mtl::parse_mtl(s.missions[0].subtasks[2].formula, pi);
  int T = static_cast<int>(state.range(0));
  for (auto _ : state) {
    auto enc = encode::encode_subtask_problem(
        s.workspace, model.mode(dyn::ModeId::Steer), f,
        s.missions[0].start, T);
    benchmark::DoNotOptimize(enc.model.num_vars());
  }
}
BENCHMARK(BM_EncodeSubtask)->Arg(8)->Arg(14);

}  // namespace

BENCHMARK_MAIN();
