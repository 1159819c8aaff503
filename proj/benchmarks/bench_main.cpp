#include <benchmark/benchmark.h>

#include <random>

#include "pixelarray/cluster.hpp"
#include "pixelarray/gam.hpp"
#include "pixelarray/plot.hpp"
#include "pixelarray/solver.hpp"

using namespace pixelarray;

namespace {

WiringDiagram chain_diagram(int res) {
  std::map<std::string, VarSpec> vars;
  for (const char* v : {"a", "b", "c", "d"}) vars[v] = VarSpec{0, 1, res};
  return build_wiring_diagram({{"M", {"a", "b"}}, {"N", {"b", "c"}}, {"P", {"c", "d"}}}, vars,
                              {"a", "d"});
}

std::vector<BoolArray> chain_inputs(const WiringDiagram& wd, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::vector<BoolArray> mats;
  for (std::size_t i = 0; i < wd.inner_count(); ++i) {
    BoolArray m(wd.inner_pack(i));
    for (auto& v : m.data()) v = (rng() & 1u) ? 1 : 0;
    mats.push_back(std::move(m));
  }
  return mats;
}

BoolArray execute_tree(const ClusterTree& node, const std::vector<BoolArray>& inputs) {
  if (node.is_leaf()) return inputs[node.leaf];
  std::vector<BoolArray> args;
  for (const ClusterTree& child : node.children) args.push_back(execute_tree(child, inputs));
  return general_multiply<BoolSemiring>(node.diagram, args);
}

CompiledProblem circle_problem() {
  SystemSpec spec;
  spec.relations.push_back(parse_relation("r1", "w - x^2 = 0"));
  spec.relations.push_back(parse_relation("r2", "w + y^2 - 1 = 0"));
  for (const char* v : {"w", "x", "y"}) spec.varspecs[v] = VarSpec{-1.2, 1.2, 50};
  spec.exposed = {"x", "y"};
  return compile(spec);
}

void BM_PlotParabola(benchmark::State& state) {
  Relation rel = parse_relation("r", "w - x^2 = 0");
  int res = static_cast<int>(state.range(0));
  Pack pack = make_pack({{"w", -1.2, 1.2, res}, {"x", -1.2, 1.2, res}});
  for (auto _ : state) {
    benchmark::DoNotOptimize(sample_in_center_plot(rel, pack, Tolerance{0.05}));
  }
  state.SetItemsProcessed(state.iterations() * pack.entry_count());
}
BENCHMARK(BM_PlotParabola)->Arg(50)->Arg(125)->Arg(250);

void BM_ChainPlanned(benchmark::State& state) {
  WiringDiagram wd = chain_diagram(static_cast<int>(state.range(0)));
  std::vector<BoolArray> mats = chain_inputs(wd, 7);
  ClusterTree tree = plan(wd, PlanStrategy::exhaustive);
  for (auto _ : state) {
    benchmark::DoNotOptimize(execute_tree(tree, mats));
  }
}
BENCHMARK(BM_ChainPlanned)->Arg(32)->Arg(64)->Arg(128);

void BM_ChainNaive(benchmark::State& state) {
  WiringDiagram wd = chain_diagram(static_cast<int>(state.range(0)));
  std::vector<BoolArray> mats = chain_inputs(wd, 7);
  for (auto _ : state) {
    benchmark::DoNotOptimize(naive_multiply<BoolSemiring>(wd, mats));
  }
  state.SetItemsProcessed(state.iterations() * link_entry_count(wd));
}
BENCHMARK(BM_ChainNaive)->Arg(32)->Arg(64);

void BM_SolveCircle(benchmark::State& state) {
  CompiledProblem problem = circle_problem();
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve(problem));
  }
}
BENCHMARK(BM_SolveCircle);

void BM_OracleCircle(benchmark::State& state) {
  CompiledProblem problem = circle_problem();
  for (auto _ : state) {
    benchmark::DoNotOptimize(oracle_solve(problem, 1));
  }
}
BENCHMARK(BM_OracleCircle);

void BM_PlanSevenPacks(benchmark::State& state) {
  std::mt19937_64 rng(11);
  RandomDiagramParams params;
  WiringDiagram wd = random_wiring_diagram(rng, 7, params);
  for (auto _ : state) {
    benchmark::DoNotOptimize(plan(wd, PlanStrategy::exhaustive));
  }
}
BENCHMARK(BM_PlanSevenPacks);

}  // namespace

BENCHMARK_MAIN();
