#include "pixelarray/cli.hpp"

#include <chrono>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include <CLI11.hpp>

#include "pixelarray/cluster.hpp"
#include "pixelarray/detail/parallel.hpp"
#include "pixelarray/gam.hpp"
#include "pixelarray/plot.hpp"
#include "pixelarray/render.hpp"
#include "pixelarray/solver.hpp"
#include "pixelarray/system_file.hpp"

namespace pixelarray::cli {

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitInput = 2;
constexpr int kExitBudget = 3;

struct CommonOptions {
  int threads = 0;  // 0: PIXELARRAY_THREADS or 1
  std::uint64_t budget = 1'000'000'000;
  std::uint64_t seed = 0;
};

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(Errc::bad_input, "cannot write '" + path + "'");
  out << content;
}

// '-' previews 2-D arrays as ASCII on stdout (JSON otherwise); file targets
// pick the format from their extension (.pbm or .json).
void emit_array(const BoolArray& array, const std::string& out) {
  if (out == "-" || out.empty()) {
    if (array.pack().size() == 2) {
      std::cout << render_ascii(array);
    } else {
      std::cout << render_json(array) << "\n";
    }
    return;
  }
  if (out.size() >= 4 && out.substr(out.size() - 4) == ".pbm") {
    write_text_file(out, render_pbm(array));
  } else if (out.size() >= 5 && out.substr(out.size() - 5) == ".json") {
    write_text_file(out, render_json(array));
  } else {
    fail(Errc::bad_input, "output must end in .pbm or .json, or be '-'");
  }
}

PlanChoice plan_choice_from_flag(const std::string& flag) {
  if (flag == "auto") return PlanChoice::automatic_plan();
  if (flag == "none") return PlanChoice::none();
  std::ifstream in(flag);
  if (!in) fail(Errc::bad_input, "cannot open plan file '" + flag + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return PlanChoice::from_shape(plan_shape_from_json(buffer.str()));
}

SystemSpec demo_spec(const std::string& name) {
  SystemSpec spec;
  if (name == "circle") {
    spec.relations.push_back(parse_relation("r1", "w - x^2 = 0"));
    spec.relations.push_back(parse_relation("r2", "w + y^2 - 1 = 0"));
    for (const char* v : {"w", "x", "y"}) spec.varspecs[v] = VarSpec{-1.2, 1.2, 50};
    spec.exposed = {"x", "y"};
  } else if (name == "butterfly") {
    spec.relations.push_back(parse_relation("e1", "cos(ln(z^2 + 0.001*x)) - x + 0.00001/z = 0"));
    spec.relations.push_back(parse_relation("e2", "cosh(w + 0.001*y) + y + 0.0001*w = 2"));
    spec.relations.push_back(parse_relation("e3", "tan(x + y)/((x - 2)*(x + 3)*y^2) = 1"));
    for (const char* v : {"w", "x", "y", "z"}) spec.varspecs[v] = VarSpec{-3.0, 3.0, 125};
    spec.exposed = {"w", "z"};
  } else if (name == "threeeq") {
    spec.relations.push_back(parse_relation("t1", "tan(y + w) + exp(x) = 2"));
    spec.relations.push_back(parse_relation("t2", "x^3 + cos(ln(y^2)) = 1.5*v"));
    spec.relations.push_back(parse_relation("t3", "w + z + 0.1*v = 0.5"));
    for (const char* v : {"v", "x", "z"}) spec.varspecs[v] = VarSpec{-3.0, 3.0, 75};
    for (const char* v : {"w", "y"}) spec.varspecs[v] = VarSpec{-2.5, 2.5, 75};
    spec.exposed = {"w", "y"};
  } else {
    fail(Errc::bad_input, "unknown demo '" + name + "' (circle, butterfly, threeeq)");
  }
  return spec;
}

double timed(const std::function<void()>& fn) {
  auto start = std::chrono::steady_clock::now();
  fn();
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

int run_solve(const std::string& file, const std::string& plan_flag, const std::string& out,
              const std::string& provenance, const CommonOptions& common) {
  SystemSpec spec = load_system_file(file);
  CompiledProblem problem = compile(spec);
  SolveOptions opts{common.budget, detail::resolve_threads(common.threads)};
  Solution solution = solve(problem, plan_choice_from_flag(plan_flag), opts);
  emit_array(solution.array, out);
  if (provenance == "-") {
    std::cout << provenance_json(solution) << "\n";
  } else if (!provenance.empty()) {
    write_text_file(provenance, provenance_json(solution));
  }
  return kExitOk;
}

int run_plan(const std::string& file, const std::string& strategy) {
  SystemSpec spec = load_system_file(file);
  CompiledProblem problem = compile(spec);
  PlanStrategy chosen;
  if (strategy == "exhaustive") {
    chosen = PlanStrategy::exhaustive;
  } else if (strategy == "greedy") {
    chosen = PlanStrategy::greedy;
  } else {  // auto
    chosen = problem.diagram.inner_count() <= 7 ? PlanStrategy::exhaustive : PlanStrategy::greedy;
  }
  ClusterTree tree = plan(problem.diagram, chosen);
  std::cout << plan_to_json(tree, problem.diagram) << "\n";
  return kExitOk;
}

int run_oracle(const std::string& file, int subsamples, const std::string& out,
               const CommonOptions& common) {
  SystemSpec spec = load_system_file(file);
  CompiledProblem problem = compile(spec);
  BoolArray array = oracle_solve(problem, subsamples, common.budget);
  emit_array(array, out);
  return kExitOk;
}

int run_bench(const std::string& file, const CommonOptions& common) {
  SystemSpec spec = load_system_file(file);
  CompiledProblem problem = compile(spec);
  SolveOptions opts{common.budget, detail::resolve_threads(common.threads)};

  Solution planned;
  double t_planned = timed([&] { planned = solve(problem, PlanChoice::automatic_plan(), opts); });
  std::cout << "planned solve:      " << t_planned << " s  ("
            << tree_cost(problem.diagram, planned.plan).serial.poly.str() << ")\n";

  // Unclustered reference: plots plus one literal pass over every link entry.
  std::vector<BoolArray> plots;
  for (std::size_t i = 0; i < problem.relations.size(); ++i) {
    plots.push_back(sample_in_center_plot(problem.relations[i], problem.diagram.inner_pack(i),
                                          Tolerance{problem.epsilons[i]},
                                          PlotOptions{opts.threads, {}, false}));
  }
  std::uint64_t naive_entries = link_entry_count(problem.diagram);
  if (naive_entries <= common.budget) {
    BoolArray unclustered;
    double t_naive = timed(
        [&] { unclustered = naive_multiply<BoolSemiring>(problem.diagram, plots); });
    std::cout << "unclustered naive:  " << t_naive << " s  ("
              << naive_cost(problem.diagram).poly.str() << ", " << naive_entries
              << " entries)\n";
    std::cout << "speedup:            " << (t_planned > 0 ? t_naive / t_planned : 0.0) << "x\n";
    CompareReport cmp = compare(planned.array, unclustered);
    std::cout << "planned vs naive:   "
              << (cmp.only_in_a + cmp.only_in_b == 0 ? "identical" : "MISMATCH") << "\n";
  } else {
    std::cout << "unclustered naive:  skipped (" << naive_entries << " entries over budget)\n";
  }

  if (naive_entries <= common.budget) {
    BoolArray oracle;
    double t_oracle = timed([&] { oracle = oracle_solve(problem, 1, common.budget); });
    CompareReport cmp = compare(planned.array, oracle);
    std::cout << "oracle (centers):   " << t_oracle << " s, "
              << (cmp.only_in_a + cmp.only_in_b == 0 ? "identical" : "MISMATCH") << "\n";
  } else {
    std::cout << "oracle (centers):   skipped (" << naive_entries << " entries over budget)\n";
  }

  // Seeded three-matrix chain as a fixed reference workload.
  {
    std::mt19937_64 rng(common.seed);
    WiringDiagram chain = build_wiring_diagram(
        {{"M", {"a", "b"}}, {"N", {"b", "c"}}, {"P", {"c", "d"}}},
        {{"a", {0, 1, 64}}, {"b", {0, 1, 64}}, {"c", {0, 1, 64}}, {"d", {0, 1, 64}}},
        {"a", "d"});
    std::vector<BoolArray> mats;
    for (int i = 0; i < 3; ++i) {
      BoolArray m(chain.inner_pack(i));
      for (auto& v : m.data()) v = (rng() & 1u) ? 1 : 0;
      mats.push_back(std::move(m));
    }
    ClusterTree chain_plan = plan(chain, PlanStrategy::exhaustive);
    BoolArray fast, slow;
    double t_fast = timed([&] {
      std::vector<BoolArray> stack = mats;
      std::function<BoolArray(const ClusterTree&)> exec = [&](const ClusterTree& node) {
        if (node.is_leaf()) return stack[node.leaf];
        std::vector<BoolArray> inputs;
        for (const ClusterTree& child : node.children) inputs.push_back(exec(child));
        return general_multiply<BoolSemiring>(node.diagram, inputs, {opts.threads});
      };
      fast = exec(chain_plan);
    });
    double t_slow = timed([&] { slow = naive_multiply<BoolSemiring>(chain, mats); });
    std::cout << "chain 64^3 (seed " << common.seed << "): planned " << t_fast << " s, naive "
              << t_slow << " s, speedup " << (t_fast > 0 ? t_slow / t_fast : 0.0) << "x, "
              << (compare(fast, slow).only_in_a + compare(fast, slow).only_in_b == 0
                      ? "identical"
                      : "MISMATCH")
              << "\n";
  }
  return kExitOk;
}

int run_demo(const std::string& name, std::string out, const CommonOptions& common) {
  SystemSpec spec = demo_spec(name);
  CompiledProblem problem = compile(spec);
  SolveOptions opts{common.budget, detail::resolve_threads(common.threads)};
  Solution solution = solve(problem, PlanChoice::automatic_plan(), opts);
  if (out.empty()) out = name + ".pbm";
  emit_array(solution.array, out);

  std::uint64_t on = 0;
  for (std::uint64_t i = 0; i < solution.array.size(); ++i) on += solution.array.at(i);
  std::cout << name << ": " << on << " of " << solution.array.size() << " pixels on, "
            << solution.seconds << " s";
  if (out != "-") std::cout << ", wrote " << out;
  std::cout << "\n";
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv) {
  CLI::App app{"pixel-array solver for nonlinear systems of relations"};
  app.require_subcommand(1);
  app.fallthrough();

  CommonOptions common;
  app.add_option("--threads", common.threads,
                 "worker threads (default: PIXELARRAY_THREADS or 1)");
  app.add_option("--budget", common.budget, "max link entries per contraction stage");
  app.add_option("--seed", common.seed, "seed for randomized benchmark workloads");

  std::string file, out = "-", plan_flag = "auto", provenance, strategy = "auto";
  std::string demo_name;
  int subsamples = 1;

  CLI::App* solve_cmd = app.add_subcommand("solve", "solve a system file");
  solve_cmd->add_option("file", file, "system file")->required();
  solve_cmd->add_option("--plan", plan_flag, "auto, none, or a plan JSON file");
  solve_cmd->add_option("--out", out, "X.pbm, X.json, or - for stdout");
  solve_cmd->add_option("--provenance", provenance, "write plan/timing JSON (- for stdout)");

  CLI::App* plan_cmd = app.add_subcommand("plan", "print a contraction plan with costs");
  plan_cmd->add_option("file", file, "system file")->required();
  plan_cmd->add_option("--strategy", strategy, "exhaustive or greedy");

  CLI::App* oracle_cmd = app.add_subcommand("oracle", "straight-loop reference solve");
  oracle_cmd->add_option("file", file, "system file")->required();
  oracle_cmd->add_option("--subsamples", subsamples, "sub-grid points per axis");
  oracle_cmd->add_option("--out", out, "X.pbm, X.json, or - for stdout");

  CLI::App* bench_cmd = app.add_subcommand("bench", "time solve vs oracle and naive vs planned");
  bench_cmd->add_option("file", file, "system file")->required();

  CLI::App* demo_cmd = app.add_subcommand("demo", "run a built-in example system");
  demo_cmd->add_option("name", demo_name, "circle, butterfly, or threeeq")->required();
  demo_cmd->add_option("--out", out, "output path (default <name>.pbm)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) {
      return app.exit(e);  // --help
    }
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (solve_cmd->parsed()) return run_solve(file, plan_flag, out, provenance, common);
    if (plan_cmd->parsed()) return run_plan(file, strategy);
    if (oracle_cmd->parsed()) return run_oracle(file, subsamples, out, common);
    if (bench_cmd->parsed()) return run_bench(file, common);
    if (demo_cmd->parsed()) {
      return run_demo(demo_name, demo_cmd->count("--out") ? out : std::string(), common);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return e.code() == Errc::cost_overflow ? kExitBudget : kExitInput;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInput;
  }
  return kExitUsage;
}

}  // namespace pixelarray::cli
