#include "pixelarray/solver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>

#include <json.hpp>

#include "pixelarray/gam.hpp"
#include "pixelarray/plot.hpp"

namespace pixelarray {

namespace {

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::string leaves_label(const std::vector<int>& leaves) {
  std::string s = "{";
  for (std::size_t i = 0; i < leaves.size(); ++i) {
    if (i) s += ",";
    s += std::to_string(leaves[i] + 1);
  }
  return s + "}";
}

void check_budget(const ClusterTree& node, std::uint64_t budget) {
  if (node.is_leaf()) return;
  std::uint64_t entries = link_entry_count(node.diagram);
  if (entries > budget) {
    fail(Errc::cost_overflow,
         "stage " + leaves_label(node.leaves) + " needs " + std::to_string(entries) +
             " link entries, over the budget of " + std::to_string(budget) +
             "; re-cluster or lower the resolution");
  }
  for (const ClusterTree& child : node.children) check_budget(child, budget);
}

BoolArray execute(const ClusterTree& node, const std::vector<BoolArray>& plots,
                  const SolveOptions& opts, std::vector<StageStats>& stages) {
  if (node.is_leaf()) return plots[node.leaf];
  std::vector<BoolArray> inputs;
  inputs.reserve(node.children.size());
  for (const ClusterTree& child : node.children) {
    inputs.push_back(execute(child, plots, opts, stages));
  }
  auto start = std::chrono::steady_clock::now();
  BoolArray out = general_multiply<BoolSemiring>(node.diagram, inputs, {opts.threads});
  stages.push_back(StageStats{"contract " + leaves_label(node.leaves),
                              link_entry_count(node.diagram), seconds_since(start)});
  return out;
}

}  // namespace

CompiledProblem compile(const SystemSpec& spec) {
  if (spec.relations.empty()) fail(Errc::bad_input, "no relations");
  if (spec.exposed.empty()) fail(Errc::bad_input, "no exposed variables");
  if (!(spec.default_tolerance > 0.0)) fail(Errc::bad_input, "tolerance must be positive");

  CompiledProblem problem;
  problem.relations = spec.relations;
  std::sort(problem.relations.begin(), problem.relations.end(),
            [](const Relation& a, const Relation& b) { return a.id < b.id; });
  for (std::size_t i = 1; i < problem.relations.size(); ++i) {
    if (problem.relations[i].id == problem.relations[i - 1].id) {
      fail(Errc::bad_input, "relation id '" + problem.relations[i].id + "' declared twice");
    }
  }

  for (const auto& [id, eps] : spec.tolerances) {
    bool known = std::any_of(problem.relations.begin(), problem.relations.end(),
                             [&](const Relation& r) { return r.id == id; });
    if (!known) fail(Errc::bad_input, "tolerance for unknown relation '" + id + "'");
    if (!(eps > 0.0)) fail(Errc::bad_input, "tolerance must be positive");
  }

  problem.epsilons.reserve(problem.relations.size());
  std::vector<RelationVars> relvars;
  relvars.reserve(problem.relations.size());
  for (const Relation& rel : problem.relations) {
    auto it = spec.tolerances.find(rel.id);
    problem.epsilons.push_back(it != spec.tolerances.end() ? it->second
                                                           : spec.default_tolerance);
    relvars.push_back(RelationVars{rel.id, rel.variables});
  }
  problem.diagram = build_wiring_diagram(relvars, spec.varspecs, spec.exposed);
  return problem;
}

Solution solve(const CompiledProblem& problem, const PlanChoice& choice,
               const SolveOptions& opts) {
  const WiringDiagram& wd = problem.diagram;
  auto start = std::chrono::steady_clock::now();

  Solution solution;
  switch (choice.kind) {
    case PlanChoice::Kind::automatic:
      solution.plan = plan(wd, wd.inner_count() <= 7 ? PlanStrategy::exhaustive
                                                     : PlanStrategy::greedy);
      break;
    case PlanChoice::Kind::unclustered:
      solution.plan = flat_tree(wd);
      break;
    case PlanChoice::Kind::given:
      solution.plan = make_cluster_tree(wd, choice.shape);
      break;
  }
  check_budget(solution.plan, opts.budget);

  std::vector<BoolArray> plots;
  plots.reserve(problem.relations.size());
  for (std::size_t i = 0; i < problem.relations.size(); ++i) {
    auto plot_start = std::chrono::steady_clock::now();
    plots.push_back(sample_in_center_plot(problem.relations[i], wd.inner_pack(i),
                                          Tolerance{problem.epsilons[i]},
                                          PlotOptions{opts.threads, {}, false}));
    solution.stages.push_back(StageStats{"plot " + problem.relations[i].id,
                                         wd.inner_pack(i).entry_count(),
                                         seconds_since(plot_start)});
  }

  solution.array = execute(solution.plan, plots, opts, solution.stages);
  solution.seconds = seconds_since(start);
  solution.guarantee_epsilon =
      *std::max_element(problem.epsilons.begin(), problem.epsilons.end());
  return solution;
}

BoolArray oracle_solve(const CompiledProblem& problem, int subsamples, std::uint64_t budget) {
  if (subsamples < 1) fail(Errc::bad_input, "subsamples must be >= 1");
  const WiringDiagram& wd = problem.diagram;
  const std::uint64_t total = link_entry_count(wd);
  if (total > budget) {
    fail(Errc::cost_overflow, "oracle needs " + std::to_string(total) +
                                  " link entries, over the budget of " + std::to_string(budget));
  }
  const std::size_t n = problem.relations.size();

  // Per-relation acceptance tables over the relation's own entries, built by
  // direct evaluation (centers, or the sub-grid minimum when subsamples > 1).
  std::vector<std::vector<std::uint8_t>> table(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Relation& rel = problem.relations[i];
    const Pack& pack = wd.inner_pack(i);
    const double eps = problem.epsilons[i];
    const std::size_t dim = pack.size();
    table[i].assign(pack.entry_count(), 0);

    std::vector<int> res(dim);
    for (std::size_t k = 0; k < dim; ++k) res[k] = pack.port(k).resolution;
    EntryCursor cursor(res);
    std::uint64_t flat = 0;
    std::vector<double> point(dim);
    while (!cursor.done()) {
      const std::vector<int>& coords = cursor.coords();
      double best = std::numeric_limits<double>::infinity();
      if (subsamples == 1) {
        for (std::size_t k = 0; k < dim; ++k) {
          const Port& p = pack.port(k);
          point[k] = p.lower + (p.upper - p.lower) *
                                   ((coords[k] - 0.5) / static_cast<double>(p.resolution));
        }
        best = distance_to_target(eval_sorted(*rel.lhs, rel.variables, point), rel.target);
      } else {
        std::vector<int> sub(dim, 1);
        while (true) {
          for (std::size_t k = 0; k < dim; ++k) {
            const Port& p = pack.port(k);
            double t = (coords[k] - 1) + (sub[k] - 0.5) / subsamples;
            point[k] = p.lower + (p.upper - p.lower) * (t / p.resolution);
          }
          best = std::min(best, distance_to_target(
                                    eval_sorted(*rel.lhs, rel.variables, point), rel.target));
          std::size_t k = dim;
          bool carried = true;
          while (k-- > 0) {
            if (sub[k] < subsamples) {
              ++sub[k];
              carried = false;
              break;
            }
            sub[k] = 1;
          }
          if (dim == 0 || carried) break;
        }
      }
      table[i][flat++] = best <= eps ? 1 : 0;
      cursor.advance();
    }
  }

  // One straight pass over every link entry.
  const std::size_t n_links = wd.links().size();
  std::vector<int> res(n_links);
  for (std::size_t l = 0; l < n_links; ++l) res[l] = wd.links()[l].resolution;

  std::vector<std::vector<std::int64_t>> coeff(n + 1, std::vector<std::int64_t>(n_links, 0));
  for (std::size_t i = 0; i < n; ++i) {
    const std::vector<std::uint64_t> strides = wd.inner_pack(i).strides();
    for (std::size_t k = 0; k < wd.inner_pack(i).size(); ++k) {
      coeff[i][wd.link_of(i, k)] += static_cast<std::int64_t>(strides[k]);
    }
  }
  {
    const std::vector<std::uint64_t> strides = wd.outer().strides();
    for (std::size_t k = 0; k < wd.outer().size(); ++k) {
      coeff[n][wd.outer_link_of(k)] += static_cast<std::int64_t>(strides[k]);
    }
  }
  std::vector<std::vector<std::int64_t>> delta(n + 1, std::vector<std::int64_t>(n_links, 0));
  for (std::size_t i = 0; i <= n; ++i) {
    std::int64_t rollback = 0;
    for (std::size_t l = n_links; l-- > 0;) {
      delta[i][l] = coeff[i][l] - rollback;
      rollback += static_cast<std::int64_t>(res[l] - 1) * coeff[i][l];
    }
  }

  BoolArray out(wd.outer());
  std::vector<std::int64_t> off(n + 1, 0);
  std::vector<int> coords(n_links, 1);
  for (std::uint64_t step = 0; step < total; ++step) {
    std::uint8_t all = 1;
    for (std::size_t i = 0; i < n; ++i) {
      all &= table[i][off[i]];
    }
    if (all) out.put(static_cast<std::uint64_t>(off[n]), 1);
    for (std::size_t l = n_links; l-- > 0;) {
      if (coords[l] < res[l]) {
        ++coords[l];
        for (std::size_t i = 0; i <= n; ++i) off[i] += delta[i][l];
        break;
      }
      coords[l] = 1;
    }
  }
  return out;
}

CompareReport compare(const BoolArray& a, const BoolArray& b) {
  if (a.pack() != b.pack()) fail(Errc::pack_mismatch, "arrays have different packs");
  CompareReport report;
  for (std::uint64_t i = 0; i < a.size(); ++i) {
    bool va = a.at(i) != 0;
    bool vb = b.at(i) != 0;
    if (va && vb) ++report.both;
    else if (va) ++report.only_in_a;
    else if (vb) ++report.only_in_b;
    else ++report.neither;
  }
  return report;
}

namespace {

nlohmann::json plan_node_json(const ClusterTree& node) {
  nlohmann::json j;
  if (node.is_leaf()) {
    j["leaf"] = node.leaf + 1;
    return j;
  }
  nlohmann::json children = nlohmann::json::array();
  for (const ClusterTree& child : node.children) children.push_back(plan_node_json(child));
  j["children"] = std::move(children);
  j["links"] = node.diagram.links().size();
  j["entries"] = link_entry_count(node.diagram);
  return j;
}

}  // namespace

std::string provenance_json(const Solution& solution) {
  nlohmann::json j;
  j["plan"] = plan_node_json(solution.plan);
  j["seconds"] = solution.seconds;
  j["guarantee_epsilon"] = solution.guarantee_epsilon;
  nlohmann::json stages = nlohmann::json::array();
  for (const StageStats& s : solution.stages) {
    stages.push_back({{"stage", s.name}, {"entries", s.entries}, {"seconds", s.seconds}});
  }
  j["stages"] = std::move(stages);
  return j.dump(2);
}

}  // namespace pixelarray
