#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "pixelarray/array.hpp"
#include "pixelarray/cluster.hpp"
#include "pixelarray/expr.hpp"
#include "pixelarray/model.hpp"

namespace pixelarray {

// A full problem statement: relations, a discretization per variable, the
// variables to expose, and per-relation tolerances (default 0.05).
struct SystemSpec {
  std::vector<Relation> relations;
  std::map<std::string, VarSpec> varspecs;
  std::vector<std::string> exposed;
  double default_tolerance = 0.05;
  std::map<std::string, double> tolerances;  // by relation id
};

// Relations sorted by id, their tolerances, and the wiring diagram whose
// inner pack i indexes relation i.
struct CompiledProblem {
  std::vector<Relation> relations;
  std::vector<double> epsilons;
  WiringDiagram diagram;
};

CompiledProblem compile(const SystemSpec& spec);

struct PlanChoice {
  enum class Kind { automatic, unclustered, given };
  Kind kind = Kind::automatic;
  PlanShape shape;

  static PlanChoice automatic_plan() { return {}; }
  static PlanChoice none() { return {Kind::unclustered, {}}; }
  static PlanChoice from_shape(PlanShape s) { return {Kind::given, std::move(s)}; }
};

struct SolveOptions {
  std::uint64_t budget = 1'000'000'000;  // link entries allowed per stage
  int threads = 1;
};

struct StageStats {
  std::string name;
  std::uint64_t entries = 0;
  double seconds = 0.0;
};

struct Solution {
  BoolArray array;
  ClusterTree plan;
  std::vector<StageStats> stages;
  double seconds = 0.0;
  // accuracy guarantee of the combined plot: the largest tolerance used
  double guarantee_epsilon = 0.0;
};

// Plots every relation, executes the plan bottom-up, and returns the
// exposed-variable array. The result does not depend on the plan.
Solution solve(const CompiledProblem& problem, const PlanChoice& plan = {},
               const SolveOptions& opts = {});

// Straight-loop reference: walks every link entry once and turns an outer
// pixel on iff every relation is within tolerance at the center of its
// projected pixel (subsamples = 1) or at the minimum over a subsamples^dim
// sub-grid. Bit-identical to solve() at subsamples = 1.
BoolArray oracle_solve(const CompiledProblem& problem, int subsamples = 1,
                       std::uint64_t budget = 1'000'000'000);

struct CompareReport {
  std::uint64_t only_in_a = 0;
  std::uint64_t only_in_b = 0;
  std::uint64_t both = 0;
  std::uint64_t neither = 0;
};

CompareReport compare(const BoolArray& a, const BoolArray& b);

// Plan, per-stage entry counts and wall times as a JSON document.
std::string provenance_json(const Solution& solution);

}  // namespace pixelarray
