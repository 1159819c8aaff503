#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "pixelarray/model.hpp"

namespace pixelarray {

// Univariate polynomial in r with natural coefficients, totally ordered by
// comparing coefficients from the highest degree down (so r^2 < r^2 + r <
// 2r^2 < r^3). Costs of contraction plans live here when the resolution is
// constant across links.
class CostPoly {
 public:
  CostPoly() = default;  // the zero polynomial

  static CostPoly monomial(std::size_t degree, std::uint64_t coefficient = 1);

  bool is_zero() const { return coeffs_.empty(); }
  std::size_t degree() const { return coeffs_.empty() ? 0 : coeffs_.size() - 1; }
  std::uint64_t coefficient(std::size_t d) const {
    return d < coeffs_.size() ? coeffs_[d] : 0;
  }

  CostPoly& operator+=(const CostPoly& o);
  friend CostPoly operator+(CostPoly a, const CostPoly& b) { return a += b; }

  // negative / zero / positive like strcmp; a total order.
  int compare(const CostPoly& o) const;
  bool operator==(const CostPoly& o) const { return coeffs_ == o.coeffs_; }
  bool operator<(const CostPoly& o) const { return compare(o) < 0; }
  bool operator<=(const CostPoly& o) const { return compare(o) <= 0; }

  double eval(double r) const;
  std::uint64_t eval_exact(std::uint64_t r) const;  // throws cost_overflow

  // "2r^5+2r^4+r^3"; the zero polynomial prints "0".
  std::string str() const;

 private:
  std::vector<std::uint64_t> coeffs_;
};

// A cost carrying both views: the polynomial (meaningful when every link of
// the diagram shares one resolution) and the exact integer at the actual
// resolutions, saturated at 2^64-1 with an overflow flag.
struct DiagramCost {
  CostPoly poly;
  bool uniform = true;
  bool overflow = false;
  std::uint64_t exact_clamped = 0;

  std::uint64_t exact() const;  // throws cost_overflow when saturated
};

DiagramCost add_costs(const DiagramCost& a, const DiagramCost& b);
// Polynomial order when both sides are uniform, exact integers otherwise.
int compare_costs(const DiagramCost& a, const DiagramCost& b);

// Splitting a diagram through a cluster C of inner packs: the interior
// diagram contracts C to the intermediate pack Q (the links C shares with
// the rest or with the outer pack); the exterior diagram contracts Q plus
// the remaining packs to the original outer pack.
struct Factorization {
  std::vector<int> cluster;  // sorted inner indices
  WiringDiagram interior;
  WiringDiagram exterior;
  Pack intermediate;
  std::vector<std::string> interior_links;     // links touched by C
  std::vector<std::string> exterior_links;     // links touched by the rest
  std::vector<std::string> properly_internal;  // interior minus intermediate
  std::vector<std::string> properly_external;  // exterior minus intermediate
};

Factorization factorize(const WiringDiagram& wd, const std::vector<int>& cluster);

// A cluster is trivial when it has no properly internal or no properly
// external links; contracting it first cannot save work.
bool is_trivial(const Factorization& f);

// r^Lambda: the iteration count of the unclustered contraction.
DiagramCost naive_cost(const WiringDiagram& wd);

// Nested contraction plan. Leaves are inner packs; every internal node
// carries the wiring diagram of its contraction step and its output pack
// (the intermediate pack, or the full diagram's outer pack at the root).
struct ClusterTree {
  int leaf = -1;
  std::vector<ClusterTree> children;
  WiringDiagram diagram;
  Pack output;
  std::vector<int> leaves;

  bool is_leaf() const { return leaf >= 0; }
};

struct TreeCost {
  DiagramCost serial;    // sum of node costs
  DiagramCost parallel;  // node cost plus the max over children, recursively
};

TreeCost tree_cost(const WiringDiagram& wd, const ClusterTree& tree);

// Plain nested grouping of leaf indices, the serialized form of a plan.
struct PlanShape {
  int leaf = -1;
  std::vector<PlanShape> children;

  static PlanShape leaf_of(int index);
  static PlanShape node_of(std::vector<PlanShape> children);
  bool is_leaf() const { return leaf >= 0; }
};

// Builds the tree for a shape, deriving every node's diagram and output
// pack. The shape's leaves must be a permutation of the inner packs; only
// the root may have fewer than two children (single inner pack).
ClusterTree make_cluster_tree(const WiringDiagram& wd, const PlanShape& shape);

// The unclustered plan: one contraction of all inner packs.
ClusterTree flat_tree(const WiringDiagram& wd);

enum class PlanStrategy { exhaustive, greedy };

// Exhaustive: minimal serial cost over all recursive set partitions,
// memoized on pack subsets (up to 7 inner packs). Greedy: repeatedly merges
// the nontrivial pair with the largest cost saving, smallest-leaf-set first
// on ties, then contracts whatever remains in one node.
ClusterTree plan(const WiringDiagram& wd, PlanStrategy strategy);

std::string plan_to_json(const ClusterTree& tree, const WiringDiagram& wd);
PlanShape plan_shape_from_json(const std::string& text);

struct RandomDiagramParams {
  int min_ports = 2;
  int max_ports = 4;
  double join_probability = 0.5;  // chance a port joins an existing link
  int max_outer_ports = 2;
  int resolution = 10;
};

WiringDiagram random_wiring_diagram(std::mt19937_64& rng, int packs,
                                    const RandomDiagramParams& params = {});

struct StudyRow {
  int packs = 0;
  int count = 0;
  double mean_ratio = 0.0;
  double median_ratio = 0.0;
};

// Plans `trials` random diagrams with 1..max_packs inner packs and reports,
// per pack count, the mean and median of (planned serial cost / naive cost)
// with costs evaluated at r = 10. Deterministic under the seed.
std::vector<StudyRow> clustering_study(int trials, int max_packs, std::uint64_t seed);

}  // namespace pixelarray
