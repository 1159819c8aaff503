#include "pixelarray/cluster.hpp"

#include <algorithm>
#include <numeric>

#include <json.hpp>

namespace pixelarray {

namespace {

using IdxSet = std::vector<int>;  // sorted, unique

IdxSet set_union(const IdxSet& a, const IdxSet& b) {
  IdxSet out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IdxSet set_intersection(const IdxSet& a, const IdxSet& b) {
  IdxSet out;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IdxSet set_difference(const IdxSet& a, const IdxSet& b) {
  IdxSet out;
  std::set_difference(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

IdxSet touched_links(const WiringDiagram& wd, int pack_index) {
  IdxSet out;
  for (std::size_t k = 0; k < wd.inner_pack(pack_index).size(); ++k) {
    out.push_back(wd.link_of(pack_index, k));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

IdxSet outer_links(const WiringDiagram& wd) {
  IdxSet out;
  for (std::size_t k = 0; k < wd.outer().size(); ++k) {
    out.push_back(wd.outer_link_of(k));
  }
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> link_names(const WiringDiagram& wd, const IdxSet& links) {
  std::vector<std::string> names;
  names.reserve(links.size());
  for (int l : links) names.push_back(wd.links()[l].name);
  return names;
}

Pack pack_from_links(const WiringDiagram& wd, const IdxSet& links) {
  std::vector<Port> ports;
  ports.reserve(links.size());
  for (int l : links) {
    const Link& link = wd.links()[l];
    ports.push_back(Port{link.name, link.lower, link.upper, link.resolution});
  }
  return make_pack(ports);
}

bool uniform_resolution(const WiringDiagram& wd) {
  for (std::size_t l = 1; l < wd.links().size(); ++l) {
    if (wd.links()[l].resolution != wd.links()[0].resolution) return false;
  }
  return true;
}

std::uint64_t saturating_mul(std::uint64_t a, std::uint64_t b, bool& overflow) {
  std::uint64_t out = 0;
  if (__builtin_mul_overflow(a, b, &out)) {
    overflow = true;
    return std::numeric_limits<std::uint64_t>::max();
  }
  return out;
}

std::uint64_t saturating_add(std::uint64_t a, std::uint64_t b, bool& overflow) {
  std::uint64_t out = 0;
  if (__builtin_add_overflow(a, b, &out)) {
    overflow = true;
    return std::numeric_limits<std::uint64_t>::max();
  }
  return out;
}

// Cost of iterating the given link set once: r^links as a monomial plus the
// exact product of the actual resolutions.
DiagramCost links_cost(const WiringDiagram& wd, const IdxSet& links, bool uniform) {
  DiagramCost cost;
  cost.uniform = uniform;
  cost.poly = CostPoly::monomial(links.size());
  cost.exact_clamped = 1;
  for (int l : links) {
    cost.exact_clamped = saturating_mul(
        cost.exact_clamped, static_cast<std::uint64_t>(wd.links()[l].resolution), cost.overflow);
  }
  return cost;
}

DiagramCost zero_cost(bool uniform) {
  DiagramCost cost;
  cost.uniform = uniform;
  cost.exact_clamped = 0;
  return cost;
}

}  // namespace

// ---- CostPoly ----

CostPoly CostPoly::monomial(std::size_t degree, std::uint64_t coefficient) {
  CostPoly p;
  if (coefficient == 0) return p;
  p.coeffs_.assign(degree + 1, 0);
  p.coeffs_[degree] = coefficient;
  return p;
}

CostPoly& CostPoly::operator+=(const CostPoly& o) {
  if (o.coeffs_.size() > coeffs_.size()) coeffs_.resize(o.coeffs_.size(), 0);
  bool overflow = false;
  for (std::size_t d = 0; d < o.coeffs_.size(); ++d) {
    coeffs_[d] = saturating_add(coeffs_[d], o.coeffs_[d], overflow);
  }
  return *this;
}

int CostPoly::compare(const CostPoly& o) const {
  std::size_t top = std::max(coeffs_.size(), o.coeffs_.size());
  for (std::size_t d = top; d-- > 0;) {
    std::uint64_t a = coefficient(d);
    std::uint64_t b = o.coefficient(d);
    if (a != b) return a < b ? -1 : 1;
  }
  return 0;
}

double CostPoly::eval(double r) const {
  double v = 0.0;
  for (std::size_t d = coeffs_.size(); d-- > 0;) {
    v = v * r + static_cast<double>(coeffs_[d]);
  }
  return v;
}

std::uint64_t CostPoly::eval_exact(std::uint64_t r) const {
  std::uint64_t v = 0;
  for (std::size_t d = coeffs_.size(); d-- > 0;) {
    v = checked_mul(v, r, "cost evaluation");
    std::uint64_t out = 0;
    if (__builtin_add_overflow(v, coeffs_[d], &out)) {
      fail(Errc::cost_overflow, "cost evaluation exceeds 64-bit range");
    }
    v = out;
  }
  return v;
}

std::string CostPoly::str() const {
  if (coeffs_.empty()) return "0";
  std::string out;
  for (std::size_t d = coeffs_.size(); d-- > 0;) {
    std::uint64_t c = coeffs_[d];
    if (c == 0) continue;
    if (!out.empty()) out += "+";
    if (c != 1 || d == 0) out += std::to_string(c);
    if (d >= 1) {
      out += "r";
      if (d >= 2) out += "^" + std::to_string(d);
    }
  }
  return out.empty() ? "0" : out;
}

std::uint64_t DiagramCost::exact() const {
  if (overflow) fail(Errc::cost_overflow, "exact cost exceeds 64-bit range");
  return exact_clamped;
}

DiagramCost add_costs(const DiagramCost& a, const DiagramCost& b) {
  DiagramCost out;
  out.poly = a.poly + b.poly;
  out.uniform = a.uniform && b.uniform;
  out.overflow = a.overflow || b.overflow;
  out.exact_clamped = saturating_add(a.exact_clamped, b.exact_clamped, out.overflow);
  return out;
}

int compare_costs(const DiagramCost& a, const DiagramCost& b) {
  if (a.uniform && b.uniform) return a.poly.compare(b.poly);
  if (a.exact_clamped != b.exact_clamped) {
    return a.exact_clamped < b.exact_clamped ? -1 : 1;
  }
  return a.poly.compare(b.poly);
}

// ---- factorization ----

Factorization factorize(const WiringDiagram& wd, const std::vector<int>& cluster) {
  const int n = static_cast<int>(wd.inner_count());
  IdxSet c = cluster;
  std::sort(c.begin(), c.end());
  c.erase(std::unique(c.begin(), c.end()), c.end());
  if (c.empty()) fail(Errc::empty_cluster, "cluster must contain at least one pack");
  if (!c.empty() && (c.front() < 0 || c.back() >= n)) {
    fail(Errc::index_out_of_range, "cluster index out of range");
  }
  if (static_cast<int>(c.size()) == n) {
    fail(Errc::full_cluster, "cluster must be a proper subset of the inner packs");
  }

  std::vector<bool> in_cluster(n, false);
  for (int i : c) in_cluster[i] = true;

  IdxSet interior, exterior = outer_links(wd);
  for (int i = 0; i < n; ++i) {
    IdxSet t = touched_links(wd, i);
    if (in_cluster[i]) {
      interior = set_union(interior, t);
    } else {
      exterior = set_union(exterior, t);
    }
  }
  IdxSet q = set_intersection(interior, exterior);

  Factorization f;
  f.cluster = c;
  f.intermediate = pack_from_links(wd, q);
  f.interior_links = link_names(wd, interior);
  f.exterior_links = link_names(wd, exterior);
  f.properly_internal = link_names(wd, set_difference(interior, q));
  f.properly_external = link_names(wd, set_difference(exterior, q));

  std::vector<std::string> q_names = link_names(wd, q);

  {
    std::vector<Pack> packs;
    std::vector<std::vector<std::string>> assignment;
    for (int i : c) {
      packs.push_back(wd.inner_pack(i));
      std::vector<std::string> names;
      for (std::size_t k = 0; k < wd.inner_pack(i).size(); ++k) {
        names.push_back(wd.links()[wd.link_of(i, k)].name);
      }
      assignment.push_back(std::move(names));
    }
    f.interior = WiringDiagram::create(std::move(packs), f.intermediate, assignment, q_names);
  }
  {
    std::vector<Pack> packs = {f.intermediate};
    std::vector<std::vector<std::string>> assignment = {q_names};
    for (int i = 0; i < n; ++i) {
      if (in_cluster[i]) continue;
      packs.push_back(wd.inner_pack(i));
      std::vector<std::string> names;
      for (std::size_t k = 0; k < wd.inner_pack(i).size(); ++k) {
        names.push_back(wd.links()[wd.link_of(i, k)].name);
      }
      assignment.push_back(std::move(names));
    }
    std::vector<std::string> outer_names;
    for (std::size_t k = 0; k < wd.outer().size(); ++k) {
      outer_names.push_back(wd.links()[wd.outer_link_of(k)].name);
    }
    f.exterior = WiringDiagram::create(std::move(packs), wd.outer(), assignment, outer_names);
  }
  return f;
}

bool is_trivial(const Factorization& f) {
  return f.properly_internal.empty() || f.properly_external.empty();
}

DiagramCost naive_cost(const WiringDiagram& wd) {
  IdxSet all(wd.links().size());
  std::iota(all.begin(), all.end(), 0);
  return links_cost(wd, all, uniform_resolution(wd));
}

// ---- cluster trees ----

PlanShape PlanShape::leaf_of(int index) {
  PlanShape s;
  s.leaf = index;
  return s;
}

PlanShape PlanShape::node_of(std::vector<PlanShape> children) {
  PlanShape s;
  s.children = std::move(children);
  return s;
}

namespace {

// The intermediate pack for the leaf set S: links S shares with the packs
// outside S or with the outer pack.
IdxSet shared_links(const WiringDiagram& wd, const std::vector<int>& leaves) {
  std::vector<bool> inside(wd.inner_count(), false);
  for (int i : leaves) inside[i] = true;
  IdxSet mine, rest = outer_links(wd);
  for (std::size_t i = 0; i < wd.inner_count(); ++i) {
    IdxSet t = touched_links(wd, static_cast<int>(i));
    if (inside[i]) {
      mine = set_union(mine, t);
    } else {
      rest = set_union(rest, t);
    }
  }
  return set_intersection(mine, rest);
}

ClusterTree build_tree(const WiringDiagram& wd, const PlanShape& shape, bool is_root) {
  const int n = static_cast<int>(wd.inner_count());
  if (shape.is_leaf()) {
    if (shape.leaf < 0 || shape.leaf >= n) {
      fail(Errc::index_out_of_range, "plan leaf index out of range");
    }
    ClusterTree t;
    t.leaf = shape.leaf;
    t.output = wd.inner_pack(shape.leaf);
    t.leaves = {shape.leaf};
    return t;
  }
  if (shape.children.empty()) fail(Errc::bad_input, "plan node with no children");
  if (shape.children.size() < 2 && !(is_root && n == 1)) {
    fail(Errc::bad_input, "plan node must group at least two parts");
  }

  ClusterTree t;
  for (const PlanShape& child : shape.children) {
    t.children.push_back(build_tree(wd, child, false));
  }
  std::size_t total = 0;
  for (const ClusterTree& child : t.children) {
    total += child.leaves.size();
    t.leaves = set_union(t.leaves, child.leaves);
  }
  if (t.leaves.size() != total) fail(Errc::bad_input, "plan repeats an inner pack");

  if (is_root) {
    if (static_cast<int>(t.leaves.size()) != n) {
      fail(Errc::bad_input, "plan must cover every inner pack exactly once");
    }
    t.output = wd.outer();
  } else {
    t.output = pack_from_links(wd, shared_links(wd, t.leaves));
  }

  std::vector<Pack> packs;
  std::vector<std::vector<std::string>> assignment;
  for (const ClusterTree& child : t.children) {
    packs.push_back(child.output);
    std::vector<std::string> names;
    if (child.is_leaf()) {
      for (std::size_t k = 0; k < child.output.size(); ++k) {
        names.push_back(wd.links()[wd.link_of(child.leaf, k)].name);
      }
    } else {
      for (const Port& p : child.output.ports()) names.push_back(p.name);
    }
    assignment.push_back(std::move(names));
  }
  std::vector<std::string> outer_names;
  if (is_root) {
    for (std::size_t k = 0; k < wd.outer().size(); ++k) {
      outer_names.push_back(wd.links()[wd.outer_link_of(k)].name);
    }
  } else {
    for (const Port& p : t.output.ports()) outer_names.push_back(p.name);
  }
  t.diagram = WiringDiagram::create(std::move(packs), t.output, assignment, outer_names);
  return t;
}

}  // namespace

ClusterTree make_cluster_tree(const WiringDiagram& wd, const PlanShape& shape) {
  if (wd.inner_count() == 0) fail(Errc::bad_input, "diagram has no inner packs");
  if (shape.is_leaf()) {
    if (wd.inner_count() != 1 || shape.leaf != 0) {
      fail(Errc::bad_input, "a bare leaf plan fits only a single-pack diagram");
    }
    return build_tree(wd, PlanShape::node_of({PlanShape::leaf_of(0)}), true);
  }
  return build_tree(wd, shape, true);
}

ClusterTree flat_tree(const WiringDiagram& wd) {
  std::vector<PlanShape> leaves;
  for (std::size_t i = 0; i < wd.inner_count(); ++i) {
    leaves.push_back(PlanShape::leaf_of(static_cast<int>(i)));
  }
  return make_cluster_tree(wd, PlanShape::node_of(std::move(leaves)));
}

namespace {

void check_tree_leaves(const WiringDiagram& wd, const ClusterTree& tree) {
  std::vector<int> want(wd.inner_count());
  std::iota(want.begin(), want.end(), 0);
  if (tree.leaves != want) {
    fail(Errc::bad_input, "tree does not cover every inner pack exactly once");
  }
}

DiagramCost node_links_cost(const ClusterTree& node, bool uniform) {
  DiagramCost cost;
  cost.uniform = uniform;
  cost.poly = CostPoly::monomial(node.diagram.links().size());
  cost.exact_clamped = 1;
  for (const Link& l : node.diagram.links()) {
    cost.exact_clamped = saturating_mul(cost.exact_clamped,
                                        static_cast<std::uint64_t>(l.resolution), cost.overflow);
  }
  return cost;
}

DiagramCost serial_cost_rec(const ClusterTree& node, bool uniform) {
  if (node.is_leaf()) return zero_cost(uniform);
  DiagramCost total = node_links_cost(node, uniform);
  for (const ClusterTree& child : node.children) {
    total = add_costs(total, serial_cost_rec(child, uniform));
  }
  return total;
}

DiagramCost parallel_cost_rec(const ClusterTree& node, bool uniform) {
  if (node.is_leaf()) return zero_cost(uniform);
  DiagramCost best = zero_cost(uniform);
  for (const ClusterTree& child : node.children) {
    DiagramCost c = parallel_cost_rec(child, uniform);
    if (compare_costs(c, best) > 0) best = c;
  }
  return add_costs(node_links_cost(node, uniform), best);
}

}  // namespace

TreeCost tree_cost(const WiringDiagram& wd, const ClusterTree& tree) {
  check_tree_leaves(wd, tree);
  bool uniform = uniform_resolution(wd);
  return TreeCost{serial_cost_rec(tree, uniform), parallel_cost_rec(tree, uniform)};
}

// ---- planning ----

namespace {

constexpr int kExhaustiveLimit = 7;

struct ExhaustivePlanner {
  const WiringDiagram& wd;
  bool uniform;
  int n;
  std::vector<IdxSet> touch;   // by pack
  IdxSet outer;
  std::vector<IdxSet> q_of;    // by subset mask: links shared with the outside
  std::vector<IdxSet> t_of;    // by subset mask: all touched links
  struct Best {
    bool ready = false;
    DiagramCost cost;
    std::vector<int> blocks;
  };
  std::vector<Best> best;

  explicit ExhaustivePlanner(const WiringDiagram& diagram)
      : wd(diagram), uniform(uniform_resolution(diagram)), n(static_cast<int>(diagram.inner_count())) {
    touch.resize(n);
    for (int i = 0; i < n; ++i) touch[i] = touched_links(wd, i);
    outer = outer_links(wd);
    int full = (1 << n);
    q_of.resize(full);
    t_of.resize(full);
    best.resize(full);
    for (int mask = 1; mask < full; ++mask) {
      IdxSet mine;
      IdxSet rest = outer;
      for (int i = 0; i < n; ++i) {
        if (mask & (1 << i)) {
          mine = set_union(mine, touch[i]);
        } else {
          rest = set_union(rest, touch[i]);
        }
      }
      t_of[mask] = mine;
      q_of[mask] = set_intersection(mine, rest);
    }
  }

  // Links iterated when contracting the blocks of `mask` in one step: leaf
  // blocks expose their whole pack, grouped blocks only their intermediate.
  IdxSet node_links(const std::vector<int>& blocks) const {
    IdxSet links;
    for (int b : blocks) {
      links = set_union(links, __builtin_popcount(b) == 1 ? t_of[b] : q_of[b]);
    }
    return links;
  }

  const Best& solve(int mask) {
    Best& slot = best[mask];
    if (slot.ready) return slot;
    slot.ready = true;
    if (__builtin_popcount(mask) == 1) {
      slot.cost = zero_cost(uniform);
      return slot;
    }
    std::vector<int> acc;
    enumerate_partitions(mask, acc, slot);
    return slot;
  }

  // Enumerates set partitions of `mask` (first block holds the lowest pack)
  // and keeps the cheapest; the enumeration order breaks ties determinately.
  void enumerate_partitions(int mask, std::vector<int>& acc, Best& slot) {
    if (mask == 0) {
      if (acc.size() < 2) return;
      DiagramCost cost = links_cost(wd, node_links(acc), uniform);
      for (int b : acc) {
        cost = add_costs(cost, solve(b).cost);
      }
      if (slot.blocks.empty() || compare_costs(cost, slot.cost) < 0) {
        slot.cost = cost;
        slot.blocks = acc;
      }
      return;
    }
    int first = mask & -mask;
    int rest = mask ^ first;
    int sub = rest;
    while (true) {
      int block = sub | first;
      acc.push_back(block);
      enumerate_partitions(mask ^ block, acc, slot);
      acc.pop_back();
      if (sub == 0) break;
      sub = (sub - 1) & rest;
    }
  }

  PlanShape shape_of(int mask) {
    if (__builtin_popcount(mask) == 1) {
      int i = __builtin_ctz(mask);
      return PlanShape::leaf_of(i);
    }
    const Best& b = best[mask];
    std::vector<PlanShape> children;
    for (int block : b.blocks) children.push_back(shape_of(block));
    return PlanShape::node_of(std::move(children));
  }
};

using u128 = unsigned __int128;
constexpr u128 kU128Cap = ~static_cast<u128>(0);

u128 sat_mul_u128(u128 a, u128 b) {
  if (a == 0 || b == 0) return 0;
  if (a > kU128Cap / b) return kU128Cap;
  return a * b;
}

u128 sat_add_u128(u128 a, u128 b) {
  if (a > kU128Cap - b) return kU128Cap;
  return a + b;
}

u128 product_of_links(const WiringDiagram& wd, const IdxSet& links) {
  u128 v = 1;
  for (int l : links) {
    v = sat_mul_u128(v, static_cast<u128>(wd.links()[l].resolution));
  }
  return v;
}

ClusterTree plan_greedy(const WiringDiagram& wd) {
  const int n = static_cast<int>(wd.inner_count());
  std::vector<ClusterTree> nodes;
  for (int i = 0; i < n; ++i) {
    ClusterTree leaf;
    leaf.leaf = i;
    leaf.output = wd.inner_pack(i);
    leaf.leaves = {i};
    nodes.push_back(std::move(leaf));
  }
  WiringDiagram cur = wd;

  while (nodes.size() >= 3) {
    const int m = static_cast<int>(nodes.size());
    std::vector<IdxSet> touch(m);
    for (int i = 0; i < m; ++i) touch[i] = touched_links(cur, i);
    IdxSet outer = outer_links(cur);

    bool found = false;
    u128 best_saving = 0;
    std::pair<int, int> best_pair{-1, -1};
    std::vector<int> best_union;

    for (int i = 0; i < m; ++i) {
      for (int j = i + 1; j < m; ++j) {
        IdxSet interior = set_union(touch[i], touch[j]);
        IdxSet exterior = outer;
        for (int k = 0; k < m; ++k) {
          if (k != i && k != j) exterior = set_union(exterior, touch[k]);
        }
        IdxSet q = set_intersection(interior, exterior);
        IdxSet l1 = set_difference(interior, q);
        IdxSet l2 = set_difference(exterior, q);
        if (l1.empty() || l2.empty()) continue;  // trivial cluster

        u128 rq = product_of_links(cur, q);
        u128 r1 = product_of_links(cur, l1);
        u128 r2 = product_of_links(cur, l2);
        u128 both = sat_mul_u128(r1, r2);
        u128 sum = sat_add_u128(r1, r2);
        u128 saving = sat_mul_u128(rq, both - (sum < both ? sum : both));

        std::vector<int> combined = set_union(nodes[i].leaves, nodes[j].leaves);
        bool better = false;
        if (!found || saving > best_saving) {
          better = true;
        } else if (saving == best_saving && combined < best_union) {
          better = true;
        }
        if (better) {
          found = true;
          best_saving = saving;
          best_pair = {i, j};
          best_union = combined;
        }
      }
    }
    if (!found) break;

    Factorization f = factorize(cur, {best_pair.first, best_pair.second});
    ClusterTree merged;
    merged.children.push_back(std::move(nodes[best_pair.first]));
    merged.children.push_back(std::move(nodes[best_pair.second]));
    merged.diagram = f.interior;
    merged.output = f.intermediate;
    merged.leaves = best_union;

    std::vector<ClusterTree> next;
    next.push_back(std::move(merged));
    for (int k = 0; k < m; ++k) {
      if (k != best_pair.first && k != best_pair.second) next.push_back(std::move(nodes[k]));
    }
    nodes = std::move(next);
    cur = f.exterior;
  }

  ClusterTree root;
  root.children = std::move(nodes);
  root.diagram = cur;
  root.output = wd.outer();
  for (int i = 0; i < n; ++i) root.leaves.push_back(i);
  return root;
}

}  // namespace

ClusterTree plan(const WiringDiagram& wd, PlanStrategy strategy) {
  const int n = static_cast<int>(wd.inner_count());
  if (n == 0) fail(Errc::bad_input, "diagram has no inner packs");
  if (strategy == PlanStrategy::greedy) {
    return plan_greedy(wd);
  }
  if (n > kExhaustiveLimit) {
    fail(Errc::too_many_packs,
         "exhaustive planning supports at most " + std::to_string(kExhaustiveLimit) +
             " inner packs; use the greedy strategy");
  }
  if (n == 1) {
    return make_cluster_tree(wd, PlanShape::node_of({PlanShape::leaf_of(0)}));
  }
  ExhaustivePlanner planner(wd);
  int full = (1 << n) - 1;
  planner.solve(full);
  return make_cluster_tree(wd, planner.shape_of(full));
}

// ---- plan serialization ----

namespace {

nlohmann::json tree_to_json(const ClusterTree& node) {
  nlohmann::json j;
  if (node.is_leaf()) {
    j["leaf"] = node.leaf + 1;  // 1-based externally
    return j;
  }
  nlohmann::json children = nlohmann::json::array();
  for (const ClusterTree& child : node.children) children.push_back(tree_to_json(child));
  j["children"] = std::move(children);
  j["links"] = node.diagram.links().size();
  j["cost"] = CostPoly::monomial(node.diagram.links().size()).str();
  bool overflow = false;
  std::uint64_t entries = 1;
  for (const Link& l : node.diagram.links()) {
    entries = saturating_mul(entries, static_cast<std::uint64_t>(l.resolution), overflow);
  }
  if (overflow) {
    j["entries"] = "overflow";
  } else {
    j["entries"] = entries;
  }
  return j;
}

PlanShape shape_from_json(const nlohmann::json& j) {
  if (j.is_number_integer()) {
    return PlanShape::leaf_of(j.get<int>() - 1);
  }
  if (j.is_array()) {
    std::vector<PlanShape> children;
    for (const auto& c : j) children.push_back(shape_from_json(c));
    return PlanShape::node_of(std::move(children));
  }
  if (j.is_object()) {
    if (j.contains("leaf")) return PlanShape::leaf_of(j.at("leaf").get<int>() - 1);
    if (j.contains("children")) {
      std::vector<PlanShape> children;
      for (const auto& c : j.at("children")) children.push_back(shape_from_json(c));
      return PlanShape::node_of(std::move(children));
    }
  }
  fail(Errc::bad_input, "plan JSON must be nested arrays of leaf indices");
}

}  // namespace

std::string plan_to_json(const ClusterTree& tree, const WiringDiagram& wd) {
  TreeCost cost = tree_cost(wd, tree);
  DiagramCost naive = naive_cost(wd);
  nlohmann::json j;
  j["tree"] = tree_to_json(tree);
  j["serial_cost"] = cost.serial.poly.str();
  j["parallel_cost"] = cost.parallel.poly.str();
  j["naive_cost"] = naive.poly.str();
  if (!cost.serial.overflow) j["serial_entries"] = cost.serial.exact_clamped;
  if (!naive.overflow) j["naive_entries"] = naive.exact_clamped;
  return j.dump(2);
}

PlanShape plan_shape_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text, nullptr, false);
  if (j.is_discarded()) fail(Errc::bad_input, "plan file is not valid JSON");
  if (j.is_object() && j.contains("tree")) return shape_from_json(j.at("tree"));
  return shape_from_json(j);
}

// ---- random diagrams and the clustering study ----

WiringDiagram random_wiring_diagram(std::mt19937_64& rng, int packs,
                                    const RandomDiagramParams& params) {
  if (packs < 1) fail(Errc::bad_input, "need at least one inner pack");
  if (params.min_ports < 1 || params.max_ports < params.min_ports || params.max_ports > 6) {
    fail(Errc::bad_input, "ports per pack must lie in [1, 6]");
  }

  auto pick = [&rng](int n) { return static_cast<int>(rng() % static_cast<std::uint64_t>(n)); };

  auto link_name = [](int i) {
    std::string s = "l000";
    s[1] = static_cast<char>('0' + i / 100);
    s[2] = static_cast<char>('0' + (i / 10) % 10);
    s[3] = static_cast<char>('0' + i % 10);
    return s;
  };
  const char* port_names[] = {"a", "b", "c", "d", "e", "f"};

  int n_links = 0;
  std::vector<Pack> inner;
  std::vector<std::vector<std::string>> assignment;
  for (int i = 0; i < packs; ++i) {
    int n_ports = params.min_ports + pick(params.max_ports - params.min_ports + 1);
    std::vector<Port> ports;
    std::vector<std::string> names;
    for (int k = 0; k < n_ports; ++k) {
      bool join = n_links > 0 &&
                  (static_cast<double>(rng() % 1000000) / 1000000.0) < params.join_probability;
      int link = join ? pick(n_links) : n_links++;
      ports.push_back(Port{port_names[k], 0.0, 1.0, params.resolution});
      names.push_back(link_name(link));
    }
    inner.push_back(make_pack(ports));
    assignment.push_back(std::move(names));
  }

  int n_outer = pick(params.max_outer_ports + 1);
  if (n_outer > n_links) n_outer = n_links;
  std::vector<int> chosen;
  while (static_cast<int>(chosen.size()) < n_outer) {
    int l = pick(n_links);
    if (std::find(chosen.begin(), chosen.end(), l) == chosen.end()) chosen.push_back(l);
  }
  std::sort(chosen.begin(), chosen.end());
  std::vector<Port> outer_ports;
  std::vector<std::string> outer_names;
  for (int l : chosen) {
    outer_ports.push_back(Port{link_name(l), 0.0, 1.0, params.resolution});
    outer_names.push_back(link_name(l));
  }
  return WiringDiagram::create(std::move(inner), make_pack(outer_ports), assignment, outer_names);
}

std::vector<StudyRow> clustering_study(int trials, int max_packs, std::uint64_t seed) {
  if (trials < 1) fail(Errc::bad_input, "need at least one trial");
  if (max_packs < 1) fail(Errc::bad_input, "need at least one pack");

  std::mt19937_64 rng(seed);
  RandomDiagramParams params;
  std::vector<std::vector<double>> ratios(max_packs + 1);

  for (int t = 0; t < trials; ++t) {
    int n = 1 + static_cast<int>(rng() % static_cast<std::uint64_t>(max_packs));
    WiringDiagram wd = random_wiring_diagram(rng, n, params);
    ClusterTree tree =
        plan(wd, n <= kExhaustiveLimit ? PlanStrategy::exhaustive : PlanStrategy::greedy);
    TreeCost cost = tree_cost(wd, tree);
    double planned = cost.serial.poly.eval(params.resolution);
    double naive = naive_cost(wd).poly.eval(params.resolution);
    ratios[n].push_back(planned / naive);
  }

  std::vector<StudyRow> rows;
  for (int n = 1; n <= max_packs; ++n) {
    StudyRow row;
    row.packs = n;
    row.count = static_cast<int>(ratios[n].size());
    if (row.count > 0) {
      double sum = 0.0;
      for (double v : ratios[n]) sum += v;
      row.mean_ratio = sum / row.count;
      std::vector<double> sorted = ratios[n];
      std::sort(sorted.begin(), sorted.end());
      row.median_ratio = sorted.size() % 2 == 1
                             ? sorted[sorted.size() / 2]
                             : 0.5 * (sorted[sorted.size() / 2 - 1] + sorted[sorted.size() / 2]);
    }
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pixelarray
