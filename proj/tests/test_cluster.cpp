#include <doctest.h>

#include <functional>
#include <map>
#include <random>

#include "pixelarray/cluster.hpp"
#include "pixelarray/gam.hpp"

using namespace pixelarray;

namespace {

// Chain of three matrices M{m,n}, N{n,p}, P{p,q} exposing (m,q).
WiringDiagram chain_diagram(int res = 4) {
  std::map<std::string, VarSpec> vars;
  for (const char* v : {"m", "n", "p", "q"}) vars[v] = VarSpec{0, 1, res};
  return build_wiring_diagram({{"M", {"m", "n"}}, {"N", {"n", "p"}}, {"P", {"p", "q"}}}, vars,
                              {"m", "q"});
}

// Seven packs A..G: A, B and E reach the outer pack, A-B-C share a
// three-way link, C-D and E-F are doubly linked, D-G and F-G singly. The
// hand-built tree {{A,B,C},{{{E,F},G},D}} costs 2r^5+2r^4+r^3 serial and
// 2r^5 parallel on this diagram.
WiringDiagram seven_pack_diagram(int res = 2) {
  auto port = [&](const char* name) { return Port{name, 0.0, 1.0, res}; };
  std::vector<Pack> inner = {
      make_pack({port("outA"), port("abc")}),                // A
      make_pack({port("outB"), port("abc")}),                // B
      make_pack({port("abc"), port("cd1"), port("cd2")}),    // C
      make_pack({port("cd1"), port("cd2"), port("dg")}),     // D
      make_pack({port("outE"), port("ef1"), port("ef2")}),   // E
      make_pack({port("ef1"), port("ef2"), port("fg")}),     // F
      make_pack({port("dg"), port("fg")}),                   // G
  };
  std::vector<std::vector<std::string>> assignment;
  for (const Pack& pack : inner) {
    std::vector<std::string> names;
    for (const Port& p : pack.ports()) names.push_back(p.name);
    assignment.push_back(names);
  }
  Pack outer = make_pack({port("outA"), port("outB"), port("outE")});
  return WiringDiagram::create(inner, outer, assignment, {"outA", "outB", "outE"});
}

// {{A,B,C},{{{E,F},G},D}} with A..G as leaves 0..6.
PlanShape seven_pack_tree() {
  PlanShape abc = PlanShape::node_of(
      {PlanShape::leaf_of(0), PlanShape::leaf_of(1), PlanShape::leaf_of(2)});
  PlanShape ef = PlanShape::node_of({PlanShape::leaf_of(4), PlanShape::leaf_of(5)});
  PlanShape efg = PlanShape::node_of({ef, PlanShape::leaf_of(6)});
  PlanShape efgd = PlanShape::node_of({efg, PlanShape::leaf_of(3)});
  return PlanShape::node_of({abc, efgd});
}

CostPoly poly(std::initializer_list<std::pair<int, std::uint64_t>> terms) {
  CostPoly p;
  for (auto [deg, coeff] : terms) p += CostPoly::monomial(deg, coeff);
  return p;
}

std::vector<std::string> names(const std::vector<std::string>& v) { return v; }

}  // namespace

TEST_SUITE("cluster") {

TEST_CASE("cost polynomial ordering and printing") {
  CostPoly r2 = CostPoly::monomial(2);
  CostPoly r2_plus_r = poly({{2, 1}, {1, 1}});
  CostPoly two_r2 = CostPoly::monomial(2, 2);
  CostPoly r3 = CostPoly::monomial(3);

  CHECK(r2 < r2_plus_r);
  CHECK(r2_plus_r < two_r2);
  CHECK(two_r2 < r3);
  CHECK(r3.str() == "r^3");
  CHECK(poly({{5, 2}, {4, 2}, {3, 1}}).str() == "2r^5+2r^4+r^3");
  CHECK(poly({{1, 2}, {0, 3}}).str() == "2r+3");
  CHECK(CostPoly().str() == "0");

  CHECK(r3.eval(10.0) == 1000.0);
  CHECK(poly({{2, 2}}).eval_exact(10) == 200);

  // totality and transitivity on random polynomials
  std::mt19937_64 rng(67);
  auto random_poly = [&] {
    CostPoly p;
    for (int t = 0; t < 3; ++t) p += CostPoly::monomial(rng() % 6, rng() % 3);
    return p;
  };
  for (int i = 0; i < 300; ++i) {
    CostPoly a = random_poly(), b = random_poly(), c = random_poly();
    CHECK(((a < b) + (b < a) + (a == b)) == 1);
    if (a <= b && b <= c) CHECK(a <= c);
    // the order is the eventual (large-r) order: beyond the coefficient
    // mass, evaluation agrees with the comparison
    if (a < b) {
      double shift = 0;
      for (int d = 0; d < 8; ++d) shift += static_cast<double>(a.coefficient(d) + b.coefficient(d));
      double r = shift + 2.0;
      CHECK(a.eval(r) <= b.eval(r));
    }
  }
}

TEST_CASE("factorize the chain at {M,N}") {
  WiringDiagram wd = chain_diagram();
  Factorization f = factorize(wd, {0, 1});
  CHECK(f.intermediate.size() == 2);
  CHECK(f.intermediate.port(0).name == "m");
  CHECK(f.intermediate.port(1).name == "p");
  CHECK(f.properly_internal == names({"n"}));
  CHECK(f.properly_external == names({"q"}));
  CHECK_FALSE(is_trivial(f));
  CHECK(f.interior.inner_count() == 2);
  CHECK(f.exterior.inner_count() == 2);  // Q and P
  CHECK(f.exterior.outer() == wd.outer());
}

TEST_CASE("factorize the chain at {M} is trivial") {
  WiringDiagram wd = chain_diagram();
  Factorization f = factorize(wd, {0});
  CHECK(f.intermediate.size() == 2);  // {m,n}
  CHECK(f.properly_internal.empty());
  CHECK(is_trivial(f));
}

TEST_CASE("factorize the example system at {R2,R3} is trivial") {
  std::map<std::string, VarSpec> vars;
  for (const char* v : {"u", "v", "w", "x", "y", "z"}) vars[v] = VarSpec{-1, 1, 4};
  WiringDiagram wd = build_wiring_diagram(
      {{"R1", {"x", "y"}}, {"R2", {"v", "w", "y"}}, {"R3", {"u", "w", "x", "z"}}}, vars,
      {"v", "z"});
  Factorization f = factorize(wd, {1, 2});
  CHECK(f.intermediate.size() == 4);  // {v,x,y,z}
  CHECK(f.properly_internal == names({"u", "w"}));
  CHECK(f.properly_external.empty());
  CHECK(is_trivial(f));
}

TEST_CASE("factorize validates the cluster") {
  WiringDiagram wd = chain_diagram();
  CHECK_THROWS_AS(factorize(wd, {}), Error);
  CHECK_THROWS_AS(factorize(wd, {0, 1, 2}), Error);
  try {
    factorize(wd, {0, 1, 2});
  } catch (const Error& e) {
    CHECK(e.code() == Errc::full_cluster);
  }
}

TEST_CASE("naive cost") {
  CHECK(naive_cost(chain_diagram()).poly == CostPoly::monomial(4));
  CHECK(naive_cost(chain_diagram(4)).exact() == 256);
  CHECK(naive_cost(specialization_diagram(MatmulDims{4, 4, 4})).poly == CostPoly::monomial(3));
  WiringDiagram empty = WiringDiagram::create({make_pack({})}, make_pack({}), {{}}, {});
  CHECK(naive_cost(empty).poly == CostPoly::monomial(0));
  CHECK(naive_cost(empty).exact() == 1);
}

TEST_CASE("tree cost of the seven-pack example") {
  WiringDiagram wd = seven_pack_diagram();
  ClusterTree tree = make_cluster_tree(wd, seven_pack_tree());
  TreeCost cost = tree_cost(wd, tree);
  CHECK(cost.serial.poly == poly({{5, 2}, {4, 2}, {3, 1}}));
  CHECK(cost.serial.poly.str() == "2r^5+2r^4+r^3");
  CHECK(cost.parallel.poly == poly({{5, 2}}));
  CHECK(cost.parallel.poly.str() == "2r^5");
}

TEST_CASE("tree cost of the chain") {
  WiringDiagram wd = chain_diagram();
  PlanShape left = PlanShape::node_of(
      {PlanShape::node_of({PlanShape::leaf_of(0), PlanShape::leaf_of(1)}),
       PlanShape::leaf_of(2)});
  TreeCost cost = tree_cost(wd, make_cluster_tree(wd, left));
  CHECK(cost.serial.poly == poly({{3, 2}}));

  TreeCost flat = tree_cost(wd, flat_tree(wd));
  CHECK(flat.serial.poly == naive_cost(wd).poly);
  CHECK(flat.parallel.poly == naive_cost(wd).poly);
}

TEST_CASE("make_cluster_tree validates shapes") {
  WiringDiagram wd = chain_diagram();
  CHECK_THROWS_AS(make_cluster_tree(wd, PlanShape::leaf_of(0)), Error);
  CHECK_THROWS_AS(
      make_cluster_tree(wd, PlanShape::node_of({PlanShape::leaf_of(0), PlanShape::leaf_of(1)})),
      Error);
  CHECK_THROWS_AS(make_cluster_tree(
                      wd, PlanShape::node_of({PlanShape::leaf_of(0), PlanShape::leaf_of(0),
                                              PlanShape::leaf_of(1)})),
                  Error);
  PlanShape unary = PlanShape::node_of(
      {PlanShape::node_of({PlanShape::leaf_of(0)}),
       PlanShape::node_of({PlanShape::leaf_of(1), PlanShape::leaf_of(2)})});
  CHECK_THROWS_AS(make_cluster_tree(wd, unary), Error);
}

TEST_CASE("exhaustive planning finds the chain association") {
  WiringDiagram wd = chain_diagram();
  ClusterTree tree = plan(wd, PlanStrategy::exhaustive);
  CHECK(tree_cost(wd, tree).serial.poly == poly({{3, 2}}));
}

TEST_CASE("exhaustive planning matches a full enumeration on the seven-pack diagram") {
  WiringDiagram wd = seven_pack_diagram();
  ClusterTree tree = plan(wd, PlanStrategy::exhaustive);
  CostPoly planned = tree_cost(wd, tree).serial.poly;

  // independent check: enumerate every recursive set partition of the seven
  // leaves and take the cheapest serial cost
  std::function<std::vector<PlanShape>(std::vector<int>)> all_shapes =
      [&](std::vector<int> elems) -> std::vector<PlanShape> {
    if (elems.size() == 1) return {PlanShape::leaf_of(elems[0])};
    std::vector<PlanShape> out;
    // partitions of elems with >= 2 blocks, first block holds elems[0]
    int m = static_cast<int>(elems.size());
    std::function<void(std::vector<std::vector<int>>&, std::vector<int>)> split =
        [&](std::vector<std::vector<int>>& blocks, std::vector<int> remaining) {
          if (remaining.empty()) {
            if (blocks.size() < 2) return;
            // expand each block into every shape for it
            std::vector<std::vector<PlanShape>> options;
            for (const auto& block : blocks) options.push_back(all_shapes(block));
            std::vector<std::size_t> idx(options.size(), 0);
            while (true) {
              std::vector<PlanShape> children;
              for (std::size_t b = 0; b < options.size(); ++b) children.push_back(options[b][idx[b]]);
              out.push_back(PlanShape::node_of(children));
              std::size_t b = options.size();
              bool carried = true;
              while (b-- > 0) {
                if (++idx[b] < options[b].size()) { carried = false; break; }
                idx[b] = 0;
              }
              if (carried) break;
            }
            return;
          }
          int head = remaining[0];
          std::vector<int> rest(remaining.begin() + 1, remaining.end());
          std::size_t existing = blocks.size();
          for (std::size_t bi = 0; bi < existing; ++bi) {
            blocks[bi].push_back(head);
            split(blocks, rest);
            blocks[bi].pop_back();
          }
          blocks.push_back({head});
          split(blocks, rest);
          blocks.pop_back();
        };
    std::vector<std::vector<int>> blocks;
    split(blocks, elems);
    (void)m;
    return out;
  };

  std::vector<PlanShape> shapes = all_shapes({0, 1, 2, 3, 4, 5, 6});
  bool first = true;
  CostPoly best;
  for (const PlanShape& shape : shapes) {
    CostPoly serial = tree_cost(wd, make_cluster_tree(wd, shape)).serial.poly;
    if (first || serial < best) {
      best = serial;
      first = false;
    }
  }
  CHECK(planned == best);

  // the enumerated minimum undercuts the hand-built tree, whose cost
  // stays at 2r^5+2r^4+r^3 (see the tree_cost case above)
  CHECK(planned == poly({{4, 3}, {3, 2}}));
  CHECK(planned < tree_cost(wd, make_cluster_tree(wd, seven_pack_tree())).serial.poly);
}

TEST_CASE("greedy planning matches on the chain") {
  WiringDiagram wd = chain_diagram();
  ClusterTree tree = plan(wd, PlanStrategy::greedy);
  CHECK(tree_cost(wd, tree).serial.poly == poly({{3, 2}}));
  // deterministic tie-break: {M,N} merges first
  REQUIRE(tree.children.size() == 2);
  CHECK(tree.children[0].leaves == std::vector<int>{0, 1});
}

TEST_CASE("single pack plans to one projection stage") {
  std::map<std::string, VarSpec> vars{{"x", {0, 1, 4}}, {"y", {0, 1, 4}}};
  WiringDiagram wd = build_wiring_diagram({{"R", {"x", "y"}}}, vars, {"x"});
  for (PlanStrategy s : {PlanStrategy::exhaustive, PlanStrategy::greedy}) {
    ClusterTree tree = plan(wd, s);
    TreeCost cost = tree_cost(wd, tree);
    CHECK(cost.serial.poly == naive_cost(wd).poly);
    CHECK(cost.parallel.poly == naive_cost(wd).poly);
  }
}

TEST_CASE("exhaustive planning rejects more than seven packs") {
  std::mt19937_64 rng(71);
  RandomDiagramParams params;
  WiringDiagram wd = random_wiring_diagram(rng, 8, params);
  CHECK_THROWS_AS(plan(wd, PlanStrategy::exhaustive), Error);
  try {
    plan(wd, PlanStrategy::exhaustive);
  } catch (const Error& e) {
    CHECK(e.code() == Errc::too_many_packs);
  }
  CHECK_NOTHROW(plan(wd, PlanStrategy::greedy));
}

TEST_CASE("exhaustive is never beaten by greedy") {
  std::mt19937_64 rng(73);
  RandomDiagramParams params;
  params.resolution = 5;
  for (int trial = 0; trial < 120; ++trial) {
    int n = 1 + static_cast<int>(rng() % 6);
    WiringDiagram wd = random_wiring_diagram(rng, n, params);
    DiagramCost ex = tree_cost(wd, plan(wd, PlanStrategy::exhaustive)).serial;
    DiagramCost gr = tree_cost(wd, plan(wd, PlanStrategy::greedy)).serial;
    REQUIRE(compare_costs(ex, gr) <= 0);
  }
}

TEST_CASE("nontrivial clusters always save work") {
  std::mt19937_64 rng(79);
  RandomDiagramParams params;
  params.resolution = 3;
  for (int trial = 0; trial < 80; ++trial) {
    int n = 2 + static_cast<int>(rng() % 4);
    WiringDiagram wd = random_wiring_diagram(rng, n, params);

    // every proper cluster: the cost difference of the factorization is
    // nonnegative for nontrivial clusters
    for (int mask = 1; mask < (1 << n) - 1; ++mask) {
      std::vector<int> cluster;
      for (int i = 0; i < n; ++i) {
        if (mask & (1 << i)) cluster.push_back(i);
      }
      Factorization f = factorize(wd, cluster);
      if (is_trivial(f)) continue;
      auto product = [&](const std::vector<std::string>& link_names) {
        double v = 1;
        for (const std::string& name : link_names) {
          v *= wd.links()[wd.find_link(name)].resolution;
        }
        return v;
      };
      double rq = 1;
      for (const Port& p : f.intermediate.ports()) rq *= p.resolution;
      double r1 = product(f.properly_internal);
      double r2 = product(f.properly_external);
      REQUIRE(rq * (r1 * r2 - r1 - r2) >= 0.0);
    }

    // planned serial cost never exceeds the naive cost
    DiagramCost planned = tree_cost(wd, plan(wd, PlanStrategy::exhaustive)).serial;
    REQUIRE(compare_costs(planned, naive_cost(wd)) <= 0);
  }
}

TEST_CASE("plan JSON round-trips through shapes") {
  WiringDiagram wd = seven_pack_diagram();
  ClusterTree tree = plan(wd, PlanStrategy::exhaustive);
  std::string json = plan_to_json(tree, wd);
  PlanShape shape = plan_shape_from_json(json);
  ClusterTree rebuilt = make_cluster_tree(wd, shape);
  CHECK(tree_cost(wd, rebuilt).serial.poly == tree_cost(wd, tree).serial.poly);
  CHECK(rebuilt.leaves == tree.leaves);

  PlanShape shorthand = plan_shape_from_json("[[1,2],3]");
  WiringDiagram chain = chain_diagram();
  CHECK(tree_cost(chain, make_cluster_tree(chain, shorthand)).serial.poly == poly({{3, 2}}));

  CHECK_THROWS_AS(plan_shape_from_json("{\"bogus\": 1}"), Error);
  CHECK_THROWS_AS(plan_shape_from_json("not json"), Error);
}

TEST_CASE("executing any plan matches the unclustered product") {
  std::mt19937_64 rng(83);
  RandomDiagramParams params;
  params.resolution = 3;
  int done = 0;
  while (done < 25) {
    int n = 2 + static_cast<int>(rng() % 3);
    WiringDiagram wd = random_wiring_diagram(rng, n, params);
    if (link_entry_count(wd) > 20000) continue;
    ++done;

    std::vector<BoolArray> in;
    for (std::size_t i = 0; i < wd.inner_count(); ++i) {
      BoolArray a(wd.inner_pack(i));
      for (auto& v : a.data()) v = (rng() % 2) ? 1 : 0;
      in.push_back(std::move(a));
    }
    BoolArray flat = general_multiply<BoolSemiring>(wd, in);

    for (PlanStrategy s : {PlanStrategy::exhaustive, PlanStrategy::greedy}) {
      ClusterTree tree = plan(wd, s);
      std::function<BoolArray(const ClusterTree&)> exec = [&](const ClusterTree& node) {
        if (node.is_leaf()) return in[node.leaf];
        std::vector<BoolArray> inputs;
        for (const ClusterTree& child : node.children) inputs.push_back(exec(child));
        return general_multiply<BoolSemiring>(node.diagram, inputs);
      };
      REQUIRE(exec(tree) == flat);
    }
  }
}

TEST_CASE("clustering study: single and paired packs never cluster") {
  std::vector<StudyRow> rows = clustering_study(300, 6, 12345);
  REQUIRE(rows.size() == 6);
  CHECK(rows[0].packs == 1);
  CHECK(rows[0].mean_ratio == 1.0);
  CHECK(rows[1].packs == 2);
  CHECK(rows[1].mean_ratio == 1.0);
  for (const StudyRow& row : rows) {
    CHECK(row.count > 0);
    CHECK(row.mean_ratio <= 1.0);
    CHECK(row.median_ratio <= 1.0);
  }
  // reproducible under the seed
  std::vector<StudyRow> again = clustering_study(300, 6, 12345);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].mean_ratio == again[i].mean_ratio);
    CHECK(rows[i].median_ratio == again[i].median_ratio);
  }
}

}  // TEST_SUITE
