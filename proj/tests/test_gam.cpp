#include <doctest.h>

#include <functional>
#include <map>
#include <random>

#include "pixelarray/cluster.hpp"
#include "pixelarray/gam.hpp"
#include "pixelarray/plot.hpp"

using namespace pixelarray;

namespace {

// Test-side reference: the multiplication formula evaluated through
// project_entry, one link entry at a time. Independent of the library's
// offset machinery.
template <class S>
PixelArray<S> reference_multiply(const WiringDiagram& wd,
                                 const std::vector<PixelArray<S>>& arrays) {
  PixelArray<S> out(wd.outer());
  std::vector<int> res;
  for (const Link& l : wd.links()) res.push_back(l.resolution);
  EntryCursor cursor(res);
  while (!cursor.done()) {
    LinkEntry e{cursor.coords()};
    typename S::Value prod = S::one();
    for (std::size_t i = 0; i < arrays.size(); ++i) {
      prod = S::mul(prod, arrays[i].get(project_entry(wd, e, static_cast<int>(i))));
    }
    Entry outer = project_entry(wd, e, WiringDiagram::kOuter);
    out.set(outer, S::add(out.get(outer), prod));
    cursor.advance();
  }
  return out;
}

BoolArray random_bool_array(const Pack& pack, std::mt19937_64& rng, int denom = 2) {
  BoolArray a(pack);
  for (auto& v : a.data()) v = (rng() % denom) == 0 ? 1 : 0;
  return a;
}

WiringDiagram matmul_wd(int m, int n, int p) {
  return specialization_diagram(MatmulDims{m, n, p});
}

std::vector<std::vector<int>> textbook_matmul(const std::vector<std::vector<int>>& a,
                                              const std::vector<std::vector<int>>& b) {
  std::size_t m = a.size(), n = b.size(), p = b[0].size();
  std::vector<std::vector<int>> c(m, std::vector<int>(p, 0));
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      for (std::size_t k = 0; k < p; ++k) {
        c[i][k] += a[i][j] * b[j][k];
      }
    }
  }
  return c;
}

}  // namespace

TEST_SUITE("gam") {

TEST_CASE("get/set and row-major offsets") {
  BoolArray scalar{make_pack({})};
  CHECK(scalar.size() == 1);
  CHECK(scalar.get(Entry{{}}) == 0);
  scalar.set(Entry{{}}, 1);
  CHECK(scalar.get(Entry{{}}) == 1);

  BoolArray a{make_pack({{"r", 0, 1, 2}, {"s", 0, 1, 3}})};
  CHECK(a.offset(Entry{{2, 1}}) == 3);
  a.set(Entry{{2, 1}}, 1);
  CHECK(a.at(3) == 1);
  CHECK(a.get(Entry{{2, 1}}) == 1);

  CHECK_THROWS_AS(a.get(Entry{{3, 1}}), Error);
  CHECK_THROWS_AS(a.get(Entry{{1}}), Error);
}

TEST_CASE("semiring axioms hold on sampled values") {
  std::mt19937_64 rng(23);
  auto check_axioms = [&](auto semiring, auto gen) {
    using S = decltype(semiring);
    for (int i = 0; i < 500; ++i) {
      auto a = gen(), b = gen(), c = gen();
      CHECK(S::add(a, b) == S::add(b, a));
      CHECK(S::add(S::add(a, b), c) == S::add(a, S::add(b, c)));
      CHECK(S::mul(S::mul(a, b), c) == S::mul(a, S::mul(b, c)));
      CHECK(S::mul(a, S::add(b, c)) == S::add(S::mul(a, b), S::mul(a, c)));
      CHECK(S::mul(a, S::zero()) == S::zero());
      CHECK(S::mul(a, S::one()) == a);
      CHECK(S::add(a, S::zero()) == a);
      if (S::leq(a, b)) {
        CHECK(S::leq(S::add(a, c), S::add(b, c)));
        CHECK(S::leq(S::mul(a, c), S::mul(b, c)));
      }
    }
  };
  check_axioms(BoolSemiring{}, [&] { return static_cast<std::uint8_t>(rng() % 2); });
  check_axioms(CountSemiring{}, [&] {
    // mix small values with near-saturation ones
    return rng() % 4 == 0 ? CountSemiring::max_value - rng() % 3 : rng() % 1000;
  });
}

TEST_CASE("general_multiply equals boolean matrix multiplication") {
  std::mt19937_64 rng(29);
  WiringDiagram wd = matmul_wd(8, 8, 8);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<BoolArray> in = {random_bool_array(wd.inner_pack(0), rng, 2 + trial % 3),
                                 random_bool_array(wd.inner_pack(1), rng, 2 + trial % 3)};
    BoolArray got = general_multiply<BoolSemiring>(wd, in);
    for (int i = 1; i <= 8; ++i) {
      for (int k = 1; k <= 8; ++k) {
        int expect = 0;
        for (int j = 1; j <= 8; ++j) {
          expect |= in[0].get(Entry{{i, j}}) & in[1].get(Entry{{j, k}});
        }
        REQUIRE(got.get(Entry{{i, k}}) == expect);
      }
    }
  }
}

TEST_CASE("all-zero inputs annihilate") {
  WiringDiagram wd = matmul_wd(4, 4, 4);
  std::vector<BoolArray> in = {BoolArray(wd.inner_pack(0)), BoolArray(wd.inner_pack(1))};
  BoolArray out = general_multiply<BoolSemiring>(wd, in);
  for (std::uint64_t i = 0; i < out.size(); ++i) REQUIRE(out.at(i) == 0);
}

TEST_CASE("the circle fixture matches the exhaustive or-of-ands oracle") {
  Relation r1 = parse_relation("r1", "w - x^2 = 0");
  Relation r2 = parse_relation("r2", "w - (1 - y^2) = 0");
  Pack p1 = make_pack({{"w", -1.2, 1.2, 50}, {"x", -1.2, 1.2, 50}});
  Pack p2 = make_pack({{"w", -1.2, 1.2, 50}, {"y", -1.2, 1.2, 50}});
  BoolArray m1 = sample_in_center_plot(r1, p1, Tolerance{0.05});
  BoolArray m2 = sample_in_center_plot(r2, p2, Tolerance{0.05});

  std::map<std::string, VarSpec> vars;
  for (const char* v : {"w", "x", "y"}) vars[v] = VarSpec{-1.2, 1.2, 50};
  WiringDiagram wd = build_wiring_diagram({{"r1", {"w", "x"}}, {"r2", {"w", "y"}}}, vars,
                                          {"x", "y"});
  BoolArray got = general_multiply<BoolSemiring>(wd, std::vector<BoolArray>{m1, m2});

  std::uint64_t on = 0;
  for (int x = 1; x <= 50; ++x) {
    for (int y = 1; y <= 50; ++y) {
      int expect = 0;
      for (int w = 1; w <= 50; ++w) {
        expect |= m1.get(Entry{{w, x}}) & m2.get(Entry{{w, y}});
      }
      REQUIRE(got.get(Entry{{x, y}}) == expect);
      on += expect;
    }
  }
  CHECK(on > 0);
}

TEST_CASE("trace diagram sums the diagonal") {
  WiringDiagram wd = specialization_diagram(TraceDims{4});
  CHECK(wd.links().size() == 1);
  CHECK(wd.outer().empty());

  CountArray identity(wd.inner_pack(0));
  for (int i = 1; i <= 4; ++i) identity.set(Entry{{i, i}}, 1);
  CountArray traced = general_multiply<CountSemiring>(wd, std::vector<CountArray>{identity});
  CHECK(traced.get(Entry{{}}) == 4);

  BoolArray bool_identity(wd.inner_pack(0));
  for (int i = 1; i <= 4; ++i) bool_identity.set(Entry{{i, i}}, 1);
  BoolArray traced_bool =
      general_multiply<BoolSemiring>(wd, std::vector<BoolArray>{bool_identity});
  CHECK(traced_bool.get(Entry{{}}) == 1);

  // trace over counts equals the textbook diagonal sum on random inputs
  std::mt19937_64 rng(31);
  for (int n : {2, 3, 7, 16}) {
    WiringDiagram wdn = specialization_diagram(TraceDims{n});
    CountArray a(wdn.inner_pack(0));
    std::uint64_t expect = 0;
    for (int i = 1; i <= n; ++i) {
      for (int j = 1; j <= n; ++j) {
        std::uint64_t v = rng() % 5;
        a.set(Entry{{i, j}}, v);
        if (i == j) expect += v;
      }
    }
    CHECK(general_multiply<CountSemiring>(wdn, std::vector<CountArray>{a}).get(Entry{{}}) ==
          expect);
  }
}

TEST_CASE("kronecker diagram reproduces the tensor product") {
  std::mt19937_64 rng(37);
  for (int m1 : {2, 3}) {
    for (int n1 : {2, 4}) {
      for (int m2 : {2, 3}) {
        for (int n2 : {2, 4}) {
          WiringDiagram wd = specialization_diagram(KroneckerDims{m1, n1, m2, n2});
          CHECK(wd.links().size() == 4);
          BoolArray a = random_bool_array(wd.inner_pack(0), rng);
          BoolArray b = random_bool_array(wd.inner_pack(1), rng);
          BoolArray got = general_multiply<BoolSemiring>(wd, std::vector<BoolArray>{a, b});
          // outer ports sorted: m1, m2, n1, n2
          for (int i1 = 1; i1 <= m1; ++i1) {
            for (int i2 = 1; i2 <= m2; ++i2) {
              for (int j1 = 1; j1 <= n1; ++j1) {
                for (int j2 = 1; j2 <= n2; ++j2) {
                  REQUIRE(got.get(Entry{{i1, i2, j1, j2}}) ==
                          (a.get(Entry{{i1, j1}}) & b.get(Entry{{i2, j2}})));
                }
              }
            }
          }
        }
      }
    }
  }
}

TEST_CASE("identity kronecker identity is the 4-dim identity pattern") {
  WiringDiagram wd = specialization_diagram(KroneckerDims{2, 2, 2, 2});
  BoolArray a(wd.inner_pack(0)), b(wd.inner_pack(1));
  for (int i = 1; i <= 2; ++i) {
    a.set(Entry{{i, i}}, 1);
    b.set(Entry{{i, i}}, 1);
  }
  BoolArray got = general_multiply<BoolSemiring>(wd, std::vector<BoolArray>{a, b});
  std::uint64_t on = 0;
  for (std::uint64_t i = 0; i < got.size(); ++i) on += got.at(i);
  CHECK(on == 4);  // exactly the (i1=j1, i2=j2) cells
  CHECK(got.get(Entry{{1, 1, 1, 1}}) == 1);
  CHECK(got.get(Entry{{2, 1, 2, 1}}) == 1);
  CHECK(got.get(Entry{{1, 2, 1, 2}}) == 1);
  CHECK(got.get(Entry{{2, 2, 2, 2}}) == 1);
}

TEST_CASE("count semiring counts matmul witnesses") {
  std::mt19937_64 rng(41);
  WiringDiagram wd = matmul_wd(5, 6, 4);
  CountArray a(wd.inner_pack(0)), b(wd.inner_pack(1));
  std::vector<std::vector<int>> ra(5, std::vector<int>(6)), rb(6, std::vector<int>(4));
  for (int i = 1; i <= 5; ++i) {
    for (int j = 1; j <= 6; ++j) {
      ra[i - 1][j - 1] = static_cast<int>(rng() % 3);
      a.set(Entry{{i, j}}, ra[i - 1][j - 1]);
    }
  }
  for (int j = 1; j <= 6; ++j) {
    for (int k = 1; k <= 4; ++k) {
      rb[j - 1][k - 1] = static_cast<int>(rng() % 3);
      b.set(Entry{{j, k}}, rb[j - 1][k - 1]);
    }
  }
  CountArray got = general_multiply<CountSemiring>(wd, std::vector<CountArray>{a, b});
  auto expect = textbook_matmul(ra, rb);
  for (int i = 1; i <= 5; ++i) {
    for (int k = 1; k <= 4; ++k) {
      REQUIRE(got.get(Entry{{i, k}}) == static_cast<std::uint64_t>(expect[i - 1][k - 1]));
    }
  }
}

TEST_CASE("multiplication is linear over counts") {
  std::mt19937_64 rng(43);
  WiringDiagram wd = matmul_wd(3, 3, 3);
  for (int trial = 0; trial < 20; ++trial) {
    CountArray m(wd.inner_pack(0)), nn(wd.inner_pack(0)), other(wd.inner_pack(1));
    for (auto& v : m.data()) v = rng() % 4;
    for (auto& v : nn.data()) v = rng() % 4;
    for (auto& v : other.data()) v = rng() % 4;
    std::uint64_t c = 1 + rng() % 3;

    CountArray combo(wd.inner_pack(0));
    for (std::uint64_t i = 0; i < combo.size(); ++i) combo.put(i, c * m.at(i) + nn.at(i));

    CountArray lhs = general_multiply<CountSemiring>(wd, std::vector<CountArray>{combo, other});
    CountArray rm = general_multiply<CountSemiring>(wd, std::vector<CountArray>{m, other});
    CountArray rn = general_multiply<CountSemiring>(wd, std::vector<CountArray>{nn, other});
    for (std::uint64_t i = 0; i < lhs.size(); ++i) {
      REQUIRE(lhs.at(i) == c * rm.at(i) + rn.at(i));
    }
  }
}

TEST_CASE("random diagrams: general, naive and reference multiplication agree") {
  std::mt19937_64 rng(47);
  RandomDiagramParams params;
  params.resolution = 3;
  int done = 0;
  while (done < 40) {
    WiringDiagram wd = random_wiring_diagram(rng, 1 + static_cast<int>(rng() % 4), params);
    if (link_entry_count(wd) > 50000) continue;
    ++done;
    std::vector<BoolArray> in;
    for (std::size_t i = 0; i < wd.inner_count(); ++i) {
      in.push_back(random_bool_array(wd.inner_pack(i), rng));
    }
    BoolArray fast = general_multiply<BoolSemiring>(wd, in);
    BoolArray naive = naive_multiply<BoolSemiring>(wd, in);
    BoolArray ref = reference_multiply(wd, in);
    REQUIRE(fast == ref);
    REQUIRE(naive == ref);
  }
}

TEST_CASE("monotonicity: larger inputs give larger outputs") {
  std::mt19937_64 rng(53);
  RandomDiagramParams params;
  params.resolution = 4;
  int done = 0;
  while (done < 40) {
    WiringDiagram wd = random_wiring_diagram(rng, 1 + static_cast<int>(rng() % 4), params);
    if (link_entry_count(wd) > 50000) continue;
    ++done;
    std::vector<BoolArray> small, large;
    for (std::size_t i = 0; i < wd.inner_count(); ++i) {
      BoolArray a = random_bool_array(wd.inner_pack(i), rng, 3);
      BoolArray b = a;
      for (auto& v : b.data()) v |= (rng() % 4) == 0 ? 1 : 0;
      small.push_back(std::move(a));
      large.push_back(std::move(b));
    }
    BoolArray out_small = general_multiply<BoolSemiring>(wd, small);
    BoolArray out_large = general_multiply<BoolSemiring>(wd, large);
    for (std::uint64_t i = 0; i < out_small.size(); ++i) {
      REQUIRE(out_small.at(i) <= out_large.at(i));
    }
  }
}

TEST_CASE("chain products associate: (MN)P = M(NP) = MNP") {
  std::mt19937_64 rng(59);
  std::map<std::string, VarSpec> vars;
  for (const char* v : {"a", "b", "c", "d"}) vars[v] = VarSpec{0, 1, 8};
  WiringDiagram chain = build_wiring_diagram(
      {{"M", {"a", "b"}}, {"N", {"b", "c"}}, {"P", {"c", "d"}}}, vars, {"a", "d"});

  for (int trial = 0; trial < 10; ++trial) {
    std::vector<BoolArray> in;
    for (int i = 0; i < 3; ++i) in.push_back(random_bool_array(chain.inner_pack(i), rng));

    BoolArray flat = general_multiply<BoolSemiring>(chain, in);

    auto nest = [&](PlanShape shape) {
      ClusterTree tree = make_cluster_tree(chain, shape);
      std::function<BoolArray(const ClusterTree&)> exec = [&](const ClusterTree& node) {
        if (node.is_leaf()) return in[node.leaf];
        std::vector<BoolArray> inputs;
        for (const ClusterTree& child : node.children) inputs.push_back(exec(child));
        return general_multiply<BoolSemiring>(node.diagram, inputs);
      };
      return exec(tree);
    };

    PlanShape left = PlanShape::node_of(
        {PlanShape::node_of({PlanShape::leaf_of(0), PlanShape::leaf_of(1)}),
         PlanShape::leaf_of(2)});
    PlanShape right = PlanShape::node_of(
        {PlanShape::leaf_of(0),
         PlanShape::node_of({PlanShape::leaf_of(1), PlanShape::leaf_of(2)})});

    BoolArray assoc_left = nest(left);
    BoolArray assoc_right = nest(right);
    REQUIRE(flat == assoc_left);
    REQUIRE(flat == assoc_right);
  }
}

TEST_CASE("multiplication is deterministic across thread counts") {
  std::mt19937_64 rng(61);
  WiringDiagram wd = matmul_wd(16, 16, 16);
  std::vector<BoolArray> in = {random_bool_array(wd.inner_pack(0), rng),
                               random_bool_array(wd.inner_pack(1), rng)};
  BoolArray one = general_multiply<BoolSemiring>(wd, in, {1});
  BoolArray four = general_multiply<BoolSemiring>(wd, in, {4});
  CHECK(one == four);
}

TEST_CASE("specialization_diagram validates dimensions") {
  CHECK_THROWS_AS(specialization_diagram(MatmulDims{1, 4, 4}), Error);
  CHECK_THROWS_AS(specialization_diagram(TraceDims{1}), Error);
  CHECK_THROWS_AS(specialization_diagram(KroneckerDims{2, 2, 2, 1}), Error);
}

TEST_CASE("general_multiply rejects mismatched inputs") {
  WiringDiagram wd = matmul_wd(4, 4, 4);
  std::vector<BoolArray> too_few = {BoolArray(wd.inner_pack(0))};
  CHECK_THROWS_AS(general_multiply<BoolSemiring>(wd, too_few), Error);
  std::vector<BoolArray> wrong = {BoolArray(wd.inner_pack(0)), BoolArray(wd.inner_pack(0))};
  CHECK_THROWS_AS(general_multiply<BoolSemiring>(wd, wrong), Error);
}

}  // TEST_SUITE
