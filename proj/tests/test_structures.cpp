#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <numeric>

#include "maxhom/error.hpp"
#include "maxhom/graphs.hpp"
#include "maxhom/structures.hpp"

using namespace maxhom;

namespace {

Signature graph_sig() { return Signature{{Symbol{"e", 2}}}; }

// Complete graph as a structure: both orientations of every edge, value 1.
ValuedStructure clique(int n) {
  auto A = make_structure(graph_sig(), [&] {
    std::vector<std::string> d;
    for (int i = 0; i < n; ++i) d.push_back("v" + std::to_string(i));
    return d;
  }());
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) A.set_value(0, {i, j}, 1);
  return A;
}

} // namespace

TEST_CASE("rational parsing and formatting") {
  CHECK(parse_rational("3/4") == rat(3, 4));
  CHECK(parse_rational("-6/8") == rat(-3, 4));
  CHECK(parse_rational("7") == rat(7));
  CHECK(format_rational(rat(7)) == "7/1");
  CHECK(format_rational(rat(-2, 6)) == "-1/3");
  CHECK_THROWS_AS(parse_rational("1/0"), Error);
  CHECK_THROWS_AS(parse_rational("a/b"), Error);
  CHECK_THROWS_AS(parse_rational(""), Error);
  CHECK_THROWS_AS(parse_rational("1/2/3"), Error);
}

TEST_CASE("rational upper roots") {
  CHECK(rational_sqrt_upper(rat(4)) == rat(2));
  CHECK(rational_sqrt_upper(rat(9, 16)) == rat(3, 4));
  CHECK(rational_sqrt_upper(rat(0)) == rat(0));
  Rational r = rational_sqrt_upper(rat(2));
  CHECK(r * r >= 2);
  // 577/408 is an upper bound for sqrt(2) within the default denominator
  // cap, so the least upper approximation cannot exceed it.
  CHECK(r <= rat(577, 408));
  Rational c = rational_root_upper(rat(5), 3, 1000);
  CHECK(c * c * c >= 5);
  CHECK(denominator(c) <= 1000);
  // One grid step below must fall short of the root.
  CHECK((c - rat(1, 1000)) * (c - rat(1, 1000)) * (c - rat(1, 1000)) < 5);
}

TEST_CASE("floor_log") {
  CHECK(floor_log(rat(2), rat(8)) == 3);
  CHECK(floor_log(rat(2), rat(9)) == 3);
  CHECK(floor_log(rat(2), rat(1)) == 0);
  CHECK(floor_log(rat(3, 2), rat(1, 2)) == -2);
  CHECK(floor_log(rat(10), rat(1, 1000)) == -3);
}

TEST_CASE("structure basics and validation") {
  auto K2 = clique(2);
  K2.validate();
  CHECK(K2.n() == 2);
  CHECK(K2.norm1() == 2);
  CHECK(K2.norm_inf() == 1);
  CHECK(K2.total_tuples() == 2);
  CHECK(K2.elem("v1") == 1);
  CHECK(K2.elem("nope") == -1);
  CHECK(K2.value(0, {0, 1}) == 1);
  CHECK(K2.value(0, {0, 0}) == 0);

  // Setting a value to zero removes the tuple from the sparse table.
  K2.set_value(0, {0, 1}, 0);
  CHECK(K2.total_tuples() == 1);
  CHECK_THROWS_AS(K2.set_value(0, {0, 1}, rat(-1)), Error);
  CHECK_THROWS_AS(K2.set_value(0, {0}, rat(1)), Error);
  CHECK_THROWS_AS(K2.set_value(0, {0, 5}, rat(1)), Error);

  Signature bad{{Symbol{"e", 2}, Symbol{"e", 1}}};
  CHECK_THROWS_AS(bad.validate(), Error);
  Signature nullary{{Symbol{"c", 0}}};
  CHECK_THROWS_AS(nullary.validate(), Error);
  nullary.validate(true);
}

TEST_CASE("val counts weighted homomorphism mass") {
  auto K3 = clique(3);
  auto K2 = clique(2);
  // Fold the triangle onto an edge: vertex 2 joins vertex 0.
  CHECK(val(K3, K2, {0, 1, 0}) == 4);
  CHECK(val(K3, K2, {0, 0, 0}) == 0);
  CHECK(val(K2, K2, {0, 1}) == 2);
  CHECK(val(K2, K2, {1, 0}) == 2);
  CHECK_THROWS_AS(val(K3, K2, {0, 1}), Error);
  CHECK_THROWS_AS(val(K3, K2, {0, 1, 5}), Error);

  auto half = rescale(K3, rat(1, 2));
  CHECK(half.norm1() == 3);
  CHECK(val(half, K2, {0, 1, 0}) == 2);
  auto zero = rescale(K3, rat(0));
  CHECK(zero.total_tuples() == 0);
}

TEST_CASE("disjoint union tags ids and adds nullary values") {
  auto K2 = clique(2);
  auto U = disjoint_union({K2, K2});
  U.validate();
  CHECK(U.n() == 4);
  CHECK(U.domain[0] == "0:v0");
  CHECK(U.domain[3] == "1:v1");
  CHECK(U.norm1() == 4);
  CHECK(U.value(0, {2, 3}) == 1);
  CHECK(U.value(0, {0, 2}) == 0);

  Signature s{{Symbol{"c", 0}, Symbol{"e", 2}}};
  auto A = make_structure(s, {"x"});
  A.set_value(0, {}, rat(2, 3));
  auto B = make_structure(s, {"y"});
  B.set_value(0, {}, rat(1, 3));
  auto W = disjoint_union({A, B});
  CHECK(W.value(0, {}) == 1);
}

TEST_CASE("gaifman graph and cleanliness") {
  auto K3 = clique(3);
  Graph g = gaifman(K3);
  CHECK(g.n() == 3);
  CHECK(g.m() == 3);
  CHECK(is_clean(K3));

  Signature tern{{Symbol{"r", 3}}};
  auto A = make_structure(tern, {"a", "b", "c", "d"});
  A.set_value(0, {0, 1, 2}, 1);
  Graph h = gaifman(A);
  CHECK(h.m() == 3);  // triangle on a,b,c
  CHECK(!h.has_edge(0, 3));
  CHECK(is_clean(A));
  A.set_value(0, {3, 3, 0}, 1);
  CHECK(!is_clean(A));
  // Repeated elements contribute support edges only between distinct ones.
  Graph h2 = gaifman(A);
  CHECK(h2.has_edge(0, 3));
}

TEST_CASE("edit distance over bijections") {
  auto K3 = clique(3);
  auto K3e = clique(3);
  K3e.set_value(0, {1, 2}, 0);
  K3e.set_value(0, {2, 1}, 0);
  auto d = edit_distance(K3, K3e);
  CHECK(!d.infinite);
  CHECK(d.value == rat(1, 2));  // two lost tuples over min(6, 4)

  // Identity on equal structures costs nothing.
  auto same = edit_distance(K3, K3);
  CHECK(same.value == 0);
  CHECK(!same.infinite);

  // A fixed suboptimal bijection is evaluated as given.
  auto fixed = edit_distance(K3, K3e, Assignment{0, 1, 2});
  CHECK(fixed.value == rat(1, 2));

  // Positive mass against an empty table on the same symbol is infinite.
  Signature s{{Symbol{"e", 2}, Symbol{"f", 1}}};
  auto A = make_structure(s, {"a"});
  A.set_value(1, {0}, 1);
  auto B = make_structure(s, {"b"});
  auto inf = edit_distance(A, B);
  CHECK(inf.infinite);

  CHECK_THROWS_AS(edit_distance(K3, K3e, Assignment{0, 0, 1}), Error);
}

TEST_CASE("pushforward, img, pullback") {
  auto K3 = clique(3);
  auto K2 = clique(2);
  Assignment g{0, 1, 0};
  auto push = pushforward(K3, g, 2);
  CHECK(push[0].at({0, 1}) == 2);  // (0,1) and (2,1) both land on (0,1)
  CHECK(push[0].at({0, 0}) == 2);  // (0,2) and (2,0)
  CHECK(pullback_value(K3, g, 0, {0, 1}) == 2);
  CHECK(pullback_value(K3, g, 0, {1, 1}) == 0);

  auto I = img(K3, K2, g);
  I.validate();
  CHECK(I.n() == 2);
  // Image caps at the target's value: min(2, 1) on each K2 tuple.
  CHECK(I.value(0, {0, 1}) == 1);
  CHECK(I.value(0, {1, 0}) == 1);
  CHECK(I.norm1() == 2);
}

TEST_CASE("induced substructures") {
  auto K3 = clique(3);
  auto P = induced(K3, {0, 2});
  P.validate();
  CHECK(P.n() == 2);
  CHECK(P.norm1() == 2);  // the 0-2 edge survives in both orientations
  CHECK(P.domain[1] == "v2");

  Signature s{{Symbol{"c", 0}}};
  auto A = make_structure(s, {"a", "b"});
  A.set_value(0, {}, rat(5));
  auto B = induced(A, {1});
  CHECK(B.value(0, {}) == 5);
}

TEST_CASE("tuple enumeration is lexicographic") {
  std::vector<Tuple> seen;
  for_each_tuple(3, 2, [&](const Tuple& t) { seen.push_back(t); });
  REQUIRE(seen.size() == 9);
  CHECK(seen.front() == Tuple{0, 0});
  CHECK(seen[1] == Tuple{0, 1});
  CHECK(seen.back() == Tuple{2, 2});
  int count = 0;
  for_each_tuple(4, 0, [&](const Tuple& t) {
    CHECK(t.empty());
    ++count;
  });
  CHECK(count == 1);
  for_each_tuple(0, 2, [&](const Tuple&) { CHECK(false); });

  CHECK(tuple_support({2, 0, 2, 1}) == Tuple{0, 1, 2});
  CHECK(tuple_support({}) == Tuple{});
}
