#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "maxhom/error.hpp"
#include "maxhom/exact.hpp"
#include "maxhom/generators.hpp"
#include "test_util.hpp"

using namespace maxhom;
using namespace maxhom::testutil;

TEST_CASE("deterministic families: cliques, paths and grids") {
  const auto k3 = gen_clique(3);
  CHECK(k3.n() == 3);
  CHECK(k3.norm1() == 6);
  CHECK(gen_path(4).norm1() == 6);
  CHECK(gen_path(1).norm1() == 0);

  const auto g = gen_grid(2, 3);
  CHECK(g.n() == 9);
  CHECK(g.norm1() == 24);
  CHECK(gen_grid(1, 5).norm1() == 8);
  CHECK(gen_grid(3, 2).norm1() == 24);
  CHECK_THROWS_AS(gen_grid(4, 2), Error);
  CHECK_THROWS_AS(gen_clique(-1), Error);
}

TEST_CASE("gnp: endpoints, determinism and seed sensitivity") {
  CHECK(gen_gnp(5, 1, 7).norm1() == 20);
  CHECK(gen_gnp(5, 0, 7).norm1() == 0);

  const auto a = gen_gnp(8, Rational(1, 2), 42);
  const auto b = gen_gnp(8, Rational(1, 2), 42);
  CHECK(a.values[0] == b.values[0]);
  const auto c = gen_gnp(8, Rational(1, 2), 43);
  CHECK(a.values[0] != c.values[0]);
  CHECK_THROWS_AS(gen_gnp(3, Rational(3, 2), 1), Error);
}

TEST_CASE("bipartite: edges straddle the sides") {
  const auto full = gen_bipartite(3, 4, 1, 5);
  CHECK(full.norm1() == 24);
  for (const auto& [t, w] : full.values[0])
    CHECK(((t[0] < 3) != (t[1] < 3)));
  CHECK(gen_bipartite(3, 4, 0, 5).norm1() == 0);

  const auto half = gen_bipartite(4, 4, Rational(1, 2), 11);
  CHECK(half.values[0] == gen_bipartite(4, 4, Rational(1, 2), 11).values[0]);
}

TEST_CASE("tournaments: one arc per pair, clean, seeded") {
  const auto t = gen_tournament(4, 9);
  CHECK(t.values[0].size() == 6);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      CHECK(t.value(0, {i, j}) + t.value(0, {j, i}) == 1);
  CHECK(t.values[0] == gen_tournament(4, 9).values[0]);
  CHECK(gen_tournament(3, 1).values[0].size() == 3);
  CHECK(gen_tournament(0, 1).norm1() == 0);
}

TEST_CASE("triangle gluing: every base edge gains exactly one apex") {
  const auto base = gen_path(3);
  const auto glued = gen_triangle_glued(base);
  CHECK(glued.n() == 5);
  CHECK(glued.norm1() == base.norm1() + 8);

  // Each original edge has exactly one common neighbor: its apex.
  for (const auto& [u, v] : {std::pair{0, 1}, std::pair{1, 2}}) {
    int common = 0;
    for (int w = 0; w < glued.n(); ++w)
      if (glued.value(0, {u, w}) == 1 && glued.value(0, {v, w}) == 1) ++common;
    CHECK(common == 1);
  }
  CHECK(glued.domain[3] == "0+1");

  auto loopy = gen_clique(2);
  loopy.set_value(0, {0, 0}, 1);
  CHECK_THROWS_AS(gen_triangle_glued(loopy), Error);
}

TEST_CASE("hardness gadget: planted rainbow cliques are complete") {
  auto k3 = make_graph(3);
  k3.add_edge(0, 1);
  k3.add_edge(0, 2);
  k3.add_edge(1, 2);
  const auto gp = hardness_gadget(k3, {0, 1, 2}, 17);
  CHECK(gp.pattern.n() == 3);
  CHECK(gp.target.values[0].size() == 3);
  CHECK(opt_bruteforce(gp.pattern, gp.target).value == 3);

  // Same seed, same orientation.
  CHECK(gp.pattern.values[0] ==
        hardness_gadget(k3, {0, 1, 2}, 17).pattern.values[0]);

  // Planted K4 with two spare vertices still realizes every pattern arc.
  auto planted = make_graph(6);
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j) planted.add_edge(i, j);
  const auto big = hardness_gadget(planted, {0, 1, 2, 3, 0, 1}, 23);
  CHECK(opt_bruteforce(big.pattern, big.target).value == 6);
}

TEST_CASE("hardness gadget: missing edges cap the value") {
  auto path3 = make_graph(3);
  path3.add_edge(0, 1);
  path3.add_edge(1, 2);
  const auto gp = hardness_gadget(path3, {0, 1, 2}, 31);
  CHECK(opt_bruteforce(gp.pattern, gp.target).value <= 2);

  const auto lonely = hardness_gadget(make_graph(2), {0, 0}, 5);
  CHECK(lonely.pattern.norm1() == 0);
  CHECK(opt_bruteforce(lonely.pattern, lonely.target).value == 0);
}

TEST_CASE("hardness gadget: validation") {
  auto k3 = make_graph(3);
  k3.add_edge(0, 1);
  k3.add_edge(0, 2);
  k3.add_edge(1, 2);
  CHECK_THROWS_AS(hardness_gadget(k3, {0, 1, 1}, 1), Error);  // improper
  CHECK_THROWS_AS(hardness_gadget(k3, {0, 1, 3}, 1), Error);  // gap in colors
  CHECK_THROWS_AS(hardness_gadget(k3, {0, 1}, 1), Error);     // short vector
  CHECK_THROWS_AS(hardness_gadget(k3, {0, -1, 1}, 1), Error);
}

TEST_CASE("probe: identity-sized images lose nothing") {
  const auto lam = clique(2, Rational(3));
  const auto rep = non_pliability_probe(lam, Rational(1, 10), 2);
  CHECK(rep.id_value == 18);
  CHECK(rep.best_value == 18);
  CHECK(rep.loss == 0);
  CHECK(!rep.separated);
  CHECK(rep.maps == 4);
}

TEST_CASE("probe: tournaments separate at small component bounds") {
  for (const std::uint64_t seed : {1ULL, 2ULL, 3ULL}) {
    const auto t = gen_tournament(5, seed);
    const auto rep = non_pliability_probe(t, Rational(1, 5), 2);
    CHECK(rep.id_value == 10);
    CHECK(rep.loss > 0);
    CHECK(rep.best_value < 10);
    CHECK(val(t, t, rep.best_map) == rep.best_value);
    // At most a directed cut's worth of arcs survives two images.
    CHECK(rep.best_value <= 6);
    CHECK(rep.separated);
  }
}

TEST_CASE("probe: a path collapses onto one edge for free") {
  const auto p3 = gen_path(3);
  const auto rep = non_pliability_probe(p3, Rational(1, 10), 2);
  CHECK(rep.id_value == 4);
  CHECK(rep.best_value == 4);
  CHECK(rep.loss == 0);
  CHECK(!rep.separated);
  // The identity itself does not qualify: the whole path is one component.
  Assignment id{0, 1, 2};
  CHECK(rep.best_map != id);
}

TEST_CASE("probe: validation and caps") {
  const auto t = gen_tournament(5, 1);
  CHECK_THROWS_AS(non_pliability_probe(t, Rational(1, 5), 2, 100), Error);
  CHECK_THROWS_AS(non_pliability_probe(t, Rational(1), 2), Error);
  CHECK_THROWS_AS(non_pliability_probe(t, Rational(-1, 5), 2), Error);
  CHECK_THROWS_AS(non_pliability_probe(t, Rational(1, 5), 0), Error);
}
