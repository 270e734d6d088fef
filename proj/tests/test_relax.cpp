#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <vector>

#include "maxhom/error.hpp"
#include "maxhom/exact.hpp"
#include "maxhom/relax.hpp"
#include "test_util.hpp"

using namespace maxhom;
using namespace maxhom::testutil;

namespace {

std::vector<Assignment> all_maps(int n_from, int n_to) {
  std::vector<Assignment> out;
  Assignment g(n_from, 0);
  while (true) {
    out.push_back(g);
    int i = n_from - 1;
    for (; i >= 0; --i) {
      if (++g[i] < n_to) break;
      g[i] = 0;
    }
    if (i < 0) break;
  }
  return out;
}

Overcast uniform_over(const std::vector<Assignment>& maps) {
  Overcast w;
  Rational p(1, static_cast<long long>(maps.size()));
  for (const auto& g : maps) w.support.emplace_back(g, p);
  return w;
}

} // namespace

TEST_CASE("level-2 program on an edge has the promised shape") {
  auto K2 = clique(2);
  auto inst = build_sa_instance(K2, K2, 2);
  CHECK(inst.num_vars == 8);
  REQUIRE(inst.sets.size() == 3);
  CHECK(inst.sets[0] == std::vector<int>{0});
  CHECK(inst.sets[1] == std::vector<int>{1});
  CHECK(inst.sets[2] == std::vector<int>{0, 1});

  int norm = 0, marg = 0;
  for (const auto& row : inst.lp.rows) {
    CHECK(row.sense == RowSense::EQ);
    if (row.rhs == 1)
      ++norm;
    else
      ++marg;
  }
  CHECK(norm == 3);
  CHECK(marg == 4);

  auto out = solve_lp(inst.lp);
  REQUIRE(out.status == LPStatus::Optimal);
  CHECK(out.value == 2);
}

TEST_CASE("zero target gives the zero objective") {
  auto K2 = clique(2);
  auto hollow = make_structure(graph_sig(), ids(2));
  auto lp = build_sa(K2, hollow, 2);
  CHECK(lp.objective.empty());
  CHECK(opt_sa(K2, hollow, 2) == 0);
}

TEST_CASE("triangle against an edge tightens at level three") {
  auto K3 = clique(3);
  auto K2 = clique(2);
  CHECK(opt_sa(K3, K2, 2) == 6);
  CHECK(opt_sa(K3, K2, 3) == 4);
  CHECK(opt_sa(K2, K2, 2) == 2);
  // the full program agrees with the level >= |A| shortcut
  CHECK(solve_lp(build_sa(K3, K2, 3)).value == 4);
}

TEST_CASE("shortcuts agree with the program they shortcut") {
  std::mt19937_64 rng(41);
  for (int t = 0; t < 12; ++t) {
    int na = 2 + static_cast<int>(rng() % 3);
    int nb = 2 + static_cast<int>(rng() % 2);
    auto A = random_graph_structure(rng, na, 60);
    auto B = random_graph_structure(rng, nb, 60);
    for (int k = 2; k <= std::min(3, na); ++k) {
      CHECK(opt_sa(A, B, k) == solve_lp(build_sa(A, B, k)).value);
    }
  }
}

TEST_CASE("relaxation sandwiches the optimum and tightens with level") {
  std::mt19937_64 rng(42);
  for (int t = 0; t < 10; ++t) {
    int na = 3 + static_cast<int>(rng() % 2);
    int nb = 2 + static_cast<int>(rng() % 2);
    auto A = random_graph_structure(rng, na, 55);
    auto B = random_graph_structure(rng, nb, 55);
    Rational opt = opt_bruteforce(A, B).value;
    Rational prev;
    bool have_prev = false;
    for (int k = 2; k <= na; ++k) {
      Rational v = opt_sa(A, B, k);
      CHECK(v >= opt);
      if (have_prev) CHECK(v <= prev);
      prev = v;
      have_prev = true;
    }
    CHECK(opt_sa(A, B, na) == opt);
  }
}

TEST_CASE("scaling carries through the relaxation") {
  std::mt19937_64 rng(43);
  for (const Rational& lam : {rat(1, 2), Rational(3), rat(5, 2)}) {
    auto A = random_graph_structure(rng, 3, 60);
    auto C = random_graph_structure(rng, 2, 60);
    CHECK(opt_sa(rescale(A, lam), C, 2) == lam * opt_sa(A, C, 2));
  }
}

TEST_CASE("exactness report on the standard examples") {
  auto r1 = sa_exactness_check(clique(3), clique(2));
  CHECK(r1.tw == 2);
  CHECK(r1.k_guaranteed == 3);
  CHECK(r1.least_k == 3);
  CHECK(r1.opt_value == 4);
  CHECK(r1.levels ==
        std::vector<std::pair<int, Rational>>{{2, Rational(6)}, {3, Rational(4)}});

  auto r2 = sa_exactness_check(path_struct(4), clique(2));
  CHECK(r2.tw == 1);
  CHECK(r2.k_guaranteed == 2);
  CHECK(r2.least_k == 2);
  CHECK(r2.opt_value == 6);

  // A single vertex: the level is still bounded below by the arity.
  auto single = make_structure(graph_sig(), ids(1));
  auto r3 = sa_exactness_check(single, clique(2));
  CHECK(r3.least_k == 2);
  CHECK(r3.k_guaranteed == 2);
  CHECK(r3.opt_value == 0);
}

TEST_CASE("overcasts push dominance through the relaxation") {
  std::mt19937_64 rng(44);

  auto K3 = clique(3);
  Overcast id;
  id.support.emplace_back(Assignment{0, 1, 2}, Rational(1));
  std::vector<ValuedStructure> samples;
  for (int t = 0; t < 6; ++t) samples.push_back(random_graph_structure(rng, 2, 70));
  CHECK(sa_dominance_check(K3, K3, id, 2, samples));
  for (const auto& C : samples)
    CHECK(opt_sa(K3, C, 2) == opt_sa(K3, C, 2));

  // A clique covers a shrunken blow-up of a smaller clique via uniform maps.
  auto K4 = clique(4);
  auto B = rescale(clique(3), rat(4, 3));
  auto uni = uniform_over(all_maps(4, 3));
  REQUIRE(overcast_verify(uni, K4, B).ok);
  std::vector<ValuedStructure> Cs;
  for (int t = 0; t < 20; ++t) Cs.push_back(random_graph_structure(rng, 2 + static_cast<int>(rng() % 2), 60));
  CHECK(sa_dominance_check(K4, B, uni, 2, Cs));

  // Two loose edges and a doubled edge dominate each other.
  auto split = disjoint_union({clique(2), clique(2)});
  auto merged = rescale(clique(2), 2);
  Overcast fwd;
  fwd.support.emplace_back(Assignment{0, 1, 0, 1}, Rational(1));
  Overcast bwd;
  bwd.support.emplace_back(Assignment{0, 1}, rat(1, 2));
  bwd.support.emplace_back(Assignment{2, 3}, rat(1, 2));
  std::vector<ValuedStructure> Ds;
  for (int t = 0; t < 10; ++t) Ds.push_back(random_graph_structure(rng, 2, 70));
  CHECK(sa_dominance_check(split, merged, fwd, 2, Ds));
  CHECK(sa_dominance_check(merged, split, bwd, 2, Ds));
}

TEST_CASE("relaxation error paths carry their kinds") {
  auto K2 = clique(2);
  try {
    opt_sa(K2, K2, 1);
    FAIL("level below the arity should be rejected");
  } catch (const Error& e) {
    CHECK(e.kind == Errc::Usage);
  }

  try {
    build_sa(clique(5), clique(3), 4, 100);
    FAIL("variable cap should have tripped");
  } catch (const Error& e) {
    CHECK(e.kind == Errc::CapExceeded);
  }

  Overcast bogus;
  bogus.support.emplace_back(Assignment{0, 0}, Rational(1));
  try {
    sa_dominance_check(K2, K2, bogus, 2, {});
    FAIL("a non-overcast should be rejected");
  } catch (const Error& e) {
    CHECK(e.kind == Errc::Usage);
  }
}
