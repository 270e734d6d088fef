#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <algorithm>
#include <random>
#include <variant>

#include "maxhom/error.hpp"
#include "maxhom/exact.hpp"
#include "maxhom/overcast.hpp"
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

ValuedStructure random_clean_graph(std::mt19937_64& rng, int n) {
  auto A = make_structure(graph_sig(), ids(n));
  bool any = false;
  for (int u = 0; u < n; ++u)
    for (int v = u + 1; v < n; ++v)
      if (rng() % 100 < 55) {
        add_undirected(A, u, v, random_value(rng));
        any = true;
      }
  if (!any) add_undirected(A, 0, 1, random_value(rng));
  return A;
}

} // namespace

TEST_CASE("identity map is an overcast with zero slack") {
  auto K3 = clique(3);
  Overcast id;
  id.support.emplace_back(Assignment{0, 1, 2}, Rational(1));
  auto rep = overcast_verify(id, K3, K3);
  CHECK(rep.ok);
  CHECK(rep.distribution_ok);
  CHECK(rep.min_slack == 0);
  CHECK(rep.entries.size() == 6);

  auto found = overcast_find(K3, K3);
  CHECK(std::holds_alternative<Overcast>(found));
}

TEST_CASE("bipartite path folds onto a doubled edge") {
  auto P3 = path_struct(3);
  auto B = rescale(clique(2), 2);
  Overcast fold;
  fold.support.emplace_back(Assignment{0, 1, 0}, Rational(1));
  auto rep = overcast_verify(fold, P3, B);
  CHECK(rep.ok);
  CHECK(rep.min_slack == 0);

  auto found = overcast_find(P3, B);
  REQUIRE(std::holds_alternative<Overcast>(found));
  const auto& w = std::get<Overcast>(found);
  CHECK(std::is_sorted(w.support.begin(), w.support.end(),
                       [](const auto& a, const auto& b) { return a.first < b.first; }));
}

TEST_CASE("triangle against three edges yields a refutation") {
  auto K3 = clique(3);
  auto B = rescale(clique(2), 3);
  auto found = overcast_find(K3, B);
  REQUIRE(std::holds_alternative<OvercastCertificate>(found));
  const auto& cert = std::get<OvercastCertificate>(found);
  CHECK(cert.opt_A_C < cert.opt_B_C);
  CHECK(cert.C.n() == 2);
  CHECK(opt_bruteforce(K3, cert.C).value == cert.opt_A_C);
  CHECK(opt_bruteforce(B, cert.C).value == cert.opt_B_C);

  // The gap is already visible against a plain edge.
  CHECK(opt_bruteforce(K3, clique(2)).value == 4);
  CHECK(opt_bruteforce(B, clique(2)).value == 6);
}

TEST_CASE("uniform functions cover two thirds of a blown-up triangle") {
  auto K6 = clique(6);
  auto B = rescale(clique(3), 5);
  auto uni = uniform_over(all_maps(6, 3));
  CHECK(uni.support.size() == 729);
  auto rep = overcast_verify(uni, K6, B, rat(2, 3));
  CHECK(rep.ok);
  CHECK(rep.min_slack == 0);
  for (const auto& e : rep.entries) CHECK(e.achieved == rat(10, 3));
}

TEST_CASE("missing coverage is reported tuple by tuple") {
  auto K2 = clique(2);
  Overcast constant;
  constant.support.emplace_back(Assignment{0, 0}, Rational(1));
  auto rep = overcast_verify(constant, K2, K2);
  CHECK(!rep.ok);
  CHECK(rep.distribution_ok);
  REQUIRE(rep.entries.size() == 2);
  for (const auto& e : rep.entries) {
    CHECK(e.achieved == 0);
    CHECK(e.required == 1);
  }
  CHECK(rep.min_slack == -1);

  Overcast half;
  half.support.emplace_back(Assignment{0, 1}, rat(1, 2));
  auto rep2 = overcast_verify(half, K2, K2);
  CHECK(!rep2.distribution_ok);
  CHECK(!rep2.ok);

  Overcast bad;
  bad.support.emplace_back(Assignment{0}, Rational(1));
  CHECK_THROWS_AS(overcast_verify(bad, K2, K2), Error);
}

TEST_CASE("composition multiplies coverage factors") {
  auto K4 = clique(4);
  auto B = rescale(clique(2), 6);
  auto w1 = uniform_over(all_maps(4, 2));
  auto w2 = uniform_over(all_maps(2, 4));
  auto r1 = overcast_verify(w1, K4, B, rat(1, 2));
  CHECK(r1.ok);
  CHECK(r1.min_slack == 0);
  auto r2 = overcast_verify(w2, B, K4, rat(3, 4));
  CHECK(r2.ok);
  CHECK(r2.min_slack == 0);

  auto comp = compose(w1, w2);
  CHECK(overcast_verify(comp, K4, K4, rat(3, 8)).ok);
  for (const auto& [g, p] : comp.support) {
    std::vector<int> img(g);
    std::sort(img.begin(), img.end());
    img.erase(std::unique(img.begin(), img.end()), img.end());
    CHECK(img.size() <= 2);
  }
}

TEST_CASE("composition of deterministic maps chains them") {
  Overcast fold;
  fold.support.emplace_back(Assignment{0, 1, 0}, Rational(1));
  Overcast swap;
  swap.support.emplace_back(Assignment{1, 0}, Rational(1));
  auto comp = compose(fold, swap);
  REQUIRE(comp.support.size() == 1);
  CHECK(comp.support[0].first == Assignment{1, 0, 1});
  CHECK(comp.support[0].second == 1);

  Overcast id;
  id.support.emplace_back(Assignment{0, 1, 2}, Rational(1));
  auto twice = compose(id, id);
  REQUIRE(twice.support.size() == 1);
  CHECK(twice.support[0].first == Assignment{0, 1, 2});
}

TEST_CASE("distance bound accepts identical structures at zero") {
  auto K3 = clique(3);
  auto d = opt_distance_bound(K3, K3, {Rational(0)});
  REQUIRE(d.has_value());
  CHECK(d->epsilon == 0);

  auto P3 = path_struct(3);
  auto B = rescale(clique(2), 2);
  auto d2 = opt_distance_bound(P3, B, {Rational(0)});
  REQUIRE(d2.has_value());
  CHECK(d2->epsilon == 0);
}

TEST_CASE("blown-up cliques meet at a fractional distance") {
  auto K6 = clique(6);
  auto B = rescale(clique(3), 5);

  // Factor 2/3 is witnessed by uniform random functions in both directions.
  auto at_half = opt_distance_bound(K6, B, {rat(1, 2)});
  REQUIRE(at_half.has_value());
  CHECK(at_half->epsilon == rat(1, 2));

  // Factor 1 fails: no distribution pulls six units onto every pair.
  CHECK(!opt_distance_bound(K6, B, {Rational(0)}).has_value());

  // The scan reports the least accepted candidate; a balanced 3-colouring
  // already pulls four units onto every pair, so 1/4 clears.
  auto scan = opt_distance_bound(K6, B, {Rational(0), rat(1, 4), rat(1, 2)});
  REQUIRE(scan.has_value());
  CHECK(scan->epsilon == rat(1, 4));

  auto rev = opt_distance_bound(B, K6, {Rational(0), rat(1, 4), rat(1, 2)});
  REQUIRE(rev.has_value());
  CHECK(rev->epsilon == scan->epsilon);
}

TEST_CASE("merged parallel copies sit at distance zero") {
  auto split = disjoint_union({clique(2), rescale(clique(2), 2)});
  auto merged = rescale(clique(2), 3);
  auto d = opt_distance_bound(split, merged, {Rational(0)});
  REQUIRE(d.has_value());
  CHECK(d->epsilon == 0);
}

TEST_CASE("an overcast forces dominance on every instance") {
  auto P3 = path_struct(3);
  auto B = rescale(clique(2), 2);
  REQUIRE(std::holds_alternative<Overcast>(overcast_find(P3, B)));
  std::mt19937_64 rng(2026);
  for (int t = 0; t < 20; ++t) {
    auto C = random_graph_structure(rng, 2, 70);
    CHECK(opt_bruteforce(P3, C).value >= opt_bruteforce(B, C).value);
  }
}

TEST_CASE("edit mixture on a triangle with a dropped edge") {
  auto K3 = clique(3);
  auto K3e = make_structure(graph_sig(), ids(3));
  add_undirected(K3e, 0, 2);
  add_undirected(K3e, 1, 2);

  auto ed = edit_distance(K3, K3e);
  CHECK(ed.value == rat(1, 2));

  // Dropping an edge: all the difference sits on zero tuples of the target,
  // so the mixture stays pure phi.
  auto fwd = edit_overcast(K3, K3e, Assignment{0, 1, 2});
  CHECK(fwd.edit_value == rat(1, 2));
  CHECK(fwd.c_sigma == 4);
  CHECK(fwd.delta == rat(2, 3));
  CHECK(fwd.omega.support.size() == 1);
  CHECK(overcast_verify(fwd.omega, K3, K3e, rat(1, 3)).ok);

  // Adding the edge back: phi plus the eight maps into the new pair.
  auto bwd = edit_overcast(K3e, K3, Assignment{0, 1, 2});
  CHECK(bwd.delta == rat(2, 3));
  CHECK(bwd.omega.support.size() == 9);
  auto rep = overcast_verify(bwd.omega, K3e, K3, rat(1, 3));
  CHECK(rep.ok);
  CHECK(rep.min_slack == 0);
}

TEST_CASE("identical structures give a trivial edit mixture") {
  auto K3 = clique(3);
  auto eo = edit_overcast(K3, K3, Assignment{0, 1, 2});
  CHECK(eo.delta == 0);
  CHECK(eo.edit_value == 0);
  REQUIRE(eo.omega.support.size() == 1);
  CHECK(eo.omega.support[0].first == Assignment{0, 1, 2});
}

TEST_CASE("edit mixtures certify distance for random clean pairs") {
  std::mt19937_64 rng(99);
  for (int t = 0; t < 50; ++t) {
    int n = 2 + static_cast<int>(rng() % 3);
    auto A = random_clean_graph(rng, n);
    auto B = random_clean_graph(rng, n);
    auto ed = edit_distance(A, B);
    REQUIRE(!ed.infinite);

    auto fwd = edit_overcast(A, B, ed.phi);
    Assignment inv(n, 0);
    for (int a = 0; a < n; ++a) inv[ed.phi[a]] = a;
    auto bwd = edit_overcast(B, A, inv);
    CHECK(bwd.edit_value == fwd.edit_value);
    CHECK(bwd.delta == fwd.delta);

    Rational eps = fwd.c_sigma * fwd.edit_value;
    Rational r = Rational(1) / (1 + eps);
    CHECK(r == 1 - fwd.delta);
    CHECK(overcast_verify(fwd.omega, A, B, r).ok);
    CHECK(overcast_verify(bwd.omega, B, A, r).ok);

    if (t < 5) {
      auto d = opt_distance_bound(A, B, {eps});
      REQUIRE(d.has_value());
      CHECK(d->epsilon == eps);
    }
  }
}

TEST_CASE("overcast error paths carry their kinds") {
  auto K2 = clique(2);
  auto K4 = clique(4);
  try {
    overcast_find(K2, K4, 10);
    FAIL("cap should have tripped");
  } catch (const Error& e) {
    CHECK(e.kind == Errc::CapExceeded);
  }

  try {
    opt_distance_bound(K2, K2, {Rational(-1)});
    FAIL("negative epsilon should be rejected");
  } catch (const Error& e) {
    CHECK(e.kind == Errc::Usage);
  }

  auto loopy = make_structure(graph_sig(), ids(2));
  loopy.set_value(0, {0, 0}, 1);
  try {
    edit_overcast(loopy, K2, Assignment{0, 1});
    FAIL("non-clean input should be rejected");
  } catch (const Error& e) {
    CHECK(e.kind == Errc::Usage);
  }

  try {
    edit_overcast(K2, K2, Assignment{0, 0});
    FAIL("phi must be a bijection");
  } catch (const Error& e) {
    CHECK(e.kind == Errc::Usage);
  }

  Overcast two;
  two.support.emplace_back(Assignment{0, 1}, rat(1, 2));
  two.support.emplace_back(Assignment{1, 0}, rat(1, 2));
  Overcast one;
  one.support.emplace_back(Assignment{0, 1}, Rational(1));
  try {
    compose(two, one, 1);
    FAIL("compose cap should have tripped");
  } catch (const Error& e) {
    CHECK(e.kind == Errc::CapExceeded);
  }
}
