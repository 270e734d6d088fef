#include "maxhom/generators.hpp"

#include <algorithm>
#include <cstddef>
#include <numeric>
#include <random>
#include <string>
#include <unordered_map>
#include <utility>

#include "maxhom/error.hpp"
#include "maxhom/fragility.hpp"

namespace maxhom {

namespace {

Signature edge_sig() { return Signature{{Symbol{"e", 2}}}; }

std::vector<std::string> index_names(int n) {
  std::vector<std::string> d;
  d.reserve(static_cast<std::size_t>(std::max(n, 0)));
  for (int i = 0; i < n; ++i) d.push_back(std::to_string(i));
  return d;
}

bool bernoulli(std::mt19937_64& rng, const Rational& p) {
  const auto num = numerator(p).convert_to<std::uint64_t>();
  const auto den = denominator(p).convert_to<std::uint64_t>();
  return rng() % den < num;
}

} // namespace

ValuedStructure structure_of_graph(const Graph& g) {
  g.validate();
  auto A = make_structure(edge_sig(), g.vertices);
  for (const auto& [u, v] : g.edges) {
    const Rational w = g.edge_weight(u, v);
    A.set_value(0, {u, v}, w);
    if (u != v) A.set_value(0, {v, u}, w);
  }
  return A;
}

ValuedStructure gen_grid(int d, int side) {
  return structure_of_graph(grid_graph(d, side));
}

ValuedStructure gen_clique(int n) {
  require_usage(n >= 0, "clique size must be nonnegative");
  auto A = make_structure(edge_sig(), index_names(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      A.set_value(0, {i, j}, 1);
      A.set_value(0, {j, i}, 1);
    }
  return A;
}

ValuedStructure gen_path(int n) {
  require_usage(n >= 0, "path length must be nonnegative");
  auto A = make_structure(edge_sig(), index_names(n));
  for (int i = 0; i + 1 < n; ++i) {
    A.set_value(0, {i, i + 1}, 1);
    A.set_value(0, {i + 1, i}, 1);
  }
  return A;
}

ValuedStructure gen_gnp(int n, const Rational& p, std::uint64_t seed) {
  require_usage(n >= 0, "order must be nonnegative");
  require_usage(p >= 0 && p <= 1, "edge probability must lie in [0,1]");
  std::mt19937_64 rng(seed);
  auto A = make_structure(edge_sig(), index_names(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j)
      if (bernoulli(rng, p)) {
        A.set_value(0, {i, j}, 1);
        A.set_value(0, {j, i}, 1);
      }
  return A;
}

ValuedStructure gen_bipartite(int a, int b, const Rational& density,
                              std::uint64_t seed) {
  require_usage(a >= 0 && b >= 0, "side sizes must be nonnegative");
  require_usage(density >= 0 && density <= 1, "density must lie in [0,1]");
  std::mt19937_64 rng(seed);
  auto A = make_structure(edge_sig(), index_names(a + b));
  for (int i = 0; i < a; ++i)
    for (int j = 0; j < b; ++j)
      if (bernoulli(rng, density)) {
        A.set_value(0, {i, a + j}, 1);
        A.set_value(0, {a + j, i}, 1);
      }
  return A;
}

ValuedStructure gen_tournament(int n, std::uint64_t seed) {
  require_usage(n >= 0, "order must be nonnegative");
  std::mt19937_64 rng(seed);
  auto A = make_structure(edge_sig(), index_names(n));
  for (int i = 0; i < n; ++i)
    for (int j = i + 1; j < n; ++j) {
      if (rng() % 2 == 0)
        A.set_value(0, {i, j}, 1);
      else
        A.set_value(0, {j, i}, 1);
    }
  return A;
}

ValuedStructure gen_triangle_glued(const ValuedStructure& base) {
  base.validate();
  require_usage(base.sig.symbols.size() == 1 &&
                    base.sig.symbols[0].arity == 2,
                "base must use a single binary symbol");
  std::vector<std::pair<int, int>> pairs;
  for (const auto& [t, w] : base.values[0]) {
    require_usage(t[0] != t[1], "base must be loopless");
    require_usage(base.value(0, {t[1], t[0]}) == w, "base must be symmetric");
    if (t[0] < t[1]) pairs.emplace_back(t[0], t[1]);
  }

  const int n = base.n();
  std::vector<std::string> names = base.domain;
  for (const auto& [u, v] : pairs)
    names.push_back(base.domain[u] + "+" + base.domain[v]);
  auto out = make_structure(base.sig, names);
  for (const auto& [t, w] : base.values[0]) out.set_value(0, t, w);
  for (std::size_t i = 0; i < pairs.size(); ++i) {
    const int w = n + static_cast<int>(i);
    for (const int end : {pairs[i].first, pairs[i].second}) {
      out.set_value(0, {end, w}, 1);
      out.set_value(0, {w, end}, 1);
    }
  }
  return out;
}

GadgetPair hardness_gadget(const Graph& g, const std::vector<int>& colors,
                           std::uint64_t seed) {
  g.validate();
  require_usage(static_cast<int>(colors.size()) == g.n(),
                "one color per vertex");
  int k = 0;
  for (const int c : colors) {
    require_usage(c >= 0, "colors are indices from zero");
    k = std::max(k, c + 1);
  }
  std::vector<char> used(static_cast<std::size_t>(k), 0);
  for (const int c : colors) used[static_cast<std::size_t>(c)] = 1;
  for (const char u : used)
    require_usage(u, "every color up to the largest must be used");
  for (const auto& [u, v] : g.edges)
    require_usage(colors[u] != colors[v], "coloring must be proper");

  GadgetPair out;
  out.pattern = gen_tournament(k, seed);
  out.target = make_structure(edge_sig(), g.vertices);
  for (const auto& [u, v] : g.edges) {
    if (out.pattern.value(0, {colors[u], colors[v]}) == 1)
      out.target.set_value(0, {u, v}, 1);
    else
      out.target.set_value(0, {v, u}, 1);
  }
  return out;
}

ProbeReport non_pliability_probe(const ValuedStructure& A, const Rational& eps,
                                 int k, long long map_cap) {
  A.validate();
  require_usage(eps >= 0 && eps < 1, "eps must lie in [0,1)");
  require_usage(k >= 1, "component bound must be positive");
  const int n = A.n();
  long long total = 1;
  for (int i = 0; i < n; ++i) {
    require_cap(total <= map_cap / n, "self-map enumeration exceeds the cap");
    total *= n;
  }

  ProbeReport rep;
  Assignment id(n);
  std::iota(id.begin(), id.end(), 0);
  rep.id_value = val(A, A, id);
  if (n == 0) {
    rep.best_value = rep.id_value;
    rep.best_map = id;
    rep.maps = 1;
    rep.separated = false;
    return rep;
  }

  const auto adj = gaifman(A).adjacency();
  // Image sets recur across maps, so the component check is memoized.
  std::unordered_map<std::uint64_t, char> small_components;
  const auto image_ok = [&](std::uint64_t mask) {
    const auto it = small_components.find(mask);
    if (it != small_components.end()) return it->second == 1;
    bool ok = true;
    std::uint64_t seen = 0;
    for (int s = 0; s < n && ok; ++s) {
      if (!((mask >> s) & 1) || ((seen >> s) & 1)) continue;
      int size = 0;
      std::vector<int> queue = {s};
      seen |= std::uint64_t(1) << s;
      while (!queue.empty()) {
        const int u = queue.back();
        queue.pop_back();
        ++size;
        for (const int w : adj[u])
          if (((mask >> w) & 1) && !((seen >> w) & 1)) {
            seen |= std::uint64_t(1) << w;
            queue.push_back(w);
          }
      }
      ok = size <= k;
    }
    small_components[mask] = ok ? 1 : 0;
    return ok;
  };

  Rational best(-1);
  Assignment best_map;
  Assignment g(n, 0);
  while (true) {
    std::uint64_t mask = 0;
    for (const int im : g) mask |= std::uint64_t(1) << im;
    if (image_ok(mask)) {
      ++rep.maps;
      const Rational v = val(A, A, g);
      if (v > best) {
        best = v;
        best_map = g;
      }
    }
    int pos = n - 1;
    while (pos >= 0 && g[pos] == n - 1) g[pos--] = 0;
    if (pos < 0) break;
    ++g[pos];
  }

  rep.best_value = best;
  rep.best_map = best_map;
  rep.loss = rep.id_value > 0
                 ? Rational(1) - rep.best_value / rep.id_value
                 : Rational(0);
  rep.separated = rep.loss > eps;
  return rep;
}

} // namespace maxhom
