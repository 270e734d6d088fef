#include "maxhom/dense.hpp"

#include <algorithm>
#include <bit>
#include <map>
#include <random>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "maxhom/error.hpp"

namespace maxhom {

namespace {

// Checks the weighted-graph shape (one binary symbol, symmetric table) and
// hands back the table.
const std::map<Tuple, Rational>& graph_values(const ValuedStructure& G) {
  G.validate();
  require_usage(G.sig.symbols.size() == 1 && G.sig.symbols[0].arity == 2,
                "weighted-graph operations expect one binary symbol");
  for (const auto& [t, v] : G.values[0])
    require_usage(G.value(0, Tuple{t[1], t[0]}) == v,
                  "edge weights must be symmetric");
  return G.values[0];
}

std::vector<int> part_of_map(const Partition& P, int n) {
  std::vector<int> part(n, -1);
  for (int i = 0; i < P.k(); ++i)
    for (int v : P.parts[i]) part[v] = i;
  return part;
}

// w_G(S, T): total weight of ordered pairs with the first entry in S and
// the second in T.
Rational block_weight(const ValuedStructure& G, const std::vector<int>& S,
                      const std::vector<int>& T) {
  Rational w = 0;
  for (int u : S)
    for (int v : T) w += G.value(0, Tuple{u, v});
  return w;
}

Rational block_density(const ValuedStructure& G, const std::vector<int>& S,
                       const std::vector<int>& T) {
  return block_weight(G, S, T) / (Rational(S.size()) * T.size());
}

// Number of maps choosing one member per part, kept under the cap.
long long pmap_count(const Partition& P, long long map_cap) {
  long long total = 1;
  for (const auto& part : P.parts) {
    total *= static_cast<long long>(part.size());
    require_cap(total <= map_cap, "P-map enumeration exceeds its cap");
  }
  return total;
}

// Runs fn on every index vector (one member position per part), advancing
// the last coordinate fastest so the choices come out lexicographically.
template <typename Fn>
void for_each_pmap(const Partition& P, Fn&& fn) {
  std::vector<std::size_t> idx(P.parts.size(), 0);
  while (true) {
    fn(idx);
    int pos = static_cast<int>(idx.size()) - 1;
    while (pos >= 0 && idx[pos] + 1 == P.parts[pos].size()) {
      idx[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++idx[pos];
  }
}

void check_side(const ValuedStructure& G, const std::vector<int>& side) {
  require_usage(!side.empty(), "homogeneity sides must be nonempty");
  std::set<int> seen;
  for (int v : side) {
    require_usage(0 <= v && v < G.n(), "side member out of range");
    require_usage(seen.insert(v).second, "repeated side member");
  }
}

// Validates pattern pairs against a k-part partition and returns them as a
// set for membership tests.
std::set<std::pair<int, int>> check_pattern(
    const std::vector<std::pair<int, int>>& F, int k) {
  std::set<std::pair<int, int>> fset;
  for (auto [i, j] : F) {
    require_usage(0 <= i && i < j && j < k,
                  "pattern pairs must satisfy 0 <= i < j < k");
    require_usage(fset.insert({i, j}).second, "repeated pattern pair");
  }
  return fset;
}

ValuedStructure unit_clique(int n) {
  Signature sig{{Symbol{"e", 2}}};
  std::vector<std::string> names;
  for (int i = 0; i < n; ++i) names.push_back(std::to_string(i));
  ValuedStructure A = make_structure(std::move(sig), std::move(names));
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      if (i != j) A.set_value(0, Tuple{i, j}, Rational(1));
  return A;
}

// All img^dom maps with equal probability, support in lexicographic order.
Overcast uniform_functions(int dom, int img, long long support_cap) {
  long long count = 1;
  for (int i = 0; i < dom; ++i) {
    count *= img;
    require_cap(count <= support_cap,
                "random-function support exceeds its cap");
  }
  Overcast w;
  w.support.reserve(static_cast<std::size_t>(count));
  const Rational p(1, count);
  Assignment g(dom, 0);
  while (true) {
    w.support.emplace_back(g, p);
    int pos = dom - 1;
    while (pos >= 0 && g[pos] == img - 1) {
      g[pos] = 0;
      --pos;
    }
    if (pos < 0) break;
    ++g[pos];
  }
  return w;
}

} // namespace

void validate_partition(const Partition& P, int n) {
  require_usage(P.k() >= 1, "partition needs at least one part");
  std::vector<char> seen(static_cast<std::size_t>(std::max(n, 0)), 0);
  long long covered = 0;
  for (const auto& part : P.parts) {
    require_usage(!part.empty(), "partition parts must be nonempty");
    for (int v : part) {
      require_usage(0 <= v && v < n, "part member out of range");
      require_usage(!seen[v], "element appears in two parts");
      seen[v] = 1;
      ++covered;
    }
  }
  require_usage(covered == n, "partition must cover every element");
}

bool is_balanced(const Partition& P, int n) {
  validate_partition(P, n);
  const std::size_t lo = static_cast<std::size_t>(n / P.k());
  const std::size_t hi = static_cast<std::size_t>((n + P.k() - 1) / P.k());
  for (const auto& part : P.parts)
    if (part.size() != lo && part.size() != hi) return false;
  return true;
}

ValuedStructure quotient(const ValuedStructure& G, const Partition& P) {
  const auto& vals = graph_values(G);
  validate_partition(P, G.n());
  const std::vector<int> part = part_of_map(P, G.n());
  std::vector<std::string> names;
  for (int i = 0; i < P.k(); ++i) names.push_back(std::to_string(i));
  ValuedStructure Q = make_structure(G.sig, std::move(names));
  std::map<Tuple, Rational> acc;
  for (const auto& [t, v] : vals) acc[Tuple{part[t[0]], part[t[1]]}] += v;
  for (const auto& [t, v] : acc) Q.set_value(0, t, v);
  return Q;
}

HomogeneityReport homogeneity_defect(const ValuedStructure& G,
                                     const std::vector<int>& V1in,
                                     const std::vector<int>& V2in, bool exact,
                                     int n_samples, unsigned long long seed) {
  graph_values(G);
  check_side(G, V1in);
  check_side(G, V2in);
  for (int v : V2in)
    require_usage(std::find(V1in.begin(), V1in.end(), v) == V1in.end(),
                  "homogeneity sides must be disjoint");

  // Enumerate subsets of the smaller side; symmetric weights make the
  // defect symmetric in the sides, so this loses nothing.
  std::vector<int> V1 = V1in, V2 = V2in;
  if (V1.size() > V2.size()) std::swap(V1, V2);
  const int m1 = static_cast<int>(V1.size());
  const int m2 = static_cast<int>(V2.size());
  const Rational area = Rational(m1) * m2;

  HomogeneityReport rep;
  rep.density = block_weight(G, V1, V2) / area;

  // For a fixed W1 with row sums s_v = w(W1, {v}), the other side is
  // optimized in closed form: the worst overweight subset takes exactly the
  // vertices with s_v above density |W1|, the worst underweight one those
  // below, so the maximum over all W2 costs a single pass.
  Rational best = 0;
  auto consider = [&](const std::vector<Rational>& s, int cnt) {
    const Rational level = rep.density * cnt;
    Rational pos = 0, neg = 0;
    for (const Rational& sv : s) {
      if (sv > level)
        pos += sv - level;
      else
        neg += level - sv;
    }
    if (pos > best) best = pos;
    if (neg > best) best = neg;
  };

  if (exact) {
    require_cap(m1 <= 12, "homogeneity subset enumeration exceeds its cap");
    // Ruler-sequence toggles walk all subsets with one update per step.
    std::vector<Rational> s(m2, Rational(0));
    std::vector<char> in(m1, 0);
    int cnt = 0;
    const unsigned long long total = 1ull << m1;
    for (unsigned long long i = 1; i < total; ++i) {
      const int b = std::countr_zero(i);
      const int sign = in[b] ? -1 : 1;
      in[b] = static_cast<char>(!in[b]);
      cnt += sign;
      for (int j = 0; j < m2; ++j) {
        const Rational w = G.value(0, Tuple{V1[b], V2[j]});
        if (sign > 0)
          s[j] += w;
        else
          s[j] -= w;
      }
      consider(s, cnt);
    }
    rep.exact = true;
    rep.evaluated = static_cast<long long>(total);
  } else {
    require_usage(n_samples >= 1, "sampling needs at least one draw");
    std::mt19937_64 rng(seed);
    for (int t = 0; t < n_samples; ++t) {
      std::vector<Rational> s(m2, Rational(0));
      int cnt = 0;
      for (int b = 0; b < m1; ++b) {
        if (rng() % 2 == 0) continue;
        ++cnt;
        for (int j = 0; j < m2; ++j) s[j] += G.value(0, Tuple{V1[b], V2[j]});
      }
      consider(s, cnt);
    }
    rep.exact = false;
    rep.evaluated = n_samples;
  }
  rep.defect = best / area;
  return rep;
}

Rational partition_defect(const ValuedStructure& G, const Partition& P) {
  graph_values(G);
  validate_partition(P, G.n());
  Rational worst = 0;
  for (int i = 0; i < P.k(); ++i)
    for (int j = i + 1; j < P.k(); ++j) {
      const Rational d = homogeneity_defect(G, P.parts[i], P.parts[j]).defect;
      if (d > worst) worst = d;
    }
  return worst;
}

CliqueOvercast clique_overcast(int n, int k, long long support_cap) {
  require_usage(n >= 2 && k >= 2, "cliques need at least two vertices");
  CliqueOvercast res;
  res.lambda = Rational(static_cast<long long>(n) * (n - 1),
                        static_cast<long long>(k) * (k - 1));
  res.big = unit_clique(n);
  res.small = rescale(unit_clique(k), res.lambda);
  res.out = uniform_functions(n, k, support_cap);
  res.in = uniform_functions(k, n, support_cap);
  res.out_factor = Rational(1) - Rational(1, k);
  res.in_factor = Rational(1) - Rational(1, n);
  // A uniformly random function hits each ordered pair with probability
  // 1/k^2, so every tuple is covered exactly, with no slack to spare.
  const SlackReport fwd =
      overcast_verify(res.out, res.big, res.small, res.out_factor);
  require_verify(fwd.ok && fwd.min_slack == 0, "clique covering is not tight");
  const SlackReport bwd =
      overcast_verify(res.in, res.small, res.big, res.in_factor);
  require_verify(bwd.ok && bwd.min_slack == 0, "clique covering is not tight");
  return res;
}

CountingReport counting_check(const ValuedStructure& G, const Partition& P,
                              const std::vector<std::pair<int, int>>& F,
                              long long map_cap) {
  graph_values(G);
  validate_partition(P, G.n());
  check_pattern(F, P.k());

  CountingReport rep;
  rep.maps = pmap_count(P, map_cap);
  rep.epsilon = partition_defect(G, P);

  rep.predicted = Rational(rep.maps);
  for (auto [i, j] : F)
    rep.predicted *= block_density(G, P.parts[i], P.parts[j]);
  rep.halfwidth =
      Rational(rep.maps) * rep.epsilon * static_cast<long long>(F.size());

  Rational sum = 0;
  for_each_pmap(P, [&](const std::vector<std::size_t>& idx) {
    Rational hom = 1;
    for (auto [i, j] : F) {
      hom *= G.value(0, Tuple{P.parts[i][idx[i]], P.parts[j][idx[j]]});
      if (hom == 0) return;
    }
    sum += hom;
  });
  rep.sum = sum;

  Rational diff = rep.sum - rep.predicted;
  if (diff < 0) diff = -diff;
  rep.contained = diff <= rep.halfwidth;
  require_verify(rep.contained, "counting window violated");
  return rep;
}

ExtensionReport extension_check(const ValuedStructure& G, const Partition& P,
                                const std::vector<std::pair<int, int>>& F,
                                std::pair<int, int> ab, long long map_cap) {
  graph_values(G);
  validate_partition(P, G.n());
  const auto fset = check_pattern(F, P.k());
  require_usage(fset.count(ab) == 1,
                "the pinned pair must belong to the pattern");
  const auto& Va = P.parts[ab.first];
  const auto& Vb = P.parts[ab.second];
  const long long maps = pmap_count(P, map_cap);

  ExtensionReport rep;
  rep.epsilon = partition_defect(G, P);
  rep.sqrt_eps = rational_sqrt_upper(rep.epsilon);
  rep.pairs = static_cast<long long>(Va.size()) * Vb.size();

  std::vector<std::vector<Rational>> pinned(
      Va.size(), std::vector<Rational>(Vb.size(), Rational(0)));
  for_each_pmap(P, [&](const std::vector<std::size_t>& idx) {
    Rational hom = 1;
    for (auto [i, j] : F) {
      hom *= G.value(0, Tuple{P.parts[i][idx[i]], P.parts[j][idx[j]]});
      if (hom == 0) return;
    }
    pinned[idx[ab.first]][idx[ab.second]] += hom;
  });

  const long long rest = maps / rep.pairs;
  Rational prod_rest = 1;
  for (auto [i, j] : F)
    if (std::pair<int, int>{i, j} != ab)
      prod_rest *= block_density(G, P.parts[i], P.parts[j]);
  const Rational hw =
      Rational(rest) * rep.sqrt_eps * static_cast<long long>(F.size());
  for (std::size_t pa = 0; pa < Va.size(); ++pa)
    for (std::size_t pb = 0; pb < Vb.size(); ++pb) {
      const Rational center =
          Rational(rest) * G.value(0, Tuple{Va[pa], Vb[pb]}) * prod_rest;
      Rational diff = pinned[pa][pb] - center;
      if (diff < 0) diff = -diff;
      if (diff > hw) ++rep.exceptions;
    }
  rep.allowed = Rational(2) * P.k() * rep.sqrt_eps * rep.pairs;
  rep.ok = Rational(rep.exceptions) <= rep.allowed;
  require_verify(rep.ok, "extension exception bound violated");
  return rep;
}

QuotientOvercast quotient_overcast(const ValuedStructure& G,
                                   const Partition& P, const Rational& eps0,
                                   long long map_cap, long long support_cap) {
  const auto& vals = graph_values(G);
  validate_partition(P, G.n());
  require_usage(eps0 > 0 && eps0 < 1, "eps0 must lie strictly between 0 and 1");
  require_usage(is_clean(G), "quotient approximation expects a loopless graph");
  const int k = P.k();
  const int n = G.n();

  QuotientOvercast res;
  res.quotient_graph = quotient(G, P);

  // Folding each part onto its index covers the quotient with no loss.
  const std::vector<int> part = part_of_map(P, n);
  res.out.support.push_back({Assignment(part.begin(), part.end()), Rational(1)});
  require_verify(
      overcast_verify(res.out, G, res.quotient_graph, Rational(1)).ok,
      "quotient fold failed to cover");

  res.factor = Rational(1) / (Rational(1) + eps0 / 2);
  res.density = G.norm1() / (Rational(2) * n * n);
  res.density_hypothesis =
      Rational(1, k) <= res.density / 10 * eps0 / (Rational(1) + eps0);
  res.epsilon = partition_defect(G, P);

  // Heavy part pairs carry density at least 1/k.
  const Rational inv_k(1, k);
  for (int i = 0; i < k; ++i)
    for (int j = i + 1; j < k; ++j)
      if (block_density(G, P.parts[i], P.parts[j]) >= inv_k)
        res.kept_pairs.push_back({i, j});

  // Prune: intra-part edges, pairs outside the pattern, light edges.
  const Rational light = rational_root_upper(res.epsilon, 8);
  const std::set<std::pair<int, int>> fset(res.kept_pairs.begin(),
                                           res.kept_pairs.end());
  ValuedStructure gp = make_structure(G.sig, G.domain);
  for (const auto& [t, v] : vals) {
    const int pi = part[t[0]], pj = part[t[1]];
    if (pi == pj) continue;
    if (fset.count({std::min(pi, pj), std::max(pi, pj)}) == 0) continue;
    if (v < light) continue;
    gp.set_value(0, t, v);
  }

  // One sweep gathers the normalization, the backward support, and every
  // pinned sum needed for the window pruning.
  const long long maps = pmap_count(P, map_cap);
  const std::size_t nf = res.kept_pairs.size();
  std::vector<std::vector<std::vector<Rational>>> pinned(nf);
  for (std::size_t e = 0; e < nf; ++e)
    pinned[e].assign(
        P.parts[res.kept_pairs[e].first].size(),
        std::vector<Rational>(P.parts[res.kept_pairs[e].second].size(),
                              Rational(0)));
  Rational total = 0;
  std::vector<std::pair<Assignment, Rational>> raw;
  for_each_pmap(P, [&](const std::vector<std::size_t>& idx) {
    Rational hom = 1;
    for (auto [i, j] : res.kept_pairs) {
      hom *= G.value(0, Tuple{P.parts[i][idx[i]], P.parts[j][idx[j]]});
      if (hom == 0) return;
    }
    total += hom;
    for (std::size_t e = 0; e < nf; ++e)
      pinned[e][idx[res.kept_pairs[e].first]][idx[res.kept_pairs[e].second]] +=
          hom;
    require_cap(static_cast<long long>(raw.size()) < support_cap,
                "backward support exceeds its cap");
    Assignment g(k);
    for (int i = 0; i < k; ++i) g[i] = P.parts[i][idx[i]];
    raw.emplace_back(std::move(g), hom);
  });

  // Drop the pins whose sum escapes the window of their pair.
  const Rational sq = rational_sqrt_upper(res.epsilon);
  for (std::size_t e = 0; e < nf; ++e) {
    const auto [a, b] = res.kept_pairs[e];
    const auto& Va = P.parts[a];
    const auto& Vb = P.parts[b];
    const long long rest =
        maps / (static_cast<long long>(Va.size()) * Vb.size());
    Rational prod_rest = 1;
    for (auto [i, j] : res.kept_pairs)
      if (!(i == a && j == b))
        prod_rest *= block_density(G, P.parts[i], P.parts[j]);
    const Rational hw = Rational(rest) * sq * static_cast<long long>(nf);
    for (std::size_t pa = 0; pa < Va.size(); ++pa)
      for (std::size_t pb = 0; pb < Vb.size(); ++pb) {
        const Rational center =
            Rational(rest) * G.value(0, Tuple{Va[pa], Vb[pb]}) * prod_rest;
        Rational diff = pinned[e][pa][pb] - center;
        if (diff < 0) diff = -diff;
        if (diff > hw) {
          gp.set_value(0, Tuple{Va[pa], Vb[pb]}, Rational(0));
          gp.set_value(0, Tuple{Vb[pb], Va[pa]}, Rational(0));
        }
      }
  }
  res.gprime = gp;

  // Identity edit distance; the pruned graph sits entrywise below G.
  const Rational norm_gp = gp.norm1();
  if (norm_gp > 0) {
    res.edit_finite = true;
    res.edit = (G.norm1() - norm_gp) / norm_gp;
  }

  // Backward: each map weighted by its pattern mass.
  if (total > 0) {
    std::sort(raw.begin(), raw.end());
    for (auto& [g, h] : raw) res.in.support.emplace_back(g, h / total);
    res.slack = overcast_verify(res.in, res.quotient_graph, res.gprime,
                                res.factor);
  }

  const bool edit_ok = res.edit_finite && res.edit <= eps0 / 2;
  res.accepted = total > 0 && res.slack.ok && edit_ok;
  if (!res.accepted) {
    std::string why;
    if (total == 0)
      why = "every choice of one vertex per part has weight zero across the "
            "heavy pairs";
    else if (!res.slack.ok)
      why = "backward coverage misses the factor (min slack " +
            format_rational(res.slack.min_slack) + ")";
    else if (!res.edit_finite)
      why = "pruning removed every edge";
    else
      why = "pruning edit distance " + format_rational(res.edit) +
            " exceeds half of eps0";
    if (!res.density_hypothesis)
      why += "; density hypothesis 1/k <= (c/10) eps0/(1+eps0) fails at c = " +
             format_rational(res.density);
    res.diagnosis = why;
  }
  return res;
}

RegularitySearch regularity_search(const ValuedStructure& G, int k,
                                   long long budget, unsigned long long seed) {
  graph_values(G);
  const int n = G.n();
  require_usage(k >= 1 && k <= n, "part count out of range");
  require_usage(budget >= 1, "budget must be positive");

  // Balanced layout: the first n mod k parts get the extra vertex.
  const int q = n / k, r = n % k;
  auto build = [&](const std::vector<int>& order) {
    Partition P;
    int pos = 0;
    for (int i = 0; i < k; ++i) {
      const int size = q + (i < r ? 1 : 0);
      std::vector<int> part(order.begin() + pos, order.begin() + pos + size);
      std::sort(part.begin(), part.end());
      P.parts.push_back(std::move(part));
      pos += size;
    }
    return P;
  };

  RegularitySearch res;
  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  res.best = build(order);
  res.defect = partition_defect(G, res.best);
  res.evaluated = 1;

  // Seeded shuffles take half the budget, swaps the rest.
  std::mt19937_64 rng(seed);
  const long long candidates = (budget + 1) / 2;
  while (res.evaluated < candidates && res.defect > 0) {
    for (int i = n - 1; i > 0; --i) {
      const int j =
          static_cast<int>(rng() % static_cast<unsigned long long>(i + 1));
      std::swap(order[i], order[j]);
    }
    Partition cand = build(order);
    const Rational d = partition_defect(G, cand);
    ++res.evaluated;
    if (d < res.defect) {
      res.defect = d;
      res.best = std::move(cand);
    }
  }

  // First-improvement cross-part swaps keep sizes balanced.
  auto try_improve = [&]() -> bool {
    for (int i = 0; i < k; ++i)
      for (std::size_t a = 0; a < res.best.parts[i].size(); ++a)
        for (int j = i + 1; j < k; ++j)
          for (std::size_t b = 0; b < res.best.parts[j].size(); ++b) {
            if (res.evaluated >= budget) return false;
            Partition cand = res.best;
            std::swap(cand.parts[i][a], cand.parts[j][b]);
            std::sort(cand.parts[i].begin(), cand.parts[i].end());
            std::sort(cand.parts[j].begin(), cand.parts[j].end());
            const Rational d = partition_defect(G, cand);
            ++res.evaluated;
            if (d < res.defect) {
              res.defect = d;
              res.best = std::move(cand);
              return true;
            }
          }
    return false;
  };
  while (res.defect > 0 && res.evaluated < budget && try_improve()) {
  }
  return res;
}

} // namespace maxhom
