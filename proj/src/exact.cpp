#include "maxhom/exact.hpp"

#include <algorithm>
#include <deque>

#include "maxhom/error.hpp"

namespace maxhom {

namespace {

Integer int_pow(long long base, long long exp) {
  Integer r = 1;
  for (long long i = 0; i < exp; ++i) r *= base;
  return r;
}

OptResult empty_domain_result(const ValuedStructure& A, const ValuedStructure& B) {
  // Only nullary symbols can carry value; the empty assignment is the map.
  OptResult r;
  r.value = val(A, B, {});
  return r;
}

} // namespace

OptResult opt_bruteforce(const ValuedStructure& A, const ValuedStructure& B,
                         long long map_cap) {
  require_usage(same_signature(A, B), "signature mismatch");
  if (A.n() == 0) return empty_domain_result(A, B);
  require_usage(B.n() >= 1, "no assignments into an empty domain");
  require_cap(int_pow(B.n(), A.n()) <= map_cap,
              "assignment enumeration cap exceeded");
  OptResult best;
  bool have = false;
  for_each_tuple(B.n(), A.n(), [&](const Tuple& t) {
    Rational v = val(A, B, t);
    if (!have || v > best.value) {
      best.value = v;
      best.witness = t;
      have = true;
    }
  });
  return best;
}

OptResult opt_with_forced(const ValuedStructure& A, const ValuedStructure& B,
                          const std::map<int, int>& pins, long long map_cap) {
  require_usage(same_signature(A, B), "signature mismatch");
  if (A.n() == 0) {
    require_usage(pins.empty(), "pins on an empty domain");
    return empty_domain_result(A, B);
  }
  require_usage(B.n() >= 1, "no assignments into an empty domain");
  std::vector<int> free_pos;
  Assignment h(A.n(), -1);
  for (const auto& [x, y] : pins) {
    require_usage(x >= 0 && x < A.n(), "pinned element out of range");
    require_usage(y >= 0 && y < B.n(), "pin target out of range");
    h[x] = y;
  }
  for (int x = 0; x < A.n(); ++x)
    if (h[x] < 0) free_pos.push_back(x);
  require_cap(int_pow(B.n(), free_pos.size()) <= map_cap,
              "assignment enumeration cap exceeded");
  OptResult best;
  bool have = false;
  for_each_tuple(B.n(), static_cast<int>(free_pos.size()), [&](const Tuple& t) {
    for (size_t i = 0; i < free_pos.size(); ++i) h[free_pos[i]] = t[i];
    Rational v = val(A, B, h);
    if (!have || v > best.value) {
      best.value = v;
      best.witness = h;
      have = true;
    }
  });
  return best;
}

namespace {

// Mixed-radix rank with the last tuple position least significant, so
// numeric rank order coincides with lexicographic tuple order.
long long rank_of(const Tuple& t, int base) {
  long long r = 0;
  for (int x : t) r = r * base + x;
  return r;
}

struct TreeDP {
  const ValuedStructure* A;
  const ValuedStructure* B;
  const TreeDecomposition* T;
  int nb;
  std::vector<std::vector<int>> children;
  std::vector<int> parent, depth, bfs_order;
  // Per bag: charged records (symbol, positions within the bag, value).
  struct Charge {
    int f;
    std::vector<int> pos;
    Rational v;
  };
  std::vector<std::vector<Charge>> charges;
  std::vector<std::vector<Rational>> dp;  // per bag, indexed by assignment rank
  // Per non-root bag: separator positions (within own bag and parent's bag),
  // and per separator-assignment rank the best value and chosen full rank.
  std::vector<std::vector<int>> sep_in_self, sep_in_parent;
  std::vector<std::vector<Rational>> best_val;
  std::vector<std::vector<long long>> best_rank;

  void root_tree() {
    std::vector<std::vector<int>> adj(nb);
    for (auto [a, b] : T->tree_edges) {
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    parent.assign(nb, -1);
    depth.assign(nb, -1);
    children.assign(nb, {});
    std::deque<int> q{0};
    depth[0] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      bfs_order.push_back(u);
      for (int w : adj[u])
        if (depth[w] < 0) {
          depth[w] = depth[u] + 1;
          parent[w] = u;
          children[u].push_back(w);
          q.push_back(w);
        }
    }
  }

  void assign_charges() {
    charges.assign(nb, {});
    for (size_t f = 0; f < A->values.size(); ++f) {
      for (const auto& [t, v] : A->values[f]) {
        Tuple sup = tuple_support(t);
        int pick = -1;
        for (int i = 0; i < nb; ++i) {
          const auto& bag = (*T).bags[i];
          bool contains = true;
          for (int x : sup)
            if (!std::binary_search(bag.begin(), bag.end(), x)) {
              contains = false;
              break;
            }
          if (contains && (pick < 0 || depth[i] < depth[pick])) pick = i;
        }
        require_usage(pick >= 0, "decomposition misses a tuple support");
        Charge c;
        c.f = static_cast<int>(f);
        for (int x : t) {
          const auto& bag = (*T).bags[pick];
          c.pos.push_back(static_cast<int>(
              std::lower_bound(bag.begin(), bag.end(), x) - bag.begin()));
        }
        c.v = v;
        charges[pick].push_back(std::move(c));
      }
    }
  }

  Rational charge_value(int v, const Tuple& s) const {
    Rational total(0);
    Tuple mapped;
    for (const auto& c : charges[v]) {
      mapped.resize(c.pos.size());
      for (size_t i = 0; i < c.pos.size(); ++i) mapped[i] = s[c.pos[i]];
      Rational bv = B->value(c.f, mapped);
      if (bv != 0) total += c.v * bv;
    }
    return total;
  }

  void run() {
    int nB = B->n();
    dp.assign(nb, {});
    sep_in_self.assign(nb, {});
    sep_in_parent.assign(nb, {});
    best_val.assign(nb, {});
    best_rank.assign(nb, {});
    for (int v = 0; v < nb; ++v) {
      if (parent[v] < 0) continue;
      const auto& own = T->bags[v];
      const auto& par = T->bags[parent[v]];
      for (size_t i = 0; i < own.size(); ++i)
        if (std::binary_search(par.begin(), par.end(), own[i])) {
          sep_in_self[v].push_back(static_cast<int>(i));
          sep_in_parent[v].push_back(static_cast<int>(
              std::lower_bound(par.begin(), par.end(), own[i]) - par.begin()));
        }
    }
    // Bottom-up over the reversed BFS order.
    for (auto it = bfs_order.rbegin(); it != bfs_order.rend(); ++it) {
      int v = *it;
      int sz = static_cast<int>(T->bags[v].size());
      long long count = 1;
      for (int i = 0; i < sz; ++i) count *= nB;
      dp[v].assign(count, Rational(0));
      long long idx = 0;
      Tuple key;
      for_each_tuple(nB, sz, [&](const Tuple& s) {
        Rational total = charge_value(v, s);
        for (int c : children[v]) {
          key.resize(sep_in_parent[c].size());
          // The child's separator key, read from this bag's assignment.
          for (size_t i = 0; i < key.size(); ++i) key[i] = s[sep_in_parent[c][i]];
          total += best_val[c][rank_of(key, nB)];
        }
        dp[v][idx++] = total;
      });
      if (parent[v] >= 0) {
        long long sep_count = 1;
        for (size_t i = 0; i < sep_in_self[v].size(); ++i) sep_count *= nB;
        best_val[v].assign(sep_count, Rational(-1));
        best_rank[v].assign(sep_count, -1);
        long long j = 0;
        for_each_tuple(nB, sz, [&](const Tuple& s) {
          key.resize(sep_in_self[v].size());
          for (size_t i = 0; i < key.size(); ++i) key[i] = s[sep_in_self[v][i]];
          long long k = rank_of(key, nB);
          if (best_rank[v][k] < 0 || dp[v][j] > best_val[v][k]) {
            best_val[v][k] = dp[v][j];
            best_rank[v][k] = j;
          }
          ++j;
        });
      }
    }
  }

  OptResult extract() const {
    int nB = B->n();
    OptResult res;
    // Lexicographically least maximizer at the root (ranks are lex-ordered).
    long long pick = 0;
    for (long long i = 1; i < static_cast<long long>(dp[0].size()); ++i)
      if (dp[0][i] > dp[0][pick]) pick = i;
    res.value = dp[0][pick];
    res.witness.assign(A->n(), -1);
    // Top-down: place each bag's chosen assignment, children looked up by
    // their separator key.
    std::deque<std::pair<int, long long>> q{{0, pick}};
    Tuple s, key;
    while (!q.empty()) {
      auto [v, rank] = q.front();
      q.pop_front();
      int sz = static_cast<int>(T->bags[v].size());
      s.assign(sz, 0);
      long long r = rank;
      for (int i = sz - 1; i >= 0; --i) {
        s[i] = static_cast<int>(r % nB);
        r /= nB;
      }
      for (int i = 0; i < sz; ++i) res.witness[T->bags[v][i]] = s[i];
      for (int c : children[v]) {
        key.resize(sep_in_parent[c].size());
        for (size_t i = 0; i < key.size(); ++i) key[i] = s[sep_in_parent[c][i]];
        q.push_back({c, best_rank[c][rank_of(key, nB)]});
      }
    }
    return res;
  }
};

} // namespace

OptResult opt_treedec(const ValuedStructure& A, const ValuedStructure& B,
                      const TreeDecomposition& T, long long state_cap) {
  require_usage(same_signature(A, B), "signature mismatch");
  Graph ga = gaifman(A);
  std::string why;
  require_usage(td_valid(ga, T, &why), "invalid decomposition: " + why);
  if (A.n() == 0) return empty_domain_result(A, B);
  require_usage(B.n() >= 1, "no assignments into an empty domain");
  Integer states = 0;
  for (const auto& bag : T.bags) states += int_pow(B.n(), bag.size());
  require_cap(states <= state_cap, "decomposition state cap exceeded");

  TreeDP dp;
  dp.A = &A;
  dp.B = &B;
  dp.T = &T;
  dp.nb = static_cast<int>(T.bags.size());
  dp.root_tree();
  dp.assign_charges();
  dp.run();
  OptResult res = dp.extract();
  for (int x : res.witness)
    require_verify(x >= 0, "dp witness left an element unassigned");
  require_verify(val(A, B, res.witness) == res.value, "dp value/witness mismatch");
  return res;
}

OptResult opt_auto(const ValuedStructure& A, const ValuedStructure& B) {
  const long long kBruteCap = 10000000;
  if (A.n() == 0 || (B.n() >= 1 && int_pow(B.n(), A.n()) <= kBruteCap))
    return opt_bruteforce(A, B, kBruteCap);
  Graph ga = gaifman(A);
  bool small = true;
  for (const auto& c : components(ga))
    if (c.size() > 12) small = false;
  auto T = tree_decomposition(ga, small ? TDMethod::Exact : TDMethod::MinFill);
  return opt_treedec(A, B, T);
}

} // namespace maxhom
