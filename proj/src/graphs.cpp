#include "maxhom/graphs.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <map>
#include <numeric>
#include <set>
#include <unordered_map>

#include "maxhom/error.hpp"

namespace maxhom {

int Graph::vertex(const std::string& id) const {
  for (size_t i = 0; i < vertices.size(); ++i)
    if (vertices[i] == id) return static_cast<int>(i);
  return -1;
}

bool Graph::has_edge(int u, int v) const {
  if (u > v) std::swap(u, v);
  return edges.count({u, v}) > 0;
}

void Graph::add_edge(int u, int v) {
  require_usage(u >= 0 && u < n() && v >= 0 && v < n(), "edge endpoint out of range");
  if (u == v) {
    require_usage(allow_loops, "loop on vertex " + vertices[u]);
    edges.insert({u, u});
    return;
  }
  if (u > v) std::swap(u, v);
  edges.insert({u, v});
}

void Graph::set_edge_weight(int u, int v, const Rational& w) {
  if (u > v) std::swap(u, v);
  require_usage(edges.count({u, v}) > 0, "weight on a missing edge");
  require_usage(w >= 0, "negative edge weight");
  edge_weights[{u, v}] = w;
}

Rational Graph::edge_weight(int u, int v) const {
  if (u > v) std::swap(u, v);
  auto it = edge_weights.find({u, v});
  return it == edge_weights.end() ? Rational(1) : it->second;
}

Rational Graph::vertex_weight(int v) const {
  auto it = vertex_weights.find(v);
  return it == vertex_weights.end() ? Rational(1) : it->second;
}

Rational Graph::total_edge_weight() const {
  Rational s(0);
  for (const auto& e : edges) s += edge_weight(e.first, e.second);
  return s;
}

Rational Graph::total_vertex_weight() const {
  Rational s(0);
  for (int v = 0; v < n(); ++v) s += vertex_weight(v);
  return s;
}

std::vector<std::vector<int>> Graph::adjacency() const {
  std::vector<std::vector<int>> adj(n());
  for (const auto& [u, v] : edges) {
    if (u == v) continue;
    adj[u].push_back(v);
    adj[v].push_back(u);
  }
  for (auto& nb : adj) std::sort(nb.begin(), nb.end());
  return adj;
}

void Graph::validate() const {
  std::set<std::string> ids;
  for (const auto& v : vertices) {
    require_usage(!v.empty(), "empty vertex id");
    require_usage(ids.insert(v).second, "duplicate vertex id: " + v);
  }
  for (const auto& [u, v] : edges) {
    require_usage(u >= 0 && v >= 0 && u < n() && v < n() && u <= v, "bad edge");
    require_usage(u != v || allow_loops, "unexpected loop");
  }
  for (const auto& [e, w] : edge_weights) {
    require_usage(edges.count(e) > 0, "weight on a missing edge");
    require_usage(w >= 0, "negative edge weight");
  }
}

Graph make_graph(std::vector<std::string> vertices) {
  Graph g;
  g.vertices = std::move(vertices);
  return g;
}

Graph make_graph(int n, const std::string& prefix) {
  Graph g;
  for (int i = 0; i < n; ++i) g.vertices.push_back(prefix + std::to_string(i));
  return g;
}

std::vector<std::vector<int>> components(const Graph& g) {
  auto adj = g.adjacency();
  std::vector<int> comp(g.n(), -1);
  std::vector<std::vector<int>> out;
  for (int s = 0; s < g.n(); ++s) {
    if (comp[s] >= 0) continue;
    int id = static_cast<int>(out.size());
    out.emplace_back();
    std::deque<int> q{s};
    comp[s] = id;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      out[id].push_back(u);
      for (int w : adj[u])
        if (comp[w] < 0) {
          comp[w] = id;
          q.push_back(w);
        }
    }
    std::sort(out[id].begin(), out[id].end());
  }
  return out;
}

Graph induced_subgraph(const Graph& g, const std::vector<int>& keep) {
  std::vector<int> pos(g.n(), -1);
  Graph out;
  out.allow_loops = g.allow_loops;
  for (int v : keep) {
    require_usage(v >= 0 && v < g.n() && pos[v] == -1, "bad induced vertex list");
    pos[v] = out.n();
    out.vertices.push_back(g.vertices[v]);
    auto it = g.vertex_weights.find(v);
    if (it != g.vertex_weights.end()) out.vertex_weights[pos[v]] = it->second;
  }
  for (const auto& [u, v] : g.edges) {
    if (pos[u] < 0 || pos[v] < 0) continue;
    out.add_edge(pos[u], pos[v]);
    auto it = g.edge_weights.find({u, v});
    if (it != g.edge_weights.end())
      out.set_edge_weight(pos[u], pos[v], it->second);
  }
  return out;
}

Graph remove_edges(const Graph& g, const std::set<std::pair<int, int>>& gone) {
  Graph out = g;
  for (auto [u, v] : gone) {
    if (u > v) std::swap(u, v);
    out.edges.erase({u, v});
    out.edge_weights.erase({u, v});
  }
  return out;
}

// ---------------------------------------------------------------------------
// Treewidth: exact subset dynamic program over elimination orderings.
// q(S, v) = number of vertices outside S u {v} reachable from v through S;
// best(S) = min over v in S of max(best(S \ v), q(S \ v, v)).
// ---------------------------------------------------------------------------

namespace {

struct TwDP {
  int n;
  std::vector<uint32_t> adj_mask;
  std::vector<int> best;     // indexed by subset mask
  std::vector<int> choice;   // last vertex eliminated for the optimum

  int q_through(uint32_t inside, int v) const {
    // Vertices outside `inside` u {v} adjacent to the component of v within
    // inside u {v}.
    uint32_t comp = 1u << v;
    uint32_t frontier = comp;
    uint32_t allowed = inside;
    while (frontier) {
      uint32_t next = 0;
      uint32_t f = frontier;
      while (f) {
        int u = __builtin_ctz(f);
        f &= f - 1;
        next |= adj_mask[u];
      }
      uint32_t grow = next & allowed & ~comp;
      comp |= grow;
      frontier = grow;
    }
    uint32_t reach = 0;
    uint32_t c = comp;
    while (c) {
      int u = __builtin_ctz(c);
      c &= c - 1;
      reach |= adj_mask[u];
    }
    reach &= ~(inside | (1u << v));
    return __builtin_popcount(reach);
  }

  void run() {
    best.assign(1u << n, 0);
    choice.assign(1u << n, -1);
    for (uint32_t s = 1; s < (1u << n); ++s) {
      int b = n + 1;
      int pick = -1;
      uint32_t it = s;
      while (it) {
        int v = __builtin_ctz(it);
        it &= it - 1;
        uint32_t rest = s & ~(1u << v);
        int cand = std::max(best[rest], q_through(rest, v));
        if (cand < b) {
          b = cand;
          pick = v;
        }
      }
      best[s] = b;
      choice[s] = pick;
    }
  }
};

std::vector<int> exact_elimination_order(const Graph& g) {
  int n = g.n();
  TwDP dp;
  dp.n = n;
  dp.adj_mask.assign(n, 0);
  for (const auto& [u, v] : g.edges) {
    if (u == v) continue;
    dp.adj_mask[u] |= 1u << v;
    dp.adj_mask[v] |= 1u << u;
  }
  dp.run();
  std::vector<int> order;  // elimination order: first removed first
  uint32_t s = (1u << n) - 1;
  std::vector<int> rev;
  while (s) {
    int v = dp.choice[s];
    rev.push_back(v);
    s &= ~(1u << v);
  }
  // choice[s] is the vertex eliminated LAST among s, so rev is reversed.
  order.assign(rev.rbegin(), rev.rend());
  return order;
}

// Fill-in simulation: returns bags (v + later neighbors in the fill graph)
// and the width, for a given elimination order over a connected graph.
TreeDecomposition decomposition_from_order(const Graph& g, const std::vector<int>& order) {
  int n = g.n();
  std::vector<std::set<int>> nb(n);
  for (const auto& [u, v] : g.edges) {
    if (u == v) continue;
    nb[u].insert(v);
    nb[v].insert(u);
  }
  std::vector<int> when(n);
  for (int i = 0; i < n; ++i) when[order[i]] = i;
  std::vector<std::vector<int>> bags(n);
  for (int i = 0; i < n; ++i) {
    int v = order[i];
    std::vector<int> later;
    for (int u : nb[v])
      if (when[u] > i) later.push_back(u);
    // Fill: later neighbors become a clique.
    for (size_t a = 0; a < later.size(); ++a)
      for (size_t b = a + 1; b < later.size(); ++b) {
        nb[later[a]].insert(later[b]);
        nb[later[b]].insert(later[a]);
      }
    bags[i] = later;
    bags[i].push_back(v);
    std::sort(bags[i].begin(), bags[i].end());
  }
  TreeDecomposition t;
  t.bags = bags;
  for (int i = 0; i < n; ++i) {
    int v = order[i];
    // Parent bag: the earliest-eliminated later neighbor.
    int parent = -1;
    for (int u : bags[i])
      if (u != v && (parent == -1 || when[u] < when[parent])) parent = u;
    if (parent != -1) t.tree_edges.push_back({i, when[parent]});
  }
  return t;
}

std::vector<int> heuristic_order(const Graph& g, TDMethod method) {
  int n = g.n();
  std::vector<std::set<int>> nb(n);
  for (const auto& [u, v] : g.edges) {
    if (u == v) continue;
    nb[u].insert(v);
    nb[v].insert(u);
  }
  std::vector<bool> gone(n, false);
  std::vector<int> order;
  for (int step = 0; step < n; ++step) {
    int best = -1;
    long long best_score = -1;
    for (int v = 0; v < n; ++v) {
      if (gone[v]) continue;
      long long score;
      if (method == TDMethod::MinDegree) {
        score = static_cast<long long>(nb[v].size());
      } else {
        // Min-fill: count missing edges among neighbors.
        score = 0;
        std::vector<int> ns(nb[v].begin(), nb[v].end());
        for (size_t a = 0; a < ns.size(); ++a)
          for (size_t b = a + 1; b < ns.size(); ++b)
            if (!nb[ns[a]].count(ns[b])) ++score;
      }
      if (best == -1 || score < best_score) {
        best = v;
        best_score = score;
      }
    }
    order.push_back(best);
    gone[best] = true;
    std::vector<int> ns(nb[best].begin(), nb[best].end());
    for (size_t a = 0; a < ns.size(); ++a)
      for (size_t b = a + 1; b < ns.size(); ++b) {
        nb[ns[a]].insert(ns[b]);
        nb[ns[b]].insert(ns[a]);
      }
    for (int u : ns) nb[u].erase(best);
    nb[best].clear();
  }
  return order;
}

} // namespace

int TreeDecomposition::width() const {
  int w = 0;
  for (const auto& b : bags) w = std::max(w, static_cast<int>(b.size()) - 1);
  return w;
}

int treewidth_exact_connected(const Graph& g, int cap) {
  require_cap(g.n() <= cap, "exact treewidth cap exceeded: " + std::to_string(g.n()));
  if (g.n() == 0) return 0;
  TwDP dp;
  dp.n = g.n();
  dp.adj_mask.assign(g.n(), 0);
  for (const auto& [u, v] : g.edges) {
    if (u == v) continue;
    dp.adj_mask[u] |= 1u << v;
    dp.adj_mask[v] |= 1u << u;
  }
  dp.run();
  return dp.best[(1u << g.n()) - 1];
}

TreeDecomposition tree_decomposition(const Graph& g, TDMethod method, int exact_cap) {
  if (g.n() == 0) {
    TreeDecomposition t;
    t.bags.push_back({});
    return t;
  }
  // Per-component orders, then a combined decomposition linked into a tree.
  auto comps = components(g);
  TreeDecomposition out;
  int prev_anchor = -1;
  for (const auto& comp : comps) {
    Graph sub = induced_subgraph(g, comp);
    std::vector<int> order;
    if (method == TDMethod::Exact) {
      require_cap(sub.n() <= exact_cap,
                  "exact decomposition cap exceeded: " + std::to_string(sub.n()));
      order = exact_elimination_order(sub);
    } else {
      order = heuristic_order(sub, method);
    }
    TreeDecomposition part = decomposition_from_order(sub, order);
    int base = static_cast<int>(out.bags.size());
    for (auto bag : part.bags) {
      for (int& v : bag) v = comp[v];
      std::sort(bag.begin(), bag.end());
      out.bags.push_back(bag);
    }
    for (auto [a, b] : part.tree_edges) out.tree_edges.push_back({base + a, base + b});
    if (prev_anchor >= 0) out.tree_edges.push_back({prev_anchor, base});
    prev_anchor = base;
  }
  return out;
}

bool td_valid(const Graph& g, const TreeDecomposition& t, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  int nb = static_cast<int>(t.bags.size());
  if (nb == 0) return fail("no bags");
  for (const auto& bag : t.bags)
    for (int v : bag)
      if (v < 0 || v >= g.n()) return fail("bag vertex out of range");
  // Tree shape.
  if (static_cast<int>(t.tree_edges.size()) != nb - 1) return fail("not a tree (edge count)");
  {
    std::vector<std::vector<int>> adj(nb);
    for (auto [a, b] : t.tree_edges) {
      if (a < 0 || b < 0 || a >= nb || b >= nb || a == b) return fail("bad tree edge");
      adj[a].push_back(b);
      adj[b].push_back(a);
    }
    std::vector<bool> seen(nb, false);
    std::deque<int> q{0};
    seen[0] = true;
    int cnt = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      ++cnt;
      for (int w : adj[u])
        if (!seen[w]) {
          seen[w] = true;
          q.push_back(w);
        }
    }
    if (cnt != nb) return fail("not a tree (disconnected)");
  }
  // Coverage.
  std::vector<bool> covered(g.n(), false);
  for (const auto& bag : t.bags)
    for (int v : bag) covered[v] = true;
  for (int v = 0; v < g.n(); ++v)
    if (!covered[v]) return fail("vertex not covered: " + g.vertices[v]);
  for (const auto& [u, v] : g.edges) {
    if (u == v) continue;
    bool ok = false;
    for (const auto& bag : t.bags) {
      if (std::binary_search(bag.begin(), bag.end(), u) &&
          std::binary_search(bag.begin(), bag.end(), v)) {
        ok = true;
        break;
      }
    }
    if (!ok) return fail("edge not covered");
  }
  // Connected bag subtrees per vertex.
  std::vector<std::vector<int>> adj(nb);
  for (auto [a, b] : t.tree_edges) {
    adj[a].push_back(b);
    adj[b].push_back(a);
  }
  for (int v = 0; v < g.n(); ++v) {
    std::vector<int> holding;
    for (int i = 0; i < nb; ++i)
      if (std::binary_search(t.bags[i].begin(), t.bags[i].end(), v)) holding.push_back(i);
    if (holding.empty()) continue;
    std::set<int> hold(holding.begin(), holding.end());
    std::deque<int> q{holding[0]};
    std::set<int> seen{holding[0]};
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int w : adj[u])
        if (hold.count(w) && !seen.count(w)) {
          seen.insert(w);
          q.push_back(w);
        }
    }
    if (seen.size() != hold.size()) return fail("bags of " + g.vertices[v] + " not connected");
  }
  return true;
}

ParamResult graph_parameter(const Graph& g, GraphParam p, int tw_cap, int td_cap) {
  ParamResult res;
  switch (p) {
    case GraphParam::Size:
      res.value = g.n();
      return res;
    case GraphParam::CC: {
      long long best = 0;
      for (const auto& c : components(g)) best = std::max<long long>(best, c.size());
      res.value = best;
      return res;
    }
    case GraphParam::TW: {
      long long best = 0;
      bool exact = true;
      for (const auto& c : components(g)) {
        Graph sub = induced_subgraph(g, c);
        if (sub.n() <= tw_cap) {
          best = std::max<long long>(best, treewidth_exact_connected(sub, tw_cap));
        } else {
          exact = false;
          auto t = decomposition_from_order(sub, heuristic_order(sub, TDMethod::MinFill));
          best = std::max<long long>(best, t.width());
        }
      }
      res.value = best;
      res.exact = exact;
      return res;
    }
    case GraphParam::TD: {
      long long best = 0;
      bool exact = true;
      for (const auto& c : components(g)) {
        Graph sub = induced_subgraph(g, c);
        if (sub.n() <= td_cap) {
          best = std::max<long long>(best, treedepth_exact(sub, td_cap));
        } else {
          exact = false;
          // Upper bound: peel maximum-degree vertices recursively would be
          // costly; a simple bound is the component order.
          best = std::max<long long>(best, sub.n());
        }
      }
      res.value = best;
      res.exact = exact;
      return res;
    }
  }
  return res;
}

std::vector<std::vector<int>> bfs_layers(const Graph& g, int root) {
  require_usage(root >= 0 && root < g.n(), "bfs root out of range");
  auto layers = bfs_layers(g, std::vector<int>{root});
  return layers;
}

std::vector<std::vector<int>> bfs_layers(const Graph& g, const std::vector<int>& roots) {
  auto adj = g.adjacency();
  std::vector<int> dist(g.n(), -1);
  std::deque<int> q;
  for (int r : roots) {
    require_usage(r >= 0 && r < g.n(), "bfs root out of range");
    if (dist[r] == -1) {
      dist[r] = 0;
      q.push_back(r);
    }
  }
  while (!q.empty()) {
    int u = q.front();
    q.pop_front();
    for (int w : adj[u])
      if (dist[w] < 0) {
        dist[w] = dist[u] + 1;
        q.push_back(w);
      }
  }
  int maxd = 0;
  for (int v = 0; v < g.n(); ++v) {
    require_usage(dist[v] >= 0, "graph not covered by bfs roots (disconnected?)");
    maxd = std::max(maxd, dist[v]);
  }
  std::vector<std::vector<int>> layers(maxd + 1);
  for (int v = 0; v < g.n(); ++v) layers[dist[v]].push_back(v);
  return layers;
}

DegeneracyOrientation degeneracy_orientation(const Graph& g) {
  DegeneracyOrientation out;
  int n = g.n();
  std::vector<std::set<int>> nb(n);
  for (const auto& [u, v] : g.edges) {
    if (u == v) continue;
    nb[u].insert(v);
    nb[v].insert(u);
  }
  std::vector<bool> gone(n, false);
  for (int step = 0; step < n; ++step) {
    int best = -1;
    for (int v = 0; v < n; ++v) {
      if (gone[v]) continue;
      if (best == -1 || nb[v].size() < nb[best].size()) best = v;
    }
    out.degeneracy = std::max(out.degeneracy, static_cast<int>(nb[best].size()));
    out.removal_order.push_back(best);
    // Remaining incident edges point at the vertex being removed.
    for (int u : nb[best]) {
      out.arcs.push_back({u, best});
      nb[u].erase(best);
    }
    nb[best].clear();
    gone[best] = true;
  }
  std::sort(out.arcs.begin(), out.arcs.end());
  return out;
}

std::optional<long long> girth(const Graph& g) {
  auto adj = g.adjacency();
  long long best = -1;
  for (int s = 0; s < g.n(); ++s) {
    std::vector<int> dist(g.n(), -1), parent(g.n(), -1);
    std::deque<int> q{s};
    dist[s] = 0;
    while (!q.empty()) {
      int u = q.front();
      q.pop_front();
      for (int w : adj[u]) {
        if (dist[w] < 0) {
          dist[w] = dist[u] + 1;
          parent[w] = u;
          q.push_back(w);
        } else if (w != parent[u] && dist[w] >= 0) {
          long long cyc = dist[u] + dist[w] + 1;
          if (best < 0 || cyc < best) best = cyc;
        }
      }
    }
  }
  if (best < 0) return std::nullopt;
  return best;
}

namespace {

struct TdMemo {
  const std::vector<uint32_t>* adj;
  std::unordered_map<uint32_t, int> memo;

  int solve(uint32_t mask) {
    if (mask == 0) return 0;
    if (__builtin_popcount(mask) == 1) return 1;
    auto it = memo.find(mask);
    if (it != memo.end()) return it->second;
    // Split into components of the induced subgraph first.
    uint32_t rest = mask;
    int result = 0;
    std::vector<uint32_t> comps;
    while (rest) {
      int v = __builtin_ctz(rest);
      uint32_t comp = 1u << v;
      uint32_t frontier = comp;
      while (frontier) {
        uint32_t next = 0;
        uint32_t f = frontier;
        while (f) {
          int u = __builtin_ctz(f);
          f &= f - 1;
          next |= (*adj)[u] & mask;
        }
        uint32_t grow = next & ~comp;
        comp |= grow;
        frontier = grow;
      }
      comps.push_back(comp);
      rest &= ~comp;
    }
    if (comps.size() > 1) {
      for (uint32_t c : comps) result = std::max(result, solve(c));
    } else {
      result = 1 << 30;
      uint32_t it2 = mask;
      while (it2) {
        int v = __builtin_ctz(it2);
        it2 &= it2 - 1;
        result = std::min(result, 1 + solve(mask & ~(1u << v)));
      }
    }
    memo[mask] = result;
    return result;
  }
};

} // namespace

int treedepth_exact(const Graph& g, int cap) {
  int best = 0;
  for (const auto& c : components(g)) {
    require_cap(static_cast<int>(c.size()) <= cap,
                "exact treedepth cap exceeded: " + std::to_string(c.size()));
    Graph sub = induced_subgraph(g, c);
    std::vector<uint32_t> adj(sub.n(), 0);
    for (const auto& [u, v] : sub.edges) {
      if (u == v) continue;
      adj[u] |= 1u << v;
      adj[v] |= 1u << u;
    }
    TdMemo memo;
    memo.adj = &adj;
    best = std::max(best, memo.solve((1u << sub.n()) - 1));
  }
  return best;
}

} // namespace maxhom
