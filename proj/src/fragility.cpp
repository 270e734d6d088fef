#include "maxhom/fragility.hpp"

#include <algorithm>
#include <map>
#include <string>
#include <type_traits>

#include "maxhom/error.hpp"
#include "maxhom/lp.hpp"

namespace maxhom {

namespace {

long long floordiv(long long a, long long b) {
  long long q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

void check_subset(const std::vector<int>& x, int n) {
  int prev = -1;
  for (int v : x) {
    require_usage(v >= 0 && v < n, "modulator subset element out of range");
    require_usage(v > prev, "modulator subset not sorted or not distinct");
    prev = v;
  }
}

void check_edge_subset(const Graph& g, const std::vector<std::pair<int, int>>& f) {
  std::pair<int, int> prev{-1, -1};
  for (const auto& e : f) {
    require_usage(e.first <= e.second && g.has_edge(e.first, e.second),
                  "modulator subset lists a missing edge");
    require_usage(prev < e, "modulator subset not sorted or not distinct");
    prev = e;
  }
}

std::vector<int> complement_of(const std::vector<int>& x, int n) {
  std::vector<int> keep;
  keep.reserve(n - x.size());
  std::size_t at = 0;
  for (int v = 0; v < n; ++v) {
    if (at < x.size() && x[at] == v) {
      ++at;
    } else {
      keep.push_back(v);
    }
  }
  return keep;
}

// Assembles a modulator from an unnormalized subset->probability map, with
// the residual bound recomputed per subset, and verifies it before returning.
template <typename SupportMap>
FractionalModulator finish_modulator(const Graph& g, ModulatorKind kind, GraphParam param,
                                     const SupportMap& mass) {
  constexpr bool vertex_kind = std::is_same_v<typename SupportMap::key_type, std::vector<int>>;
  FractionalModulator pi;
  pi.kind = kind;
  pi.param = param;
  long long bound = 0;
  for (const auto& [subset, prob] : mass) {
    if (prob == 0) continue;
    Graph residual = [&] {
      if constexpr (vertex_kind) {
        return induced_subgraph(g, complement_of(subset, g.n()));
      } else {
        return remove_edges(g, std::set<std::pair<int, int>>(subset.begin(), subset.end()));
      }
    }();
    bound = std::max(bound, graph_parameter(residual, param).value);
    if constexpr (vertex_kind) {
      pi.vertex_support.emplace_back(subset, prob);
    } else {
      pi.edge_support.emplace_back(subset, prob);
    }
  }
  pi.bound = bound;
  pi.thinness = thinness(pi);
  ModulatorReport rep = modulator_verify(g, pi);
  require_verify(rep.ok, "constructed modulator failed verification");
  return pi;
}

} // namespace

Rational thinness(const FractionalModulator& pi) {
  Rational best = 0;
  if (pi.kind == ModulatorKind::Vertex) {
    std::map<int, Rational> marginal;
    for (const auto& [x, p] : pi.vertex_support) {
      for (int v : x) marginal[v] += p;
    }
    for (const auto& [v, m] : marginal) best = std::max(best, m);
  } else {
    std::map<std::pair<int, int>, Rational> marginal;
    for (const auto& [f, p] : pi.edge_support) {
      for (const auto& e : f) marginal[e] += p;
    }
    for (const auto& [e, m] : marginal) best = std::max(best, m);
  }
  return best;
}

ModulatorReport modulator_verify(const Graph& g, const FractionalModulator& pi) {
  const bool vertex = pi.kind == ModulatorKind::Vertex;
  require_usage(vertex ? pi.edge_support.empty() : pi.vertex_support.empty(),
                "modulator carries support of the wrong kind");
  ModulatorReport rep;
  Rational total = 0;
  bool positive = true;
  std::size_t entries = vertex ? pi.vertex_support.size() : pi.edge_support.size();
  for (std::size_t i = 0; i < entries; ++i) {
    const Rational& p = vertex ? pi.vertex_support[i].second : pi.edge_support[i].second;
    if (p <= 0) positive = false;
    total += p;
    if (vertex) {
      check_subset(pi.vertex_support[i].first, g.n());
    } else {
      check_edge_subset(g, pi.edge_support[i].first);
    }
  }
  rep.distribution_ok = positive && total == 1;

  rep.residual_ok = true;
  for (std::size_t i = 0; i < entries; ++i) {
    Graph residual =
        vertex ? induced_subgraph(g, complement_of(pi.vertex_support[i].first, g.n()))
               : remove_edges(g, std::set<std::pair<int, int>>(pi.edge_support[i].first.begin(),
                                                               pi.edge_support[i].first.end()));
    rep.residuals.push_back(graph_parameter(residual, pi.param));
    if (rep.residuals.back().value > pi.bound) rep.residual_ok = false;
  }

  rep.thinness = thinness(pi);
  rep.thinness_ok = rep.thinness == pi.thinness;
  rep.ok = rep.distribution_ok && rep.residual_ok && rep.thinness_ok;
  return rep;
}

FractionalModulator baker_modulator(const Graph& g, int layers, const std::vector<int>& roots,
                                    GraphParam param) {
  require_usage(layers >= 2, "baker shifts need at least two layers");
  require_usage(g.n() >= 1, "baker modulator of an empty graph");
  require_usage(!roots.empty(), "baker modulator needs at least one root");
  std::vector<std::vector<int>> depth = bfs_layers(g, roots);

  std::map<std::vector<int>, Rational> mass;
  Rational share = Rational(1) / layers;
  for (int j = 0; j < layers; ++j) {
    std::vector<int> shift;
    for (std::size_t d = j; d < depth.size(); d += layers) {
      shift.insert(shift.end(), depth[d].begin(), depth[d].end());
    }
    std::sort(shift.begin(), shift.end());
    mass[shift] += share;
  }
  return finish_modulator(g, ModulatorKind::Vertex, param, mass);
}

Graph grid_graph(int d, int side) {
  require_usage(d >= 1 && d <= 3, "grid dimension must be 1, 2 or 3");
  require_usage(side >= 1, "grid side must be positive");
  long long total = 1;
  for (int i = 0; i < d; ++i) total *= side;

  std::vector<std::string> names(total);
  std::vector<int> coord(d, 0);
  for (long long v = 0; v < total; ++v) {
    std::string name;
    for (int i = 0; i < d; ++i) {
      if (i) name += ',';
      name += std::to_string(coord[i]);
    }
    names[v] = name;
    for (int i = d - 1; i >= 0; --i) {
      if (++coord[i] < side) break;
      coord[i] = 0;
    }
  }
  Graph g = make_graph(std::move(names));
  long long stride = 1;
  std::vector<long long> strides(d);
  for (int i = d - 1; i >= 0; --i) {
    strides[i] = stride;
    stride *= side;
  }
  std::fill(coord.begin(), coord.end(), 0);
  for (long long v = 0; v < total; ++v) {
    for (int i = 0; i < d; ++i) {
      if (coord[i] + 1 < side) g.add_edge(static_cast<int>(v), static_cast<int>(v + strides[i]));
    }
    for (int i = d - 1; i >= 0; --i) {
      if (++coord[i] < side) break;
      coord[i] = 0;
    }
  }
  return g;
}

FractionalModulator grid_modulator(int d, int side, int layers, std::vector<int> axes,
                                   GraphParam param) {
  require_usage(layers >= 2, "grid slabs need at least two shifts");
  Graph g = grid_graph(d, side);
  if (axes.empty()) {
    for (int i = 0; i < d; ++i) axes.push_back(i);
  }
  std::sort(axes.begin(), axes.end());
  axes.erase(std::unique(axes.begin(), axes.end()), axes.end());
  require_usage(axes.front() >= 0 && axes.back() < d, "grid axis out of range");

  long long total = g.n();
  std::vector<long long> strides(d);
  long long stride = 1;
  for (int i = d - 1; i >= 0; --i) {
    strides[i] = stride;
    stride *= side;
  }
  std::map<std::vector<int>, Rational> mass;
  Rational share = Rational(1) / layers;
  for (int j = 0; j < layers; ++j) {
    std::vector<int> shift;
    for (long long v = 0; v < total; ++v) {
      for (int i : axes) {
        if ((v / strides[i]) % side % layers == j) {
          shift.push_back(static_cast<int>(v));
          break;
        }
      }
    }
    mass[shift] += share;
  }
  return finish_modulator(g, ModulatorKind::Vertex, param, mass);
}

ThinnessDichotomy thin_distribution(const Graph& g, const std::vector<std::vector<int>>& family,
                                    const Rational& epsilon) {
  require_usage(!family.empty(), "thinness duality over an empty family");
  require_usage(epsilon >= 0, "negative thinness target");
  for (const auto& x : family) check_subset(x, g.n());

  int n = g.n();
  int cols = static_cast<int>(family.size());
  std::vector<std::vector<Rational>> M(n, std::vector<Rational>(cols, Rational(0)));
  std::vector<Rational> b(n, epsilon);
  for (int c = 0; c < cols; ++c) {
    for (int v : family[c]) M[v][c] = 1;
  }
  FarkasOutcome out = check_farkas_variant(M, b, 2);

  ThinnessDichotomy res;
  if (out.x_side) {
    res.thin_exists = true;
    std::map<int, Rational> marginal;
    Rational total = 0;
    for (int c = 0; c < cols; ++c) {
      if (out.x[c] == 0) continue;
      res.distribution.emplace_back(family[c], out.x[c]);
      total += out.x[c];
      for (int v : family[c]) marginal[v] += out.x[c];
    }
    require_verify(total == 1, "thin distribution mass is off");
    for (const auto& [v, m] : marginal) {
      require_verify(m <= epsilon, "thin distribution exceeds the marginal bound");
    }
  } else {
    res.heavy_weights = out.y;
    Rational total = 0;
    for (const Rational& w : out.y) {
      require_verify(w >= 0, "negative dual weight");
      total += w;
    }
    for (const auto& x : family) {
      Rational wx = 0;
      for (int v : x) wx += out.y[v];
      require_verify(wx > epsilon * total, "dual weights fail to make a family member heavy");
    }
  }
  return res;
}

std::optional<std::vector<int>> dual_check(const Graph& g,
                                           const std::vector<std::vector<int>>& family,
                                           const Rational& epsilon,
                                           const std::vector<Rational>& weights) {
  require_usage(static_cast<int>(weights.size()) == g.n(), "one weight per vertex required");
  for (const Rational& w : weights) require_usage(w >= 0, "negative vertex weight");
  Rational total = 0;
  for (const Rational& w : weights) total += w;
  for (const auto& x : family) {
    check_subset(x, g.n());
    Rational wx = 0;
    for (int v : x) wx += weights[v];
    if (wx <= epsilon * total) return x;
  }
  return std::nullopt;
}

FractionalModulator edge_from_vertex(const Graph& g, const FractionalModulator& pi) {
  require_usage(pi.kind == ModulatorKind::Vertex, "expected a vertex modulator");
  require_usage(modulator_verify(g, pi).ok, "input modulator does not verify");

  std::map<std::vector<std::pair<int, int>>, Rational> mass;
  for (const auto& [x, p] : pi.vertex_support) {
    std::vector<std::pair<int, int>> f;
    for (const auto& e : g.edges) {
      if (std::binary_search(x.begin(), x.end(), e.first) ||
          std::binary_search(x.begin(), x.end(), e.second)) {
        f.push_back(e);
      }
    }
    mass[f] += p;
  }
  return finish_modulator(g, ModulatorKind::Edge, pi.param, mass);
}

FractionalModulator vertex_from_edge(const Graph& g, const FractionalModulator& pi) {
  require_usage(pi.kind == ModulatorKind::Edge, "expected an edge modulator");
  require_usage(modulator_verify(g, pi).ok, "input modulator does not verify");

  DegeneracyOrientation orient = degeneracy_orientation(g);
  std::map<std::pair<int, int>, int> head;
  for (const auto& [tail, h] : orient.arcs) {
    head[{std::min(tail, h), std::max(tail, h)}] = h;
  }
  std::map<std::vector<int>, Rational> mass;
  for (const auto& [f, p] : pi.edge_support) {
    std::vector<int> x;
    for (const auto& e : f) x.push_back(head.at(e));
    std::sort(x.begin(), x.end());
    x.erase(std::unique(x.begin(), x.end()), x.end());
    mass[x] += p;
  }
  return finish_modulator(g, ModulatorKind::Vertex, pi.param, mass);
}

PliableBundle fragile_to_pliable(const ValuedStructure& A, const FractionalModulator& pi, int r) {
  require_usage(A.n() >= 1, "empty structure");
  require_usage(pi.kind == ModulatorKind::Vertex, "fragile_to_pliable needs a vertex modulator");
  require_usage(pi.param != GraphParam::Size,
                "parameter must be closed under disjoint union (Size is not)");
  require_usage(r >= A.sig.max_arity() && r >= 0, "r must dominate the arity of the signature");
  Graph G = gaifman(A);
  ModulatorReport rep = modulator_verify(G, pi);
  require_usage(rep.ok, "modulator of gaifman(A) does not verify");
  for (const auto& [x, p] : pi.vertex_support) {
    require_usage(static_cast<int>(x.size()) < A.n(), "a support subset removes the whole domain");
  }

  PliableBundle out;
  out.loss_bound = Rational(r) * rep.thinness;
  out.factor = out.loss_bound >= 1 ? Rational(0) : 1 - out.loss_bound;

  std::vector<ValuedStructure> parts;
  std::vector<std::vector<int>> kept;
  int offset = 0;
  for (const auto& [x, p] : pi.vertex_support) {
    kept.push_back(complement_of(x, A.n()));
    parts.push_back(rescale(induced(A, kept.back()), p));
    out.part_offset.push_back(offset);
    offset += parts.back().n();
  }
  out.B = parts.size() == 1 ? parts[0] : disjoint_union(parts);

  // One map per part: keep elements land on their copies, removed elements on
  // the part's least element.
  std::vector<std::pair<Assignment, Rational>> fwd;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    Assignment gmap(A.n(), out.part_offset[i]);
    for (std::size_t t = 0; t < kept[i].size(); ++t) {
      gmap[kept[i][t]] = out.part_offset[i] + static_cast<int>(t);
    }
    fwd.emplace_back(std::move(gmap), pi.vertex_support[i].second);
  }
  std::sort(fwd.begin(), fwd.end());
  out.omega.support = std::move(fwd);

  Assignment back(out.B.n(), 0);
  for (std::size_t i = 0; i < parts.size(); ++i) {
    for (std::size_t t = 0; t < kept[i].size(); ++t) {
      back[out.part_offset[i] + static_cast<int>(t)] = kept[i][t];
    }
  }
  out.omega_prime.support.emplace_back(std::move(back), Rational(1));

  require_verify(overcast_verify(out.omega, A, out.B, Rational(1)).ok,
                 "forward overcast failed verification");
  out.back_report = overcast_verify(out.omega_prime, out.B, A, out.factor);
  require_verify(out.back_report.ok, "re-embedding overcast failed verification");
  // The union bound is per tuple: survival is the probability that the
  // removed set avoids the tuple, at least 1 - r * thinness even when that
  // quantity is negative and the clamped factor above is zero.
  Rational unclamped = 1 - out.loss_bound;
  for (const TupleSlack& entry : out.back_report.entries) {
    require_verify(entry.achieved >= unclamped * A.value(entry.symbol, entry.x),
                   "per-tuple coverage fell below 1 - r * thinness");
  }
  require_verify(graph_parameter(gaifman(out.B), pi.param).value <= pi.bound,
                 "union of parts exceeds the modulator bound");
  return out;
}

namespace {

// Index i with base^(i+1) < w <= base^i, for 0 < base < 1 and w > 0.
long long bucket_index(const Rational& w, const Rational& base) {
  long long i = 0;
  Rational cur = 1;
  while (cur < w) {
    cur /= base;
    --i;
  }
  while (cur * base >= w) {
    cur *= base;
    ++i;
  }
  return i;
}

} // namespace

BucketResult bucket_edge_weights(const Graph& g, const UnweightedPartitioner& partitioner,
                                 const Rational& epsilon) {
  require_usage(epsilon > 0 && epsilon < 1, "epsilon must lie strictly between 0 and 1");
  require_usage(static_cast<bool>(partitioner), "an unweighted partitioner is required");

  BucketResult res;
  res.total_weight = g.total_edge_weight();
  long long maxdeg = 0;
  {
    std::vector<long long> deg(g.n(), 0);
    for (const auto& [u, v] : g.edges) {
      ++deg[u];
      if (v != u) ++deg[v];
    }
    for (long long d : deg) maxdeg = std::max(maxdeg, d);
  }
  if (g.m() == 0) {
    res.cc_bound = g.n() >= 1 ? 1 : 0;
    return res;
  }

  // Zero-weight edges are free to discard.
  std::map<std::pair<int, int>, Rational> weight;
  for (const auto& e : g.edges) {
    Rational w = g.edge_weight(e.first, e.second);
    if (w == 0) {
      res.removed.insert(e);
    } else {
      weight[e] = w;
    }
  }

  const Rational base = epsilon / (6 * maxdeg);
  const Rational inv = 3 / epsilon;
  const Integer num = numerator(inv), den = denominator(inv);
  const long long L = static_cast<long long>((num + den - 1) / den);

  // Phase one: evict the lightest residue class of buckets mod L.
  std::map<std::pair<int, int>, long long> bucket;
  std::map<long long, Rational> class_weight;
  for (const auto& [e, w] : weight) {
    long long i = bucket_index(w, base);
    bucket[e] = i;
    class_weight[((i % L) + L) % L] += w;
  }
  long long jstar = -1;
  if (static_cast<long long>(class_weight.size()) < L) {
    for (long long j = 0; j < L; ++j) {
      if (!class_weight.count(j)) {
        jstar = j;
        break;
      }
    }
  } else {
    Rational best;
    for (const auto& [j, w] : class_weight) {
      if (jstar < 0 || w < best) {
        jstar = j;
        best = w;
      }
    }
  }
  res.jstar = static_cast<int>(jstar);
  std::set<std::pair<int, int>> remaining;
  for (const auto& [e, i] : bucket) {
    if (((i % L) + L) % L == jstar) {
      res.removed.insert(e);
      res.weight_buckets += weight[e];
    } else {
      remaining.insert(e);
    }
  }
  require_verify(3 * res.weight_buckets <= epsilon * res.total_weight,
                 "evicted bucket class is too heavy");

  // Phase two: disconnect the surviving blocks of L-1 consecutive buckets,
  // heaviest block first, by removing every lighter-block edge on its
  // boundary.
  std::map<std::pair<int, int>, long long> block;
  std::set<long long> block_ids;
  for (const auto& e : remaining) {
    block[e] = floordiv(bucket[e] - jstar - 1, L);
    block_ids.insert(block[e]);
  }
  res.blocks = static_cast<int>(block_ids.size());
  for (long long t : block_ids) {
    std::vector<char> on_boundary(g.n(), 0);
    for (const auto& e : remaining) {
      if (block[e] == t) on_boundary[e.first] = on_boundary[e.second] = 1;
    }
    std::vector<std::pair<int, int>> cut;
    for (const auto& e : remaining) {
      if (block[e] > t && (on_boundary[e.first] || on_boundary[e.second])) cut.push_back(e);
    }
    for (const auto& e : cut) {
      remaining.erase(e);
      res.removed.insert(e);
      res.weight_boundary += weight[e];
    }
  }
  require_verify(3 * res.weight_boundary <= epsilon * res.total_weight,
                 "block boundaries are too heavy");

  // Phase three: every residual component now lives inside one block; hand
  // each block to the unweighted partitioner at the flattened epsilon.
  Graph stripped = remove_edges(g, res.removed);
  std::vector<std::vector<int>> comps = components(stripped);
  std::map<long long, std::vector<int>> block_vertices;
  for (const auto& comp : comps) {
    long long t = 0;
    bool has_edge = false;
    for (const auto& e : remaining) {
      if (std::binary_search(comp.begin(), comp.end(), e.first)) {
        require_verify(!has_edge || block[e] == t, "a residual component spans two blocks");
        t = block[e];
        has_edge = true;
      }
    }
    if (!has_edge) continue;
    auto& verts = block_vertices[t];
    verts.insert(verts.end(), comp.begin(), comp.end());
  }

  Rational alpha = 1;
  for (long long i = 0; i + 1 < L; ++i) alpha *= base;
  const Rational eps_flat = alpha * epsilon / 3;
  res.cc_bound = 1;
  for (auto& [t, verts] : block_vertices) {
    std::sort(verts.begin(), verts.end());
    std::vector<std::string> names;
    names.reserve(verts.size());
    for (int v : verts) names.push_back(stripped.vertices[v]);
    Graph local = make_graph(std::move(names));
    std::map<int, int> to_local;
    for (std::size_t i = 0; i < verts.size(); ++i) to_local[verts[i]] = static_cast<int>(i);
    std::vector<std::pair<int, int>> local_edges;
    for (const auto& e : remaining) {
      if (block[e] == t && to_local.count(e.first)) {
        local.add_edge(to_local[e.first], to_local[e.second]);
      }
    }

    PartitionCut cut = partitioner(local, eps_flat);
    ++res.partitioner_calls;
    std::set<std::pair<int, int>> gone;
    for (auto [u, v] : cut.cut) {
      if (u > v) std::swap(u, v);
      require_usage(local.has_edge(u, v), "partitioner cut an edge outside its graph");
      gone.insert({u, v});
    }
    require_usage(static_cast<long long>(gone.size()) == static_cast<long long>(cut.cut.size()),
                  "partitioner cut lists an edge twice");
    require_usage(Rational(static_cast<long long>(gone.size())) <= eps_flat * local.m(),
                  "partitioner cut too many edges");
    require_usage(graph_parameter(remove_edges(local, gone), GraphParam::CC).value <= cut.cc_bound,
                  "partitioner overstates its component bound");
    res.cc_bound = std::max(res.cc_bound, cut.cc_bound);
    for (const auto& [u, v] : gone) {
      std::pair<int, int> e{verts[u], verts[v]};
      remaining.erase(e);
      res.removed.insert(e);
      res.weight_cuts += weight[e];
    }
  }
  require_verify(3 * res.weight_cuts <= epsilon * res.total_weight,
                 "per-block cuts are too heavy");

  for (const auto& e : res.removed) res.removed_weight += g.edge_weight(e.first, e.second);
  require_verify(res.removed_weight <= epsilon * res.total_weight,
                 "total removed weight exceeds epsilon");
  require_verify(graph_parameter(remove_edges(g, res.removed), GraphParam::CC).value <= res.cc_bound,
                 "residual component order exceeds the certified bound");
  return res;
}

ValuedStructure edge_labeled_structure(const Graph& g) {
  require_usage(!g.allow_loops, "edge labeling requires a loopless graph");
  Signature sig;
  for (const auto& [u, v] : g.edges) {
    sig.symbols.push_back({"e" + std::to_string(u) + "_" + std::to_string(v), 2});
  }
  ValuedStructure A = make_structure(sig, g.vertices);
  int f = 0;
  for (const auto& [u, v] : g.edges) {
    A.set_value(f, {u, v}, 1);
    A.set_value(f, {v, u}, 1);
    ++f;
  }
  return A;
}

Graph edge_labeled_graph(const ValuedStructure& A) {
  Graph g = make_graph(A.domain);
  for (int f = 0; f < static_cast<int>(A.sig.symbols.size()); ++f) {
    require_usage(A.sig.symbols[f].arity == 2, "edge labels must be binary symbols");
    require_usage(A.values[f].size() == 2, "an edge label must value exactly one edge");
    const Tuple& t = A.values[f].begin()->first;
    require_usage(t[0] != t[1], "an edge label values a loop");
    int u = std::min(t[0], t[1]), v = std::max(t[0], t[1]);
    require_usage(A.value(f, {u, v}) == 1 && A.value(f, {v, u}) == 1,
                  "edge labels must value both orientations at one");
    require_usage(!g.has_edge(u, v), "two labels value the same edge");
    g.add_edge(u, v);
  }
  return g;
}

FractionalModulator extract_edge_modulator(const ValuedStructure& A, const ValuedStructure& B,
                                           const Overcast& omega, const Overcast& omega_back,
                                           const Rational& rho, const Rational& rho_back,
                                           GraphParam param) {
  require_usage(param != GraphParam::Size, "Size is not monotone under the extracted embedding");
  require_usage(rho >= 0 && rho <= 1 && rho_back >= 0 && rho_back <= 1,
                "overcast factors must lie in [0, 1]");
  Graph G = edge_labeled_graph(A);
  require_usage(B.n() >= 1, "empty target structure");
  require_usage(overcast_verify(omega, A, B, rho).ok, "omega does not verify at factor rho");
  require_usage(overcast_verify(omega_back, B, A, rho_back).ok,
                "omega_back does not verify at factor rho_back");

  // Symbols need not come in sorted edge order; recover each one's edge.
  std::vector<std::pair<int, int>> edge_of_symbol(A.sig.symbols.size());
  for (std::size_t f = 0; f < A.sig.symbols.size(); ++f) {
    const Tuple& t = A.values[f].begin()->first;
    edge_of_symbol[f] = {std::min(t[0], t[1]), std::max(t[0], t[1])};
  }
  Graph GB = gaifman(B);
  std::map<std::vector<std::pair<int, int>>, Rational> mass;
  for (const auto& [gmap, p] : omega.support) {
    for (const auto& [gback, pb] : omega_back.support) {
      std::vector<std::pair<int, int>> f;
      std::vector<std::pair<int, int>> survivors;
      for (std::size_t sym = 0; sym < edge_of_symbol.size(); ++sym) {
        auto [u, v] = edge_of_symbol[sym];
        int bu = gmap[u], bv = gmap[v];
        bool round_trip = std::minmax(gback[bu], gback[bv]) == std::minmax(u, v);
        bool present = B.value(static_cast<int>(sym), {bu, bv}) != 0 ||
                       B.value(static_cast<int>(sym), {bv, bu}) != 0;
        if (round_trip && present) {
          survivors.emplace_back(u, v);
        } else {
          f.emplace_back(u, v);
        }
      }
      std::sort(f.begin(), f.end());
      // The round trip being the identity on the survivors makes gmap an
      // embedding of them into gaifman(B); check it explicitly.
      std::map<int, int> image;
      std::set<std::pair<int, int>> image_edges;
      for (const auto& [u, v] : survivors) {
        for (int x : {u, v}) {
          auto [it, fresh] = image.emplace(gmap[x], x);
          require_verify(fresh || it->second == x, "extraction embedding is not injective");
        }
        std::pair<int, int> be{std::min(gmap[u], gmap[v]), std::max(gmap[u], gmap[v])};
        require_verify(be.first != be.second && GB.has_edge(be.first, be.second),
                       "a surviving edge leaves gaifman(B)");
        require_verify(image_edges.insert(be).second, "two surviving edges share an image");
      }
      mass[f] += p * pb;
    }
  }

  FractionalModulator pi = finish_modulator(G, ModulatorKind::Edge, param, mass);
  long long k_target = graph_parameter(GB, param).value;
  require_verify(pi.bound <= k_target, "a residual exceeds the parameter of gaifman(B)");

  std::map<std::pair<int, int>, Rational> marginal;
  for (const auto& [f, p] : pi.edge_support) {
    for (const auto& e : f) marginal[e] += p;
  }
  for (const auto& [e, m] : marginal) {
    require_verify(m <= 1 - rho * rho_back, "per-edge marginal exceeds 1 - rho * rho_back");
  }
  return pi;
}

} // namespace maxhom
