#pragma once

#include <cstdint>
#include <vector>

#include "maxhom/graphs.hpp"
#include "maxhom/structures.hpp"

namespace maxhom {

// An undirected graph as a structure over one binary symbol: every edge
// becomes both ordered tuples (a loop just one), weights carried over.
ValuedStructure structure_of_graph(const Graph& g);

// Deterministic families. Elements are named by their index; random kinds
// draw raw mt19937_64 values with modulo so a seed pins the instance.
ValuedStructure gen_grid(int d, int side);
ValuedStructure gen_clique(int n);
ValuedStructure gen_path(int n);
ValuedStructure gen_gnp(int n, const Rational& p, std::uint64_t seed);
ValuedStructure gen_bipartite(int a, int b, const Rational& density,
                              std::uint64_t seed);
// One ordered tuple per pair, coin-flipped orientation.
ValuedStructure gen_tournament(int n, std::uint64_t seed);
// Glues a fresh triangle onto every edge of the base, so each original edge
// lies in exactly one of the new triangles. The base must be a loopless
// undirected graph structure.
ValuedStructure gen_triangle_glued(const ValuedStructure& base);

struct GadgetPair {
  ValuedStructure pattern;  // seeded orientation of the clique on the colors
  ValuedStructure target;   // arcs of g whose color pair follows the pattern
};

// colors: one entry per vertex, values 0..k-1 with every color used and
// adjacent vertices distinct. The target keeps one arc per edge of g, the
// orientation dictated by the pattern; a rainbow clique in g then realizes
// every pattern arc, so opt(pattern, target) = k(k-1)/2.
GadgetPair hardness_gadget(const Graph& g, const std::vector<int>& colors,
                           std::uint64_t seed);

struct ProbeReport {
  Rational id_value;       // value of the identity self-map
  Rational best_value;     // best self-map whose image obeys the bound
  Rational loss;           // 1 - best/id (zero when the identity scores zero)
  bool separated = false;  // loss > eps
  Assignment best_map;     // lexicographically least maximizer
  long long maps = 0;      // qualifying self-maps enumerated
};

// Enumerates every self-map g of A whose image induces connected components
// of at most k elements and reports how much value the best one loses
// against the identity. The identity itself only competes when A's own
// components are that small.
ProbeReport non_pliability_probe(const ValuedStructure& A, const Rational& eps,
                                 int k, long long map_cap = 1000000);

} // namespace maxhom
