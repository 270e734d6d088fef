#pragma once

#include <functional>
#include <optional>
#include <set>
#include <utility>
#include <vector>

#include "maxhom/graphs.hpp"
#include "maxhom/overcast.hpp"
#include "maxhom/rational.hpp"
#include "maxhom/structures.hpp"

namespace maxhom {

enum class ModulatorKind { Vertex, Edge };

// A distribution over vertex sets (or edge sets) whose removal brings a graph
// parameter below `bound`. Exactly one of the two support tables is used,
// selected by `kind`; subsets are sorted and support entries are distinct,
// listed in ascending subset order. `thinness` caches the largest removal
// probability of any single vertex (edge); modulator_verify recomputes it.
struct FractionalModulator {
  ModulatorKind kind = ModulatorKind::Vertex;
  GraphParam param = GraphParam::TW;
  long long bound = 0;
  std::vector<std::pair<std::vector<int>, Rational>> vertex_support;
  std::vector<std::pair<std::vector<std::pair<int, int>>, Rational>> edge_support;
  Rational thinness;
};

// Largest per-element removal probability, recomputed from the support.
Rational thinness(const FractionalModulator& pi);

struct ModulatorReport {
  bool ok = false;               // all three checks below
  bool distribution_ok = false;  // positive probabilities summing to one
  bool residual_ok = false;      // param(g minus each subset) <= bound
  bool thinness_ok = false;      // stored thinness equals the recomputed one
  Rational thinness;             // recomputed value
  std::vector<ParamResult> residuals;  // per support entry, in order
};

// Checks a modulator against the graph it was built for. Residual parameter
// values are upper bounds certified per subset (heuristic beyond the exact
// caps, still valid as certificates).
ModulatorReport modulator_verify(const Graph& g, const FractionalModulator& pi);

// Layered removal: BFS layers from the given roots (one per component), shift
// j deletes every layer with depth = j mod `layers`. Each vertex lies in
// exactly one shift, so the thinness is exactly 1/layers. Residual parameter
// bounds are certified a posteriori; equal shifts (possible when the layering
// is shallow) are merged. Requires layers >= 2.
FractionalModulator baker_modulator(const Graph& g, int layers, const std::vector<int>& roots,
                                    GraphParam param = GraphParam::TW);

// Axis-aligned grid of dimension d in {1,2,3} with `side` vertices per axis;
// vertices are named by comma-separated coordinates and indexed row-major
// (first coordinate most significant).
Graph grid_graph(int d, int side);

// Slab removal on grid_graph(d, side): shift j deletes every vertex with some
// participating coordinate = j mod `layers`. With a axes participating the
// thinness is at most a/layers, and the residual splits into boxes of side
// < layers. `axes` selects the participating coordinates (empty = all).
FractionalModulator grid_modulator(int d, int side, int layers, std::vector<int> axes = {},
                                   GraphParam param = GraphParam::TW);

// One side of the thinness duality always holds: either a distribution over
// the family with all element marginals <= epsilon, or weights under which
// every family member is heavy, w(X) > epsilon * w(V).
struct ThinnessDichotomy {
  bool thin_exists = false;
  std::vector<std::pair<std::vector<int>, Rational>> distribution;  // when thin_exists
  std::vector<Rational> heavy_weights;                              // otherwise
};
ThinnessDichotomy thin_distribution(const Graph& g, const std::vector<std::vector<int>>& family,
                                    const Rational& epsilon);

// Scans an explicit family for a member with w(X) <= epsilon * w(V); returns
// the first such subset (family order) or nullopt. Weights are per vertex.
std::optional<std::vector<int>> dual_check(const Graph& g,
                                           const std::vector<std::vector<int>>& family,
                                           const Rational& epsilon,
                                           const std::vector<Rational>& weights);

// Vertex modulator to edge modulator: each subset X becomes the set of edges
// incident to X. Per-edge marginals are at most twice the vertex thinness;
// residual bounds are recertified on g.
FractionalModulator edge_from_vertex(const Graph& g, const FractionalModulator& pi);

// Edge modulator to vertex modulator: orient g with in-degrees bounded by its
// degeneracy D, then map each edge set F to the heads of its arcs. Thinness
// grows by a factor of at most D; residuals only shrink (the removed vertices
// absorb every removed edge).
FractionalModulator vertex_from_edge(const Graph& g, const FractionalModulator& pi);

// Output of fragile_to_pliable. B is the disjoint union, over the support of
// the modulator, of A minus X rescaled by the probability of X (a single-entry
// support yields the part itself, untagged). omega maps A onto each part
// identically with that part's probability, sending removed vertices to the
// part's least element; omega_prime is the deterministic re-embedding of every
// part back onto A. factor = max(0, 1 - r * thinness) is the certified
// coverage factor of omega_prime, and back_report holds its per-tuple slack
// at that factor (survival of a tuple is exactly the probability that X
// avoids it).
struct PliableBundle {
  ValuedStructure B;
  Overcast omega;        // A -> B, verified at factor 1
  Overcast omega_prime;  // B -> factor * A
  Rational factor;
  Rational loss_bound;            // r * thinness, may exceed 1
  std::vector<int> part_offset;   // first B-domain index of each part
  SlackReport back_report;        // overcast_verify(omega_prime, B, A, factor)
};

// The fragile-to-pliable construction for a verified vertex modulator of
// gaifman(A). r must dominate the signature's arity; every subset must leave
// at least one element. The parameter must be closed under disjoint union
// (Size is rejected). Every A-tuple's coverage under omega_prime is asserted
// to be at least (1 - r * thinness) times its value, exactly.
PliableBundle fragile_to_pliable(const ValuedStructure& A, const FractionalModulator& pi, int r);

// An unweighted partitioner cuts few edges to bound component order: given a
// graph and epsilon it returns cut edges of the graph, at most an epsilon
// fraction of them, and claims cc(graph - cut) <= cc_bound. The claim is
// checked on every call.
struct PartitionCut {
  std::vector<std::pair<int, int>> cut;
  long long cc_bound = 0;
};
using UnweightedPartitioner = std::function<PartitionCut(const Graph&, const Rational&)>;

struct BucketResult {
  std::set<std::pair<int, int>> removed;  // F, with w(F) <= epsilon * w(E)
  Rational removed_weight;
  Rational total_weight;
  long long cc_bound = 0;       // certified cc(g - F), via the partitioner claims
  int jstar = 0;                // index of the evicted bucket class
  int blocks = 0;               // nonempty weight blocks after phase one
  int partitioner_calls = 0;
  Rational weight_buckets;      // phase one: every L-th bucket
  Rational weight_boundary;     // phase two: block boundaries
  Rational weight_cuts;         // phase three: per-block unweighted cuts
};

// Reduces weighted edge deletion to unweighted: edges are bucketed by weight
// in powers of epsilon/(6 * maxdeg), every L-th bucket class is evicted
// (L = ceil(3/epsilon)), surviving blocks are disconnected from each other by
// removing their downward boundaries, and the partitioner handles each block
// at epsilon' = (epsilon/(6*maxdeg))^(L-1) * epsilon/3. Each phase costs at
// most epsilon/3 of the total weight; the final bound is verified exactly.
// Zero-weight edges are removed for free. Requires 0 < epsilon < 1.
BucketResult bucket_edge_weights(const Graph& g, const UnweightedPartitioner& partitioner,
                                 const Rational& epsilon);

// A structure carrying one distinct binary symbol per edge of g, valued 1 on
// both orientations of its edge and nowhere else; symbols are named
// "e<u>_<v>" in edge order.
ValuedStructure edge_labeled_structure(const Graph& g);

// Reads the graph back from an edge-labeled structure (the exact format
// edge_labeled_structure produces); anything else is a usage error.
Graph edge_labeled_graph(const ValuedStructure& A);

// Modulator extraction from a round trip of overcasts. A must be edge-labeled
// for its graph G; omega must verify against B at factor rho and omega_back
// against rho_back * A. Each support pair (g, g') removes the edges it fails
// to reproduce: F = { e : g'(g(e)) != e or f_e^B(g(e)) = 0 }. The result is
// an edge modulator of G whose per-edge marginals are at most
// 1 - rho * rho_back (verified exactly), and for every pair, G - F embeds
// into gaifman(B) via g, so the residual parameter is at most that of
// gaifman(B). Size is not a valid parameter here (isolated vertices remain).
FractionalModulator extract_edge_modulator(const ValuedStructure& A, const ValuedStructure& B,
                                           const Overcast& omega, const Overcast& omega_back,
                                           const Rational& rho, const Rational& rho_back,
                                           GraphParam param = GraphParam::TW);

} // namespace maxhom
