#pragma once

#include <string>
#include <utility>
#include <vector>

#include "maxhom/overcast.hpp"
#include "maxhom/structures.hpp"

namespace maxhom {

// Everything in this header works on weighted graphs: structures with a
// single binary symbol whose table is symmetric (w(u,v) = w(v,u)). Loops
// are tolerated where noted; quotient_overcast insists on loopless input.

// A partition of {0, ..., n-1}. Parts must be nonempty and disjoint and
// together cover the whole range; member order inside a part is free.
struct Partition {
  std::vector<std::vector<int>> parts;
  int k() const { return static_cast<int>(parts.size()); }
};

// Usage error unless P partitions {0, ..., n-1} into nonempty parts.
void validate_partition(const Partition& P, int n);

// Every part size lies in {floor(n/k), ceil(n/k)}.
bool is_balanced(const Partition& P, int n);

// Weighted quotient on the parts: w(i,j) = sum of w_G(u,v) over u in V_i
// and v in V_j, the diagonal included, so the quotient generally carries
// loops. Total weight is preserved: ||G/P||_1 = ||G||_1.
ValuedStructure quotient(const ValuedStructure& G, const Partition& P);

// Worst subset deviation between two disjoint vertex sets:
//   defect = max over W1 <= V1, W2 <= V2 of
//            |w(W1,W2) - density |W1| |W2|| / (|V1| |V2|),
// where density = w(V1,V2) / (|V1| |V2|). The sides are exactly
// defect-homogeneous; no smaller parameter works for them.
struct HomogeneityReport {
  Rational density;
  Rational defect;
  bool exact = true;        // exhaustive maximum vs sampled lower bound
  long long evaluated = 0;  // subsets scored on the enumerated side
};

// Exact mode enumerates every subset of the smaller side (capped at 12
// elements) and maximizes over the other side in closed form, which covers
// all subset pairs. Sampled mode scores n_samples random subsets instead
// and reports a lower bound flagged exact = false.
HomogeneityReport homogeneity_defect(const ValuedStructure& G,
                                     const std::vector<int>& V1,
                                     const std::vector<int>& V2,
                                     bool exact = true, int n_samples = 0,
                                     unsigned long long seed = 0);

// Max exact pairwise defect over all part pairs i < j (zero when k = 1).
Rational partition_defect(const ValuedStructure& G, const Partition& P);

// The canonical dense pair: K_n against lambda K_k with lambda chosen so
// both sides have equal total weight, covered in both directions by
// uniformly random functions.
struct CliqueOvercast {
  Rational lambda;        // C(n,2) / C(k,2)
  ValuedStructure big;    // K_n with unit edge weights
  ValuedStructure small;  // lambda * K_k
  Overcast out;           // big -> out_factor * small
  Overcast in;            // small -> in_factor * big
  Rational out_factor;    // 1 - 1/k
  Rational in_factor;     // 1 - 1/n
};

// Stores the full random-function distributions explicitly (k^n maps one
// way, n^k the other; both capped at support_cap) and verifies that every
// tuple is covered with exactly zero slack at the stated factors.
CliqueOvercast clique_overcast(int n, int k, long long support_cap = 100000);

// Weighted copies of a pattern F on the parts, counted exhaustively and
// compared with the homogeneity prediction. A P-map picks one vertex per
// part; its weight is the product of w over the F pairs.
struct CountingReport {
  Rational sum;        // sum over P-maps g of prod_{ij in F} w(g(i), g(j))
  Rational predicted;  // prod_i |V_i| * prod_{ij in F} d_ij
  Rational epsilon;    // max exact pairwise defect over all part pairs
  Rational halfwidth;  // prod_i |V_i| * epsilon * |F|
  bool contained = false;  // |sum - predicted| <= halfwidth
  long long maps = 0;      // prod_i |V_i|, capped
};

// F lists part pairs i < j (no duplicates). Enumerating the prod |V_i| maps
// is capped at map_cap. Containment is a theorem for the measured epsilon,
// so a violated window throws VerificationFailure.
CountingReport counting_check(const ValuedStructure& G, const Partition& P,
                              const std::vector<std::pair<int, int>>& F,
                              long long map_cap = 1000000);

// Pinned variant: fixing g(a) = x_a and g(b) = x_b, the remaining map sum
//   sum_{g pinned} prod_{ij in F} w(g(i), g(j))
// should land in the window
//   (prod_{i != a,b} |V_i|) *
//   (w(x_a,x_b) * prod_{ij in F-ab} d_ij  +-  sqrt_eps |F|)
// for all but few pins.
struct ExtensionReport {
  Rational epsilon;   // max exact pairwise defect over all part pairs
  Rational sqrt_eps;  // least rational r with r^2 >= epsilon, den <= 10^6
  long long exceptions = 0;  // pins whose sum escapes the window
  long long pairs = 0;       // |V_a| * |V_b| pins tested
  Rational allowed;          // 2 k sqrt_eps |V_a| |V_b|
  bool ok = false;           // exceptions <= allowed
};

// ab must belong to F. Every pin is tested; the exception count must clear
// the stated bound or the check throws VerificationFailure.
ExtensionReport extension_check(const ValuedStructure& G, const Partition& P,
                                const std::vector<std::pair<int, int>>& F,
                                std::pair<int, int> ab,
                                long long map_cap = 1000000);

// Quotient approximation pipeline for a clean weighted graph G: fold onto
// the parts forward, and backward a distribution over P-maps g weighted
// proportionally to hom_g(F, G), aimed at the pruned subgraph gprime.
struct QuotientOvercast {
  ValuedStructure quotient_graph;  // G/P
  Overcast out;                    // G -> G/P at factor 1, always verified
  bool accepted = false;
  std::string diagnosis;  // empty when accepted, otherwise why not

  // G with intra-part edges, pairs outside F, edges lighter than the
  // epsilon^(1/8) upper bound, and pinned-window failures removed.
  ValuedStructure gprime;
  Overcast in;      // G/P -> factor * gprime, audited in `slack`
  Rational factor;  // 1 / (1 + eps0/2), the stand-in for e^{-eps0/2}
  Rational epsilon; // measured partition defect
  Rational edit;    // d_edit(G, gprime) when edit_finite
  bool edit_finite = false;
  Rational density;                 // c = ||G||_1 / (2 n^2)
  bool density_hypothesis = false;  // 1/k <= (c/10) eps0/(1+eps0)
  std::vector<std::pair<int, int>> kept_pairs;  // F: i < j with d_ij >= 1/k
  SlackReport slack;  // audit of `in` against factor * gprime
};

// Acceptance demands both that the backward audit passes at the factor and
// that the pruning stays within edit distance eps0/2 of G. The worst-case
// density hypothesis is evaluated and reported but never trusted in either
// direction: instances that violate it may still verify, and the check
// never certifies anything the audit did not confirm. eps0 must lie in
// (0,1); G must be loopless.
QuotientOvercast quotient_overcast(const ValuedStructure& G,
                                   const Partition& P, const Rational& eps0,
                                   long long map_cap = 1000000,
                                   long long support_cap = 100000);

// Heuristic search for a balanced k-partition with small max pairwise
// defect. Scores a deterministic chunk split plus seeded shuffles, then
// spends the remaining budget on first-improvement vertex swaps.
struct RegularitySearch {
  Partition best;
  Rational defect;    // exact max pairwise defect of `best`
  long long evaluated = 0;  // partitions scored, at most the budget
};

RegularitySearch regularity_search(const ValuedStructure& G, int k,
                                   long long budget,
                                   unsigned long long seed = 0);

} // namespace maxhom
