#pragma once

#include <functional>
#include <optional>

#include "maxhom/fragility.hpp"
#include "maxhom/graphs.hpp"
#include "maxhom/overcast.hpp"
#include "maxhom/structures.hpp"

namespace maxhom {

// A bounded-treewidth stand-in for A with overcasts both ways. ptas_value
// verifies both directions at the surrogate factor r(eps) = 1/(1+eps)
// before trusting the witness.
struct PliabilityWitness {
  ValuedStructure B;
  Overcast out;  // A -> r(eps) * B
  Overcast in;   // B -> r(eps) * A
};

struct PtasReport {
  Rational lower;  // certified lower bound on opt(A, C)
  Rational upper;  // certified upper bound on opt(A, C)
  Rational ratio;  // certificate: upper <= ratio * lower
  int level = 0;   // Sherali-Adams level solved (value mode only)
  std::optional<Assignment> witness;  // constructive mode: achieves `lower`
};

// Value mode: verifies the witness, takes the exact treewidth of the
// stand-in, and solves the level tw(B)+1 relaxation (never below the
// signature's arity). The relaxation value bounds the optimum from above
// and r(eps)^2 times it bounds the optimum from below, so the certificate
// ratio is (1+eps)^2, the stand-in for e^{2 eps}.
PtasReport ptas_value(const ValuedStructure& A, const ValuedStructure& C,
                      const Rational& eps, const PliabilityWitness& witness,
                      long long var_cap = 200000, int tw_cap = 12);

// Supplies a tree decomposition for each residual primal graph. Any valid
// decomposition keeps the dynamic program exact; width only buys speed.
using DecompositionProvider = std::function<TreeDecomposition(const Graph&)>;
DecompositionProvider min_fill_provider();

// Constructive mode: for every set in the modulator's support, solves the
// structure minus the set exactly by dynamic programming over the provided
// decomposition, extends the assignment over the removed vertices greedily
// (ascending order, each vertex takes the image maximizing the value of its
// already-complete tuples), and keeps the best total assignment, ties to
// the lexicographically least. With loss = arity * thinness below one, the
// winner is guaranteed at least (1 - loss) times the optimum; the reported
// upper bound is the better of lower/(1 - loss) and the trivial per-symbol
// bound, so it stays finite even when the guarantee degenerates.
PtasReport ptas_constructive(const ValuedStructure& A,
                             const ValuedStructure& C,
                             const FractionalModulator& pi,
                             const DecompositionProvider& provider =
                                 min_fill_provider(),
                             long long state_cap = 10000000);

} // namespace maxhom
