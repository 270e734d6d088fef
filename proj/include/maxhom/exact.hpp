#pragma once

#include <map>

#include "maxhom/graphs.hpp"
#include "maxhom/structures.hpp"

namespace maxhom {

struct OptResult {
  Rational value;
  Assignment witness;  // val(A, B, witness) == value, re-checked on return
};

// Enumerates all |B|^|A| assignments in lexicographic order and keeps the
// first maximizer, so the witness is the lexicographically least one.
OptResult opt_bruteforce(const ValuedStructure& A, const ValuedStructure& B,
                         long long map_cap = 10000000);

// Dynamic program over a tree decomposition of gaifman(A): each positive
// tuple is charged to the unique bag nearest the root that contains its
// support, tables join children through their separators, and the witness
// is rebuilt from stored per-separator argmax choices.
OptResult opt_treedec(const ValuedStructure& A, const ValuedStructure& B,
                      const TreeDecomposition& T, long long state_cap = 10000000);

// Maximum over all extensions of the pinned elements.
OptResult opt_with_forced(const ValuedStructure& A, const ValuedStructure& B,
                          const std::map<int, int>& pins, long long map_cap = 10000000);

// Brute force when the map count fits the cap, otherwise the DP on the best
// available decomposition (exact when components are small, min-fill else).
OptResult opt_auto(const ValuedStructure& A, const ValuedStructure& B);

} // namespace maxhom
