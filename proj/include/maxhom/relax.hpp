#pragma once

#include <utility>
#include <vector>

#include "maxhom/lp.hpp"
#include "maxhom/overcast.hpp"
#include "maxhom/structures.hpp"

namespace maxhom {

// The level-k relaxation over local distributions: one variable lambda(X, s)
// for every nonempty X subseteq A with |X| <= k and every s: X -> B. The
// empty set would add nothing (its rows are implied), so it is omitted.
//
// Rows come in a fixed order: one normalization row per set (sets in
// colexicographic order), then the marginalization rows linking each set X
// to each one-element extension X + y (X colex, y ascending, s in
// lexicographic target order). Marginalization over covering pairs chains up
// to every containment X subseteq Y, so the feasible region is the full one.
struct SAInstance {
  ValuedStructure A, B;
  int k = 0;
  // Nonempty subsets in colexicographic order, each sorted ascending.
  std::vector<std::vector<int>> sets;
  std::vector<int> base;  // first variable of each set's block
  int num_vars = 0;
  LinearProgram lp;

  int set_index(const std::vector<int>& X) const;  // -1 when absent
  // s[i] is the image of sets[si][i]; maps rank in lexicographic target
  // order with the rightmost position fastest.
  int var_of(int si, const Assignment& s) const;
};

SAInstance build_sa_instance(const ValuedStructure& A, const ValuedStructure& B,
                             int k, long long var_cap = 200000);

// Just the linear program of the instance.
LinearProgram build_sa(const ValuedStructure& A, const ValuedStructure& B,
                       int k, long long var_cap = 200000);

// Optimal value of the level-k relaxation. Shortcuts are taken when they
// provably match the LP value: level >= |A| collapses the program onto a
// distribution over total maps, and a per-tuple upper bound that the exact
// optimum already attains squeezes the relaxation from both sides. Otherwise
// the program is solved outright.
Rational opt_sa(const ValuedStructure& A, const ValuedStructure& B, int k,
                long long var_cap = 200000);

struct SAExactnessReport {
  int tw = 0;            // exact treewidth of the primal graph of A
  int k_guaranteed = 0;  // max(tw + 1, max arity): provably exact level
  int least_k = 0;       // least level whose value already equals opt
  Rational opt_value;
  std::vector<std::pair<int, Rational>> levels;  // (level, value), ascending
};

// Confirms exactness at level tw(A)+1 and reports the least exact level,
// with the per-level values along the way.
SAExactnessReport sa_exactness_check(const ValuedStructure& A,
                                     const ValuedStructure& B,
                                     long long var_cap = 200000);

// Checks opt_sa(A,C,k) >= opt_sa(B,C,k) on every sampled C. The supplied
// omega must verify as an overcast from A to B (usage error otherwise);
// given a genuine overcast the comparison can only fail on a library bug.
bool sa_dominance_check(const ValuedStructure& A, const ValuedStructure& B,
                        const Overcast& omega, int k,
                        const std::vector<ValuedStructure>& C_samples,
                        long long var_cap = 200000);

} // namespace maxhom
