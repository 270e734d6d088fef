#pragma once

#include <optional>
#include <utility>
#include <variant>
#include <vector>

#include "maxhom/structures.hpp"

namespace maxhom {

// A distribution over maps A -> B, kept canonical: support sorted
// lexicographically by map, duplicates merged, zero-probability entries
// dropped. It is an overcast from A to B when for every positive tuple
// (f, x) of B the expected pulled-back mass clears the target:
//   E_{g ~ omega} f^A(g^{-1}(x)) >= f^B(x).
struct Overcast {
  std::vector<std::pair<Assignment, Rational>> support;
};

// One audit line per positive tuple of the covered structure.
struct TupleSlack {
  int symbol = 0;
  Tuple x;            // tuple over the covered structure's domain
  Rational required;  // factor * f^B(x)
  Rational achieved;  // E_{g ~ omega} f^A(g^{-1}(x))
};

struct SlackReport {
  bool ok = false;               // distribution_ok and every slack >= 0
  bool distribution_ok = false;  // probabilities positive and summing to one
  Rational min_slack;            // least achieved - required (0 when no rows)
  std::vector<TupleSlack> entries;  // symbol order, then lexicographic tuples
};

// Exact coverage audit of omega as a candidate overcast from A to
// factor * B. Structural defects in the support (wrong domain size, image
// out of range) are usage errors; everything else lands in the report.
SlackReport overcast_verify(const Overcast& omega, const ValuedStructure& A,
                            const ValuedStructure& B,
                            const Rational& factor = Rational(1));

// Refutation witness: a structure C on B's domain against which B strictly
// beats A, so no overcast from A to B can exist.
struct OvercastCertificate {
  ValuedStructure C;
  Rational opt_A_C;
  Rational opt_B_C;  // opt_A_C < opt_B_C, both computed exactly
};

// Decides whether an overcast from A to B exists, by linear programming
// over all maps g in B^A (at most map_cap of them). Exactly one alternative
// is returned and it is verified before being handed back: an Overcast that
// passes overcast_verify, or a certificate with a checked strict gap.
std::variant<Overcast, OvercastCertificate> overcast_find(
    const ValuedStructure& A, const ValuedStructure& B,
    long long map_cap = 100000);

// Distribution of g2 o g1 with g1 ~ w1 and g2 ~ w2 independently,
// duplicates merged. When w1 covers r1 * B from A and w2 covers r2 * C from
// B, the composite covers r1 * r2 * C from A. The support product is capped
// at pair_cap entries.
Overcast compose(const Overcast& w1, const Overcast& w2,
                 long long pair_cap = 100000);

// Two-sided distance bound at quality epsilon, witnessed by overcasts in
// both directions against the rational factor r(eps) = 1/(1+eps), a safe
// stand-in for e^{-eps} (r(eps) <= e^{-eps}, so acceptance is never
// optimistic).
struct OptDistanceBound {
  Rational epsilon;
  Overcast forward;   // covers r(eps) * B from A
  Overcast backward;  // covers r(eps) * A from B
};

// Tries the candidate epsilons in ascending order and returns the least one
// accepted in both directions (acceptance is monotone in epsilon), or
// nullopt when every candidate fails. Candidates must be nonnegative.
std::optional<OptDistanceBound> opt_distance_bound(
    const ValuedStructure& A, const ValuedStructure& B,
    std::vector<Rational> epsilons, long long map_cap = 100000);

// Mixture overcast realizing the edit-distance coverage bound.
struct EditOvercast {
  Overcast omega;       // covers (1 - delta) * B from A, verified
  Rational edit_value;  // normalized L1 distance realized by phi
  Rational c_sigma;     // max over symbols of arity^arity
  Rational delta;       // c_sigma*edit / (1 + c_sigma*edit)
};

// Builds the mixture: phi with weight 1 - delta, plus, for every positive
// tuple x of B, collapse maps that send each element of A independently and
// uniformly onto the entries of x, weighted by the tuple's share of the
// edit value. Requires clean structures over equal-size domains and a
// bijection phi with a finite edit value; the support is capped at
// support_cap distinct maps.
EditOvercast edit_overcast(const ValuedStructure& A, const ValuedStructure& B,
                           const Assignment& phi,
                           long long support_cap = 100000);

} // namespace maxhom
