#pragma once

#include <string>
#include <vector>

#include "maxhom/overcast.hpp"
#include "maxhom/rational.hpp"
#include "maxhom/structures.hpp"

namespace maxhom {

// A sequence of nonnegative rational vectors of a common dimension.
struct VectorSequence {
  int dimension = 0;
  std::vector<std::vector<Rational>> vectors;
};

struct RoundedVectors {
  VectorSequence rounded;  // entrywise <= the input
  long long classes = 0;   // realized distinct vectors up to rescaling
  Integer class_bound;     // recursive guarantee for (dimension, eps)
};

// Guaranteed class count for rounding at this dimension and quality: 2 for
// dimension one, else (2 + A)^(d-1) + bound(d-1, eps/3) where A is the
// number of steps the geometric grid of base 1/(1 - eps/3) fits below
// 3d/eps^2. The grid base is chosen rational but at least e^(eps/3), so
// each rounding step loses less than eps/3 of a coordinate while the grid
// stays no finer than the classical one.
Integer rounding_class_bound(int d, const Rational& eps);

// Rounds the sequence so that few distinct vectors remain up to rescaling,
// losing at most eps of every coordinate's total mass: for each coordinate
// i, sum_j |v_j[i] - w_j[i]| <= eps * sum_j v_j[i] (checked exactly).
// Output vectors never exceed the input entrywise. The realized class
// count is checked against rounding_class_bound.
RoundedVectors round_vectors(const VectorSequence& vs, const Rational& eps);

// Merging of components that are identical up to rescaling.
struct MergeResult {
  ValuedStructure B;         // one representative per class, at summed scale
  Overcast out;              // A to B, factor 1, zero slack
  Overcast in;               // B to A, factor 1, zero slack
  long long classes = 0;     // components of B
  std::vector<int> class_of; // component index -> class index
};

// Groups the components of gaifman(A) into classes that agree up to a
// positive rescaling under some bijection (components larger than
// bijection_cap are never matched). The output keeps one representative
// per class, scaled by the class's total factor; nullary values are
// untouched. Both overcasts verify exactly at factor 1, certifying
// opt-distance zero.
MergeResult merge_components(const ValuedStructure& A, int bijection_cap = 8);

// Bounded-size replacement with a two-sided overcast certificate.
struct SizeReduction {
  ValuedStructure B;
  Overcast out;        // A to B at `factor`
  Overcast in;         // B to A at `factor`
  Rational factor;     // 1 - delta, at least 1/(1+eps)
  Rational edit;       // realized edit distance of the value-rounding step
  Rational delta;      // c_sigma * edit / (1 + c_sigma * edit)
  long long classes = 0;
  Integer class_bound; // guarantee at the final rounding quality
  int rounds = 1;      // rounding passes (the quality halves between passes)
};

// Replaces a structure whose components have at most d elements by one
// with at most class_bound * d elements, at opt-distance at most eps.
// Components are padded to size d, encoded as vectors of their tuple
// values, rounded by round_vectors, and merged classwise; the certificate
// chains the edit-distance mixture overcast with the exact merge. The
// rounding quality starts at (eps/c)/(1 + eps/c) for c = max_f ar(f)^ar(f)
// and halves until the realized edit distance certifies the target.
// Requires a clean structure; a component larger than d is a usage error.
SizeReduction cc_to_size(const ValuedStructure& A, const Rational& eps, int d);

// Position packing: moving one element into the signature.
struct PackedStructure {
  ValuedStructure B;   // over the packed signature, domain A minus v
  std::string v_name;  // the element packed away
  int v_index = 0;     // its position in A's domain
};

// Encodes A as a structure on domain A - v over the signature
// {(f, I) : f in sig, I subset of positions of f}, where (f, I), named
// "f#p1,p2,...", has arity ar(f) - |I| and records the values of f-tuples
// carrying v exactly at the positions in I. The Gaifman graph of the
// result is gaifman(A) - v.
PackedStructure pack(const ValuedStructure& A, int v);

// Inverse of pack: rebuilds a sigma-structure on domain B + {v_name} from
// a structure over a packed signature, inserting v_name at `position` in
// the domain order (-1 appends). unpack(pack(A, v).B, name, v) == A.
ValuedStructure unpack(const ValuedStructure& B, const std::string& v_name,
                       int position = -1);

// Bounded-size replacement for structures of bounded treedepth.
struct TdReduction {
  ValuedStructure B;
  Overcast out;     // A to B at `factor`
  Overcast in;      // B to A at `factor`
  Rational factor;  // at least 1/(1+eps)
  int packs = 0;    // pack levels crossed anywhere in the recursion
};

// Recursion on treedepth: a connected structure is packed at a vertex
// whose removal lowers the treedepth, reduced, and unpacked (overcasts
// transport losslessly through unpack); a disconnected one reduces each
// component at a third of the budget and then applies cc_to_size at
// another third. Every level re-verifies its certificate. Requires a
// clean structure; treedepth computations beyond td_cap raise the cap
// error.
TdReduction td_to_size(const ValuedStructure& A, const Rational& eps,
                       int td_cap = 10, long long support_cap = 100000);

}  // namespace maxhom
