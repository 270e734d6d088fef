#pragma once

#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "maxhom/rational.hpp"

namespace maxhom {

struct Graph;

struct Symbol {
  std::string name;
  int arity = 0;
  bool operator==(const Symbol&) const = default;
};

struct Signature {
  std::vector<Symbol> symbols;
  int index_of(const std::string& name) const;
  int max_arity() const;
  // Distinct names, arities within bounds. User-facing input requires
  // arity >= 1; structures produced by position-packing may carry nullary
  // symbols internally.
  void validate(bool allow_nullary = false) const;
  bool operator==(const Signature&) const = default;
};

using Tuple = std::vector<int>;       // element indices into a domain
using Assignment = std::vector<int>;  // h[i] = index of the image of element i

struct ValuedStructure {
  Signature sig;
  std::vector<std::string> domain;
  // One sparse table per symbol; only strictly positive values are stored.
  std::vector<std::map<Tuple, Rational>> values;

  int n() const { return static_cast<int>(domain.size()); }
  int elem(const std::string& id) const;
  Rational value(int f, const Tuple& t) const;
  void set_value(int f, const Tuple& t, const Rational& v);
  void validate(bool allow_nullary = false) const;

  Rational norm1() const;
  Rational norm1_symbol(int f) const;
  Rational norm_inf() const;
  long long total_tuples() const;
};

ValuedStructure make_structure(Signature sig, std::vector<std::string> domain);

bool same_signature(const ValuedStructure& a, const ValuedStructure& b);

// val(h) = sum over positive tuples (f,x) of A of f^A(x) * f^B(h(x)).
Rational val(const ValuedStructure& A, const ValuedStructure& B, const Assignment& h);

// c * A: every value scaled; c must be >= 0 (c = 0 empties all tables).
ValuedStructure rescale(const ValuedStructure& A, const Rational& c);

// Disjoint union over a shared signature; element ids are tagged "i:x" by
// part index. Nullary symbol values add up across parts.
ValuedStructure disjoint_union(const std::vector<ValuedStructure>& parts);

// Primal graph: elements adjacent when they co-occur in a positive tuple.
Graph gaifman(const ValuedStructure& A);

// No positive tuple repeats an element.
bool is_clean(const ValuedStructure& A);

struct EditDistanceResult {
  bool infinite = false;
  Rational value;
  Assignment phi;  // the bijection realizing the value
};

// Normalized L1 edit distance over a bijection phi between equal-size
// domains: sum over symbols of (sum_x |f^A(x) - f^B(phi(x))|) divided by
// min(|A_f|_1, |B_f|_1). A zero denominator against a positive numerator is
// reported as infinite. When phi is absent, minimized over all bijections
// (domain size capped).
EditDistanceResult edit_distance(const ValuedStructure& A, const ValuedStructure& B,
                                 const std::optional<Assignment>& phi = std::nullopt,
                                 int bijection_cap = 8);

// f^A(g^{-1}(x)): total A-value pushed onto tuple x of B's domain by g.
Rational pullback_value(const ValuedStructure& A, const Assignment& g, int f, const Tuple& x);

// Pushforward of A under g onto a domain of size n_target: per-symbol sums of
// f^A over each image tuple.
std::vector<std::map<Tuple, Rational>> pushforward(const ValuedStructure& A,
                                                   const Assignment& g, int n_target);

// Img(g): structure on B's domain with f(x) = min(f^A(g^{-1}(x)), f^B(x)).
ValuedStructure img(const ValuedStructure& A, const ValuedStructure& B, const Assignment& g);

// Induced substructure on the kept elements (sorted index list); tuples that
// leave the kept set are dropped, nullary values survive.
ValuedStructure induced(const ValuedStructure& A, const std::vector<int>& keep);

// Enumerates [n]^arity in lexicographic order (rightmost position fastest).
void for_each_tuple(int n, int arity, const std::function<void(const Tuple&)>& fn);

// Sorted distinct element indices used by a tuple.
Tuple tuple_support(const Tuple& t);

} // namespace maxhom
