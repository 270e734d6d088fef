#include "maxhom/structures.hpp"

#include <algorithm>
#include <numeric>
#include <set>

#include "maxhom/error.hpp"
#include "maxhom/graphs.hpp"

namespace maxhom {

int Signature::index_of(const std::string& name) const {
  for (size_t i = 0; i < symbols.size(); ++i)
    if (symbols[i].name == name) return static_cast<int>(i);
  return -1;
}

int Signature::max_arity() const {
  int r = 0;
  for (const auto& s : symbols) r = std::max(r, s.arity);
  return r;
}

void Signature::validate(bool allow_nullary) const {
  std::set<std::string> seen;
  for (const auto& s : symbols) {
    require_usage(!s.name.empty(), "empty symbol name");
    require_usage(seen.insert(s.name).second, "duplicate symbol: " + s.name);
    require_usage(s.arity >= (allow_nullary ? 0 : 1),
                  "bad arity for symbol " + s.name);
  }
}

int ValuedStructure::elem(const std::string& id) const {
  for (size_t i = 0; i < domain.size(); ++i)
    if (domain[i] == id) return static_cast<int>(i);
  return -1;
}

Rational ValuedStructure::value(int f, const Tuple& t) const {
  const auto& table = values.at(f);
  auto it = table.find(t);
  return it == table.end() ? Rational(0) : it->second;
}

void ValuedStructure::set_value(int f, const Tuple& t, const Rational& v) {
  require_usage(v >= 0, "negative tuple value");
  require_usage(f >= 0 && f < static_cast<int>(sig.symbols.size()), "bad symbol index");
  require_usage(static_cast<int>(t.size()) == sig.symbols[f].arity, "tuple arity mismatch");
  for (int x : t) require_usage(x >= 0 && x < n(), "tuple element out of range");
  if (v == 0)
    values[f].erase(t);
  else
    values[f][t] = v;
}

void ValuedStructure::validate(bool allow_nullary) const {
  sig.validate(allow_nullary);
  std::set<std::string> ids;
  for (const auto& d : domain) {
    require_usage(!d.empty(), "empty element id");
    require_usage(ids.insert(d).second, "duplicate element id: " + d);
  }
  require_usage(values.size() == sig.symbols.size(), "value table count mismatch");
  for (size_t f = 0; f < values.size(); ++f) {
    for (const auto& [t, v] : values[f]) {
      require_usage(static_cast<int>(t.size()) == sig.symbols[f].arity,
                    "tuple arity mismatch in " + sig.symbols[f].name);
      for (int x : t)
        require_usage(x >= 0 && x < n(), "tuple element out of range");
      require_usage(v > 0, "stored zero/negative value in " + sig.symbols[f].name);
    }
  }
}

Rational ValuedStructure::norm1() const {
  Rational s(0);
  for (const auto& table : values)
    for (const auto& [t, v] : table) s += v;
  return s;
}

Rational ValuedStructure::norm1_symbol(int f) const {
  Rational s(0);
  for (const auto& [t, v] : values.at(f)) s += v;
  return s;
}

Rational ValuedStructure::norm_inf() const {
  Rational s(0);
  for (const auto& table : values)
    for (const auto& [t, v] : table) s = std::max(s, v);
  return s;
}

long long ValuedStructure::total_tuples() const {
  long long c = 0;
  for (const auto& table : values) c += static_cast<long long>(table.size());
  return c;
}

ValuedStructure make_structure(Signature sig, std::vector<std::string> domain) {
  ValuedStructure a;
  a.sig = std::move(sig);
  a.domain = std::move(domain);
  a.values.resize(a.sig.symbols.size());
  return a;
}

bool same_signature(const ValuedStructure& a, const ValuedStructure& b) {
  return a.sig == b.sig;
}

Rational val(const ValuedStructure& A, const ValuedStructure& B, const Assignment& h) {
  require_usage(same_signature(A, B), "signature mismatch");
  require_usage(static_cast<int>(h.size()) == A.n(), "assignment size mismatch");
  for (int x : h) require_usage(x >= 0 && x < B.n(), "assignment target out of range");
  Rational total(0);
  Tuple mapped;
  for (size_t f = 0; f < A.values.size(); ++f) {
    const auto& target = B.values[f];
    for (const auto& [t, v] : A.values[f]) {
      mapped.resize(t.size());
      for (size_t i = 0; i < t.size(); ++i) mapped[i] = h[t[i]];
      auto it = target.find(mapped);
      if (it != target.end()) total += v * it->second;
    }
  }
  return total;
}

ValuedStructure rescale(const ValuedStructure& A, const Rational& c) {
  require_usage(c >= 0, "negative scale factor");
  ValuedStructure out = A;
  if (c == 0) {
    for (auto& table : out.values) table.clear();
    return out;
  }
  for (auto& table : out.values)
    for (auto& [t, v] : table) v *= c;
  return out;
}

ValuedStructure disjoint_union(const std::vector<ValuedStructure>& parts) {
  require_usage(!parts.empty(), "empty disjoint union");
  for (const auto& p : parts)
    require_usage(same_signature(parts[0], p), "signature mismatch in union");
  ValuedStructure out;
  out.sig = parts[0].sig;
  out.values.resize(out.sig.symbols.size());
  std::vector<int> offset(parts.size(), 0);
  for (size_t i = 0; i < parts.size(); ++i) {
    offset[i] = out.n();
    for (const auto& id : parts[i].domain)
      out.domain.push_back(std::to_string(i) + ":" + id);
  }
  for (size_t i = 0; i < parts.size(); ++i) {
    for (size_t f = 0; f < parts[i].values.size(); ++f) {
      for (const auto& [t, v] : parts[i].values[f]) {
        Tuple shifted = t;
        for (int& x : shifted) x += offset[i];
        if (t.empty()) {
          // Nullary values are global constants; they add across parts.
          auto it = out.values[f].find(shifted);
          if (it == out.values[f].end())
            out.values[f][shifted] = v;
          else
            it->second += v;
        } else {
          out.values[f][shifted] = v;
        }
      }
    }
  }
  return out;
}

Graph gaifman(const ValuedStructure& A) {
  Graph g = make_graph(A.domain);
  for (const auto& table : A.values) {
    for (const auto& [t, v] : table) {
      Tuple sup = tuple_support(t);
      for (size_t i = 0; i < sup.size(); ++i)
        for (size_t j = i + 1; j < sup.size(); ++j) g.add_edge(sup[i], sup[j]);
    }
  }
  return g;
}

bool is_clean(const ValuedStructure& A) {
  for (const auto& table : A.values) {
    for (const auto& [t, v] : table) {
      Tuple sup = tuple_support(t);
      if (sup.size() != t.size()) return false;
    }
  }
  return true;
}

namespace {

// Edit distance terms for one fixed bijection; returns infinite flag.
bool edit_terms(const ValuedStructure& A, const ValuedStructure& B,
                const Assignment& phi, Rational* out) {
  Rational total(0);
  Tuple mapped;
  for (size_t f = 0; f < A.values.size(); ++f) {
    Rational num(0);
    // |f^A(x) - f^B(phi x)| over the union of supports: walk A's support,
    // then B's tuples whose phi-preimage is not in A's support.
    for (const auto& [t, v] : A.values[f]) {
      mapped.resize(t.size());
      for (size_t i = 0; i < t.size(); ++i) mapped[i] = phi[t[i]];
      Rational bv = B.value(static_cast<int>(f), mapped);
      num += abs(v - bv);
    }
    Assignment inv(B.n(), -1);
    for (size_t i = 0; i < phi.size(); ++i) inv[phi[i]] = static_cast<int>(i);
    for (const auto& [t, v] : B.values[f]) {
      Tuple pre(t.size());
      for (size_t i = 0; i < t.size(); ++i) pre[i] = inv[t[i]];
      if (A.values[f].find(pre) == A.values[f].end()) num += v;
    }
    if (num == 0) continue;
    Rational denom = std::min(A.norm1_symbol(static_cast<int>(f)),
                              B.norm1_symbol(static_cast<int>(f)));
    if (denom == 0) return false;  // positive gap against an empty side
    total += num / denom;
  }
  *out = total;
  return true;
}

} // namespace

EditDistanceResult edit_distance(const ValuedStructure& A, const ValuedStructure& B,
                                 const std::optional<Assignment>& phi, int bijection_cap) {
  require_usage(same_signature(A, B), "signature mismatch");
  require_usage(A.n() == B.n(), "edit distance needs equal domain sizes");
  EditDistanceResult res;
  if (phi) {
    // Check the supplied map is a bijection.
    std::set<int> seen(phi->begin(), phi->end());
    require_usage(static_cast<int>(phi->size()) == A.n() &&
                      static_cast<int>(seen.size()) == A.n(),
                  "phi is not a bijection");
    for (int x : *phi) require_usage(x >= 0 && x < B.n(), "phi target out of range");
    Rational v;
    if (!edit_terms(A, B, *phi, &v)) {
      res.infinite = true;
      res.phi = *phi;
      return res;
    }
    res.value = v;
    res.phi = *phi;
    return res;
  }
  require_cap(A.n() <= bijection_cap,
              "bijection enumeration cap exceeded: " + std::to_string(A.n()));
  Assignment perm(A.n());
  std::iota(perm.begin(), perm.end(), 0);
  bool have = false;
  bool all_infinite = true;
  do {
    Rational v;
    if (!edit_terms(A, B, perm, &v)) continue;
    all_infinite = false;
    if (!have || v < res.value) {
      res.value = v;
      res.phi = perm;
      have = true;
    }
  } while (std::next_permutation(perm.begin(), perm.end()));
  if (!have) {
    res.infinite = all_infinite;
    Assignment id(A.n());
    std::iota(id.begin(), id.end(), 0);
    res.phi = id;
  }
  return res;
}

Rational pullback_value(const ValuedStructure& A, const Assignment& g, int f, const Tuple& x) {
  Rational s(0);
  Tuple mapped;
  for (const auto& [t, v] : A.values.at(f)) {
    mapped.resize(t.size());
    for (size_t i = 0; i < t.size(); ++i) mapped[i] = g[t[i]];
    if (mapped == x) s += v;
  }
  return s;
}

std::vector<std::map<Tuple, Rational>> pushforward(const ValuedStructure& A,
                                                   const Assignment& g, int n_target) {
  require_usage(static_cast<int>(g.size()) == A.n(), "assignment size mismatch");
  for (int x : g) require_usage(x >= 0 && x < n_target, "assignment target out of range");
  std::vector<std::map<Tuple, Rational>> out(A.values.size());
  for (size_t f = 0; f < A.values.size(); ++f) {
    for (const auto& [t, v] : A.values[f]) {
      Tuple mapped(t.size());
      for (size_t i = 0; i < t.size(); ++i) mapped[i] = g[t[i]];
      auto it = out[f].find(mapped);
      if (it == out[f].end())
        out[f][mapped] = v;
      else
        it->second += v;
    }
  }
  return out;
}

ValuedStructure img(const ValuedStructure& A, const ValuedStructure& B, const Assignment& g) {
  require_usage(same_signature(A, B), "signature mismatch");
  auto push = pushforward(A, g, B.n());
  ValuedStructure out = make_structure(B.sig, B.domain);
  for (size_t f = 0; f < B.values.size(); ++f) {
    for (const auto& [t, v] : B.values[f]) {
      auto it = push[f].find(t);
      if (it == push[f].end()) continue;
      Rational m = std::min(it->second, v);
      if (m > 0) out.values[f][t] = m;
    }
  }
  return out;
}

ValuedStructure induced(const ValuedStructure& A, const std::vector<int>& keep) {
  std::vector<int> pos(A.n(), -1);
  ValuedStructure out;
  out.sig = A.sig;
  out.values.resize(A.values.size());
  for (int x : keep) {
    require_usage(x >= 0 && x < A.n() && pos[x] == -1, "bad induced element list");
    pos[x] = out.n();
    out.domain.push_back(A.domain[x]);
  }
  for (size_t f = 0; f < A.values.size(); ++f) {
    for (const auto& [t, v] : A.values[f]) {
      Tuple mapped(t.size());
      bool ok = true;
      for (size_t i = 0; i < t.size() && ok; ++i) {
        mapped[i] = pos[t[i]];
        ok = mapped[i] >= 0;
      }
      if (ok) out.values[f][mapped] = v;
    }
  }
  return out;
}

void for_each_tuple(int n, int arity, const std::function<void(const Tuple&)>& fn) {
  Tuple t(arity, 0);
  if (arity == 0) {
    fn(t);
    return;
  }
  if (n == 0) return;
  while (true) {
    fn(t);
    int i = arity - 1;
    while (i >= 0 && t[i] == n - 1) {
      t[i] = 0;
      --i;
    }
    if (i < 0) break;
    ++t[i];
  }
}

Tuple tuple_support(const Tuple& t) {
  Tuple s = t;
  std::sort(s.begin(), s.end());
  s.erase(std::unique(s.begin(), s.end()), s.end());
  return s;
}

} // namespace maxhom
