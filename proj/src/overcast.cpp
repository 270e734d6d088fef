#include "maxhom/overcast.hpp"

#include <algorithm>
#include <map>

#include "maxhom/error.hpp"
#include "maxhom/exact.hpp"
#include "maxhom/lp.hpp"

namespace maxhom {

namespace {

Integer int_pow(Integer base, int exp) {
  Integer out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

// Structural sanity of a support: nonempty, total maps into [0, n_to).
void check_support_shape(const Overcast& omega, int n_from, int n_to) {
  require_usage(!omega.support.empty(), "overcast support is empty");
  for (const auto& [g, p] : omega.support) {
    (void)p;
    require_usage(static_cast<int>(g.size()) == n_from,
                  "overcast support map has the wrong domain size");
    for (int v : g)
      require_usage(0 <= v && v < n_to,
                    "overcast support map leaves the codomain");
  }
}

Overcast from_mass(const std::map<Assignment, Rational>& mass) {
  Overcast omega;
  for (const auto& [g, p] : mass)
    if (p != 0) omega.support.emplace_back(g, p);
  return omega;
}

// Lexicographic successor of g over codomain [0, n_to); rightmost position
// moves fastest. Returns false once g wraps around.
bool next_map(Assignment& g, int n_to) {
  for (int i = static_cast<int>(g.size()) - 1; i >= 0; --i) {
    if (++g[i] < n_to) return true;
    g[i] = 0;
  }
  return false;
}

} // namespace

SlackReport overcast_verify(const Overcast& omega, const ValuedStructure& A,
                            const ValuedStructure& B, const Rational& factor) {
  require_usage(same_signature(A, B),
                "overcast endpoints must share a signature");
  require_usage(factor >= 0, "coverage factor must be nonnegative");
  check_support_shape(omega, A.n(), B.n());

  SlackReport rep;
  Rational total = 0;
  bool positive = true;
  for (const auto& [g, p] : omega.support) {
    (void)g;
    if (p <= 0) positive = false;
    total += p;
  }
  rep.distribution_ok = positive && total == 1;

  // E_{g ~ omega} f^A(g^{-1}(.)) accumulated per symbol and image tuple.
  const int S = static_cast<int>(A.sig.symbols.size());
  std::vector<std::map<Tuple, Rational>> covered(S);
  for (const auto& [g, p] : omega.support) {
    for (int f = 0; f < S; ++f) {
      const int ar = A.sig.symbols[f].arity;
      Tuple image(ar, 0);
      for (const auto& [x, v] : A.values[f]) {
        for (int i = 0; i < ar; ++i) image[i] = g[x[i]];
        covered[f][image] += p * v;
      }
    }
  }

  rep.ok = rep.distribution_ok;
  rep.min_slack = 0;
  bool first = true;
  for (int f = 0; f < S; ++f) {
    for (const auto& [x, v] : B.values[f]) {
      TupleSlack ts;
      ts.symbol = f;
      ts.x = x;
      ts.required = factor * v;
      auto it = covered[f].find(x);
      ts.achieved = it == covered[f].end() ? Rational(0) : it->second;
      Rational slack = ts.achieved - ts.required;
      if (first || slack < rep.min_slack) rep.min_slack = slack;
      first = false;
      if (slack < 0) rep.ok = false;
      rep.entries.push_back(std::move(ts));
    }
  }
  return rep;
}

std::variant<Overcast, OvercastCertificate> overcast_find(
    const ValuedStructure& A, const ValuedStructure& B, long long map_cap) {
  require_usage(same_signature(A, B),
                "overcast endpoints must share a signature");
  require_usage(A.n() >= 1 && B.n() >= 1,
                "overcast search needs nonempty domains");
  const Integer total_maps = int_pow(B.n(), A.n());
  require_cap(total_maps <= map_cap,
              "map enumeration for the overcast search exceeds the cap");
  const long long nmaps = static_cast<long long>(total_maps);
  const int S = static_cast<int>(A.sig.symbols.size());

  // Rows: positive tuples of B in symbol-then-lex order.
  struct RowKey {
    int f;
    Tuple x;
  };
  std::vector<RowKey> rows;
  std::vector<Rational> b;
  std::vector<std::map<Tuple, int>> row_of(S);
  for (int f = 0; f < S; ++f) {
    for (const auto& [x, v] : B.values[f]) {
      row_of[f][x] = static_cast<int>(rows.size());
      rows.push_back({f, x});
      b.push_back(v);
    }
  }
  const int m = static_cast<int>(rows.size());

  if (m == 0) {
    // Nothing to cover: any single map works.
    Overcast omega;
    omega.support.emplace_back(Assignment(A.n(), 0), Rational(1));
    require_verify(overcast_verify(omega, A, B).ok,
                   "trivial overcast failed its audit");
    return omega;
  }

  // Column c holds the pulled-back mass of map number c (lex order) on each
  // row's tuple.
  std::vector<std::vector<Rational>> M(m, std::vector<Rational>(nmaps, 0));
  {
    Assignment g(A.n(), 0);
    long long c = 0;
    do {
      for (int f = 0; f < S; ++f) {
        const int ar = A.sig.symbols[f].arity;
        Tuple image(ar, 0);
        for (const auto& [x, v] : A.values[f]) {
          for (int i = 0; i < ar; ++i) image[i] = g[x[i]];
          auto it = row_of[f].find(image);
          if (it != row_of[f].end()) M[it->second][c] += v;
        }
      }
      ++c;
    } while (next_map(g, B.n()));
    require_verify(c == nmaps, "map enumeration miscounted");
  }

  FarkasOutcome fo = check_farkas_variant(M, b, 1);
  if (fo.x_side) {
    std::map<Assignment, Rational> mass;
    Assignment g(A.n(), 0);
    long long c = 0;
    do {
      if (fo.x[c] != 0) mass[g] = fo.x[c];
      ++c;
    } while (next_map(g, B.n()));
    Overcast omega = from_mass(mass);
    require_verify(overcast_verify(omega, A, B).ok,
                   "overcast from the feasibility side failed its audit");
    return omega;
  }

  // Refutation: weigh B's tuples by y. Every map then values A below what
  // the identity earns on B, and the exact optima keep the strict gap.
  ValuedStructure C = make_structure(A.sig, B.domain);
  for (int j = 0; j < m; ++j)
    if (fo.y[j] > 0) C.set_value(rows[j].f, rows[j].x, fo.y[j]);
  OvercastCertificate cert;
  cert.opt_A_C = opt_auto(A, C).value;
  cert.opt_B_C = opt_auto(B, C).value;
  cert.C = std::move(C);
  require_verify(cert.opt_A_C < cert.opt_B_C,
                 "overcast refutation lost its strict gap");
  return cert;
}

Overcast compose(const Overcast& w1, const Overcast& w2, long long pair_cap) {
  require_usage(!w1.support.empty() && !w2.support.empty(),
                "compose needs nonempty supports");
  const int n_from = static_cast<int>(w1.support.front().first.size());
  const int n_mid = static_cast<int>(w2.support.front().first.size());
  check_support_shape(w1, n_from, n_mid);
  for (const auto& [g, p] : w2.support) {
    require_usage(static_cast<int>(g.size()) == n_mid,
                  "compose needs every second-stage map on the middle domain");
    require_usage(p > 0, "compose needs positive probabilities");
  }
  for (const auto& [g, p] : w1.support) {
    (void)g;
    require_usage(p > 0, "compose needs positive probabilities");
  }
  require_cap(static_cast<long long>(w1.support.size()) *
                      static_cast<long long>(w2.support.size()) <=
                  pair_cap,
              "compose support product exceeds the cap");

  std::map<Assignment, Rational> mass;
  Assignment comp(n_from, 0);
  for (const auto& [g1, p1] : w1.support) {
    for (const auto& [g2, p2] : w2.support) {
      for (int a = 0; a < n_from; ++a) comp[a] = g2[g1[a]];
      mass[comp] += p1 * p2;
    }
  }
  Overcast omega = from_mass(mass);
  Rational total = 0;
  for (const auto& [g, p] : omega.support) {
    (void)g;
    total += p;
  }
  require_verify(total == 1, "composed distribution does not sum to one");
  return omega;
}

std::optional<OptDistanceBound> opt_distance_bound(const ValuedStructure& A,
                                                   const ValuedStructure& B,
                                                   std::vector<Rational> epsilons,
                                                   long long map_cap) {
  require_usage(same_signature(A, B),
                "distance bounds need a shared signature");
  require_usage(!epsilons.empty(), "no candidate epsilons supplied");
  for (const Rational& e : epsilons)
    require_usage(e >= 0, "candidate epsilons must be nonnegative");
  std::sort(epsilons.begin(), epsilons.end());
  epsilons.erase(std::unique(epsilons.begin(), epsilons.end()),
                 epsilons.end());

  for (const Rational& eps : epsilons) {
    const Rational r = Rational(1) / (Rational(1) + eps);
    auto fwd = overcast_find(A, rescale(B, r), map_cap);
    if (!std::holds_alternative<Overcast>(fwd)) continue;
    auto bwd = overcast_find(B, rescale(A, r), map_cap);
    if (!std::holds_alternative<Overcast>(bwd)) continue;
    OptDistanceBound out;
    out.epsilon = eps;
    out.forward = std::get<Overcast>(std::move(fwd));
    out.backward = std::get<Overcast>(std::move(bwd));
    require_verify(overcast_verify(out.forward, A, B, r).ok,
                   "forward distance witness failed its audit");
    require_verify(overcast_verify(out.backward, B, A, r).ok,
                   "backward distance witness failed its audit");
    return out;
  }
  return std::nullopt;
}

EditOvercast edit_overcast(const ValuedStructure& A, const ValuedStructure& B,
                           const Assignment& phi, long long support_cap) {
  require_usage(same_signature(A, B),
                "edit mixtures need a shared signature");
  require_usage(A.n() == B.n(), "edit mixtures need equal domain sizes");
  require_usage(static_cast<int>(phi.size()) == A.n(),
                "phi must assign every element of the first domain");
  std::vector<int> hit(B.n(), 0);
  for (int v : phi) {
    require_usage(0 <= v && v < B.n(), "phi leaves the codomain");
    require_usage(hit[v]++ == 0, "phi must be a bijection");
  }
  require_usage(is_clean(A) && is_clean(B),
                "edit mixtures need clean structures");

  EditDistanceResult ed = edit_distance(A, B, phi);
  require_usage(!ed.infinite,
                "the edit value for this bijection is infinite");

  const int S = static_cast<int>(A.sig.symbols.size());
  Integer c_sigma_int = 1;
  for (const Symbol& s : A.sig.symbols)
    c_sigma_int = std::max(c_sigma_int, int_pow(s.arity, s.arity));
  const Rational c_sigma(c_sigma_int);
  const Rational d1 = ed.value;
  const Rational delta =
      d1 == 0 ? Rational(0) : c_sigma * d1 / (1 + c_sigma * d1);

  Assignment phi_inv(B.n(), 0);
  for (int a = 0; a < A.n(); ++a) phi_inv[phi[a]] = a;

  std::map<Assignment, Rational> mass;
  Rational assigned = 0;
  if (d1 > 0) {
    for (int f = 0; f < S; ++f) {
      const int ar = A.sig.symbols[f].arity;
      const Rational mn = std::min(A.norm1_symbol(f), B.norm1_symbol(f));
      Tuple pre(ar, 0);
      for (const auto& [x, v] : B.values[f]) {
        for (int i = 0; i < ar; ++i) pre[i] = phi_inv[x[i]];
        const Rational av = A.value(f, pre);
        const Rational diff = av > v ? av - v : v - av;
        if (diff == 0) continue;
        const Rational share = delta * (diff / mn) / d1;
        assigned += share;
        if (ar == 0) {
          // Nullary rows are covered by every map, so this mass can ride
          // along with phi.
          mass[phi] += share;
          continue;
        }
        const Integer ways = int_pow(ar, A.n());
        require_cap(ways <= support_cap,
                    "edit mixture collapse family exceeds the support cap");
        const Rational each = share / Rational(ways);
        Tuple pos(A.n(), 0);
        Assignment g(A.n(), 0);
        do {
          for (int a = 0; a < A.n(); ++a) g[a] = x[pos[a]];
          mass[g] += each;
        } while (next_map(pos, ar));
        require_cap(static_cast<long long>(mass.size()) <= support_cap,
                    "edit mixture support exceeds the cap");
      }
    }
  }
  // Differences that sit on zero tuples of B need no coverage; their slice
  // of delta stays with phi.
  mass[phi] += (1 - delta) + (delta - assigned);

  EditOvercast out;
  out.omega = from_mass(mass);
  out.edit_value = d1;
  out.c_sigma = c_sigma;
  out.delta = delta;
  Rational total = 0;
  for (const auto& [g, p] : out.omega.support) {
    (void)g;
    total += p;
  }
  require_verify(total == 1, "edit mixture does not sum to one");
  require_verify(overcast_verify(out.omega, A, B, 1 - delta).ok,
                 "edit mixture failed its coverage audit");
  return out;
}

} // namespace maxhom
