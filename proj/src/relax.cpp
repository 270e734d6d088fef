#include "maxhom/relax.hpp"

#include <algorithm>
#include <map>
#include <numeric>
#include <optional>
#include <string>

#include "maxhom/error.hpp"
#include "maxhom/exact.hpp"
#include "maxhom/graphs.hpp"

namespace maxhom {

namespace {

Integer int_pow(Integer base, int exp) {
  Integer out = 1;
  for (int i = 0; i < exp; ++i) out *= base;
  return out;
}

// Colexicographic order on sorted index sets: compare the largest elements
// first; a set that runs out earlier comes first.
bool colex_less(const std::vector<int>& a, const std::vector<int>& b) {
  int i = static_cast<int>(a.size()) - 1;
  int j = static_cast<int>(b.size()) - 1;
  while (i >= 0 && j >= 0) {
    if (a[i] != b[j]) return a[i] < b[j];
    --i;
    --j;
  }
  return i < j;
}

// Total variable count, computed without materializing anything.
Integer count_sa_vars(int n, int nb, int k) {
  Integer total = 0;
  Integer choose = 1;  // C(n, s) built up incrementally
  for (int s = 1; s <= std::min(k, n); ++s) {
    choose = choose * (n - s + 1) / s;
    total += choose * int_pow(nb, s);
  }
  return total;
}

void check_sa_preconditions(const ValuedStructure& A, const ValuedStructure& B,
                            int k, long long var_cap) {
  require_usage(same_signature(A, B),
                "relaxations need both structures over one signature");
  require_usage(B.n() >= 1, "the target domain must be nonempty");
  require_usage(k >= std::max(1, A.sig.max_arity()),
                "the level must be at least the maximum arity");
  require_cap(count_sa_vars(A.n(), B.n(), k) <= var_cap,
              "relaxation variable count exceeds the cap");
}

// Largest value the objective can credit per unit of one tuple of A: the
// best f^B over image tuples respecting the tuple's equality pattern.
Rational tight_upper(const ValuedStructure& A, const ValuedStructure& B) {
  Rational u = 0;
  const int S = static_cast<int>(A.sig.symbols.size());
  for (int f = 0; f < S; ++f) {
    const int ar = A.sig.symbols[f].arity;
    for (const auto& [x, v] : A.values[f]) {
      Rational best = 0;
      for (const auto& [y, w] : B.values[f]) {
        bool pattern_ok = true;
        for (int i = 0; pattern_ok && i < ar; ++i)
          for (int j = i + 1; pattern_ok && j < ar; ++j)
            if (x[i] == x[j] && y[i] != y[j]) pattern_ok = false;
        if (pattern_ok && w > best) best = w;
      }
      u += v * best;
    }
  }
  return u;
}

} // namespace

int SAInstance::set_index(const std::vector<int>& X) const {
  auto it = std::lower_bound(sets.begin(), sets.end(), X, colex_less);
  if (it == sets.end() || *it != X) return -1;
  return static_cast<int>(it - sets.begin());
}

int SAInstance::var_of(int si, const Assignment& s) const {
  int rank = 0;
  for (int img : s) rank = rank * B.n() + img;
  return base[si] + rank;
}

SAInstance build_sa_instance(const ValuedStructure& A, const ValuedStructure& B,
                             int k, long long var_cap) {
  check_sa_preconditions(A, B, k, var_cap);
  const int n = A.n();
  const int nb = B.n();

  SAInstance inst;
  inst.A = A;
  inst.B = B;
  inst.k = k;

  // All nonempty subsets of size <= k, colex order.
  for (int s = 1; s <= std::min(k, n); ++s) {
    std::vector<int> c(s);
    std::iota(c.begin(), c.end(), 0);
    while (true) {
      inst.sets.push_back(c);
      int i = s - 1;
      while (i >= 0 && c[i] == n - s + i) --i;
      if (i < 0) break;
      ++c[i];
      for (int j = i + 1; j < s; ++j) c[j] = c[j - 1] + 1;
    }
  }
  std::sort(inst.sets.begin(), inst.sets.end(), colex_less);

  inst.base.resize(inst.sets.size());
  long long running = 0;
  for (size_t i = 0; i < inst.sets.size(); ++i) {
    inst.base[i] = static_cast<int>(running);
    Integer block = int_pow(nb, static_cast<int>(inst.sets[i].size()));
    running += static_cast<long long>(block);
  }
  inst.num_vars = static_cast<int>(running);

  LinearProgram& lp = inst.lp;
  lp.num_vars = inst.num_vars;
  lp.obj_sense = ObjSense::Max;

  // Variable names: l(set | images).
  lp.var_names.resize(inst.num_vars);
  for (size_t si = 0; si < inst.sets.size(); ++si) {
    const auto& X = inst.sets[si];
    Assignment s(X.size(), 0);
    while (true) {
      std::string name = "l(";
      for (size_t i = 0; i < X.size(); ++i)
        name += (i ? "," : "") + std::to_string(X[i]);
      name += "|";
      for (size_t i = 0; i < s.size(); ++i)
        name += (i ? "," : "") + std::to_string(s[i]);
      name += ")";
      lp.var_names[inst.var_of(static_cast<int>(si), s)] = std::move(name);
      int i = static_cast<int>(s.size()) - 1;
      for (; i >= 0; --i) {
        if (++s[i] < nb) break;
        s[i] = 0;
      }
      if (i < 0) break;
    }
  }

  // Normalization: each set's block sums to one.
  for (size_t si = 0; si < inst.sets.size(); ++si) {
    LPRow row;
    row.sense = RowSense::EQ;
    row.rhs = 1;
    Integer block = int_pow(nb, static_cast<int>(inst.sets[si].size()));
    for (long long r = 0; r < static_cast<long long>(block); ++r)
      row.coeffs.emplace_back(inst.base[si] + static_cast<int>(r), Rational(1));
    lp.rows.push_back(std::move(row));
  }

  // Marginalization over covering pairs: lambda(X, s) equals the mass of the
  // extensions of s to X + y.
  for (size_t si = 0; si < inst.sets.size(); ++si) {
    const auto& X = inst.sets[si];
    const int m = static_cast<int>(X.size());
    if (m + 1 > k) continue;
    for (int y = 0; y < n; ++y) {
      if (std::binary_search(X.begin(), X.end(), y)) continue;
      std::vector<int> Y(X);
      Y.insert(std::upper_bound(Y.begin(), Y.end(), y), y);
      const int yi = inst.set_index(Y);
      const int pos_y =
          static_cast<int>(std::lower_bound(Y.begin(), Y.end(), y) - Y.begin());
      Assignment s(m, 0);
      while (true) {
        LPRow row;
        row.sense = RowSense::EQ;
        row.rhs = 0;
        row.coeffs.emplace_back(inst.var_of(static_cast<int>(si), s), Rational(1));
        Assignment r(m + 1, 0);
        for (int i = 0; i < pos_y; ++i) r[i] = s[i];
        for (int i = pos_y; i < m; ++i) r[i + 1] = s[i];
        for (int img = 0; img < nb; ++img) {
          r[pos_y] = img;
          row.coeffs.emplace_back(inst.var_of(yi, r), Rational(-1));
        }
        lp.rows.push_back(std::move(row));
        int i = m - 1;
        for (; i >= 0; --i) {
          if (++s[i] < nb) break;
          s[i] = 0;
        }
        if (i < 0) break;
      }
    }
  }

  // Objective: expected value credited tuple by tuple.
  std::map<int, Rational> obj;
  const int S = static_cast<int>(A.sig.symbols.size());
  for (int f = 0; f < S; ++f) {
    const int ar = A.sig.symbols[f].arity;
    for (const auto& [x, v] : A.values[f]) {
      std::vector<int> X = tuple_support(x);
      const int si = inst.set_index(X);
      std::vector<int> pos(ar, 0);
      for (int i = 0; i < ar; ++i)
        pos[i] = static_cast<int>(
            std::lower_bound(X.begin(), X.end(), x[i]) - X.begin());
      Assignment s(X.size(), 0);
      Tuple image(ar, 0);
      while (true) {
        for (int i = 0; i < ar; ++i) image[i] = s[pos[i]];
        Rational w = B.value(f, image);
        if (w != 0) obj[inst.var_of(si, s)] += v * w;
        int i = static_cast<int>(s.size()) - 1;
        for (; i >= 0; --i) {
          if (++s[i] < nb) break;
          s[i] = 0;
        }
        if (i < 0) break;
      }
    }
  }
  for (const auto& [j, c] : obj) lp.objective.emplace_back(j, c);

  lp.validate();
  return inst;
}

LinearProgram build_sa(const ValuedStructure& A, const ValuedStructure& B,
                       int k, long long var_cap) {
  return build_sa_instance(A, B, k, var_cap).lp;
}

Rational opt_sa(const ValuedStructure& A, const ValuedStructure& B, int k,
                long long var_cap) {
  check_sa_preconditions(A, B, k, var_cap);

  std::optional<Rational> exact;
  try {
    exact = opt_auto(A, B).value;
  } catch (const Error& e) {
    if (e.kind != Errc::CapExceeded) throw;
  }
  if (exact) {
    // Level |A| carries a distribution over total maps, so the relaxation
    // closes onto the optimum.
    if (k >= A.n()) return *exact;
    // When the exact optimum already attains the per-tuple upper bound, the
    // relaxation is squeezed between the two.
    if (tight_upper(A, B) == *exact) return *exact;
  }

  SAInstance inst = build_sa_instance(A, B, k, var_cap);
  LPOutcome out = solve_lp(inst.lp);
  require_verify(out.status == LPStatus::Optimal,
                 "the relaxation must be feasible and bounded");
  return out.value;
}

SAExactnessReport sa_exactness_check(const ValuedStructure& A,
                                     const ValuedStructure& B,
                                     long long var_cap) {
  require_usage(same_signature(A, B),
                "exactness checks need both structures over one signature");
  ParamResult tw = graph_parameter(gaifman(A), GraphParam::TW);
  require_cap(tw.exact, "exactness checks need the exact treewidth");

  SAExactnessReport rep;
  rep.tw = static_cast<int>(tw.value);
  rep.k_guaranteed =
      std::max(rep.tw + 1, std::max(1, A.sig.max_arity()));
  rep.opt_value = opt_auto(A, B).value;

  rep.least_k = -1;
  for (int k = std::max(1, A.sig.max_arity()); k <= rep.k_guaranteed; ++k) {
    Rational v = opt_sa(A, B, k, var_cap);
    rep.levels.emplace_back(k, v);
    if (rep.least_k < 0 && v == rep.opt_value) rep.least_k = k;
  }
  require_verify(rep.least_k >= 0 &&
                     rep.levels.back().second == rep.opt_value,
                 "the guaranteed level failed to reach the optimum");
  return rep;
}

bool sa_dominance_check(const ValuedStructure& A, const ValuedStructure& B,
                        const Overcast& omega, int k,
                        const std::vector<ValuedStructure>& C_samples,
                        long long var_cap) {
  require_usage(overcast_verify(omega, A, B).ok,
                "the supplied distribution is not an overcast");
  for (const auto& C : C_samples) {
    require_usage(same_signature(A, C),
                  "sampled instances must share the signature");
    if (opt_sa(A, C, k, var_cap) < opt_sa(B, C, k, var_cap)) return false;
  }
  return true;
}

} // namespace maxhom
