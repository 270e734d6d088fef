#include "maxhom/reductions.hpp"

#include <boost/multiprecision/cpp_bin_float.hpp>

#include <algorithm>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>
#include <utility>

#include "maxhom/error.hpp"
#include "maxhom/graphs.hpp"

namespace maxhom {

namespace {

Integer ipow(const Integer& base, int exp) {
  Integer r = 1;
  for (int i = 0; i < exp; ++i) r *= base;
  return r;
}

Rational rpow(Rational base, long long exp) {
  Rational r = 1;
  while (exp > 0) {
    if (exp & 1) r *= base;
    base *= base;
    exp >>= 1;
  }
  return r;
}

using Float = boost::multiprecision::cpp_bin_float_100;

Float to_float(const Rational& r) {
  return Float(numerator(r)) / Float(denominator(r));
}

// Largest exponent a with base^a < 3d/eps^2, where base = 3/(3-eps).
// For eps >= 3 the mid band is empty and the grid is never consulted.
// Deep recursion levels push the answer into the millions, where an exact
// answer is pointless (the callers only need an upper bound on grid cells),
// so past a polish threshold the float estimate is nudged up instead.
long long grid_steps(int d, const Rational& eps) {
  if (eps >= 3) return 0;
  const Rational base = Rational(3) / (Rational(3) - eps);
  const Rational limit = Rational(3 * d) / (eps * eps);
  if (limit <= 1) return 0;
  const Float est = log(to_float(limit)) / log(to_float(base));
  long long a = est.convert_to<long long>();
  if (a < 0) a = 0;
  if (a > 10000) return a + 2;
  while (a > 0 && rpow(base, a) >= limit) --a;
  while (rpow(base, a + 1) < limit) ++a;
  return a;
}

// Sorts a support lexicographically, merging duplicates and dropping
// zero-probability entries.
Overcast canonical(Overcast w) {
  std::map<Assignment, Rational> acc;
  for (auto& [g, p] : w.support)
    if (p != 0) acc[std::move(g)] += p;
  Overcast out;
  for (auto& [g, p] : acc) out.support.emplace_back(g, p);
  return out;
}

// Couples per-part distributions along a single shared uniform draw.  The
// joint walks the common refinement of the parts' cumulative distributions,
// so its support size is at most the sum of the part support sizes rather
// than their product, while every part marginal is reproduced exactly.
Overcast couple_parts(
    const std::vector<std::vector<Rational>>& probs,
    const std::function<Assignment(const std::vector<std::size_t>&)>& build) {
  Overcast out;
  if (probs.empty()) {
    out.support.emplace_back(build({}), Rational(1));
    return canonical(out);
  }
  std::vector<std::size_t> idx(probs.size(), 0);
  std::vector<Rational> used(probs.size(), 0);
  std::map<Assignment, Rational> acc;
  Rational t = 0;
  while (t < 1) {
    Rational step = Rational(1) - t;
    for (std::size_t p = 0; p < probs.size(); ++p) {
      const Rational rem = probs[p][idx[p]] - used[p];
      step = std::min(step, rem);
    }
    acc[build(idx)] += step;
    t += step;
    for (std::size_t p = 0; p < probs.size(); ++p) {
      used[p] += step;
      if (used[p] == probs[p][idx[p]] && idx[p] + 1 < probs[p].size()) {
        ++idx[p];
        used[p] = 0;
      }
    }
  }
  for (auto& [g, pr] : acc) out.support.emplace_back(g, pr);
  return canonical(out);
}

// Rounds coordinates c0..d-1 of the selected rows, treating c0 as the
// leading coordinate.  Rows whose leading coordinate ends up zero are
// passed one level down with a tightened budget.
void round_block(std::vector<std::vector<Rational>>& w,
                 const std::vector<int>& rows, int c0, int d_total,
                 const Rational& eps) {
  const int d = d_total - c0;
  if (d <= 1 || rows.empty()) return;
  for (int i = c0 + 1; i < d_total; ++i) {
    Rational total = 0;
    for (int j : rows) total += w[j][i];
    const Rational theta = eps * total / 3;

    // Mass of coordinate i gathered per ratio against the leading
    // coordinate, over rows where the leading coordinate is positive.
    std::map<Rational, Rational> mass_at;
    for (int j : rows)
      if (w[j][c0] > 0) mass_at[w[j][i] / w[j][c0]] += w[j][i];
    if (mass_at.empty()) continue;

    // Zero out the largest prefix of ratios whose combined mass still fits
    // under theta; c is the first ratio that survives.
    std::vector<std::pair<Rational, Rational>> ladder(mass_at.begin(),
                                                      mass_at.end());
    std::size_t cut = 0;
    Rational prefix = 0;
    while (cut < ladder.size() && prefix + ladder[cut].second <= theta) {
      prefix += ladder[cut].second;
      ++cut;
    }
    const bool drop_all = cut == ladder.size();
    const Rational c = drop_all ? Rational(0) : ladder[cut].first;
    const Rational cprime = c * Rational(3 * d) / (eps * eps);
    const Rational base =
        eps < 3 ? Rational(3) / (Rational(3) - eps) : Rational(2);

    for (int j : rows) {
      if (w[j][c0] == 0) continue;
      const Rational ratio = w[j][i] / w[j][c0];
      if (drop_all || ratio < c) {
        w[j][i] = 0;
      } else if (ratio >= cprime) {
        w[j][c0] = 0;
      } else {
        // Mid band: snap coordinate i down onto the geometric grid
        // anchored at c times the leading coordinate.  The exponent is
        // estimated in floating point and then certified exactly.
        const Rational target = ratio / c;
        long long a =
            (log(to_float(target)) / log(to_float(base))).convert_to<long long>();
        if (a < 0) a = 0;
        require_cap(a <= 50000, "grid exponent exceeds its cap");
        Rational p = rpow(base, a);
        while (p > target) {
          p /= base;
          --a;
        }
        while (p * base <= target) {
          p *= base;
          ++a;
        }
        w[j][i] = c * w[j][c0] * p;
      }
    }
  }
  std::vector<int> spilled;
  for (int j : rows)
    if (w[j][c0] == 0) spilled.push_back(j);
  round_block(w, spilled, c0 + 1, d_total, eps / 3);
}

std::vector<Rational> normalize_profile(const std::vector<Rational>& v) {
  for (const Rational& x : v) {
    if (x != 0) {
      std::vector<Rational> out;
      out.reserve(v.size());
      for (const Rational& y : v) out.push_back(y / x);
      return out;
    }
  }
  return v;
}

struct Component {
  std::vector<int> verts;  // ascending global indices
  // (symbol, tuple in component-local indices) -> value
  std::map<std::pair<int, Tuple>, Rational> local;
  Rational mass = 0;
};

std::vector<Component> component_profiles(const ValuedStructure& A) {
  const Graph g = gaifman(A);
  const auto comps = components(g);
  std::vector<int> comp_of(A.n(), -1), rank(A.n(), -1);
  std::vector<Component> out(comps.size());
  for (std::size_t i = 0; i < comps.size(); ++i) {
    out[i].verts = comps[i];
    for (std::size_t r = 0; r < comps[i].size(); ++r) {
      comp_of[comps[i][r]] = static_cast<int>(i);
      rank[comps[i][r]] = static_cast<int>(r);
    }
  }
  for (std::size_t f = 0; f < A.values.size(); ++f) {
    if (A.sig.symbols[f].arity == 0) continue;
    for (const auto& [t, v] : A.values[f]) {
      const int ci = comp_of[t[0]];
      Tuple loc(t.size());
      for (std::size_t p = 0; p < t.size(); ++p) loc[p] = rank[t[p]];
      out[ci].local[{static_cast<int>(f), loc}] = v;
      out[ci].mass += v;
    }
  }
  return out;
}

// Tries to express cand as lambda times rep under some bijection of the
// component vertices; returns the member-to-representative map on success.
// Permutations are tried in lexicographic order and the first match wins.
std::optional<std::pair<Rational, std::vector<int>>> match_component(
    const Component& rep, const Component& cand, int bijection_cap) {
  if (rep.verts.size() != cand.verts.size()) return std::nullopt;
  const int s = static_cast<int>(rep.verts.size());
  if (rep.mass == 0 && cand.mass == 0) {
    std::vector<int> id(s);
    std::iota(id.begin(), id.end(), 0);
    return std::make_pair(Rational(1), id);
  }
  if (rep.mass == 0 || cand.mass == 0) return std::nullopt;
  if (rep.local.size() != cand.local.size()) return std::nullopt;
  if (s > bijection_cap) return std::nullopt;
  const Rational lambda = cand.mass / rep.mass;
  std::vector<int> perm(s);
  std::iota(perm.begin(), perm.end(), 0);
  do {
    bool ok = true;
    Tuple image;
    for (const auto& [key, v] : cand.local) {
      image.resize(key.second.size());
      for (std::size_t p = 0; p < key.second.size(); ++p)
        image[p] = perm[key.second[p]];
      auto it = rep.local.find({key.first, image});
      if (it == rep.local.end() || it->second * lambda != v) {
        ok = false;
        break;
      }
    }
    if (ok) return std::make_pair(lambda, perm);
  } while (std::next_permutation(perm.begin(), perm.end()));
  return std::nullopt;
}

Overcast point_mass(Assignment g) {
  Overcast out;
  out.support.emplace_back(std::move(g), Rational(1));
  return canonical(out);
}

}  // namespace

Integer rounding_class_bound(int d, const Rational& eps) {
  require_usage(d >= 1, "dimension must be at least 1");
  require_usage(eps > 0, "rounding quality must be positive");
  if (d == 1) return Integer(2);
  return ipow(Integer(2 + grid_steps(d, eps)), d - 1) +
         rounding_class_bound(d - 1, eps / 3);
}

RoundedVectors round_vectors(const VectorSequence& vs, const Rational& eps) {
  require_usage(vs.dimension >= 1, "dimension must be at least 1");
  require_usage(eps > 0, "rounding quality must be positive");
  const int d = vs.dimension;
  for (const auto& v : vs.vectors) {
    require_usage(static_cast<int>(v.size()) == d,
                  "vector length does not match the declared dimension");
    for (const Rational& x : v)
      require_usage(x >= 0, "vector entries must be nonnegative");
  }

  RoundedVectors out;
  out.rounded.dimension = d;
  out.rounded.vectors = vs.vectors;
  std::vector<int> rows(vs.vectors.size());
  std::iota(rows.begin(), rows.end(), 0);
  round_block(out.rounded.vectors, rows, 0, d, eps);

  // The rounded sequence must sit below the input coordinatewise and lose
  // at most an eps fraction of every coordinate's total mass.
  for (int i = 0; i < d; ++i) {
    Rational before = 0, err = 0;
    for (std::size_t j = 0; j < vs.vectors.size(); ++j) {
      require_verify(out.rounded.vectors[j][i] <= vs.vectors[j][i],
                     "rounding increased a coordinate");
      before += vs.vectors[j][i];
      err += vs.vectors[j][i] - out.rounded.vectors[j][i];
    }
    require_verify(err <= eps * before,
                   "rounding error exceeds the promised bound");
  }

  std::set<std::vector<Rational>> classes;
  for (const auto& v : out.rounded.vectors) classes.insert(normalize_profile(v));
  out.classes = static_cast<long long>(classes.size());
  out.class_bound = rounding_class_bound(d, eps);
  require_verify(Integer(out.classes) <= out.class_bound,
                 "class count exceeds the computed bound");
  return out;
}

MergeResult merge_components(const ValuedStructure& A, int bijection_cap) {
  A.validate(true);
  MergeResult res;
  if (A.n() == 0) {
    res.B = A;
    res.out = point_mass(Assignment{});
    res.in = point_mass(Assignment{});
    res.classes = 0;
    return res;
  }

  const auto comps = component_profiles(A);
  const int m = static_cast<int>(comps.size());
  res.class_of.assign(m, -1);
  std::vector<int> reps;                       // component id of each class rep
  std::vector<std::vector<int>> members;       // component ids per class
  std::vector<std::vector<std::vector<int>>> to_rep;  // member-local -> rep-local
  std::vector<std::vector<Rational>> lambdas;
  for (int i = 0; i < m; ++i) {
    for (std::size_t c = 0; c < reps.size(); ++c) {
      auto hit = match_component(comps[reps[c]], comps[i], bijection_cap);
      if (hit) {
        res.class_of[i] = static_cast<int>(c);
        members[c].push_back(i);
        to_rep[c].push_back(hit->second);
        lambdas[c].push_back(hit->first);
        break;
      }
    }
    if (res.class_of[i] < 0) {
      res.class_of[i] = static_cast<int>(reps.size());
      reps.push_back(i);
      members.push_back({i});
      std::vector<int> id(comps[i].verts.size());
      std::iota(id.begin(), id.end(), 0);
      to_rep.push_back({id});
      lambdas.push_back({Rational(1)});
    }
  }
  res.classes = static_cast<long long>(reps.size());

  std::vector<int> kept;
  for (int r : reps)
    kept.insert(kept.end(), comps[r].verts.begin(), comps[r].verts.end());
  std::sort(kept.begin(), kept.end());
  std::vector<int> b_index(A.n(), -1);
  for (std::size_t p = 0; p < kept.size(); ++p) b_index[kept[p]] = static_cast<int>(p);

  std::vector<std::string> names;
  names.reserve(kept.size());
  for (int v : kept) names.push_back(A.domain[v]);
  res.B = make_structure(A.sig, names);
  for (std::size_t f = 0; f < A.values.size(); ++f)
    if (A.sig.symbols[f].arity == 0)
      for (const auto& [t, v] : A.values[f]) res.B.set_value(static_cast<int>(f), t, v);
  std::vector<Rational> total_lambda(reps.size(), 0);
  for (std::size_t c = 0; c < reps.size(); ++c)
    for (const Rational& l : lambdas[c]) total_lambda[c] += l;
  for (std::size_t c = 0; c < reps.size(); ++c) {
    const Component& rep = comps[reps[c]];
    for (const auto& [key, v] : rep.local) {
      Tuple t(key.second.size());
      for (std::size_t p = 0; p < key.second.size(); ++p)
        t[p] = b_index[rep.verts[key.second[p]]];
      res.B.set_value(key.first, t, v * total_lambda[c]);
    }
  }

  // Outward: fold every member onto its class representative.  Coverage is
  // exact because the representative's values were scaled by the summed
  // ratios, so the report shows zero slack.
  Assignment fold(A.n(), 0);
  for (std::size_t c = 0; c < reps.size(); ++c) {
    const Component& rep = comps[reps[c]];
    for (std::size_t k = 0; k < members[c].size(); ++k) {
      const Component& mem = comps[members[c][k]];
      for (std::size_t i = 0; i < mem.verts.size(); ++i)
        fold[mem.verts[i]] = b_index[rep.verts[to_rep[c][k][i]]];
    }
  }
  res.out = point_mass(fold);

  // Inward: each class independently picks one member with probability
  // proportional to its scale ratio, and the picks are coupled along one
  // shared uniform draw to keep the joint support small.
  std::vector<std::vector<Rational>> probs(reps.size());
  for (std::size_t c = 0; c < reps.size(); ++c) {
    if (total_lambda[c] == 0) {
      probs[c].assign(members[c].size(),
                      Rational(1) / Rational(static_cast<long long>(members[c].size())));
    } else {
      for (const Rational& l : lambdas[c]) probs[c].push_back(l / total_lambda[c]);
    }
  }
  std::vector<std::vector<std::vector<int>>> from_rep = to_rep;
  for (std::size_t c = 0; c < reps.size(); ++c)
    for (std::size_t k = 0; k < to_rep[c].size(); ++k)
      for (std::size_t i = 0; i < to_rep[c][k].size(); ++i)
        from_rep[c][k][to_rep[c][k][i]] = static_cast<int>(i);
  res.in = couple_parts(
      probs, [&](const std::vector<std::size_t>& pick) {
        Assignment h(res.B.n(), 0);
        for (std::size_t c = 0; c < reps.size(); ++c) {
          const Component& rep = comps[reps[c]];
          const Component& mem = comps[members[c][pick[c]]];
          for (std::size_t i = 0; i < rep.verts.size(); ++i)
            h[b_index[rep.verts[i]]] = mem.verts[from_rep[c][pick[c]][i]];
        }
        return h;
      });

  require_verify(overcast_verify(res.out, A, res.B).ok,
                 "merged structure is not covered from the input");
  require_verify(overcast_verify(res.in, res.B, A).ok,
                 "input is not covered from the merged structure");
  return res;
}

SizeReduction cc_to_size(const ValuedStructure& A, const Rational& eps, int d) {
  A.validate(true);
  require_usage(eps > 0, "target quality must be positive");
  require_usage(d >= 1, "component size bound must be at least 1");
  require_usage(is_clean(A), "size reduction requires a clean structure");

  SizeReduction res;
  if (A.n() == 0) {
    res.B = A;
    res.out = point_mass(Assignment{});
    res.in = point_mass(Assignment{});
    res.factor = 1;
    res.edit = 0;
    res.delta = 0;
    res.classes = 0;
    res.class_bound = 0;
    return res;
  }

  const auto comps = component_profiles(A);
  for (const auto& cmp : comps)
    require_usage(static_cast<int>(cmp.verts.size()) <= d,
                  "a connected component exceeds the declared size bound");

  // Every component becomes one vector: a coordinate per symbol and
  // positive-arity tuple pattern over a domain padded up to size d.
  // Components smaller than d simply leave their out-of-range coordinates
  // at zero, and rounding never lifts a zero, so padding is invisible in
  // the rebuilt structure.
  std::vector<std::pair<int, Tuple>> coords;
  for (std::size_t f = 0; f < A.sig.symbols.size(); ++f) {
    const int ar = A.sig.symbols[f].arity;
    if (ar == 0) continue;
    Tuple t(ar, 0);
    while (true) {
      coords.emplace_back(static_cast<int>(f), t);
      int p = ar - 1;
      while (p >= 0 && t[p] == d - 1) t[p--] = 0;
      if (p < 0) break;
      ++t[p];
    }
    require_cap(static_cast<long long>(coords.size()) *
                        static_cast<long long>(comps.size()) <=
                    2000000,
                "component profile table exceeds its cap");
  }
  if (coords.empty()) coords.emplace_back(-1, Tuple{});  // all-zero padding

  VectorSequence vs;
  vs.dimension = static_cast<int>(coords.size());
  for (const auto& cmp : comps) {
    std::vector<Rational> v(coords.size(), 0);
    for (std::size_t k = 0; k < coords.size(); ++k) {
      if (coords[k].first < 0) continue;
      auto it = cmp.local.find(coords[k]);
      if (it != cmp.local.end()) v[k] = it->second;
    }
    vs.vectors.push_back(std::move(v));
  }

  Rational csig = 1;
  for (const auto& s : A.sig.symbols)
    if (s.arity >= 1) csig = std::max(csig, Rational(ipow(Integer(s.arity), s.arity)));

  // The per-coordinate rounding guarantee controls the edit distance of
  // each symbol separately, but the distance sums over symbols, so the
  // opening quality can fall short by a signature-sized factor.  Measure
  // the realized distance exactly and tighten until it certifies.
  Rational quality = (eps / csig) / (1 + eps / csig);
  RoundedVectors rv;
  ValuedStructure rounded;
  Rational edit;
  res.rounds = 0;
  while (true) {
    ++res.rounds;
    require_cap(res.rounds <= 64, "rounding quality search exceeds its cap");
    rv = round_vectors(vs, quality);
    rounded = make_structure(A.sig, A.domain);
    for (std::size_t f = 0; f < A.values.size(); ++f)
      if (A.sig.symbols[f].arity == 0)
        for (const auto& [t, v] : A.values[f])
          rounded.set_value(static_cast<int>(f), t, v);
    for (std::size_t j = 0; j < comps.size(); ++j) {
      for (std::size_t k = 0; k < coords.size(); ++k) {
        const Rational& w = rv.rounded.vectors[j][k];
        if (w == 0 || coords[k].first < 0) continue;
        Tuple t(coords[k].second.size());
        for (std::size_t p = 0; p < t.size(); ++p)
          t[p] = comps[j].verts[coords[k].second[p]];
        rounded.set_value(coords[k].first, t, w);
      }
    }
    Assignment identity(A.n());
    std::iota(identity.begin(), identity.end(), 0);
    const EditDistanceResult ed = edit_distance(A, rounded, identity);
    require_verify(!ed.infinite, "rounding emptied a symbol");
    edit = ed.value;
    if (csig * edit <= eps) break;
    quality = quality / 2;
  }

  Assignment identity(A.n());
  std::iota(identity.begin(), identity.end(), 0);
  const EditOvercast eo_out = edit_overcast(A, rounded, identity);
  const EditOvercast eo_in = edit_overcast(rounded, A, identity);
  res.edit = edit;
  res.delta = eo_out.delta;
  res.factor = Rational(1) - res.delta;
  res.classes = rv.classes;
  res.class_bound = rv.class_bound;
  require_verify(res.factor >= Rational(1) / (1 + eps),
                 "certified factor falls short of the target");

  // Components with proportional rounded profiles merge exactly; reuse the
  // profile normalization so the merged structure depends only on the class
  // list, never on how many members each class happened to have.
  std::map<std::vector<Rational>, int> class_id;
  std::vector<int> cls(comps.size(), -1);
  std::vector<int> reps;
  std::vector<std::vector<int>> members;
  std::vector<std::vector<Rational>> lambdas;
  for (std::size_t j = 0; j < comps.size(); ++j) {
    const auto key = normalize_profile(rv.rounded.vectors[j]);
    auto it = class_id.find(key);
    if (it == class_id.end()) {
      it = class_id.emplace(key, static_cast<int>(reps.size())).first;
      reps.push_back(static_cast<int>(j));
      members.push_back({});
      lambdas.push_back({});
    }
    cls[j] = it->second;
    const auto& rep_vec = rv.rounded.vectors[reps[it->second]];
    Rational lam = 1;
    for (std::size_t k = 0; k < rep_vec.size(); ++k)
      if (rep_vec[k] != 0) {
        lam = rv.rounded.vectors[j][k] / rep_vec[k];
        break;
      }
    members[it->second].push_back(static_cast<int>(j));
    lambdas[it->second].push_back(lam);
  }

  std::vector<int> kept;
  for (int r : reps)
    kept.insert(kept.end(), comps[r].verts.begin(), comps[r].verts.end());
  std::sort(kept.begin(), kept.end());
  std::vector<int> b_index(A.n(), -1);
  for (std::size_t p = 0; p < kept.size(); ++p) b_index[kept[p]] = static_cast<int>(p);

  std::vector<std::string> names;
  for (int v : kept) names.push_back(A.domain[v]);
  res.B = make_structure(A.sig, names);
  for (std::size_t f = 0; f < A.values.size(); ++f)
    if (A.sig.symbols[f].arity == 0)
      for (const auto& [t, v] : A.values[f]) res.B.set_value(static_cast<int>(f), t, v);
  std::vector<Rational> total_lambda(reps.size(), 0);
  for (std::size_t c = 0; c < reps.size(); ++c)
    for (const Rational& l : lambdas[c]) total_lambda[c] += l;
  for (std::size_t c = 0; c < reps.size(); ++c) {
    const int rj = reps[c];
    for (std::size_t k = 0; k < coords.size(); ++k) {
      const Rational& w = rv.rounded.vectors[rj][k];
      if (w == 0 || total_lambda[c] == 0 || coords[k].first < 0) continue;
      Tuple t(coords[k].second.size());
      for (std::size_t p = 0; p < t.size(); ++p)
        t[p] = b_index[comps[rj].verts[coords[k].second[p]]];
      res.B.set_value(coords[k].first, t, w * total_lambda[c]);
    }
  }

  // Members of a class match coordinatewise, so identical local indexing is
  // already the right bijection; nonzero classes have equal component sizes
  // because a padded coordinate that is zero on one member is zero on all.
  for (std::size_t c = 0; c < reps.size(); ++c)
    for (int j : members[c])
      require_verify(comps[j].verts.size() == comps[reps[c]].verts.size() ||
                         total_lambda[c] == 0,
                     "profile classes mixed component sizes");

  Assignment fold(A.n(), 0);
  for (std::size_t c = 0; c < reps.size(); ++c) {
    const Component& rep = comps[reps[c]];
    for (int j : members[c])
      for (std::size_t i = 0; i < comps[j].verts.size(); ++i) {
        const std::size_t ri = std::min(i, rep.verts.size() - 1);
        fold[comps[j].verts[i]] = b_index[rep.verts[ri]];
      }
  }
  const Overcast out2 = point_mass(fold);

  std::vector<std::vector<Rational>> probs(reps.size());
  for (std::size_t c = 0; c < reps.size(); ++c) {
    if (total_lambda[c] == 0) {
      probs[c].assign(members[c].size(),
                      Rational(1) / Rational(static_cast<long long>(members[c].size())));
    } else {
      for (const Rational& l : lambdas[c]) probs[c].push_back(l / total_lambda[c]);
    }
  }
  const Overcast in2 = couple_parts(
      probs, [&](const std::vector<std::size_t>& pick) {
        Assignment h(res.B.n(), 0);
        for (std::size_t c = 0; c < reps.size(); ++c) {
          const Component& rep = comps[reps[c]];
          const Component& mem = comps[members[c][pick[c]]];
          for (std::size_t i = 0; i < rep.verts.size(); ++i) {
            const std::size_t mi = std::min(i, mem.verts.size() - 1);
            h[b_index[rep.verts[i]]] = mem.verts[mi];
          }
        }
        return h;
      });

  res.out = compose(eo_out.omega, out2);
  res.in = compose(in2, eo_in.omega);
  require_verify(overcast_verify(res.out, A, res.B, res.factor).ok,
                 "reduced structure is not covered at the certified factor");
  require_verify(overcast_verify(res.in, res.B, A, res.factor).ok,
                 "input is not covered back at the certified factor");
  require_verify(res.B.n() <= res.classes * d,
                 "reduced structure exceeds the class-size budget");
  return res;
}

PackedStructure pack(const ValuedStructure& A, int v) {
  A.validate(true);
  require_usage(v >= 0 && v < A.n(), "pack position out of range");

  PackedStructure out;
  out.v_name = A.domain[v];
  out.v_index = v;

  Signature sp;
  std::vector<std::vector<int>> sym_of(A.sig.symbols.size());
  for (std::size_t f = 0; f < A.sig.symbols.size(); ++f) {
    const int ar = A.sig.symbols[f].arity;
    sym_of[f].assign(std::size_t{1} << ar, -1);
    for (int mask = 0; mask < (1 << ar); ++mask) {
      std::string name = A.sig.symbols[f].name + "#";
      bool first = true;
      int kept = 0;
      for (int p = 0; p < ar; ++p) {
        if (mask & (1 << p)) {
          if (!first) name += ",";
          name += std::to_string(p + 1);
          first = false;
        } else {
          ++kept;
        }
      }
      sym_of[f][mask] = static_cast<int>(sp.symbols.size());
      sp.symbols.push_back({name, kept});
    }
  }

  std::vector<std::string> names;
  for (int a = 0; a < A.n(); ++a)
    if (a != v) names.push_back(A.domain[a]);
  out.B = make_structure(sp, names);

  for (std::size_t f = 0; f < A.values.size(); ++f) {
    for (const auto& [t, val] : A.values[f]) {
      int mask = 0;
      Tuple packed;
      for (std::size_t p = 0; p < t.size(); ++p) {
        if (t[p] == v)
          mask |= 1 << p;
        else
          packed.push_back(t[p] < v ? t[p] : t[p] - 1);
      }
      out.B.set_value(sym_of[f][mask], packed, val);
    }
  }
  return out;
}

ValuedStructure unpack(const ValuedStructure& B, const std::string& v_name,
                       int position) {
  B.validate(true);
  const int pos = position < 0 ? B.n() : position;
  require_usage(pos >= 0 && pos <= B.n(), "insert position out of range");
  for (const auto& name : B.domain)
    require_usage(name != v_name, "the reinserted element name is already taken");

  // Recover the original signature: every symbol name ends in '#' plus the
  // ascending list of positions the packed element occupied.
  struct Parsed {
    std::string base;
    std::vector<int> slots;  // 1-based positions of the packed element
    int orig_arity = 0;
  };
  std::vector<Parsed> parsed(B.sig.symbols.size());
  Signature sig;
  std::map<std::string, int> sym_index;
  std::set<std::pair<std::string, std::vector<int>>> seen;
  for (std::size_t f = 0; f < B.sig.symbols.size(); ++f) {
    const std::string& full = B.sig.symbols[f].name;
    const auto cut = full.rfind('#');
    require_usage(cut != std::string::npos,
                  "symbol '" + full + "' does not carry packing positions");
    Parsed p;
    p.base = full.substr(0, cut);
    require_usage(!p.base.empty(), "packed symbol has an empty base name");
    std::string rest = full.substr(cut + 1);
    std::size_t start = 0;
    while (start < rest.size()) {
      std::size_t comma = rest.find(',', start);
      if (comma == std::string::npos) comma = rest.size();
      const std::string piece = rest.substr(start, comma - start);
      require_usage(!piece.empty() &&
                        piece.find_first_not_of("0123456789") == std::string::npos,
                    "bad packing position '" + piece + "' in '" + full + "'");
      const int slot = std::stoi(piece);
      require_usage(slot >= 1, "packing positions are 1-based");
      require_usage(p.slots.empty() || p.slots.back() < slot,
                    "packing positions must be strictly increasing");
      p.slots.push_back(slot);
      start = comma + 1;
    }
    p.orig_arity = B.sig.symbols[f].arity + static_cast<int>(p.slots.size());
    require_usage(p.slots.empty() || p.slots.back() <= p.orig_arity,
                  "packing position exceeds the symbol arity");
    require_usage(seen.emplace(p.base, p.slots).second,
                  "duplicate packed symbol for '" + p.base + "'");
    auto it = sym_index.find(p.base);
    if (it == sym_index.end()) {
      sym_index.emplace(p.base, static_cast<int>(sig.symbols.size()));
      sig.symbols.push_back({p.base, p.orig_arity});
    } else {
      require_usage(sig.symbols[it->second].arity == p.orig_arity,
                    "inconsistent arities for symbol '" + p.base + "'");
    }
    parsed[f] = std::move(p);
  }

  std::vector<std::string> names;
  names.reserve(B.domain.size() + 1);
  for (int a = 0; a < pos; ++a) names.push_back(B.domain[a]);
  names.push_back(v_name);
  for (int a = pos; a < B.n(); ++a) names.push_back(B.domain[a]);
  ValuedStructure A = make_structure(sig, names);

  for (std::size_t f = 0; f < B.values.size(); ++f) {
    const Parsed& p = parsed[f];
    const int sf = sym_index.at(p.base);
    for (const auto& [t, val] : B.values[f]) {
      Tuple full(p.orig_arity);
      std::size_t next = 0, slot = 0;
      for (int q = 0; q < p.orig_arity; ++q) {
        if (slot < p.slots.size() && p.slots[slot] == q + 1) {
          full[q] = pos;
          ++slot;
        } else {
          const int b = t[next++];
          full[q] = b < pos ? b : b + 1;
        }
      }
      A.set_value(sf, full, val);
    }
  }
  return A;
}

namespace {

TdReduction identity_reduction(const ValuedStructure& A) {
  TdReduction res;
  res.B = A;
  Assignment id(A.n());
  std::iota(id.begin(), id.end(), 0);
  res.out = point_mass(id);
  res.in = point_mass(id);
  res.factor = 1;
  return res;
}

TdReduction td_reduce(const ValuedStructure& A, const Rational& eps, int td_cap,
                      long long support_cap) {
  if (A.n() <= 1) return identity_reduction(A);
  const Graph g = gaifman(A);
  const auto comps = components(g);

  if (comps.size() == 1) {
    const ParamResult td = graph_parameter(g, GraphParam::TD, 12, td_cap);
    require_cap(td.exact, "treedepth exceeds the cap");
    int v = -1;
    for (int cand = 0; cand < A.n() && v < 0; ++cand) {
      std::vector<int> keep;
      for (int a = 0; a < A.n(); ++a)
        if (a != cand) keep.push_back(a);
      const ParamResult sub =
          graph_parameter(induced_subgraph(g, keep), GraphParam::TD, 12, td_cap);
      require_cap(sub.exact, "treedepth exceeds the cap");
      if (sub.value == td.value - 1) v = cand;
    }
    require_verify(v >= 0, "no elimination root found in a connected graph");

    // Absorb v into the symbols: every map of the packed structure extends
    // uniquely by sending v to the fresh element, so value transport is
    // exact and the factor passes through unchanged.
    const PackedStructure packed = pack(A, v);
    const TdReduction inner = td_reduce(packed.B, eps, td_cap, support_cap);
    TdReduction res;
    res.B = unpack(inner.B, packed.v_name, -1);
    res.factor = inner.factor;
    res.packs = inner.packs + 1;
    const int v_new = inner.B.n();
    for (const auto& [gmap, pr] : inner.out.support) {
      Assignment ext(A.n(), 0);
      for (int a = 0; a < A.n(); ++a)
        ext[a] = a == v ? v_new : gmap[a < v ? a : a - 1];
      res.out.support.emplace_back(std::move(ext), pr);
    }
    res.out = canonical(res.out);
    for (const auto& [hmap, pr] : inner.in.support) {
      Assignment ext(inner.B.n() + 1, 0);
      for (int b = 0; b < inner.B.n(); ++b)
        ext[b] = hmap[b] < v ? hmap[b] : hmap[b] + 1;
      ext[v_new] = v;
      res.in.support.emplace_back(std::move(ext), pr);
    }
    res.in = canonical(res.in);
    require_verify(overcast_verify(res.out, A, res.B, res.factor).ok,
                   "packed reduction lost coverage on the way out");
    require_verify(overcast_verify(res.in, res.B, A, res.factor).ok,
                   "packed reduction lost coverage on the way back");
    return res;
  }

  // Disconnected: reduce each component, reassemble, then collapse the
  // union of small components.  The budget splits in thirds so that the
  // two stacked guarantees still multiply out under the overall target.
  const Rational e3 = eps / 3;
  std::vector<ValuedStructure> parts;
  std::vector<TdReduction> subs;
  int packs = 0;
  for (std::size_t i = 0; i < comps.size(); ++i) {
    ValuedStructure Ai = induced(A, comps[i]);
    if (i > 0)
      for (std::size_t f = 0; f < Ai.values.size(); ++f)
        if (Ai.sig.symbols[f].arity == 0) Ai.values[f].clear();
    TdReduction ri = td_reduce(Ai, e3, td_cap, support_cap);
    packs += ri.packs;
    parts.push_back(std::move(ri.B));
    subs.push_back(std::move(ri));
  }
  const ValuedStructure U = disjoint_union(parts);
  std::vector<int> offset(parts.size() + 1, 0);
  for (std::size_t i = 0; i < parts.size(); ++i)
    offset[i + 1] = offset[i] + parts[i].n();

  Rational factor_u = 1;
  for (const auto& s : subs) factor_u = std::min(factor_u, s.factor);

  std::vector<std::vector<Rational>> out_probs(subs.size()), in_probs(subs.size());
  for (std::size_t i = 0; i < subs.size(); ++i) {
    for (const auto& [gm, pr] : subs[i].out.support) out_probs[i].push_back(pr);
    for (const auto& [hm, pr] : subs[i].in.support) in_probs[i].push_back(pr);
  }
  const Overcast out_u = couple_parts(
      out_probs, [&](const std::vector<std::size_t>& pick) {
        Assignment gm(A.n(), 0);
        for (std::size_t i = 0; i < subs.size(); ++i) {
          const auto& part = subs[i].out.support[pick[i]].first;
          for (std::size_t a = 0; a < comps[i].size(); ++a)
            gm[comps[i][a]] = offset[i] + part[a];
        }
        return gm;
      });
  const Overcast in_u = couple_parts(
      in_probs, [&](const std::vector<std::size_t>& pick) {
        Assignment hm(U.n(), 0);
        for (std::size_t i = 0; i < subs.size(); ++i) {
          const auto& part = subs[i].in.support[pick[i]].first;
          for (int b = 0; b < parts[i].n(); ++b)
            hm[offset[i] + b] = comps[i][part[b]];
        }
        return hm;
      });

  int dmax = 1;
  for (const auto& p : parts) dmax = std::max(dmax, p.n());
  const SizeReduction sized = cc_to_size(U, e3, dmax);

  TdReduction res;
  res.B = sized.B;
  res.factor = factor_u * sized.factor;
  res.packs = packs;
  res.out = compose(out_u, sized.out, support_cap);
  res.in = compose(sized.in, in_u, support_cap);
  require_verify(res.factor >= Rational(1) / (1 + eps),
                 "stacked factors fell below the level target");
  require_verify(overcast_verify(res.out, A, res.B, res.factor).ok,
                 "assembled reduction lost coverage on the way out");
  require_verify(overcast_verify(res.in, res.B, A, res.factor).ok,
                 "assembled reduction lost coverage on the way back");
  return res;
}

}  // namespace

TdReduction td_to_size(const ValuedStructure& A, const Rational& eps, int td_cap,
                       long long support_cap) {
  A.validate(true);
  require_usage(eps > 0, "target quality must be positive");
  require_usage(is_clean(A), "treedepth reduction requires a clean structure");
  const Rational budget = std::min(eps, Rational(3));
  TdReduction res = td_reduce(A, budget, td_cap, support_cap);
  require_verify(res.factor >= Rational(1) / (1 + eps),
                 "certified factor falls short of the target");
  return res;
}

}  // namespace maxhom
