#include "maxhom/ptas.hpp"

#include <algorithm>
#include <cstddef>
#include <vector>

#include "maxhom/error.hpp"
#include "maxhom/exact.hpp"
#include "maxhom/relax.hpp"

namespace maxhom {

namespace {

// opt(A, C) never beats sum_f ||A_f||_1 * max over C's f-table.
Rational trivial_upper(const ValuedStructure& A, const ValuedStructure& C) {
  Rational total = 0;
  for (std::size_t f = 0; f < A.sig.symbols.size(); ++f) {
    Rational best = 0;
    for (const auto& [t, v] : C.values[f])
      if (v > best) best = v;
    total += A.norm1_symbol(static_cast<int>(f)) * best;
  }
  return total;
}

} // namespace

PtasReport ptas_value(const ValuedStructure& A, const ValuedStructure& C,
                      const Rational& eps, const PliabilityWitness& witness,
                      long long var_cap, int tw_cap) {
  A.validate();
  C.validate();
  witness.B.validate();
  require_usage(same_signature(A, C) && same_signature(A, witness.B),
                "structures must share one signature");
  require_usage(eps >= 0, "epsilon must be nonnegative");

  const Rational r = Rational(1) / (Rational(1) + eps);
  require_verify(overcast_verify(witness.out, A, witness.B, r).ok,
                 "witness does not cover the stand-in at the factor");
  require_verify(overcast_verify(witness.in, witness.B, A, r).ok,
                 "witness does not cover back at the factor");

  const ParamResult tw =
      graph_parameter(gaifman(witness.B), GraphParam::TW, tw_cap);
  require_cap(tw.exact, "stand-in treewidth exceeds the exact cap");

  PtasReport rep;
  rep.level = std::max(static_cast<int>(tw.value) + 1, A.sig.max_arity());
  rep.upper = opt_sa(A, C, rep.level, var_cap);
  rep.ratio = (Rational(1) + eps) * (Rational(1) + eps);
  rep.lower = r * r * rep.upper;
  return rep;
}

DecompositionProvider min_fill_provider() {
  return [](const Graph& g) { return tree_decomposition(g, TDMethod::MinFill); };
}

PtasReport ptas_constructive(const ValuedStructure& A,
                             const ValuedStructure& C,
                             const FractionalModulator& pi,
                             const DecompositionProvider& provider,
                             long long state_cap) {
  A.validate();
  C.validate();
  require_usage(same_signature(A, C), "structures must share one signature");
  require_usage(pi.kind == ModulatorKind::Vertex,
                "constructive mode needs a vertex modulator");
  const ModulatorReport check = modulator_verify(gaifman(A), pi);
  require_verify(check.ok, "modulator failed verification");

  const int n = A.n();
  const int nc = C.n();
  require_usage(nc >= 1 || n == 0, "target needs at least one element");

  Rational best_value(-1);
  Assignment best;
  for (const auto& [X, prob] : pi.vertex_support) {
    std::vector<char> removed(n, 0);
    for (int v : X) removed[v] = 1;
    std::vector<int> keep;
    for (int v = 0; v < n; ++v)
      if (!removed[v]) keep.push_back(v);

    Assignment h(n, -1);
    if (!keep.empty()) {
      const ValuedStructure sub = induced(A, keep);
      const TreeDecomposition T = provider(gaifman(sub));
      const OptResult part = opt_treedec(sub, C, T, state_cap);
      for (std::size_t i = 0; i < keep.size(); ++i)
        h[keep[i]] = part.witness[i];
    }
    for (int v : X) {
      // Score each image by the tuples through v whose other entries are
      // already placed; later removed vertices stay out of the tally.
      Rational best_gain(-1);
      int best_image = 0;
      for (int b = 0; b < nc; ++b) {
        h[v] = b;
        Rational gain = 0;
        for (std::size_t f = 0; f < A.sig.symbols.size(); ++f)
          for (const auto& [t, w] : A.values[f]) {
            bool through = false;
            bool ready = true;
            for (int x : t) {
              if (x == v) through = true;
              if (h[x] < 0) {
                ready = false;
                break;
              }
            }
            if (!through || !ready) continue;
            Tuple image(t.size());
            for (std::size_t p = 0; p < t.size(); ++p) image[p] = h[t[p]];
            gain += w * C.value(static_cast<int>(f), image);
          }
        if (gain > best_gain) {
          best_gain = gain;
          best_image = b;
        }
      }
      h[v] = best_image;
    }
    const Rational value = val(A, C, h);
    if (value > best_value || (value == best_value && h < best)) {
      best_value = value;
      best = h;
    }
  }

  PtasReport rep;
  rep.lower = best_value;
  rep.witness = best;
  const Rational loss = Rational(A.sig.max_arity()) * check.thinness;
  const Rational trivial = trivial_upper(A, C);
  if (loss < 1) {
    const Rational guaranteed = rep.lower / (Rational(1) - loss);
    rep.upper = std::min(trivial, guaranteed);
  } else {
    rep.upper = trivial;
  }
  rep.ratio = rep.lower > 0 ? rep.upper / rep.lower : Rational(1);
  return rep;
}

} // namespace maxhom
