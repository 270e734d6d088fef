#include "maxhom/lp.hpp"

#include <algorithm>

#include "maxhom/error.hpp"

namespace maxhom {

void LinearProgram::validate() const {
  require_usage(num_vars >= 0, "negative variable count");
  require_usage(nonneg.empty() || static_cast<int>(nonneg.size()) == num_vars,
                "nonneg flag count mismatch");
  require_usage(var_names.empty() || static_cast<int>(var_names.size()) == num_vars,
                "variable name count mismatch");
  for (const auto& [j, c] : objective)
    require_usage(j >= 0 && j < num_vars, "objective references unknown variable");
  for (const auto& row : rows)
    for (const auto& [j, c] : row.coeffs)
      require_usage(j >= 0 && j < num_vars, "row references unknown variable");
}

Rational dot(const std::vector<Rational>& coeffs, const std::vector<Rational>& x) {
  Rational s(0);
  size_t k = std::min(coeffs.size(), x.size());
  for (size_t i = 0; i < k; ++i)
    if (coeffs[i] != 0 && x[i] != 0) s += coeffs[i] * x[i];
  return s;
}

namespace {

Rational sparse_dot(const std::vector<std::pair<int, Rational>>& coeffs,
                    const std::vector<Rational>& x) {
  Rational s(0);
  for (const auto& [j, c] : coeffs) s += c * x[j];
  return s;
}

// Dense simplex tableau. Column layout: structural columns first (free
// variables split into + and - parts), then one slack/surplus per inequality
// row, then artificials. Two z-c rows are carried through every pivot so
// phase 2 can resume without recomputation and duals read off directly.
struct Tableau {
  int m = 0;
  int total = 0;  // columns excluding the rhs cell
  std::vector<std::vector<Rational>> row;  // m rows of total+1 cells
  std::vector<Rational> obj1, obj2;        // z-c rows, total+1 cells
  std::vector<int> basis;
  std::vector<bool> is_artificial;

  void pivot(int r, int c) {
    auto& pr = row[r];
    Rational piv = pr[c];
    for (auto& v : pr)
      if (v != 0) v /= piv;
    pr[c] = 1;
    auto elim = [&](std::vector<Rational>& rr) {
      Rational f = rr[c];
      if (f == 0) return;
      for (int j = 0; j <= total; ++j)
        if (pr[j] != 0) rr[j] -= f * pr[j];
      rr[c] = 0;
    };
    for (int i = 0; i < m; ++i)
      if (i != r) elim(row[i]);
    elim(obj1);
    elim(obj2);
    basis[r] = c;
  }

  // Bland's rule: entering = least-index improvable column, leaving = ratio
  // minimizer breaking ties by least basic column index. Returns false on
  // unboundedness, reporting the entering column.
  bool run(std::vector<Rational>& obj, int* unbounded_col) {
    while (true) {
      int enter = -1;
      for (int j = 0; j < total; ++j) {
        if (is_artificial[j]) continue;
        if (obj[j] < 0) {
          enter = j;
          break;
        }
      }
      if (enter < 0) return true;
      int leave = -1;
      Rational best;
      for (int i = 0; i < m; ++i) {
        const Rational& a = row[i][enter];
        if (a <= 0) continue;
        Rational ratio = row[i][total] / a;
        if (leave < 0 || ratio < best ||
            (ratio == best && basis[i] < basis[leave])) {
          leave = i;
          best = ratio;
        }
      }
      if (leave < 0) {
        if (unbounded_col) *unbounded_col = enter;
        return false;
      }
      pivot(leave, enter);
    }
  }
};

struct Normalized {
  // Per original row: dense structural coefficients (split layout), sense
  // with rhs >= 0, and whether the original row was negated.
  std::vector<std::vector<Rational>> coeffs;
  std::vector<RowSense> sense;
  std::vector<Rational> rhs;
  std::vector<bool> flipped;
  int cols = 0;                 // split structural columns
  std::vector<int> plus_col;    // per original var
  std::vector<int> minus_col;   // -1 for nonnegative vars
  std::vector<Rational> cost;   // internal (max) objective on split columns
};

Normalized normalize(const LinearProgram& lp) {
  Normalized nz;
  nz.plus_col.resize(lp.num_vars);
  nz.minus_col.assign(lp.num_vars, -1);
  for (int j = 0; j < lp.num_vars; ++j) {
    nz.plus_col[j] = nz.cols++;
    if (!lp.var_nonneg(j)) nz.minus_col[j] = nz.cols++;
  }
  nz.cost.assign(nz.cols, Rational(0));
  Rational sign = lp.obj_sense == ObjSense::Min ? Rational(-1) : Rational(1);
  if (lp.obj_sense != ObjSense::Feasibility) {
    for (const auto& [j, c] : lp.objective) {
      nz.cost[nz.plus_col[j]] += sign * c;
      if (nz.minus_col[j] >= 0) nz.cost[nz.minus_col[j]] -= sign * c;
    }
  }
  for (const auto& r : lp.rows) {
    std::vector<Rational> dense(nz.cols, Rational(0));
    for (const auto& [j, c] : r.coeffs) {
      dense[nz.plus_col[j]] += c;
      if (nz.minus_col[j] >= 0) dense[nz.minus_col[j]] -= c;
    }
    RowSense sen = r.sense;
    Rational b = r.rhs;
    bool flip = b < 0;
    if (flip) {
      for (auto& v : dense) v = -v;
      b = -b;
      if (sen == RowSense::LE)
        sen = RowSense::GE;
      else if (sen == RowSense::GE)
        sen = RowSense::LE;
    }
    nz.coeffs.push_back(std::move(dense));
    nz.sense.push_back(sen);
    nz.rhs.push_back(b);
    nz.flipped.push_back(flip);
  }
  return nz;
}

void verify_optimal(const LinearProgram& lp, const LPOutcome& out) {
  bool maxing = lp.obj_sense != ObjSense::Min;
  // Primal feasibility and objective value.
  Rational obj(0);
  for (const auto& [j, c] : lp.objective) obj += c * out.primal[j];
  if (lp.obj_sense == ObjSense::Feasibility) obj = 0;
  require_verify(obj == out.value, "lp: primal objective mismatch");
  Rational dual_obj(0);
  for (size_t r = 0; r < lp.rows.size(); ++r) {
    const auto& row = lp.rows[r];
    Rational lhs = sparse_dot(row.coeffs, out.primal);
    bool ok = row.sense == RowSense::LE   ? lhs <= row.rhs
              : row.sense == RowSense::GE ? lhs >= row.rhs
                                          : lhs == row.rhs;
    require_verify(ok, "lp: primal violates a row");
    const Rational& y = out.duals[r];
    if (row.sense == RowSense::LE)
      require_verify(maxing ? y >= 0 : y <= 0, "lp: dual sign (LE)");
    if (row.sense == RowSense::GE)
      require_verify(maxing ? y <= 0 : y >= 0, "lp: dual sign (GE)");
    dual_obj += y * row.rhs;
  }
  for (int j = 0; j < lp.num_vars; ++j)
    require_verify(!lp.var_nonneg(j) || out.primal[j] >= 0, "lp: negative variable");
  require_verify(dual_obj == out.value, "lp: strong duality fails");
  // Dual feasibility: reduced costs close against the objective.
  std::vector<Rational> c(lp.num_vars, Rational(0));
  if (lp.obj_sense != ObjSense::Feasibility)
    for (const auto& [j, cv] : lp.objective) c[j] += cv;
  std::vector<Rational> yA(lp.num_vars, Rational(0));
  for (size_t r = 0; r < lp.rows.size(); ++r)
    for (const auto& [j, cv] : lp.rows[r].coeffs) yA[j] += out.duals[r] * cv;
  for (int j = 0; j < lp.num_vars; ++j) {
    if (lp.var_nonneg(j))
      require_verify(maxing ? yA[j] >= c[j] : yA[j] <= c[j], "lp: reduced cost");
    else
      require_verify(yA[j] == c[j], "lp: reduced cost (free variable)");
  }
}

void verify_infeasible(const LinearProgram& lp, const LPOutcome& out) {
  Rational yb(0);
  std::vector<Rational> yA(lp.num_vars, Rational(0));
  for (size_t r = 0; r < lp.rows.size(); ++r) {
    const auto& row = lp.rows[r];
    const Rational& y = out.farkas[r];
    if (row.sense == RowSense::LE) require_verify(y >= 0, "farkas: sign (LE)");
    if (row.sense == RowSense::GE) require_verify(y <= 0, "farkas: sign (GE)");
    for (const auto& [j, cv] : row.coeffs) yA[j] += y * cv;
    yb += y * row.rhs;
  }
  for (int j = 0; j < lp.num_vars; ++j) {
    if (lp.var_nonneg(j))
      require_verify(yA[j] >= 0, "farkas: column condition");
    else
      require_verify(yA[j] == 0, "farkas: column condition (free variable)");
  }
  require_verify(yb < 0, "farkas: certificate not separating");
}

void verify_unbounded(const LinearProgram& lp, const LPOutcome& out) {
  for (int j = 0; j < lp.num_vars; ++j)
    require_verify(!lp.var_nonneg(j) || out.ray[j] >= 0, "ray: negative component");
  for (const auto& row : lp.rows) {
    Rational v = sparse_dot(row.coeffs, out.ray);
    bool ok = row.sense == RowSense::LE   ? v <= 0
              : row.sense == RowSense::GE ? v >= 0
                                          : v == 0;
    require_verify(ok, "ray: violates a row direction");
  }
  Rational cd(0);
  for (const auto& [j, c] : lp.objective) cd += c * out.ray[j];
  bool maxing = lp.obj_sense != ObjSense::Min;
  require_verify(maxing ? cd > 0 : cd < 0, "ray: not improving");
}

} // namespace

LPOutcome solve_lp(const LinearProgram& lp) {
  lp.validate();
  Normalized nz = normalize(lp);
  int m = static_cast<int>(nz.coeffs.size());

  // Column layout: structural | slack/surplus | artificial.
  int n_struct = nz.cols;
  std::vector<int> slack_col(m, -1), art_col(m, -1);
  int total = n_struct;
  for (int r = 0; r < m; ++r)
    if (nz.sense[r] != RowSense::EQ) slack_col[r] = total++;
  for (int r = 0; r < m; ++r)
    if (nz.sense[r] != RowSense::LE) art_col[r] = total++;

  Tableau tab;
  tab.m = m;
  tab.total = total;
  tab.row.assign(m, std::vector<Rational>(total + 1, Rational(0)));
  tab.obj1.assign(total + 1, Rational(0));
  tab.obj2.assign(total + 1, Rational(0));
  tab.basis.assign(m, -1);
  tab.is_artificial.assign(total, false);
  // init_col[r]: the column whose starting tableau column is the r-th
  // identity vector; its final entries give B^{-1} e_r for dual extraction.
  std::vector<int> init_col(m, -1);
  for (int r = 0; r < m; ++r) {
    for (int j = 0; j < n_struct; ++j) tab.row[r][j] = nz.coeffs[r][j];
    tab.row[r][total] = nz.rhs[r];
    if (slack_col[r] >= 0)
      tab.row[r][slack_col[r]] = nz.sense[r] == RowSense::LE ? 1 : -1;
    if (art_col[r] >= 0) {
      tab.row[r][art_col[r]] = 1;
      tab.is_artificial[art_col[r]] = true;
      tab.basis[r] = art_col[r];
      init_col[r] = art_col[r];
    } else {
      tab.basis[r] = slack_col[r];
      init_col[r] = slack_col[r];
    }
  }
  // Phase-1 z-c row: cost -1 on artificials, basis = slacks + artificials.
  for (int j = 0; j <= total; ++j) {
    Rational z(0);
    for (int r = 0; r < m; ++r)
      if (art_col[r] >= 0) z -= tab.row[r][j];
    tab.obj1[j] = z;
  }
  for (int j = 0; j < total; ++j)
    if (tab.is_artificial[j]) tab.obj1[j] += 1;
  // Phase-2 z-c row: basis costs are all zero initially.
  for (int j = 0; j < n_struct; ++j) tab.obj2[j] = -nz.cost[j];

  LPOutcome out;
  tab.run(tab.obj1, nullptr);  // phase 1 is bounded
  if (tab.obj1[total] < 0) {
    // Infeasible; duals of the phase-1 optimum give the Farkas certificate.
    out.status = LPStatus::Infeasible;
    out.farkas.assign(m, Rational(0));
    for (int r = 0; r < m; ++r) {
      Rational y = tab.obj1[init_col[r]];
      if (art_col[r] >= 0) y -= 1;  // z-c stores z minus the -1 cost
      out.farkas[r] = nz.flipped[r] ? -y : y;
    }
    verify_infeasible(lp, out);
    return out;
  }
  // Drive leftover artificials out of the basis (degenerate pivots; rows
  // with no eligible column are redundant and stay inert).
  for (int r = 0; r < m; ++r) {
    if (!tab.is_artificial[tab.basis[r]]) continue;
    for (int j = 0; j < total; ++j) {
      if (tab.is_artificial[j]) continue;
      if (tab.row[r][j] != 0) {
        tab.pivot(r, j);
        break;
      }
    }
  }

  int unbounded_col = -1;
  if (!tab.run(tab.obj2, &unbounded_col)) {
    out.status = LPStatus::Unbounded;
    out.ray.assign(lp.num_vars, Rational(0));
    std::vector<Rational> dir(total, Rational(0));
    dir[unbounded_col] = 1;
    for (int i = 0; i < m; ++i) dir[tab.basis[i]] = -tab.row[i][unbounded_col];
    for (int j = 0; j < lp.num_vars; ++j) {
      out.ray[j] = dir[nz.plus_col[j]];
      if (nz.minus_col[j] >= 0) out.ray[j] -= dir[nz.minus_col[j]];
    }
    verify_unbounded(lp, out);
    return out;
  }

  out.status = LPStatus::Optimal;
  std::vector<Rational> xs(total, Rational(0));
  for (int i = 0; i < m; ++i) xs[tab.basis[i]] = tab.row[i][total];
  out.primal.assign(lp.num_vars, Rational(0));
  for (int j = 0; j < lp.num_vars; ++j) {
    out.primal[j] = xs[nz.plus_col[j]];
    if (nz.minus_col[j] >= 0) out.primal[j] -= xs[nz.minus_col[j]];
  }
  Rational internal_value = tab.obj2[total];
  out.value = lp.obj_sense == ObjSense::Min ? -internal_value : internal_value;
  out.duals.assign(m, Rational(0));
  for (int r = 0; r < m; ++r) {
    Rational y = tab.obj2[init_col[r]];  // slack/artificial phase-2 cost is 0
    if (nz.flipped[r]) y = -y;
    out.duals[r] = lp.obj_sense == ObjSense::Min ? -y : y;
  }
  verify_optimal(lp, out);
  return out;
}

FarkasOutcome check_farkas_variant(const std::vector<std::vector<Rational>>& M,
                                   const std::vector<Rational>& b, int variant) {
  require_usage(variant == 1 || variant == 2, "farkas variant must be 1 or 2");
  require_usage(M.size() == b.size(), "matrix/rhs size mismatch");
  size_t n = M.empty() ? 0 : M[0].size();
  for (const auto& row : M)
    require_usage(row.size() == n, "ragged matrix");

  LinearProgram lp;
  lp.num_vars = static_cast<int>(n);
  lp.obj_sense = ObjSense::Feasibility;
  {
    LPRow norm;
    for (size_t j = 0; j < n; ++j) norm.coeffs.push_back({static_cast<int>(j), Rational(1)});
    norm.sense = RowSense::EQ;
    norm.rhs = 1;
    lp.rows.push_back(std::move(norm));
  }
  for (size_t r = 0; r < M.size(); ++r) {
    LPRow row;
    for (size_t j = 0; j < n; ++j)
      if (M[r][j] != 0) row.coeffs.push_back({static_cast<int>(j), M[r][j]});
    row.sense = variant == 1 ? RowSense::GE : RowSense::LE;
    row.rhs = b[r];
    lp.rows.push_back(std::move(row));
  }
  LPOutcome sol = solve_lp(lp);
  FarkasOutcome res;
  if (sol.status == LPStatus::Optimal) {
    res.x_side = true;
    res.x = sol.primal;
    Rational total(0);
    for (const auto& v : res.x) {
      require_verify(v >= 0, "farkas: negative distribution entry");
      total += v;
    }
    require_verify(total == 1, "farkas: distribution does not sum to 1");
    for (size_t r = 0; r < M.size(); ++r) {
      Rational lhs = dot(M[r], res.x);
      require_verify(variant == 1 ? lhs >= b[r] : lhs <= b[r],
                     "farkas: x-side row violated");
    }
    return res;
  }
  require_verify(sol.status == LPStatus::Infeasible, "farkas: unexpected LP status");
  // The certificate's multiplier on the normalization row supplies the
  // strict separation; the inequality-row multipliers give y directly
  // (negated for variant 1, whose rows entered as GE).
  res.x_side = false;
  res.y.assign(M.size(), Rational(0));
  for (size_t r = 0; r < M.size(); ++r) {
    Rational y = sol.farkas[r + 1];
    res.y[r] = variant == 1 ? -y : y;
    require_verify(res.y[r] >= 0, "farkas: negative y");
  }
  Rational yb(0);
  for (size_t r = 0; r < M.size(); ++r) yb += res.y[r] * b[r];
  for (size_t j = 0; j < n; ++j) {
    Rational col(0);
    for (size_t r = 0; r < M.size(); ++r) col += res.y[r] * M[r][j];
    require_verify(variant == 1 ? col < yb : col > yb,
                   "farkas: y-side column not separated");
  }
  return res;
}

} // namespace maxhom
