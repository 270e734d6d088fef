#pragma once

#include <string>
#include <vector>

#include "maxhom/rational.hpp"

namespace maxhom {

enum class RowSense { LE, EQ, GE };
enum class ObjSense { Max, Min, Feasibility };

struct LPRow {
  std::vector<std::pair<int, Rational>> coeffs;  // sparse (var, coefficient)
  RowSense sense = RowSense::LE;
  Rational rhs;
};

struct LinearProgram {
  int num_vars = 0;
  ObjSense obj_sense = ObjSense::Max;
  std::vector<std::pair<int, Rational>> objective;  // sparse; empty = 0
  std::vector<LPRow> rows;
  // Empty means every variable is >= 0; otherwise one flag per variable
  // (false = free, handled by an internal sign split).
  std::vector<bool> nonneg;
  std::vector<std::string> var_names;  // optional, for reports

  void validate() const;
  bool var_nonneg(int j) const { return nonneg.empty() ? true : nonneg.at(j); }
};

enum class LPStatus { Optimal, Infeasible, Unbounded };

// Every returned witness is re-verified exactly against the input before the
// solver returns; a verification failure is a library bug and throws.
//
// Dual conventions (status Optimal):  value = sum_r duals[r]*rhs[r]; for Max,
// rows with sense LE carry duals >= 0 and GE rows <= 0 (flipped for Min), EQ
// rows are free; reduced costs close: sum_r duals[r]*A[r][j] >= obj[j] for
// nonnegative j under Max (<= under Min), with equality for free variables.
//
// Infeasibility certificate: farkas[r] >= 0 on LE rows, <= 0 on GE rows,
// free on EQ; sum_r farkas[r]*A[r][j] >= 0 for nonnegative j (= 0 for free);
// sum_r farkas[r]*rhs[r] < 0.
//
// Unbounded: ray is an improving feasible direction: A*ray respects every
// row sense against 0, ray >= 0 on nonnegative variables, obj^T ray > 0
// under Max (< 0 under Min).
struct LPOutcome {
  LPStatus status = LPStatus::Optimal;
  Rational value;
  std::vector<Rational> primal;
  std::vector<Rational> duals;
  std::vector<Rational> farkas;
  std::vector<Rational> ray;
};

LPOutcome solve_lp(const LinearProgram& lp);

// Dense row evaluation helper: sum of coeffs[j]*x[j].
Rational dot(const std::vector<Rational>& coeffs, const std::vector<Rational>& x);

// The two dualities used throughout: for an m x n matrix M (dense rows),
// exactly one of the following holds, and the returned witness is verified.
//   variant 1:  some x >= 0 with sum x = 1 and  M x >= b   (x_side)
//           or  some y >= 0 with (y^T M)_c < y^T b for every column c.
//   variant 2:  some x >= 0 with sum x = 1 and  M x <= b   (x_side)
//           or  some y >= 0 with (y^T M)_c > y^T b for every column c.
struct FarkasOutcome {
  bool x_side = false;
  std::vector<Rational> x;  // size n when x_side
  std::vector<Rational> y;  // size m otherwise
};

FarkasOutcome check_farkas_variant(const std::vector<std::vector<Rational>>& M,
                                   const std::vector<Rational>& b, int variant);

} // namespace maxhom
