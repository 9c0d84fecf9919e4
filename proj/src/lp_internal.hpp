// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <variant>
#include <vector>

#include "fnncert/lp.hpp"

namespace fnncert::lp::detail {

// Presolve transformation records. Each stores exactly the stage content
// needed to lift a certificate or a point back across the transformation.
// `eq_entries`/`ge_entries` are (row id, coefficient) lists in original row
// ids, capturing a column's content at the moment the rule fired.

struct ColContent {
  std::vector<std::pair<int, Rational>> eq_entries;
  std::vector<std::pair<int, Rational>> ge_entries;
};

// x[col] fixed to `value` by singleton eq row `row` (coefficient row_coeff);
// row = -1 for a column that was empty at that stage (value 0, no dial).
struct RecFixVar {
  int col = -1;
  Rational value;
  int row = -1;
  Rational row_coeff;
  ColContent content;  // excluding `row`
};

// Equality row `row` with all coefficients of one sign and rhs 0: every
// involved column is fixed to 0.
struct RecForcing {
  int row = -1;
  std::vector<std::pair<int, Rational>> row_terms;
  std::vector<std::pair<int, ColContent>> cols;  // contents exclude `row`
};

// Homogeneous doubleton eq row `row`: c_u x_u + c_v x_v = 0 with opposite
// signs, i.e. x_u = gamma x_v (gamma > 0); column u merged into column v.
struct RecMerge {
  int row = -1;
  int col_u = -1;
  int col_v = -1;
  Rational gamma;
  Rational c_u;
  ColContent u_content;  // excluding `row`
};

// Row dropped as trivial (0 = 0) or duplicate; its multiplier lifts as 0.
struct RecDropRow {
  int row = -1;
};

using Record = std::variant<RecFixVar, RecForcing, RecMerge, RecDropRow>;

struct Presolved {
  int orig_vars = 0;
  size_t orig_eq = 0;
  size_t orig_ge = 0;
  std::vector<Record> records;  // chronological
  LinearSystem reduced;
  std::vector<int> red2orig_col;
  std::vector<int> red2orig_eq;
  std::vector<int> red2orig_ge;
  // true when no rule changed any right-hand side (merges/dedupes/zero-fixes
  // only); lets callers substitute alternative RHS vectors row-by-row
  bool rhs_transplantable = true;
};

}  // namespace fnncert::lp::detail
