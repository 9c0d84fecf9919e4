// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fnncert/rational.hpp"

namespace fnncert::lp {

// One sparse constraint row: sorted, unique column indices.
struct SparseRow {
  std::vector<std::pair<int32_t, Rational>> terms;

  void add(int32_t col, const Rational& coeff);
  void normalize();  // sort by column, merge duplicates, drop zeros
};

// Linear feasibility system
//   A_eq x  = b_eq
//   A_ge x >= b_ge
//   x >= 0
// All variables are nonnegative (the positivity block of the feasibility
// problems compiled here).
struct LinearSystem {
  int num_vars = 0;
  std::vector<SparseRow> eq;
  std::vector<Rational> eq_rhs;
  std::vector<SparseRow> ge;
  std::vector<Rational> ge_rhs;
  std::vector<std::string> labels;  // optional column labels

  void add_eq(SparseRow row, Rational rhs);
  void add_ge(SparseRow row, Rational rhs);
};

// Infeasibility certificate: y_eq free, y_ge >= 0 entrywise, with
//   (y_eq^T A_eq + y_ge^T A_ge)_j <= 0 for every column j, and
//   y_eq^T b_eq + y_ge^T b_ge > 0.
// Together with x >= 0 this proves no feasible point exists.
struct FarkasCertificate {
  std::vector<Rational> y_eq;
  std::vector<Rational> y_ge;
};

struct SolveStats {
  std::string method;     // which path produced the result
  long float_pivots = 0;
  long exact_pivots = 0;
};

struct SolveResult {
  bool feasible = false;
  std::optional<std::vector<Rational>> point;       // exact, if feasible
  std::optional<FarkasCertificate> certificate;     // exact, if infeasible
  SolveStats stats;
};

struct SolveOptions {
  bool use_presolve = true;
  bool use_float_path = true;  // double simplex first, exact recovery after
  long max_pivots = 5'000'000;
};

// Decides feasibility with an exact answer either way: a rational point
// satisfying every constraint, or an exactly verified Farkas certificate.
SolveResult feasibility(const LinearSystem& ls, const SolveOptions& options = {});

// Exact check of both certificate conditions. No tolerances.
bool verify_certificate(const LinearSystem& ls, const FarkasCertificate& cert);

// Exact check that x satisfies every constraint of ls.
bool check_point(const LinearSystem& ls, const std::vector<Rational>& x);

// Certificate with integer entries: clear denominators, divide by gcd.
FarkasCertificate integerize_certificate(const FarkasCertificate& cert);

std::string certificate_to_json(const FarkasCertificate& cert);
FarkasCertificate certificate_from_json(const std::string& text);

// Text export in an LP-format-shaped syntax with exact "p/q" coefficients,
// for cross-checking against external solvers.
std::string to_lp_text(const LinearSystem& ls);

// ---- internals shared by the solver implementation and its tests ----
namespace detail {

// Result of presolve: a reduced system plus the data needed to lift a reduced
// certificate or point back to the original one.
struct Presolved;

struct PresolveOutcome {
  // When presolve alone decides the instance:
  std::optional<FarkasCertificate> certificate;  // infeasible during reduction
  std::optional<std::vector<Rational>> point;    // fully solved
  std::shared_ptr<Presolved> reduced;            // otherwise: reduced system
};

PresolveOutcome presolve(const LinearSystem& ls);
const LinearSystem& reduced_system(const Presolved& ps);
// Maps of reduced row index -> original eq row index (for RHS substitution in
// certificate tightening; only valid when presolve performed no variable fixes).
const std::vector<int>& reduced_eq_origin(const Presolved& ps);
bool rhs_invariant(const Presolved& ps);  // true if no RHS-altering rule fired
FarkasCertificate lift_certificate(const Presolved& ps, const FarkasCertificate& reduced_cert);
std::vector<Rational> lift_point(const Presolved& ps, const std::vector<Rational>& reduced_point);

// Phase-1 simplex over doubles. Returns feasibility verdict, a basic point,
// row duals, and the final basis (column per row).
struct FloatResult {
  bool feasible = false;
  std::vector<double> x;      // structural variables
  std::vector<double> y;      // row multipliers (certificate when infeasible)
  std::vector<int> basis;     // basic column per row (standard-form columns)
  long pivots = 0;
  bool ok = false;            // false on iteration-limit or numeric failure
};
FloatResult float_phase1(const LinearSystem& ls, long max_pivots);

// Phase-1 simplex in exact arithmetic with Bland's rule.
struct ExactResult {
  bool feasible = false;
  std::vector<Rational> x;
  std::vector<Rational> y;
  long pivots = 0;
  bool ok = false;
};
ExactResult exact_phase1(const LinearSystem& ls, long max_pivots);

// Exact solve of A_S x_S = b restricted to support columns; empty on
// inconsistency or rank deficiency that leaves the support undetermined.
std::optional<std::vector<Rational>> solve_on_support(const LinearSystem& ls,
                                                      const std::vector<int>& support);

}  // namespace detail

}  // namespace fnncert::lp
