// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

#include "fnncert/dist.hpp"
#include "fnncert/lp.hpp"

namespace fnncert::inflation {

// Third-order inflation of the three-branch star with one classical source:
// the classical source's branch party is cloned three times. Parties of the
// inflated scenario, in order: A11, A12, A13, A2, A3 (2 inputs / 2 outputs
// each) and B (1 input / 2 outputs).
//
// LP variable packing: column = setting * 64 + outcome with
//   setting = x11*16 + x12*8 + x13*4 + x2*2 + x3   (32 settings)
//   outcome = a11*32 + a12*16 + a13*8 + a2*4 + a3*2 + b  (64 outcomes)
struct InflationProblem {
  enum class RowKind { normalization, no_signaling, symmetry, marginal };
  struct RowInfo {
    RowKind kind;
    long base_input = -1;   // marginal rows: joint input of the relabeled base
    long base_output = -1;  // marginal rows: joint output of the relabeled base
  };

  dist::Scenario base;      // three-branch star scenario
  int classical_source = 1; // 1..3; parties are relabeled so it feeds branch 1
  int copy_count = 3;
  std::vector<RowInfo> rows;  // metadata for every equality row, in order

  static constexpr int num_vars = 2048;  // 64 outcomes x 32 settings

  static long var_index(int setting, int outcome) { return setting * 64L + outcome; }
};

InflationProblem make_inflation_problem(int classical_source);

struct RationalizeOptions {
  Integer denominator_bound = 1000000;
};

// Per-entry best rational approximation with bounded denominator; the largest
// entry of each setting is then adjusted so the setting sums to exactly 1
// (keeps the LP's normalization and marginal rows mutually consistent).
// Entries already rational within the bound are reproduced unchanged.
std::vector<Rational> rationalize_distribution(const dist::ConditionalDistribution& d,
                                               const RationalizeOptions& options = {});

// Compiles the hybrid-inflation feasibility LP for d with the classical
// source at the given placement: positivity (x >= 0 for all 2048 columns),
// 32 normalization equalities, no-signaling equalities for every party and
// pair of settings, symmetry equalities for all 5 nontrivial permutations of
// the three clones, and marginal equalities for every value of the spectator
// settings (x12, x13).
lp::LinearSystem build_inflation_lp(const dist::ConditionalDistribution& d,
                                    const InflationProblem& problem,
                                    const RationalizeOptions& options = {});
lp::LinearSystem build_inflation_lp(const dist::ConditionalDistribution& d, int classical_source,
                                    const RationalizeOptions& options = {});

struct PlacementResult {
  int classical_source = 0;
  bool feasible = true;
  std::optional<lp::FarkasCertificate> certificate;  // exact, when infeasible
  lp::SolveStats stats;
};

struct FnnReport {
  std::array<PlacementResult, 3> placements;
  bool fnn = false;  // all three placements infeasible
};

struct CertifyOptions {
  RationalizeOptions rationalize;
  lp::SolveOptions solve;
  bool parallel = true;  // the three placements are independent
};

// Runs the feasibility test for each classical-source placement. FNN holds
// when every placement is infeasible; certificates are retained for witness
// extraction.
FnnReport certify_fnn(const dist::ConditionalDistribution& d, const CertifyOptions& options = {});

struct TightenOptions {
  RationalizeOptions rationalize;
  lp::SolveOptions solve;
  double tolerance = 1e-3;  // bisection width on the calibrated violation
  int max_bisections = 24;
};

// Replaces a Farkas certificate of the placement's LP by a tighter one:
// bisects on t over dual feasibility problems
//   { y : y^T A <= 0 componentwise, y^T b_uniform = -2, y^T b_target >= t }
// built on the presolved system, then lifts back and verifies exactly.
// Soundness is unchanged (any point of the dual cone is a certificate); only
// the calibrated violation at the target grows. Returns the input certificate
// when tightening is unavailable (e.g. presolve fixed variables).
lp::FarkasCertificate tighten_certificate(const dist::ConditionalDistribution& d,
                                          const InflationProblem& problem,
                                          const lp::FarkasCertificate& cert,
                                          const TightenOptions& options = {});

}  // namespace fnncert::inflation
