// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "fnncert/inflation.hpp"
#include "fnncert/qsim.hpp"
#include "fnncert/witness.hpp"
#include "testutil.hpp"

using namespace fnncert;

namespace {

inflation::RationalizeOptions bound(long b) {
  inflation::RationalizeOptions o;
  o.denominator_bound = b;
  return o;
}

}  // namespace

TEST_CASE("inflation LP has the documented block structure") {
  const auto problem = inflation::make_inflation_problem(1);
  const auto d = dist::ConditionalDistribution::uniform(dist::Scenario::star());
  const auto ls = inflation::build_inflation_lp(d, problem);
  CHECK(ls.num_vars == 2048);
  CHECK(ls.eq.size() == problem.rows.size());
  size_t norm = 0, ns = 0, sym = 0, marg = 0;
  for (const auto& info : problem.rows) {
    switch (info.kind) {
      case inflation::InflationProblem::RowKind::normalization: ++norm; break;
      case inflation::InflationProblem::RowKind::no_signaling: ++ns; break;
      case inflation::InflationProblem::RowKind::symmetry: ++sym; break;
      case inflation::InflationProblem::RowKind::marginal: ++marg; break;
    }
  }
  CHECK(norm == 32);
  CHECK(ns == 2560);
  CHECK(marg == 512);
  CHECK(sym > 4000);  // five nontrivial relabelings, duplicates included
  CHECK_THROWS(inflation::make_inflation_problem(0));
}

TEST_CASE("rationalization is exact on rational inputs and renormalizes") {
  const auto hybrid = testutil::rational_hybrid(17);
  const auto q = inflation::rationalize_distribution(hybrid.distribution, bound(10000));
  const dist::Scenario sc = dist::Scenario::star();
  // exact rational entries with small denominators are reproduced bit-exactly
  for (size_t k = 0; k < q.size(); ++k)
    CHECK(q[k] == hybrid.exact_table[k]);
  // quantum entries are approximated but each setting still sums to one
  const auto d = qsim::simulate_star({testutil::kOptTheta0, testutil::kOptTheta1});
  const auto qq = inflation::rationalize_distribution(d, bound(10000));
  for (long i = 0; i < sc.joint_inputs(); ++i) {
    Rational sum = 0;
    for (long o = 0; o < sc.joint_outputs(); ++o) sum += qq[i * sc.joint_outputs() + o];
    CHECK(sum == 1);
  }
}

TEST_CASE("uniform distribution is feasible for every placement") {
  const auto d = dist::ConditionalDistribution::uniform(dist::Scenario::star());
  for (int k = 1; k <= 3; ++k) {
    const auto ls = inflation::build_inflation_lp(d, k);
    const auto res = lp::feasibility(ls);
    CHECK(res.feasible);
  }
}

TEST_CASE("deterministic strategies are feasible") {
  for (const auto [f1, f2, f3, b] : {std::array<int, 4>{0, 0, 0, 0},
                                     std::array<int, 4>{1, 2, 3, 1},
                                     std::array<int, 4>{2, 2, 1, 0}}) {
    const auto d = testutil::det_star(f1, f2, f3, b);
    const auto ls = inflation::build_inflation_lp(d, 1);
    const auto res = lp::feasibility(ls);
    CHECK(res.feasible);
  }
}

TEST_CASE("rational hybrid models are feasible for the matching placement") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto hybrid = testutil::rational_hybrid(seed);
    const auto ls = inflation::build_inflation_lp(hybrid.distribution, 1, bound(100000));
    const auto res = lp::feasibility(ls);
    CHECK(res.feasible);
  }
}

TEST_CASE("compiler equivariance under joint relabeling") {
  const auto hybrid = testutil::rational_hybrid(23);
  // move the classical source from branch 1 to branch 2
  const auto moved = dist::permute_parties(hybrid.distribution, {1, 0, 2, 3});
  const auto res1 = lp::feasibility(inflation::build_inflation_lp(hybrid.distribution, 1));
  const auto res2 = lp::feasibility(inflation::build_inflation_lp(moved, 2));
  CHECK(res1.feasible == res2.feasible);
}

TEST_CASE("ideal star is infeasible and certified for placement 1") {
  const auto d = qsim::simulate_star({testutil::kOptTheta0, testutil::kOptTheta1});
  const auto problem = inflation::make_inflation_problem(1);
  const auto ls = inflation::build_inflation_lp(d, problem, bound(10000));
  const auto res = lp::feasibility(ls);
  REQUIRE_FALSE(res.feasible);
  REQUIRE(res.certificate.has_value());
  CHECK(lp::verify_certificate(ls, *res.certificate));

  // witness extraction: calibrated to -2 on uniform, positive on the target
  const auto w = witness::from_certificate(*res.certificate, problem, ls);
  std::vector<Rational> unif(16 * 8, Rational(1, 16));
  CHECK(witness::evaluate_exact(w, unif) == Rational(-2));
  CHECK(witness::evaluate(w, d) > 0.0);

  // sound on deterministic strategies (exact rational check)
  for (int f1 = 0; f1 < 4; ++f1)
    for (int b = 0; b < 2; ++b)
      CHECK(witness::evaluate_exact(w, testutil::det_star_exact(f1, 1, 2, b)) <= 0);

  // probability and correlator forms agree on no-signaling distributions
  const auto poly = witness::to_correlator_form(w);
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 20; ++trial) {
    // random mixture of deterministic strategies and the quantum point
    std::vector<double> table(16 * 8, 0.0);
    double wsum = 0.0;
    for (int comp = 0; comp < 4; ++comp) {
      const double wt = 1.0 + static_cast<double>(rng() % 16);
      const auto part = testutil::det_star(static_cast<int>(rng() % 4), static_cast<int>(rng() % 4),
                                           static_cast<int>(rng() % 4), static_cast<int>(rng() % 2));
      for (size_t k = 0; k < table.size(); ++k) table[k] += wt * part.table()[k];
      wsum += wt;
    }
    for (size_t k = 0; k < table.size(); ++k) table[k] = table[k] / wsum * 0.5 + d.table()[k] * 0.5;
    const dist::ConditionalDistribution mix(dist::Scenario::star(), std::move(table));
    CHECK(witness::evaluate(w, mix) ==
          doctest::Approx(witness::evaluate(poly, mix).value).epsilon(1e-12));
  }
}

TEST_CASE("refused witness extraction for unverified certificates") {
  const auto d = dist::ConditionalDistribution::uniform(dist::Scenario::star());
  const auto problem = inflation::make_inflation_problem(1);
  const auto ls = inflation::build_inflation_lp(d, problem);
  lp::FarkasCertificate junk;
  junk.y_eq.assign(ls.eq.size(), Rational(0));
  CHECK_THROWS(witness::from_certificate(junk, problem, ls));
}
