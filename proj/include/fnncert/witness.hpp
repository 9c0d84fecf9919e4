// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fnncert/dist.hpp"
#include "fnncert/inflation.hpp"
#include "fnncert/lp.hpp"

namespace fnncert::witness {

// One correlator factor: an ordered party subset with one input per party.
// For binary-outcome parties the sign convention is (-1)^a and the input is
// the party's measurement setting. For the bilocal central party (three
// outcomes, fixed setting) the stored input selects the published sign
// vector instead: 0 -> (+1,+1,-1), 1 -> (+1,-1,0).
struct CorrelatorSymbol {
  std::vector<int> parties;
  std::vector<int> inputs;

  bool operator==(const CorrelatorSymbol&) const = default;
  bool operator<(const CorrelatorSymbol& other) const;
};

struct Term {
  double coeff = 0.0;
  std::vector<CorrelatorSymbol> monomial;  // degree >= 2 allowed; kept as a multiset
};

struct CorrelatorPolynomial {
  double constant = 0.0;
  std::vector<Term> terms;
  double bound = 0.0;  // direction is always <=
};

// Sorts symbols within monomials and terms among themselves, merges terms
// with identical monomials, drops zero coefficients. Idempotent; evaluation
// is invariant under it.
CorrelatorPolynomial canonicalize(const CorrelatorPolynomial& w);

// The star witnesses: I1 (19 terms, constant -2, bound 0) and its images I2,
// I3 under the two nontrivial cyclic relabelings of the branch parties.
CorrelatorPolynomial builtin_fnn_star(int i);

enum class BilocalWitness { C_NS, NS_C };

// The bilocal witnesses R_C-NS and R_NS-C, bound 3, including their
// quadratic terms.
CorrelatorPolynomial builtin_fnn_bilocal(BilocalWitness kind);

struct TermValue {
  Term term;
  double value = 0.0;  // coeff * product of factor values
};

struct Evaluation {
  double value = 0.0;
  std::vector<TermValue> breakdown;
  bool violated = false;  // value > bound
};

// Evaluates a witness on a distribution. A symbol that does not fix every
// party's input is estimated from all consistent joint inputs, pooled with
// the given per-joint-input weights (uniform when omitted); for no-signaling
// distributions the factors are independent of that choice.
Evaluation evaluate(const CorrelatorPolynomial& w, const dist::ConditionalDistribution& d,
                    const std::vector<double>* input_weights = nullptr);

// I_i from GHZ-success-conditioned data only: each pair <XB> + <X> of the
// witness is 2 sum_a (-1)^{sum over X} p(a|b=0,x) p(b=0), and the lone
// constant pairs with the <B> term into -4 p(b=0).
double evaluate_from_b0_data(int i, const dist::ConditionalDistribution& b0_table, double p_b0,
                             const std::vector<double>* input_weights = nullptr);

// Linear witness over the base scenario's probabilities:
//   value(d) = constant + sum_{i,o} coeff[i,o] p(o|i),  FNN flagged by value > 0.
struct ProbabilityWitness {
  dist::Scenario scenario;
  std::vector<Rational> coefficients;  // [input][output] row-major
  Rational constant = 0;
};

double evaluate(const ProbabilityWitness& w, const dist::ConditionalDistribution& d);
Rational evaluate_exact(const ProbabilityWitness& w, const std::vector<Rational>& table);

// Builds the witness carried by a verified Farkas certificate: marginal-row
// multipliers become probability coefficients (joined with the un-relabeling
// of the classical-source placement), normalization-row multipliers the
// constant. The result is scaled so it evaluates to exactly -2 on the uniform
// distribution, making values comparable to the built-in I_i.
ProbabilityWitness from_certificate(const lp::FarkasCertificate& cert,
                                    const inflation::InflationProblem& problem,
                                    const lp::LinearSystem& ls);

// Exact change of basis from probabilities to correlators (all parties
// binary-outcome); evaluations agree on every no-signaling distribution.
CorrelatorPolynomial to_correlator_form(const ProbabilityWitness& w);

std::string to_json(const CorrelatorPolynomial& w, const dist::Scenario& scenario);
std::string to_json(const ProbabilityWitness& w);

}  // namespace fnncert::witness
