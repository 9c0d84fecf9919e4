// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <optional>
#include <string>
#include <vector>

namespace fnncert::dist {

struct Party {
  std::string name;
  int num_inputs = 1;   // fixed-input parties have cardinality 1
  int num_outputs = 2;
};

// Ordered party list of a network scenario. Joint inputs and outputs are
// indexed row-major with party 0 most significant.
class Scenario {
 public:
  Scenario() = default;
  explicit Scenario(std::vector<Party> parties);

  static Scenario star();     // A1, A2, A3 (2 in / 2 out), B (1 in / 2 out)
  static Scenario bilocal();  // A (2/2), B (1 in / 3 out), C (2/2)

  int num_parties() const { return static_cast<int>(parties_.size()); }
  const Party& party(int i) const { return parties_.at(i); }
  const std::vector<Party>& parties() const { return parties_; }
  int party_index(const std::string& name) const;  // -1 if absent

  long joint_inputs() const { return joint_inputs_; }
  long joint_outputs() const { return joint_outputs_; }

  long input_index(const std::vector<int>& inputs) const;
  long output_index(const std::vector<int>& outputs) const;
  std::vector<int> unpack_input(long index) const;
  std::vector<int> unpack_output(long index) const;

  bool operator==(const Scenario& other) const;

 private:
  std::vector<Party> parties_;
  long joint_inputs_ = 1;
  long joint_outputs_ = 1;
};

struct ValidationReport {
  double max_negative_entry = 0.0;       // most negative entry, 0 if none
  double normalization_residual = 0.0;   // max |sum_o p(o|i) - 1|
  std::vector<double> no_signaling_residual;  // per party: max marginal shift
                                              // caused by that party's input
  bool valid = false;  // all residuals within declared tolerances
};

// Dense conditional probability table p(outputs | inputs) over a Scenario.
// Entries in [-1e-12, ...) are clamped to 0 at construction; anything more
// negative, or a per-input sum off 1 by more than 1e-9, is rejected.
class ConditionalDistribution {
 public:
  ConditionalDistribution(Scenario scenario, std::vector<double> table);

  static ConditionalDistribution uniform(const Scenario& scenario);

  const Scenario& scenario() const { return scenario_; }
  const std::vector<double>& table() const { return table_; }
  double p(long input_index, long output_index) const;
  double p(const std::vector<int>& inputs, const std::vector<int>& outputs) const;

 private:
  Scenario scenario_;
  std::vector<double> table_;  // [input][output] row-major
};

ValidationReport validate(const ConditionalDistribution& d);

// <prod_{p in parties} (-1)^{a_p}> at the given full joint input.
// Every party in the subset must be binary-outcome.
double correlator(const ConditionalDistribution& d, const std::vector<int>& inputs,
                  const std::vector<int>& parties);

enum class BilocalKind { B0, B1 };  // sign vectors (+1,+1,-1) and (+1,-1,0)

// <A_x B_k C_z> of the bilocal scenario.
double bilocal_correlator(const ConditionalDistribution& d, int x, int z, BilocalKind kind);

// Generalized signed correlator: product over (party, per-outcome signs).
double signed_correlator(const ConditionalDistribution& d, const std::vector<int>& inputs,
                         const std::vector<std::pair<int, std::vector<double>>>& signs);

struct Conditioning {
  int party = -1;
  int outcome = 0;
};

// Sum out the parties not in `keep` (ordered subset of party indices). With a
// conditioning clause, fixes that party's outcome and renormalizes per input;
// the conditioning party must have input cardinality 1 and must not be kept.
ConditionalDistribution marginal(const ConditionalDistribution& d, const std::vector<int>& keep,
                                 const std::optional<Conditioning>& condition = std::nullopt);

// Relabels parties: data of party i moves to slot perm[i]. Parties mapped onto
// each other must have identical cardinalities.
ConditionalDistribution permute_parties(const ConditionalDistribution& d,
                                        const std::vector<int>& perm);

// I(A_i ; A_j) in bits from the pairwise marginal at the given inputs,
// with 0 log 0 = 0. log_base = 2.0 by default.
double mutual_information(const ConditionalDistribution& d, int party_i, int party_j,
                          int input_i, int input_j, double log_base = 2.0);

std::string to_json(const ConditionalDistribution& d);
ConditionalDistribution distribution_from_json(const std::string& text);

}  // namespace fnncert::dist
