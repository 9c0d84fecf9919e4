// SPDX-License-Identifier: Apache-2.0
#include "fnncert/dist.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace fnncert::dist {

namespace {

constexpr double kClampTolerance = 1e-12;
constexpr double kNormTolerance = 1e-9;
constexpr double kNoSignalingTolerance = 1e-9;

// 12 significant digits; keeps CLI/JSON output byte-stable across runs.
double sig12(double v) {
  if (v == 0.0) return 0.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

}  // namespace

Scenario::Scenario(std::vector<Party> parties) : parties_(std::move(parties)) {
  std::set<std::string> names;
  for (const Party& p : parties_) {
    if (p.num_inputs < 1 || p.num_outputs < 1)
      throw std::invalid_argument("scenario: cardinalities must be >= 1");
    if (!names.insert(p.name).second)
      throw std::invalid_argument("scenario: duplicate party name '" + p.name + "'");
    joint_inputs_ *= p.num_inputs;
    joint_outputs_ *= p.num_outputs;
  }
}

Scenario Scenario::star() {
  return Scenario({{"A1", 2, 2}, {"A2", 2, 2}, {"A3", 2, 2}, {"B", 1, 2}});
}

Scenario Scenario::bilocal() {
  return Scenario({{"A", 2, 2}, {"B", 1, 3}, {"C", 2, 2}});
}

int Scenario::party_index(const std::string& name) const {
  for (int i = 0; i < num_parties(); ++i)
    if (parties_[i].name == name) return i;
  return -1;
}

long Scenario::input_index(const std::vector<int>& inputs) const {
  if (static_cast<int>(inputs.size()) != num_parties())
    throw std::invalid_argument("input tuple arity mismatch");
  long idx = 0;
  for (int i = 0; i < num_parties(); ++i) {
    if (inputs[i] < 0 || inputs[i] >= parties_[i].num_inputs)
      throw std::invalid_argument("input out of range for party " + parties_[i].name);
    idx = idx * parties_[i].num_inputs + inputs[i];
  }
  return idx;
}

long Scenario::output_index(const std::vector<int>& outputs) const {
  if (static_cast<int>(outputs.size()) != num_parties())
    throw std::invalid_argument("output tuple arity mismatch");
  long idx = 0;
  for (int i = 0; i < num_parties(); ++i) {
    if (outputs[i] < 0 || outputs[i] >= parties_[i].num_outputs)
      throw std::invalid_argument("output out of range for party " + parties_[i].name);
    idx = idx * parties_[i].num_outputs + outputs[i];
  }
  return idx;
}

std::vector<int> Scenario::unpack_input(long index) const {
  std::vector<int> out(num_parties());
  for (int i = num_parties() - 1; i >= 0; --i) {
    out[i] = static_cast<int>(index % parties_[i].num_inputs);
    index /= parties_[i].num_inputs;
  }
  return out;
}

std::vector<int> Scenario::unpack_output(long index) const {
  std::vector<int> out(num_parties());
  for (int i = num_parties() - 1; i >= 0; --i) {
    out[i] = static_cast<int>(index % parties_[i].num_outputs);
    index /= parties_[i].num_outputs;
  }
  return out;
}

bool Scenario::operator==(const Scenario& other) const {
  if (num_parties() != other.num_parties()) return false;
  for (int i = 0; i < num_parties(); ++i) {
    const Party &a = parties_[i], &b = other.parties_[i];
    if (a.name != b.name || a.num_inputs != b.num_inputs || a.num_outputs != b.num_outputs)
      return false;
  }
  return true;
}

ConditionalDistribution::ConditionalDistribution(Scenario scenario, std::vector<double> table)
    : scenario_(std::move(scenario)), table_(std::move(table)) {
  const long expected = scenario_.joint_inputs() * scenario_.joint_outputs();
  if (static_cast<long>(table_.size()) != expected)
    throw std::invalid_argument("distribution table size mismatch");
  for (double& v : table_) {
    if (v < -kClampTolerance)
      throw std::invalid_argument("distribution entry below -1e-12: " + std::to_string(v));
    if (v < 0.0) v = 0.0;
  }
  for (long i = 0; i < scenario_.joint_inputs(); ++i) {
    double sum = 0.0;
    for (long o = 0; o < scenario_.joint_outputs(); ++o) sum += p(i, o);
    if (std::abs(sum - 1.0) > kNormTolerance)
      throw std::invalid_argument("distribution not normalized at input " + std::to_string(i) +
                                  ": sum = " + std::to_string(sum));
  }
}

ConditionalDistribution ConditionalDistribution::uniform(const Scenario& scenario) {
  std::vector<double> t(scenario.joint_inputs() * scenario.joint_outputs(),
                        1.0 / static_cast<double>(scenario.joint_outputs()));
  return ConditionalDistribution(scenario, std::move(t));
}

double ConditionalDistribution::p(long input_index, long output_index) const {
  return table_[input_index * scenario_.joint_outputs() + output_index];
}

double ConditionalDistribution::p(const std::vector<int>& inputs,
                                  const std::vector<int>& outputs) const {
  return p(scenario_.input_index(inputs), scenario_.output_index(outputs));
}

ValidationReport validate(const ConditionalDistribution& d) {
  const Scenario& sc = d.scenario();
  ValidationReport rep;
  rep.no_signaling_residual.assign(sc.num_parties(), 0.0);

  for (double v : d.table()) rep.max_negative_entry = std::min(rep.max_negative_entry, v);

  for (long i = 0; i < sc.joint_inputs(); ++i) {
    double sum = 0.0;
    for (long o = 0; o < sc.joint_outputs(); ++o) sum += d.p(i, o);
    rep.normalization_residual = std::max(rep.normalization_residual, std::abs(sum - 1.0));
  }

  // Residual for party P: how much the marginal of the other parties moves
  // when only P's input changes.
  for (int p = 0; p < sc.num_parties(); ++p) {
    if (sc.party(p).num_inputs < 2) continue;
    for (long i = 0; i < sc.joint_inputs(); ++i) {
      std::vector<int> in = sc.unpack_input(i);
      if (in[p] != 0) continue;
      for (int alt = 1; alt < sc.party(p).num_inputs; ++alt) {
        std::vector<int> in2 = in;
        in2[p] = alt;
        const long i2 = sc.input_index(in2);
        // marginal over P's output, per assignment of the others' outputs
        for (long o = 0; o < sc.joint_outputs(); ++o) {
          std::vector<int> out = sc.unpack_output(o);
          if (out[p] != 0) continue;
          double m1 = 0.0, m2 = 0.0;
          for (int a = 0; a < sc.party(p).num_outputs; ++a) {
            out[p] = a;
            const long oi = sc.output_index(out);
            m1 += d.p(i, oi);
            m2 += d.p(i2, oi);
          }
          out[p] = 0;
          rep.no_signaling_residual[p] =
              std::max(rep.no_signaling_residual[p], std::abs(m1 - m2));
        }
      }
    }
  }

  const double max_ns =
      *std::max_element(rep.no_signaling_residual.begin(), rep.no_signaling_residual.end());
  rep.valid = rep.max_negative_entry >= -kClampTolerance &&
              rep.normalization_residual <= kNormTolerance && max_ns <= kNoSignalingTolerance;
  return rep;
}

double signed_correlator(const ConditionalDistribution& d, const std::vector<int>& inputs,
                         const std::vector<std::pair<int, std::vector<double>>>& signs) {
  const Scenario& sc = d.scenario();
  const long i = sc.input_index(inputs);
  for (const auto& [p, sv] : signs)
    if (static_cast<int>(sv.size()) != sc.party(p).num_outputs)
      throw std::invalid_argument("sign vector arity mismatch for party " + sc.party(p).name);
  double acc = 0.0;
  for (long o = 0; o < sc.joint_outputs(); ++o) {
    std::vector<int> out = sc.unpack_output(o);
    double s = 1.0;
    for (const auto& [p, sv] : signs) s *= sv[out[p]];
    acc += s * d.p(i, o);
  }
  return acc;
}

double correlator(const ConditionalDistribution& d, const std::vector<int>& inputs,
                  const std::vector<int>& parties) {
  std::vector<std::pair<int, std::vector<double>>> signs;
  for (int p : parties) {
    if (d.scenario().party(p).num_outputs != 2)
      throw std::domain_error("correlator requires binary outcomes; party " +
                              d.scenario().party(p).name + " is not");
    signs.push_back({p, {1.0, -1.0}});
  }
  return signed_correlator(d, inputs, signs);
}

double bilocal_correlator(const ConditionalDistribution& d, int x, int z, BilocalKind kind) {
  if (!(d.scenario() == Scenario::bilocal()))
    throw std::invalid_argument("bilocal_correlator requires the bilocal scenario");
  const std::vector<double> sb =
      kind == BilocalKind::B0 ? std::vector<double>{1, 1, -1} : std::vector<double>{1, -1, 0};
  return signed_correlator(d, {x, 0, z}, {{0, {1, -1}}, {1, sb}, {2, {1, -1}}});
}

ConditionalDistribution marginal(const ConditionalDistribution& d, const std::vector<int>& keep,
                                 const std::optional<Conditioning>& condition) {
  const Scenario& sc = d.scenario();
  std::vector<bool> kept(sc.num_parties(), false);
  std::vector<Party> parties;
  for (int p : keep) {
    kept.at(p) = true;
    parties.push_back(sc.party(p));
  }
  if (condition) {
    const Party& cp = sc.party(condition->party);
    if (kept[condition->party])
      throw std::invalid_argument("cannot condition on a kept party");
    if (cp.num_inputs != 1)
      throw std::invalid_argument("conditioning party must have a fixed input");
    if (condition->outcome < 0 || condition->outcome >= cp.num_outputs)
      throw std::invalid_argument("conditioning outcome out of range");
  }

  Scenario out_sc(parties);
  std::vector<double> table(out_sc.joint_inputs() * out_sc.joint_outputs(), 0.0);

  for (long oi = 0; oi < out_sc.joint_inputs(); ++oi) {
    const std::vector<int> kin = out_sc.unpack_input(oi);
    std::vector<int> in(sc.num_parties(), 0);  // discarded parties read input 0
    for (size_t k = 0; k < keep.size(); ++k) in[keep[k]] = kin[k];
    const long ii = sc.input_index(in);

    double total = 0.0;
    std::vector<double> row(out_sc.joint_outputs(), 0.0);
    for (long o = 0; o < sc.joint_outputs(); ++o) {
      const std::vector<int> out = sc.unpack_output(o);
      if (condition && out[condition->party] != condition->outcome) continue;
      std::vector<int> kout(keep.size());
      for (size_t k = 0; k < keep.size(); ++k) kout[k] = out[keep[k]];
      row[out_sc.output_index(kout)] += d.p(ii, o);
      total += d.p(ii, o);
    }
    if (condition) {
      if (total <= 0.0)
        throw std::domain_error("conditioning on a zero-probability outcome");
      for (double& v : row) v /= total;
    }
    for (long o = 0; o < out_sc.joint_outputs(); ++o)
      table[oi * out_sc.joint_outputs() + o] = row[o];
  }
  return ConditionalDistribution(out_sc, std::move(table));
}

ConditionalDistribution permute_parties(const ConditionalDistribution& d,
                                        const std::vector<int>& perm) {
  const Scenario& sc = d.scenario();
  if (static_cast<int>(perm.size()) != sc.num_parties())
    throw std::invalid_argument("permutation arity mismatch");
  std::vector<bool> seen(perm.size(), false);
  for (int i = 0; i < sc.num_parties(); ++i) {
    const int j = perm[i];
    if (j < 0 || j >= sc.num_parties() || seen[j])
      throw std::invalid_argument("not a permutation");
    seen[j] = true;
    if (sc.party(i).num_inputs != sc.party(j).num_inputs ||
        sc.party(i).num_outputs != sc.party(j).num_outputs)
      throw std::invalid_argument("permutation maps parties of different cardinalities");
  }

  std::vector<double> table(d.table().size(), 0.0);
  for (long i = 0; i < sc.joint_inputs(); ++i) {
    const std::vector<int> in = sc.unpack_input(i);
    std::vector<int> pin(sc.num_parties());
    for (int p = 0; p < sc.num_parties(); ++p) pin[perm[p]] = in[p];
    const long pi = sc.input_index(pin);
    for (long o = 0; o < sc.joint_outputs(); ++o) {
      const std::vector<int> out = sc.unpack_output(o);
      std::vector<int> pout(sc.num_parties());
      for (int p = 0; p < sc.num_parties(); ++p) pout[perm[p]] = out[p];
      table[pi * sc.joint_outputs() + sc.output_index(pout)] = d.p(i, o);
    }
  }
  return ConditionalDistribution(sc, std::move(table));
}

double mutual_information(const ConditionalDistribution& d, int party_i, int party_j,
                          int input_i, int input_j, double log_base) {
  const Scenario& sc = d.scenario();
  if (party_i == party_j) throw std::invalid_argument("mutual information needs two parties");
  std::vector<int> in(sc.num_parties(), 0);
  in[party_i] = input_i;
  in[party_j] = input_j;
  const long ii = sc.input_index(in);

  const int ni = sc.party(party_i).num_outputs;
  const int nj = sc.party(party_j).num_outputs;
  std::vector<double> joint(ni * nj, 0.0);
  for (long o = 0; o < sc.joint_outputs(); ++o) {
    const std::vector<int> out = sc.unpack_output(o);
    joint[out[party_i] * nj + out[party_j]] += d.p(ii, o);
  }

  const double lb = std::log(log_base);
  auto hterm = [&](double p) { return p > 0.0 ? -p * std::log(p) / lb : 0.0; };
  double hi = 0.0, hj = 0.0, hij = 0.0;
  for (int a = 0; a < ni; ++a) {
    double m = 0.0;
    for (int b = 0; b < nj; ++b) m += joint[a * nj + b];
    hi += hterm(m);
  }
  for (int b = 0; b < nj; ++b) {
    double m = 0.0;
    for (int a = 0; a < ni; ++a) m += joint[a * nj + b];
    hj += hterm(m);
  }
  for (double p : joint) hij += hterm(p);
  return hi + hj - hij;
}

std::string to_json(const ConditionalDistribution& d) {
  nlohmann::json j;
  j["scenario"] = nlohmann::json::array();
  for (const Party& p : d.scenario().parties())
    j["scenario"].push_back({{"name", p.name}, {"inputs", p.num_inputs}, {"outputs", p.num_outputs}});
  j["table"] = nlohmann::json::array();
  for (long i = 0; i < d.scenario().joint_inputs(); ++i) {
    for (long o = 0; o < d.scenario().joint_outputs(); ++o) {
      j["table"].push_back({{"input", d.scenario().unpack_input(i)},
                            {"output", d.scenario().unpack_output(o)},
                            {"p", sig12(d.p(i, o))}});
    }
  }
  return j.dump(2);
}

ConditionalDistribution distribution_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  std::vector<Party> parties;
  for (const auto& p : j.at("scenario"))
    parties.push_back({p.at("name").get<std::string>(), p.at("inputs").get<int>(),
                       p.at("outputs").get<int>()});
  Scenario sc(parties);
  std::vector<double> table(sc.joint_inputs() * sc.joint_outputs(), 0.0);
  for (const auto& e : j.at("table")) {
    const long i = sc.input_index(e.at("input").get<std::vector<int>>());
    const long o = sc.output_index(e.at("output").get<std::vector<int>>());
    table[i * sc.joint_outputs() + o] = e.at("p").get<double>();
  }
  return ConditionalDistribution(sc, std::move(table));
}

}  // namespace fnncert::dist
