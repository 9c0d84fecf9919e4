// SPDX-License-Identifier: Apache-2.0
#include "fnncert/witness.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <stdexcept>

#include <json.hpp>

namespace fnncert::witness {

namespace {

double sig12(double v) {
  if (v == 0.0) return 0.0;
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.12g", v);
  return std::strtod(buf, nullptr);
}

// Estimated value of one correlator factor. Joint inputs not fixed by the
// symbol are pooled with the given weights.
double symbol_value(const CorrelatorSymbol& sym, const dist::ConditionalDistribution& d,
                    const std::vector<double>* weights) {
  const dist::Scenario& sc = d.scenario();
  std::vector<std::pair<int, std::vector<double>>> signs;
  std::vector<int> fixed(sc.num_parties(), -1);
  if (sym.parties.size() != sym.inputs.size())
    throw std::invalid_argument("correlator symbol arity mismatch");
  for (size_t k = 0; k < sym.parties.size(); ++k) {
    const int p = sym.parties[k];
    const int v = sym.inputs[k];
    if (p < 0 || p >= sc.num_parties())
      throw std::invalid_argument("correlator symbol names a missing party");
    const int outs = sc.party(p).num_outputs;
    if (outs == 2) {
      if (v < 0 || v >= sc.party(p).num_inputs)
        throw std::invalid_argument("correlator symbol input out of range for party " +
                                    sc.party(p).name);
      signs.push_back({p, {1.0, -1.0}});
      fixed[p] = v;
    } else if (outs == 3) {
      // three-outcome central party: the symbol input picks the sign vector
      if (sc.party(p).num_inputs != 1 || (v != 0 && v != 1))
        throw std::invalid_argument("bad sign-kind symbol for party " + sc.party(p).name);
      signs.push_back({p, v == 0 ? std::vector<double>{1, 1, -1} : std::vector<double>{1, -1, 0}});
      fixed[p] = 0;
    } else {
      throw std::domain_error("correlator symbol over a party with " + std::to_string(outs) +
                              " outcomes");
    }
  }

  double num = 0.0, den = 0.0;
  for (long i = 0; i < sc.joint_inputs(); ++i) {
    const std::vector<int> in = sc.unpack_input(i);
    bool consistent = true;
    for (int p = 0; p < sc.num_parties(); ++p)
      if (fixed[p] >= 0 && in[p] != fixed[p]) consistent = false;
    if (!consistent) continue;
    const double w = weights ? (*weights)[i] : 1.0;
    num += w * dist::signed_correlator(d, in, signs);
    den += w;
  }
  if (den <= 0.0) throw std::domain_error("no weight on any consistent setting");
  return num / den;
}

CorrelatorSymbol sym(std::vector<int> parties, std::vector<int> inputs) {
  return CorrelatorSymbol{std::move(parties), std::move(inputs)};
}

Term term(double coeff, CorrelatorSymbol s) { return Term{coeff, {std::move(s)}}; }

// Relabel branch parties 0,1,2 -> +shift (mod 3); the central party 3 is fixed.
CorrelatorPolynomial cycle_branches(const CorrelatorPolynomial& w, int shift) {
  CorrelatorPolynomial out;
  out.constant = w.constant;
  out.bound = w.bound;
  for (const Term& t : w.terms) {
    Term nt;
    nt.coeff = t.coeff;
    for (const CorrelatorSymbol& s : t.monomial) {
      CorrelatorSymbol ns;
      for (size_t k = 0; k < s.parties.size(); ++k) {
        ns.parties.push_back(s.parties[k] == 3 ? 3 : (s.parties[k] + shift) % 3);
        ns.inputs.push_back(s.inputs[k]);
      }
      nt.monomial.push_back(std::move(ns));
    }
    out.terms.push_back(std::move(nt));
  }
  return canonicalize(out);
}

}  // namespace

bool CorrelatorSymbol::operator<(const CorrelatorSymbol& other) const {
  if (parties != other.parties) return parties < other.parties;
  return inputs < other.inputs;
}

CorrelatorPolynomial canonicalize(const CorrelatorPolynomial& w) {
  CorrelatorPolynomial out;
  out.constant = w.constant;
  out.bound = w.bound;
  std::map<std::vector<CorrelatorSymbol>, double> merged;
  for (const Term& t : w.terms) {
    std::vector<CorrelatorSymbol> mono = t.monomial;
    for (CorrelatorSymbol& s : mono) {
      // sort the parties inside a symbol, carrying inputs along
      std::vector<size_t> order(s.parties.size());
      for (size_t k = 0; k < order.size(); ++k) order[k] = k;
      std::sort(order.begin(), order.end(),
                [&](size_t a, size_t b) { return s.parties[a] < s.parties[b]; });
      CorrelatorSymbol ns;
      for (size_t k : order) {
        ns.parties.push_back(s.parties[k]);
        ns.inputs.push_back(s.inputs[k]);
      }
      s = std::move(ns);
    }
    std::sort(mono.begin(), mono.end());
    merged[mono] += t.coeff;
  }
  for (auto& [mono, coeff] : merged)
    if (coeff != 0.0) out.terms.push_back(Term{coeff, mono});
  return out;
}

CorrelatorPolynomial builtin_fnn_star(int i) {
  if (i < 1 || i > 3) throw std::invalid_argument("builtin_fnn_star: i must be 1, 2 or 3");
  CorrelatorPolynomial w;
  w.constant = -2.0;
  w.bound = 0.0;
  // CHSH-patterned blocks over (x1, x3), with A2 pinned to input 0.
  const double chsh[2][2] = {{-1, -1}, {-1, +1}};  // [x1][x3]
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x3 = 0; x3 < 2; ++x3) {
      const double c = chsh[x1][x3];
      w.terms.push_back(term(c, sym({0, 1, 2, 3}, {x1, 0, x3, 0})));
      w.terms.push_back(term(c, sym({0, 1, 2}, {x1, 0, x3})));
      w.terms.push_back(term(c, sym({0, 2, 3}, {x1, x3, 0})));
      w.terms.push_back(term(c, sym({0, 2}, {x1, x3})));
    }
  w.terms.push_back(term(-2, sym({1, 3}, {0, 0})));
  w.terms.push_back(term(-2, sym({1}, {0})));
  w.terms.push_back(term(-2, sym({3}, {0})));
  w = canonicalize(w);
  if (i == 1) return w;
  return cycle_branches(w, i - 1);
}

CorrelatorPolynomial builtin_fnn_bilocal(BilocalWitness kind) {
  // Parties A=0, B=1, C=2. B's symbol input is the sign kind (0 or 1).
  CorrelatorPolynomial w;
  w.bound = 3.0;
  auto abc = [&](double c, int x, int k, int z) { w.terms.push_back(term(c, sym({0, 1, 2}, {x, k, z}))); };
  if (kind == BilocalWitness::C_NS) {
    abc(+2, 0, 1, 0);
    abc(-2, 0, 1, 1);
    abc(+2, 1, 0, 0);
    abc(+1, 1, 0, 1);
    w.terms.push_back(term(-1, sym({1}, {0})));
    // [<A1B0> + <B0C0> - <C0>] <C1>
    w.terms.push_back(Term{+1, {sym({0, 1}, {1, 0}), sym({2}, {1})}});
    w.terms.push_back(Term{+1, {sym({1, 2}, {0, 0}), sym({2}, {1})}});
    w.terms.push_back(Term{-1, {sym({2}, {0}), sym({2}, {1})}});
  } else {
    abc(+2, 0, 1, 0);
    abc(-2, 0, 1, 1);
    abc(+1, 1, 0, 0);
    abc(+2, 1, 0, 1);
    w.terms.push_back(term(-1, sym({1}, {0})));
    // <A1> [<A1B0> + <B0C1> + <C0> - <C1> - <A1>]
    w.terms.push_back(Term{+1, {sym({0}, {1}), sym({0, 1}, {1, 0})}});
    w.terms.push_back(Term{+1, {sym({0}, {1}), sym({1, 2}, {0, 1})}});
    w.terms.push_back(Term{+1, {sym({0}, {1}), sym({2}, {0})}});
    w.terms.push_back(Term{-1, {sym({0}, {1}), sym({2}, {1})}});
    w.terms.push_back(Term{-1, {sym({0}, {1}), sym({0}, {1})}});
  }
  return canonicalize(w);
}

Evaluation evaluate(const CorrelatorPolynomial& w, const dist::ConditionalDistribution& d,
                    const std::vector<double>* input_weights) {
  if (input_weights &&
      static_cast<long>(input_weights->size()) != d.scenario().joint_inputs())
    throw std::invalid_argument("input weight vector arity mismatch");
  Evaluation ev;
  ev.value = w.constant;
  for (const Term& t : w.terms) {
    double v = t.coeff;
    for (const CorrelatorSymbol& s : t.monomial) v *= symbol_value(s, d, input_weights);
    ev.breakdown.push_back(TermValue{t, v});
    ev.value += v;
  }
  ev.violated = ev.value > w.bound;
  return ev;
}

double evaluate_from_b0_data(int i, const dist::ConditionalDistribution& b0_table, double p_b0,
                             const std::vector<double>* input_weights) {
  if (p_b0 < 0.0 || p_b0 > 1.0) throw std::domain_error("p(b=0) outside [0,1]");
  const dist::Scenario& sc = b0_table.scenario();
  if (sc.num_parties() != 3)
    throw std::invalid_argument("b0 table must cover the three branch parties");
  for (int p = 0; p < 3; ++p)
    if (sc.party(p).num_inputs != 2 || sc.party(p).num_outputs != 2)
      throw std::invalid_argument("b0 table parties must be binary input/output");

  const CorrelatorPolynomial w = builtin_fnn_star(i);

  // Pair every <X B> term with its B-less partner <X> (same coefficient); the
  // lone constant pairs with the <B> term.  Then
  //   coeff (<XB> + <X>) = coeff * 2 sum_a (-1)^{X} p(a|b=0,x) p(b=0).
  std::map<CorrelatorSymbol, double> with_b, without_b;
  for (const Term& t : w.terms) {
    if (t.monomial.size() != 1)
      throw std::invalid_argument("b=0 reduction needs a linear witness");
    const CorrelatorSymbol& s = t.monomial[0];
    CorrelatorSymbol a_part;
    bool has_b = false;
    for (size_t k = 0; k < s.parties.size(); ++k) {
      if (s.parties[k] == 3) {
        has_b = true;
      } else {
        a_part.parties.push_back(s.parties[k]);
        a_part.inputs.push_back(s.inputs[k]);
      }
    }
    (has_b ? with_b : without_b)[a_part] += t.coeff;
  }
  for (const auto& [a_part, coeff] : with_b) {
    const double partner =
        a_part.parties.empty() ? w.constant : without_b[a_part];
    if (std::abs(partner - coeff) > 1e-12)
      throw std::invalid_argument("witness does not admit the b=0 reduction");
  }

  double value = 0.0;
  for (const auto& [a_part, coeff] : with_b)
    value += coeff * 2.0 * symbol_value(a_part, b0_table, input_weights) * p_b0;
  return value;
}

double evaluate(const ProbabilityWitness& w, const dist::ConditionalDistribution& d) {
  if (!(d.scenario() == w.scenario))
    throw std::invalid_argument("witness/distribution scenario mismatch");
  double v = w.constant.get_d();
  const long jo = w.scenario.joint_outputs();
  for (long i = 0; i < w.scenario.joint_inputs(); ++i)
    for (long o = 0; o < jo; ++o) v += w.coefficients[i * jo + o].get_d() * d.p(i, o);
  return v;
}

Rational evaluate_exact(const ProbabilityWitness& w, const std::vector<Rational>& table) {
  if (table.size() != w.coefficients.size())
    throw std::invalid_argument("witness/table size mismatch");
  Rational v = w.constant;
  for (size_t k = 0; k < table.size(); ++k) v += w.coefficients[k] * table[k];
  return v;
}

ProbabilityWitness from_certificate(const lp::FarkasCertificate& cert,
                                    const inflation::InflationProblem& problem,
                                    const lp::LinearSystem& ls) {
  if (!lp::verify_certificate(ls, cert))
    throw std::invalid_argument("refusing to extract a witness from an unverified certificate");
  if (cert.y_eq.size() != problem.rows.size())
    throw std::invalid_argument("certificate/problem row mismatch");

  const dist::Scenario& sc = problem.base;
  const long jo = sc.joint_outputs();
  std::vector<Rational> coeff_rel(sc.joint_inputs() * jo, Rational(0));
  Rational constant = 0;
  for (size_t r = 0; r < problem.rows.size(); ++r) {
    const auto& info = problem.rows[r];
    if (info.kind == inflation::InflationProblem::RowKind::marginal)
      coeff_rel[info.base_input * jo + info.base_output] += cert.y_eq[r];
    else if (info.kind == inflation::InflationProblem::RowKind::normalization)
      constant += cert.y_eq[r];
  }

  // Undo the internal relabeling that moved the classical source to branch 1.
  std::vector<Rational> coeff = coeff_rel;
  if (problem.classical_source != 1) {
    const int k = problem.classical_source - 1;
    for (long i = 0; i < sc.joint_inputs(); ++i) {
      std::vector<int> in = sc.unpack_input(i);
      std::swap(in[0], in[k]);
      const long i2 = sc.input_index(in);
      for (long o = 0; o < jo; ++o) {
        std::vector<int> out = sc.unpack_output(o);
        std::swap(out[0], out[k]);
        coeff[i * jo + o] = coeff_rel[i2 * jo + sc.output_index(out)];
      }
    }
  }

  ProbabilityWitness w{sc, std::move(coeff), constant};

  // Calibrate: the uniform distribution is always hybrid-feasible, so the
  // witness is <= 0 there; scale so it evaluates to exactly -2 (the value of
  // the published I_i on uniform).
  Rational at_uniform = w.constant;
  for (const Rational& c : w.coefficients) at_uniform += c / jo;
  if (at_uniform < 0) {
    const Rational scale = Rational(-2) / at_uniform;
    for (Rational& c : w.coefficients) c *= scale;
    w.constant *= scale;
  }
  return w;
}

CorrelatorPolynomial to_correlator_form(const ProbabilityWitness& w) {
  const dist::Scenario& sc = w.scenario;
  const int n = sc.num_parties();
  for (int p = 0; p < n; ++p)
    if (sc.party(p).num_outputs != 2)
      throw std::domain_error("correlator form requires binary outcomes");
  const long jo = sc.joint_outputs();

  // p(o|i) = 2^-n sum_S (-1)^{o.S} <S>_i ; spectator inputs merge because the
  // correlator of a no-signaling distribution does not depend on them.
  std::map<CorrelatorSymbol, Rational> acc;
  Rational constant = w.constant;
  for (long i = 0; i < sc.joint_inputs(); ++i) {
    const std::vector<int> in = sc.unpack_input(i);
    for (int mask = 0; mask < (1 << n); ++mask) {
      Rational g = 0;
      for (long o = 0; o < jo; ++o) {
        const std::vector<int> out = sc.unpack_output(o);
        int par = 0;
        for (int p = 0; p < n; ++p)
          if (mask & (1 << p)) par ^= out[p];
        if (par)
          g -= w.coefficients[i * jo + o];
        else
          g += w.coefficients[i * jo + o];
      }
      g /= jo;
      if (mask == 0) {
        constant += g;
      } else {
        CorrelatorSymbol s;
        for (int p = 0; p < n; ++p)
          if (mask & (1 << p)) {
            s.parties.push_back(p);
            s.inputs.push_back(in[p]);
          }
        acc[s] += g;
      }
    }
  }

  CorrelatorPolynomial out;
  out.constant = constant.get_d();
  out.bound = 0.0;
  for (const auto& [s, g] : acc)
    if (g != 0) out.terms.push_back(Term{g.get_d(), {s}});
  return canonicalize(out);
}

std::string to_json(const CorrelatorPolynomial& w, const dist::Scenario& scenario) {
  nlohmann::json j;
  j["constant"] = sig12(w.constant);
  j["bound"] = sig12(w.bound);
  j["terms"] = nlohmann::json::array();
  for (const Term& t : w.terms) {
    nlohmann::json monomial = nlohmann::json::array();
    for (const CorrelatorSymbol& s : t.monomial) {
      std::vector<std::string> names;
      for (int p : s.parties) names.push_back(scenario.party(p).name);
      monomial.push_back({{"parties", names}, {"inputs", s.inputs}});
    }
    j["terms"].push_back({{"coeff", sig12(t.coeff)}, {"monomial", monomial}});
  }
  return j.dump(2);
}

std::string to_json(const ProbabilityWitness& w) {
  nlohmann::json j;
  j["scenario"] = nlohmann::json::array();
  for (const auto& p : w.scenario.parties())
    j["scenario"].push_back({{"name", p.name}, {"inputs", p.num_inputs}, {"outputs", p.num_outputs}});
  j["constant"] = rational_to_string(w.constant);
  j["bound"] = "0";
  j["coefficients"] = nlohmann::json::array();
  const long jo = w.scenario.joint_outputs();
  for (long i = 0; i < w.scenario.joint_inputs(); ++i)
    for (long o = 0; o < jo; ++o) {
      if (w.coefficients[i * jo + o] == 0) continue;
      j["coefficients"].push_back({{"input", w.scenario.unpack_input(i)},
                                   {"output", w.scenario.unpack_output(o)},
                                   {"c", rational_to_string(w.coefficients[i * jo + o])}});
    }
  return j.dump(2);
}

}  // namespace fnncert::witness
