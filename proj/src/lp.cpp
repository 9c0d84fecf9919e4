// SPDX-License-Identifier: Apache-2.0
#include "fnncert/lp.hpp"

#include <algorithm>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

#include "lp_internal.hpp"

namespace fnncert::lp {

void SparseRow::add(int32_t col, const Rational& coeff) {
  if (coeff != 0) terms.push_back({col, coeff});
}

void SparseRow::normalize() {
  std::sort(terms.begin(), terms.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::pair<int32_t, Rational>> merged;
  for (auto& [c, v] : terms) {
    if (!merged.empty() && merged.back().first == c)
      merged.back().second += v;
    else
      merged.push_back({c, v});
  }
  std::erase_if(merged, [](const auto& e) { return e.second == 0; });
  terms = std::move(merged);
}

void LinearSystem::add_eq(SparseRow row, Rational rhs) {
  eq.push_back(std::move(row));
  eq_rhs.push_back(std::move(rhs));
}

void LinearSystem::add_ge(SparseRow row, Rational rhs) {
  ge.push_back(std::move(row));
  ge_rhs.push_back(std::move(rhs));
}

bool verify_certificate(const LinearSystem& ls, const FarkasCertificate& cert) {
  if (cert.y_eq.size() != ls.eq.size() || cert.y_ge.size() != ls.ge.size()) return false;
  for (const Rational& y : cert.y_ge)
    if (y < 0) return false;

  std::vector<Rational> colsum(ls.num_vars, Rational(0));
  for (size_t r = 0; r < ls.eq.size(); ++r) {
    if (cert.y_eq[r] == 0) continue;
    for (const auto& [c, v] : ls.eq[r].terms) colsum[c] += cert.y_eq[r] * v;
  }
  for (size_t r = 0; r < ls.ge.size(); ++r) {
    if (cert.y_ge[r] == 0) continue;
    for (const auto& [c, v] : ls.ge[r].terms) colsum[c] += cert.y_ge[r] * v;
  }
  for (const Rational& s : colsum)
    if (s > 0) return false;

  Rational yb = 0;
  for (size_t r = 0; r < ls.eq.size(); ++r) yb += cert.y_eq[r] * ls.eq_rhs[r];
  for (size_t r = 0; r < ls.ge.size(); ++r) yb += cert.y_ge[r] * ls.ge_rhs[r];
  return yb > 0;
}

bool check_point(const LinearSystem& ls, const std::vector<Rational>& x) {
  if (static_cast<int>(x.size()) != ls.num_vars) return false;
  for (const Rational& v : x)
    if (v < 0) return false;
  for (size_t r = 0; r < ls.eq.size(); ++r) {
    Rational s = 0;
    for (const auto& [c, v] : ls.eq[r].terms) s += v * x[c];
    if (s != ls.eq_rhs[r]) return false;
  }
  for (size_t r = 0; r < ls.ge.size(); ++r) {
    Rational s = 0;
    for (const auto& [c, v] : ls.ge[r].terms) s += v * x[c];
    if (s < ls.ge_rhs[r]) return false;
  }
  return true;
}

FarkasCertificate integerize_certificate(const FarkasCertificate& cert) {
  std::vector<Rational> all = cert.y_eq;
  all.insert(all.end(), cert.y_ge.begin(), cert.y_ge.end());
  const std::vector<Integer> ints = integerize(all);
  FarkasCertificate out;
  out.y_eq.reserve(cert.y_eq.size());
  out.y_ge.reserve(cert.y_ge.size());
  for (size_t i = 0; i < cert.y_eq.size(); ++i) out.y_eq.push_back(Rational(ints[i]));
  for (size_t i = 0; i < cert.y_ge.size(); ++i)
    out.y_ge.push_back(Rational(ints[cert.y_eq.size() + i]));
  return out;
}

std::string certificate_to_json(const FarkasCertificate& cert) {
  const FarkasCertificate ic = integerize_certificate(cert);
  nlohmann::json j;
  j["y_eq"] = nlohmann::json::array();
  for (const Rational& y : ic.y_eq) j["y_eq"].push_back(y.get_num().get_str());
  j["y_ge"] = nlohmann::json::array();
  for (const Rational& y : ic.y_ge) j["y_ge"].push_back(y.get_num().get_str());
  return j.dump(2);
}

FarkasCertificate certificate_from_json(const std::string& text) {
  const nlohmann::json j = nlohmann::json::parse(text);
  FarkasCertificate cert;
  for (const auto& s : j.at("y_eq"))
    cert.y_eq.push_back(rational_from_string(s.get<std::string>()));
  for (const auto& s : j.at("y_ge"))
    cert.y_ge.push_back(rational_from_string(s.get<std::string>()));
  return cert;
}

std::string to_lp_text(const LinearSystem& ls) {
  std::ostringstream os;
  auto var = [&](int c) {
    return ls.labels.empty() ? "x" + std::to_string(c) : ls.labels[c];
  };
  auto emit_row = [&](const SparseRow& row) {
    bool first = true;
    for (const auto& [c, v] : row.terms) {
      os << (first ? "" : " ") << (v < 0 ? "- " : (first ? "" : "+ "));
      os << rational_to_string(abs(v)) << " " << var(c);
      first = false;
    }
  };
  os << "\\ feasibility system, coefficients are exact rationals p/q\n";
  os << "Minimize\n obj: 0\nSubject To\n";
  for (size_t r = 0; r < ls.eq.size(); ++r) {
    os << " e" << r << ": ";
    emit_row(ls.eq[r]);
    os << " = " << rational_to_string(ls.eq_rhs[r]) << "\n";
  }
  for (size_t r = 0; r < ls.ge.size(); ++r) {
    os << " g" << r << ": ";
    emit_row(ls.ge[r]);
    os << " >= " << rational_to_string(ls.ge_rhs[r]) << "\n";
  }
  os << "Bounds\n";
  for (int c = 0; c < ls.num_vars; ++c) os << " " << var(c) << " >= 0\n";
  os << "End\n";
  return os.str();
}

namespace {

using detail::Presolved;

// continued-fraction snapping ladder for float vectors
const Integer kSnapBounds[] = {Integer(1000), Integer(1000000), Integer("1000000000"),
                               Integer("1000000000000")};

std::vector<Rational> snap(const std::vector<double>& v, const Integer& bound) {
  std::vector<Rational> out;
  out.reserve(v.size());
  for (double d : v) out.push_back(std::abs(d) < 1e-11 ? Rational(0) : rational_from_double(d, bound));
  return out;
}

// Exact answers for the (presolved) system; nullopt when every recovery rung
// fails and the caller should fall back to the exact simplex.
std::optional<SolveResult> recover_from_float(const LinearSystem& ls,
                                              const detail::FloatResult& fr) {
  const size_t n_eq = ls.eq.size();
  if (fr.feasible) {
    for (const Integer& bound : kSnapBounds) {
      std::vector<Rational> x = snap(fr.x, bound);
      if (check_point(ls, x)) {
        SolveResult res;
        res.feasible = true;
        res.point = std::move(x);
        res.stats.method = "float+snap";
        return res;
      }
    }
    // support handoff: exact solve restricted to the float vertex support
    std::vector<int> support;
    for (int c = 0; c < ls.num_vars; ++c)
      if (fr.x[c] > 1e-7) support.push_back(c);
    if (auto x = detail::solve_on_support(ls, support)) {
      if (check_point(ls, *x)) {
        SolveResult res;
        res.feasible = true;
        res.point = std::move(*x);
        res.stats.method = "float+support";
        return res;
      }
    }
    return std::nullopt;
  }

  for (const Integer& bound : kSnapBounds) {
    FarkasCertificate cert;
    std::vector<Rational> y = snap(fr.y, bound);
    cert.y_eq.assign(y.begin(), y.begin() + n_eq);
    cert.y_ge.assign(y.begin() + n_eq, y.end());
    for (Rational& v : cert.y_ge)
      if (v < 0) v = 0;  // tiny float negatives on inequality multipliers
    if (verify_certificate(ls, cert)) {
      SolveResult res;
      res.feasible = false;
      res.certificate = std::move(cert);
      res.stats.method = "float+snap";
      return res;
    }
  }
  return std::nullopt;
}

SolveResult solve_reduced(const LinearSystem& ls, const SolveOptions& options) {
  if (options.use_float_path) {
    const detail::FloatResult fr = detail::float_phase1(ls, options.max_pivots);
    if (fr.ok) {
      if (auto res = recover_from_float(ls, fr)) {
        res->stats.float_pivots = fr.pivots;
        return *res;
      }
    }
  }
  const detail::ExactResult er = detail::exact_phase1(ls, options.max_pivots);
  if (!er.ok) throw std::runtime_error("lp: pivot limit exhausted");
  SolveResult res;
  res.stats.method = "exact";
  res.stats.exact_pivots = er.pivots;
  res.feasible = er.feasible;
  if (er.feasible) {
    res.point = er.x;
  } else {
    FarkasCertificate cert;
    cert.y_eq.assign(er.y.begin(), er.y.begin() + ls.eq.size());
    cert.y_ge.assign(er.y.begin() + ls.eq.size(), er.y.end());
    res.certificate = std::move(cert);
  }
  return res;
}

}  // namespace

SolveResult feasibility(const LinearSystem& ls, const SolveOptions& options) {
  for (size_t r = 0; r < ls.eq.size(); ++r)
    for (const auto& [c, v] : ls.eq[r].terms)
      if (c < 0 || c >= ls.num_vars) throw std::invalid_argument("lp: column out of range");
  for (size_t r = 0; r < ls.ge.size(); ++r)
    for (const auto& [c, v] : ls.ge[r].terms)
      if (c < 0 || c >= ls.num_vars) throw std::invalid_argument("lp: column out of range");

  if (!options.use_presolve) {
    SolveResult res = solve_reduced(ls, options);
    if (res.feasible && !check_point(ls, *res.point))
      throw std::runtime_error("lp: exact point failed the final check");
    if (!res.feasible && !verify_certificate(ls, *res.certificate))
      throw std::runtime_error("lp: certificate failed the final check");
    return res;
  }

  detail::PresolveOutcome pre = detail::presolve(ls);
  if (pre.certificate) {
    SolveResult res;
    res.feasible = false;
    res.certificate = std::move(pre.certificate);
    res.stats.method = "presolve";
    if (!verify_certificate(ls, *res.certificate))
      throw std::runtime_error("lp: presolve certificate failed the final check");
    return res;
  }
  if (pre.point) {
    SolveResult res;
    res.feasible = true;
    res.point = std::move(pre.point);
    res.stats.method = "presolve";
    if (!check_point(ls, *res.point))
      throw std::runtime_error("lp: presolve point failed the final check");
    return res;
  }

  const Presolved& ps = *pre.reduced;
  SolveResult res = solve_reduced(detail::reduced_system(ps), options);
  res.stats.method = "presolve+" + res.stats.method;
  if (res.feasible) {
    res.point = detail::lift_point(ps, *res.point);
    if (!check_point(ls, *res.point))
      throw std::runtime_error("lp: lifted point failed the final check");
  } else {
    res.certificate = detail::lift_certificate(ps, *res.certificate);
    if (!verify_certificate(ls, *res.certificate))
      throw std::runtime_error("lp: lifted certificate failed the final check");
  }
  return res;
}

}  // namespace fnncert::lp
