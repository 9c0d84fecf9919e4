// SPDX-License-Identifier: Apache-2.0
#include "fnncert/inflation.hpp"

#include <functional>
#include <stdexcept>
#include <thread>

#include "lp_internal.hpp"

namespace fnncert::inflation {

namespace {

// bit layout: outcome o = (a11 a12 a13 a2 a3 b), setting s = (x11 x12 x13 x2 x3)
int obit(int o, int k) { return (o >> (5 - k)) & 1; }  // k: 0..5
int sbit(int s, int k) { return (s >> (4 - k)) & 1; }  // k: 0..4
int opack(int a11, int a12, int a13, int a2, int a3, int b) {
  return a11 << 5 | a12 << 4 | a13 << 3 | a2 << 2 | a3 << 1 | b;
}
int spack(int x11, int x12, int x13, int x2, int x3) {
  return x11 << 4 | x12 << 3 | x13 << 2 | x2 << 1 | x3;
}

constexpr int kPerms[5][3] = {{1, 0, 2}, {2, 1, 0}, {0, 2, 1}, {1, 2, 0}, {2, 0, 1}};

// Walks every constraint row in the canonical order shared by
// make_inflation_problem and build_inflation_lp.
//   emit(info, cols, coeffs)
void walk_rows(const std::function<void(const InflationProblem::RowInfo&, const std::vector<long>&,
                                        const std::vector<int>&)>& emit) {
  const dist::Scenario star = dist::Scenario::star();
  std::vector<long> cols;
  std::vector<int> coeffs;

  // normalization, one per setting
  for (int s = 0; s < 32; ++s) {
    cols.clear();
    coeffs.clear();
    for (int o = 0; o < 64; ++o) {
      cols.push_back(InflationProblem::var_index(s, o));
      coeffs.push_back(1);
    }
    emit({InflationProblem::RowKind::normalization, -1, -1}, cols, coeffs);
  }

  // no-signaling for each branch party of the inflated network
  for (int p = 0; p < 5; ++p) {
    for (int s = 0; s < 32; ++s) {
      if (sbit(s, p) != 0) continue;
      const int s1 = s | (1 << (4 - p));
      for (int rest = 0; rest < 32; ++rest) {
        cols.clear();
        coeffs.clear();
        for (int ap = 0; ap < 2; ++ap) {
          int bits[6];
          int t = 0;
          for (int q = 0; q < 6; ++q)
            bits[q] = (q == p) ? ap : ((rest >> (4 - t++)) & 1);
          const int o = opack(bits[0], bits[1], bits[2], bits[3], bits[4], bits[5]);
          cols.push_back(InflationProblem::var_index(s, o));
          coeffs.push_back(1);
          cols.push_back(InflationProblem::var_index(s1, o));
          coeffs.push_back(-1);
        }
        emit({InflationProblem::RowKind::no_signaling, -1, -1}, cols, coeffs);
      }
    }
  }

  // invariance under the 5 nontrivial relabelings of the three clones
  for (const auto& perm : kPerms) {
    for (int s = 0; s < 32; ++s)
      for (int o = 0; o < 64; ++o) {
        const int o2 = opack(obit(o, perm[0]), obit(o, perm[1]), obit(o, perm[2]), obit(o, 3),
                             obit(o, 4), obit(o, 5));
        const int s2 = spack(sbit(s, perm[0]), sbit(s, perm[1]), sbit(s, perm[2]), sbit(s, 3),
                             sbit(s, 4));
        const long c1 = InflationProblem::var_index(s, o);
        const long c2 = InflationProblem::var_index(s2, o2);
        if (c1 >= c2) continue;
        emit({InflationProblem::RowKind::symmetry, -1, -1}, {c1, c2}, {1, -1});
      }
  }

  // marginal rows, imposed for every value of the spectator settings
  for (int a1 = 0; a1 < 2; ++a1)
    for (int a2 = 0; a2 < 2; ++a2)
      for (int a3 = 0; a3 < 2; ++a3)
        for (int b = 0; b < 2; ++b)
          for (int x1 = 0; x1 < 2; ++x1)
            for (int x2 = 0; x2 < 2; ++x2)
              for (int x3 = 0; x3 < 2; ++x3)
                for (int x12 = 0; x12 < 2; ++x12)
                  for (int x13 = 0; x13 < 2; ++x13) {
                    cols.clear();
                    coeffs.clear();
                    const int s = spack(x1, x12, x13, x2, x3);
                    for (int a12 = 0; a12 < 2; ++a12)
                      for (int a13 = 0; a13 < 2; ++a13) {
                        cols.push_back(InflationProblem::var_index(
                            s, opack(a1, a12, a13, a2, a3, b)));
                        coeffs.push_back(1);
                      }
                    const long bi = star.input_index({x1, x2, x3, 0});
                    const long bo = star.output_index({a1, a2, a3, b});
                    emit({InflationProblem::RowKind::marginal, bi, bo}, cols, coeffs);
                  }
}

dist::ConditionalDistribution relabel_to_branch1(const dist::ConditionalDistribution& d,
                                                 int classical_source) {
  if (classical_source == 1) return d;
  std::vector<int> perm{0, 1, 2, 3};
  std::swap(perm[0], perm[classical_source - 1]);
  return dist::permute_parties(d, perm);
}

std::vector<Rational> uniform_rhs_by_kind(const InflationProblem& problem) {
  std::vector<Rational> out;
  out.reserve(problem.rows.size());
  for (const auto& info : problem.rows) {
    if (info.kind == InflationProblem::RowKind::normalization)
      out.push_back(1);
    else if (info.kind == InflationProblem::RowKind::marginal)
      out.push_back(Rational(1, 16));
    else
      out.push_back(0);
  }
  return out;
}

}  // namespace

InflationProblem make_inflation_problem(int classical_source) {
  if (classical_source < 1 || classical_source > 3)
    throw std::invalid_argument("classical source placement must be 1, 2 or 3");
  InflationProblem problem;
  problem.base = dist::Scenario::star();
  problem.classical_source = classical_source;
  walk_rows([&](const InflationProblem::RowInfo& info, const std::vector<long>&,
                const std::vector<int>&) { problem.rows.push_back(info); });
  return problem;
}

std::vector<Rational> rationalize_distribution(const dist::ConditionalDistribution& d,
                                               const RationalizeOptions& options) {
  const dist::Scenario& sc = d.scenario();
  const long jo = sc.joint_outputs();
  std::vector<Rational> out(sc.joint_inputs() * jo);
  for (long i = 0; i < sc.joint_inputs(); ++i) {
    Rational sum = 0;
    long largest = 0;
    for (long o = 0; o < jo; ++o) {
      out[i * jo + o] = rational_from_double(d.p(i, o), options.denominator_bound);
      sum += out[i * jo + o];
      if (d.p(i, o) > d.p(i, largest)) largest = o;
    }
    // keep each setting summing to exactly 1; exact inputs pass unchanged
    out[i * jo + largest] -= sum - 1;
    if (out[i * jo + largest] < 0)
      throw std::domain_error("rationalization bound too coarse for this distribution");
  }
  return out;
}

lp::LinearSystem build_inflation_lp(const dist::ConditionalDistribution& d,
                                    const InflationProblem& problem,
                                    const RationalizeOptions& options) {
  if (!(d.scenario() == dist::Scenario::star()))
    throw std::invalid_argument("inflation LP needs the star scenario");
  const dist::ValidationReport rep = dist::validate(d);
  if (!rep.valid)
    throw std::invalid_argument("inflation LP refused an invalid distribution");

  const dist::ConditionalDistribution rel = relabel_to_branch1(d, problem.classical_source);
  const std::vector<Rational> q = rationalize_distribution(rel, options);
  const long jo = rel.scenario().joint_outputs();

  lp::LinearSystem ls;
  ls.num_vars = InflationProblem::num_vars;
  ls.labels.reserve(ls.num_vars);
  for (int s = 0; s < 32; ++s)
    for (int o = 0; o < 64; ++o) {
      std::string label = "p(";
      for (int k = 0; k < 6; ++k) label += char('0' + obit(o, k));
      label += '|';
      for (int k = 0; k < 5; ++k) label += char('0' + sbit(s, k));
      label += ')';
      ls.labels.push_back(std::move(label));
    }

  walk_rows([&](const InflationProblem::RowInfo& info, const std::vector<long>& cols,
                const std::vector<int>& coeffs) {
    lp::SparseRow row;
    for (size_t k = 0; k < cols.size(); ++k)
      row.add(static_cast<int32_t>(cols[k]), Rational(coeffs[k]));
    row.normalize();
    Rational rhs = 0;
    if (info.kind == InflationProblem::RowKind::normalization)
      rhs = 1;
    else if (info.kind == InflationProblem::RowKind::marginal)
      rhs = q[info.base_input * jo + info.base_output];
    ls.add_eq(std::move(row), std::move(rhs));
  });
  return ls;
}

lp::LinearSystem build_inflation_lp(const dist::ConditionalDistribution& d, int classical_source,
                                    const RationalizeOptions& options) {
  return build_inflation_lp(d, make_inflation_problem(classical_source), options);
}

FnnReport certify_fnn(const dist::ConditionalDistribution& d, const CertifyOptions& options) {
  FnnReport report;
  auto run_placement = [&](int k) {
    PlacementResult out;
    out.classical_source = k;
    try {
      const InflationProblem problem = make_inflation_problem(k);
      const lp::LinearSystem ls = build_inflation_lp(d, problem, options.rationalize);
      lp::SolveResult res = lp::feasibility(ls, options.solve);
      out.feasible = res.feasible;
      out.certificate = std::move(res.certificate);
      out.stats = res.stats;
    } catch (const std::exception& e) {
      throw std::runtime_error("placement " + std::to_string(k) + ": " + e.what());
    }
    return out;
  };

  if (options.parallel) {
    std::array<std::exception_ptr, 3> errors{};
    std::vector<std::thread> workers;
    for (int k = 1; k <= 3; ++k)
      workers.emplace_back([&, k] {
        try {
          report.placements[k - 1] = run_placement(k);
        } catch (...) {
          errors[k - 1] = std::current_exception();
        }
      });
    for (auto& t : workers) t.join();
    for (const auto& e : errors)
      if (e) std::rethrow_exception(e);
  } else {
    for (int k = 1; k <= 3; ++k) report.placements[k - 1] = run_placement(k);
  }

  report.fnn = true;
  for (const auto& p : report.placements)
    if (p.feasible) report.fnn = false;
  return report;
}

lp::FarkasCertificate tighten_certificate(const dist::ConditionalDistribution& d,
                                          const InflationProblem& problem,
                                          const lp::FarkasCertificate& cert,
                                          const TightenOptions& options) {
  const lp::LinearSystem ls = build_inflation_lp(d, problem, options.rationalize);
  if (!lp::verify_certificate(ls, cert))
    throw std::invalid_argument("tighten_certificate: input certificate does not verify");

  lp::detail::PresolveOutcome pre = lp::detail::presolve(ls);
  if (!pre.reduced) return cert;
  const auto& ps = *pre.reduced;
  if (!lp::detail::rhs_invariant(ps)) return cert;
  const lp::LinearSystem& red = lp::detail::reduced_system(ps);
  if (!red.ge.empty()) return cert;

  const std::vector<Rational> b_u_orig = uniform_rhs_by_kind(problem);
  const int m = static_cast<int>(red.eq.size());
  std::vector<Rational> b_t(m), b_u(m);
  for (int r = 0; r < m; ++r) {
    b_t[r] = red.eq_rhs[r];
    b_u[r] = b_u_orig[lp::detail::reduced_eq_origin(ps)[r]];
  }

  // Dual cone feasibility in split variables y = y+ - y-:
  //   (y^T A)_j <= 0 for all j,  y^T b_u = -2,  y^T b_t >= t.
  auto dual_system = [&](const Rational& t) {
    lp::LinearSystem dual;
    dual.num_vars = 2 * m;
    std::vector<lp::SparseRow> cone(red.num_vars);
    for (int r = 0; r < m; ++r)
      for (const auto& [c, v] : red.eq[r].terms) {
        cone[c].add(r, -v);
        cone[c].add(m + r, v);
      }
    for (int c = 0; c < red.num_vars; ++c) {
      cone[c].normalize();
      dual.add_ge(std::move(cone[c]), Rational(0));
    }
    lp::SparseRow calib, target;
    for (int r = 0; r < m; ++r) {
      calib.add(r, b_u[r]);
      calib.add(m + r, -b_u[r]);
      target.add(r, b_t[r]);
      target.add(m + r, -b_t[r]);
    }
    calib.normalize();
    target.normalize();
    dual.add_eq(std::move(calib), Rational(-2));
    dual.add_ge(std::move(target), t);
    return dual;
  };

  auto probe = [&](double t) {
    const lp::LinearSystem dual = dual_system(rational_from_double(t, 1000000));
    const auto fr = lp::detail::float_phase1(dual, options.solve.max_pivots);
    return fr.ok && fr.feasible;
  };

  if (!probe(0.0)) return cert;
  double lo = 0.0, hi = 0.25;
  int expansions = 0;
  while (probe(hi) && expansions++ < 8) {
    lo = hi;
    hi *= 2.0;
  }
  int steps = 0;
  while (hi - lo > options.tolerance && steps++ < options.max_bisections) {
    const double mid = 0.5 * (lo + hi);
    if (probe(mid))
      lo = mid;
    else
      hi = mid;
  }

  // Exact solve at the best feasible level (with a small retreat if the float
  // probe was optimistic), then lift back to the full system.
  for (double t : {lo, lo - options.tolerance, 0.5 * lo}) {
    if (t <= 0.0) continue;
    lp::SolveResult res = lp::feasibility(dual_system(rational_from_double(t, 1000000)),
                                          options.solve);
    if (!res.feasible) continue;
    lp::FarkasCertificate red_cert;
    red_cert.y_eq.resize(m);
    for (int r = 0; r < m; ++r) red_cert.y_eq[r] = (*res.point)[r] - (*res.point)[m + r];
    lp::FarkasCertificate full = lp::detail::lift_certificate(ps, red_cert);
    if (lp::verify_certificate(ls, full)) return full;
  }
  return cert;
}

}  // namespace fnncert::inflation
