// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <random>

#include "fnncert/lp.hpp"

using namespace fnncert;
using lp::LinearSystem;
using lp::SparseRow;

namespace {

SparseRow row(std::initializer_list<std::pair<int, int>> entries) {
  SparseRow r;
  for (const auto& [c, v] : entries) r.add(c, Rational(v));
  r.normalize();
  return r;
}

// Brute-force feasibility oracle for {A_eq x = b_eq, A_ge x >= b_ge, x >= 0}:
// convert to standard equality form with surplus variables and enumerate
// every potential vertex support (independent column subsets), exactly.
bool oracle_feasible(const LinearSystem& ls) {
  const int n = ls.num_vars + static_cast<int>(ls.ge.size());
  const int m = static_cast<int>(ls.eq.size() + ls.ge.size());
  if (n > 20) throw std::logic_error("oracle is for small systems only");

  std::vector<std::vector<Rational>> a(m, std::vector<Rational>(n, Rational(0)));
  std::vector<Rational> b(m);
  for (size_t r = 0; r < ls.eq.size(); ++r) {
    for (const auto& [c, v] : ls.eq[r].terms) a[r][c] = v;
    b[r] = ls.eq_rhs[r];
  }
  for (size_t r = 0; r < ls.ge.size(); ++r) {
    const size_t rr = ls.eq.size() + r;
    for (const auto& [c, v] : ls.ge[r].terms) a[rr][c] = v;
    a[rr][ls.num_vars + r] = -1;
    b[rr] = ls.ge_rhs[r];
  }

  // solve A_S x_S = b by Gaussian elimination; consistent solutions with free
  // support columns fixed at 0 are checked against the full system
  auto try_support = [&](const std::vector<int>& support) {
    std::vector<std::vector<Rational>> g(m, std::vector<Rational>(support.size() + 1));
    for (int r = 0; r < m; ++r) {
      for (size_t k = 0; k < support.size(); ++k) g[r][k] = a[r][support[k]];
      g[r][support.size()] = b[r];
    }
    std::vector<int> pivot_col_of_row(m, -1);
    size_t rank = 0;
    for (size_t col = 0; col < support.size() && rank < static_cast<size_t>(m); ++col) {
      size_t pr = rank;
      while (pr < static_cast<size_t>(m) && g[pr][col] == 0) ++pr;
      if (pr == static_cast<size_t>(m)) continue;
      std::swap(g[rank], g[pr]);
      for (size_t r = 0; r < static_cast<size_t>(m); ++r) {
        if (r == rank || g[r][col] == 0) continue;
        const Rational f = g[r][col] / g[rank][col];
        for (size_t c = col; c <= support.size(); ++c) g[r][c] -= f * g[rank][c];
      }
      pivot_col_of_row[rank] = static_cast<int>(col);
      ++rank;
    }
    for (size_t r = rank; r < static_cast<size_t>(m); ++r)
      if (g[r][support.size()] != 0) return false;  // inconsistent

    std::vector<Rational> xs(support.size(), Rational(0));
    for (size_t r = rank; r-- > 0;) {
      const int c = pivot_col_of_row[r];
      Rational acc = g[r][support.size()];
      for (size_t cc = c + 1; cc < support.size(); ++cc) acc -= g[r][cc] * xs[cc];
      xs[c] = acc / g[r][c];
    }
    for (const Rational& v : xs)
      if (v < 0) return false;
    // verify on the full system
    std::vector<Rational> x(n, Rational(0));
    for (size_t k = 0; k < support.size(); ++k) x[support[k]] = xs[k];
    for (int r = 0; r < m; ++r) {
      Rational s = 0;
      for (int c = 0; c < n; ++c) s += a[r][c] * x[c];
      if (s != b[r]) return false;
    }
    return true;
  };

  for (unsigned mask = 0; mask < (1u << n); ++mask) {
    if (__builtin_popcount(mask) > m) continue;
    std::vector<int> support;
    for (int c = 0; c < n; ++c)
      if (mask & (1u << c)) support.push_back(c);
    if (try_support(support)) return true;
  }
  return false;
}

LinearSystem random_system(std::mt19937_64& rng) {
  LinearSystem ls;
  ls.num_vars = 2 + static_cast<int>(rng() % 4);
  const int n_eq = static_cast<int>(rng() % 4);
  const int n_ge = static_cast<int>(rng() % 3);
  auto coeff = [&] { return static_cast<int>(rng() % 7) - 3; };
  for (int r = 0; r < n_eq; ++r) {
    SparseRow row;
    for (int c = 0; c < ls.num_vars; ++c) row.add(c, Rational(coeff()));
    row.normalize();
    ls.add_eq(std::move(row), Rational(coeff()));
  }
  for (int r = 0; r < n_ge; ++r) {
    SparseRow row;
    for (int c = 0; c < ls.num_vars; ++c) row.add(c, Rational(coeff()));
    row.normalize();
    ls.add_ge(std::move(row), Rational(coeff()));
  }
  return ls;
}

}  // namespace

TEST_CASE("one-variable systems") {
  LinearSystem feasible;
  feasible.num_vars = 1;
  feasible.add_eq(row({{0, 1}}), Rational(1));
  const auto fr = lp::feasibility(feasible);
  REQUIRE(fr.feasible);
  CHECK((*fr.point)[0] == 1);

  LinearSystem infeasible;
  infeasible.num_vars = 1;
  infeasible.add_eq(row({{0, 1}}), Rational(-1));
  const auto ir = lp::feasibility(infeasible);
  REQUIRE_FALSE(ir.feasible);
  REQUIRE(ir.certificate.has_value());
  CHECK(lp::verify_certificate(infeasible, *ir.certificate));
  const auto ic = lp::integerize_certificate(*ir.certificate);
  CHECK(ic.y_eq[0] == -1);  // y_eq = -1 so y.b = 1 > 0
}

TEST_CASE("perturbing a tight certificate breaks it") {
  LinearSystem ls;
  ls.num_vars = 2;
  ls.add_eq(row({{0, 1}, {1, -1}}), Rational(0));
  ls.add_eq(row({{1, 1}}), Rational(-1));
  lp::FarkasCertificate cert;
  cert.y_eq = {Rational(0), Rational(-1)};
  CHECK(lp::verify_certificate(ls, cert));
  cert.y_eq[0] += Rational(1, 1000000);
  CHECK_FALSE(lp::verify_certificate(ls, cert));
}

TEST_CASE("certificate invariance under marginal-style rhs changes") {
  // validity of (y^T A <= 0, y^T b > 0) depends on b only through y^T b
  LinearSystem ls;
  ls.num_vars = 2;
  ls.add_eq(row({{0, 1}, {1, 1}}), Rational(1));
  ls.add_eq(row({{0, 1}}), Rational(2));  // forces x0 = 2 > 1: infeasible with x >= 0
  const auto r = lp::feasibility(ls);
  REQUIRE_FALSE(r.feasible);
  LinearSystem changed = ls;
  changed.eq_rhs[1] = Rational(3);
  // the cone condition y^T A <= 0 is untouched by rhs edits
  lp::FarkasCertificate cert = *r.certificate;
  Rational yb = cert.y_eq[0] * changed.eq_rhs[0] + cert.y_eq[1] * changed.eq_rhs[1];
  if (yb > 0) CHECK(lp::verify_certificate(changed, cert));
}

TEST_CASE("feasibility agrees with the brute-force oracle on random systems") {
  std::mt19937_64 rng(20260810);
  int feasible_count = 0, infeasible_count = 0;
  for (int trial = 0; trial < 300; ++trial) {
    const LinearSystem ls = random_system(rng);
    const bool expected = oracle_feasible(ls);

    for (int mode = 0; mode < 3; ++mode) {
      lp::SolveOptions opt;
      opt.use_presolve = mode != 1;
      opt.use_float_path = mode != 2;
      const auto res = lp::feasibility(ls, opt);
      CHECK(res.feasible == expected);
      if (res.feasible) {
        CHECK(lp::check_point(ls, *res.point));
      } else {
        CHECK(lp::verify_certificate(ls, *res.certificate));
      }
    }
    (expected ? feasible_count : infeasible_count)++;
  }
  // the generator must exercise both outcomes
  CHECK(feasible_count > 30);
  CHECK(infeasible_count > 30);
}

TEST_CASE("identical inputs produce identical certificates") {
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 50; ++trial) {
    const LinearSystem ls = random_system(rng);
    const auto a = lp::feasibility(ls);
    const auto b = lp::feasibility(ls);
    REQUIRE(a.feasible == b.feasible);
    if (!a.feasible) {
      CHECK(a.certificate->y_eq == b.certificate->y_eq);
      CHECK(a.certificate->y_ge == b.certificate->y_ge);
    } else {
      CHECK(*a.point == *b.point);
    }
  }
}

TEST_CASE("rational approximation") {
  CHECK(rational_approx(Rational(3, 7), 100) == Rational(3, 7));
  CHECK(rational_approx(Rational(355, 113), 50) == Rational(22, 7));
  // best approximation property vs exhaustive search, denominators <= 25
  std::mt19937_64 rng(3);
  for (int k = 0; k < 200; ++k) {
    const Rational x(static_cast<long>(rng() % 10007), 10007);
    const Rational approx = rational_approx(x, 25);
    for (long q = 1; q <= 25; ++q) {
      const long p_near = std::lround(x.get_d() * static_cast<double>(q));
      for (long p = p_near - 1; p <= p_near + 1; ++p) {
        Rational cand(p, q);
        cand.canonicalize();
        CHECK(abs(x - approx) <= abs(x - cand));
      }
    }
  }
  CHECK(rational_from_double(0.5, 10) == Rational(1, 2));
  CHECK(rational_from_double(0.125, 1000) == Rational(1, 8));
}

TEST_CASE("integerize clears denominators and divides by the gcd") {
  const auto v = integerize({Rational(1, 2), Rational(-3, 4), Rational(0)});
  CHECK(v == std::vector<Integer>{Integer(2), Integer(-3), Integer(0)});
  const auto w = integerize({Rational(2), Rational(4)});
  CHECK(w == std::vector<Integer>{Integer(1), Integer(2)});
}

TEST_CASE("certificate JSON round-trip") {
  lp::FarkasCertificate cert;
  cert.y_eq = {Rational(-3), Rational(7)};
  cert.y_ge = {Rational(2)};
  const std::string j = lp::certificate_to_json(cert);
  const auto back = lp::certificate_from_json(j);
  CHECK(back.y_eq == cert.y_eq);
  CHECK(back.y_ge == cert.y_ge);
}

TEST_CASE("lp text export mentions exact rationals") {
  LinearSystem ls;
  ls.num_vars = 2;
  ls.add_eq(row({{0, 1}, {1, 2}}), Rational(1, 3));
  ls.add_ge(row({{0, 1}}), Rational(-2));
  const std::string text = lp::to_lp_text(ls);
  CHECK(text.find("1/3") != std::string::npos);
  CHECK(text.find(">=") != std::string::npos);
  CHECK(text.find("Bounds") != std::string::npos);
}
