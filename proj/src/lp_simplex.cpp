// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <map>
#include <vector>

#include "fnncert/lp.hpp"
#include "lp_internal.hpp"

namespace fnncert::lp::detail {

namespace {

template <typename T>
struct Num;

template <>
struct Num<double> {
  static bool is_zero(double v) { return std::abs(v) < 1e-11; }
  static bool cost_negative(double v) { return v < -1e-9; }
  static bool pivot_ok(double v) { return v > 1e-11; }
  static double from_rational(const Rational& q) { return q.get_d(); }
};

template <>
struct Num<Rational> {
  static bool is_zero(const Rational& v) { return v == 0; }
  static bool cost_negative(const Rational& v) { return v < 0; }
  static bool pivot_ok(const Rational& v) { return v > 0; }
  static Rational from_rational(const Rational& q) { return q; }
};

// Dense phase-1 tableau for
//    [A_eq; A_ge - s] x = b,  x, s >= 0,
// rows scaled so b >= 0, artificial basis, objective = sum of artificials.
template <typename T>
struct Tableau {
  int m = 0;        // rows
  int n = 0;        // structural + surplus columns
  int width = 0;    // n + m artificials + rhs
  std::vector<T> a;  // (m+1) x width, row m = reduced costs / objective
  std::vector<int> basis;
  std::vector<int> row_sign;  // original row orientation

  T& at(int r, int c) { return a[static_cast<size_t>(r) * width + c]; }

  void build(const LinearSystem& ls) {
    const int n_eq = static_cast<int>(ls.eq.size());
    const int n_ge = static_cast<int>(ls.ge.size());
    m = n_eq + n_ge;
    n = ls.num_vars + n_ge;
    width = n + m + 1;
    a.assign(static_cast<size_t>(m + 1) * width, T(0));
    basis.resize(m);
    row_sign.assign(m, 1);

    for (int r = 0; r < m; ++r) {
      const bool is_eq = r < n_eq;
      const SparseRow& row = is_eq ? ls.eq[r] : ls.ge[r - n_eq];
      const Rational& rhs = is_eq ? ls.eq_rhs[r] : ls.ge_rhs[r - n_eq];
      const int sign = rhs < 0 ? -1 : 1;
      row_sign[r] = sign;
      for (const auto& [c, v] : row.terms) at(r, c) = Num<T>::from_rational(sign * v);
      if (!is_eq) at(r, ls.num_vars + (r - n_eq)) = T(sign * -1);  // surplus
      at(r, width - 1) = Num<T>::from_rational(sign * rhs);
      at(r, n + r) = T(1);  // artificial
      basis[r] = n + r;
    }
    // reduced costs r_j = c_j - y^T A_j with the artificial basis (y = 1);
    // the rhs cell carries -objective so it transforms like any other cell
    for (int c = 0; c < width; ++c) {
      T s(0);
      for (int r = 0; r < m; ++r) s += at(r, c);
      at(m, c) = (c >= n && c < n + m) ? T(0) : T(-s);
    }
  }

  void pivot(int pr, int pc) {
    const T p = at(pr, pc);
    for (int c = 0; c < width; ++c) at(pr, c) /= p;
    for (int r = 0; r <= m; ++r) {
      if (r == pr) continue;
      const T f = at(r, pc);
      if (Num<T>::is_zero(f)) continue;
      for (int c = 0; c < width; ++c) at(r, c) -= f * at(pr, c);
    }
    basis[pr] = pc;
  }

  // Returns pivots executed, or -1 on iteration limit.
  long run(long max_pivots, bool bland_always) {
    long pivots = 0;
    long stall = 0;
    bool bland = bland_always;
    T last_obj = objective();
    while (pivots < max_pivots) {
      int pc = -1;
      if (bland) {
        for (int c = 0; c < n + m; ++c)
          if (Num<T>::cost_negative(at(m, c))) {
            pc = c;
            break;
          }
      } else {
        T best(0);
        for (int c = 0; c < n + m; ++c)
          if (at(m, c) < best) {
            best = at(m, c);
            pc = c;
          }
        if (pc >= 0 && !Num<T>::cost_negative(at(m, pc))) pc = -1;
      }
      if (pc < 0) return pivots;  // optimal

      int pr = -1;
      T best_ratio(0);
      for (int r = 0; r < m; ++r) {
        if (!Num<T>::pivot_ok(at(r, pc))) continue;
        const T ratio = at(r, width - 1) / at(r, pc);
        if (pr < 0 || ratio < best_ratio ||
            (ratio == best_ratio && basis[r] < basis[pr]))
          pr = r, best_ratio = ratio;
      }
      if (pr < 0) return pivots;  // phase-1 objective cannot be unbounded; treat as optimal

      pivot(pr, pc);
      ++pivots;
      if (!bland) {
        const T obj = objective();
        if (!(obj < last_obj)) {
          if (++stall > 200) bland = true;  // anti-cycling
        } else {
          stall = 0;
          last_obj = obj;
        }
      }
    }
    return -1;
  }

  T objective() { return -at(m, width - 1); }

  std::vector<T> structural_point(int num_vars) {
    std::vector<T> x(num_vars, T(0));
    for (int r = 0; r < m; ++r)
      if (basis[r] < num_vars) x[basis[r]] = at(r, width - 1);
    return x;
  }

  // Row multipliers in the original row orientation: y_i = 1 - redcost(art_i).
  std::vector<T> duals() {
    std::vector<T> y(m);
    for (int r = 0; r < m; ++r) y[r] = T(row_sign[r]) * (T(1) - at(m, n + r));
    return y;
  }
};

}  // namespace

FloatResult float_phase1(const LinearSystem& ls, long max_pivots) {
  Tableau<double> t;
  t.build(ls);
  FloatResult out;
  const long pivots = t.run(max_pivots, false);
  if (pivots < 0) return out;  // ok = false
  out.ok = true;
  out.pivots = pivots;
  out.feasible = t.objective() < 1e-7;
  out.x = t.structural_point(ls.num_vars);
  out.y = t.duals();
  out.basis = t.basis;
  return out;
}

ExactResult exact_phase1(const LinearSystem& ls, long max_pivots) {
  Tableau<Rational> t;
  t.build(ls);
  ExactResult out;
  const long pivots = t.run(max_pivots, true);
  if (pivots < 0) return out;
  out.ok = true;
  out.pivots = pivots;
  out.feasible = t.objective() == 0;
  out.x = t.structural_point(ls.num_vars);
  out.y = t.duals();
  return out;
}

std::optional<std::vector<Rational>> solve_on_support(const LinearSystem& ls,
                                                      const std::vector<int>& support) {
  if (!ls.ge.empty()) return std::nullopt;  // equality systems only
  const size_t m = ls.eq.size();
  std::vector<int> col_pos(ls.num_vars, -1);
  for (size_t k = 0; k < support.size(); ++k) col_pos[support[k]] = static_cast<int>(k);

  std::vector<std::map<int, Rational>> rows(m);
  std::vector<Rational> rhs = ls.eq_rhs;
  std::vector<std::vector<int>> col_rows(support.size());
  for (size_t r = 0; r < m; ++r) {
    for (const auto& [c, v] : ls.eq[r].terms) {
      if (col_pos[c] >= 0) {
        rows[r][col_pos[c]] = v;
        col_rows[col_pos[c]].push_back(static_cast<int>(r));
      } else {
        // columns outside the support are pinned to zero
      }
    }
  }

  std::vector<char> row_done(m, 0);
  std::vector<std::pair<int, int>> pivots;  // (row, col) in elimination order
  for (size_t step = 0; step < support.size(); ++step) {
    // pivot: unprocessed row with fewest entries
    int pr = -1;
    size_t best = SIZE_MAX;
    for (size_t r = 0; r < m; ++r)
      if (!row_done[r] && !rows[r].empty() && rows[r].size() < best) {
        best = rows[r].size();
        pr = static_cast<int>(r);
      }
    if (pr < 0) break;
    const int pc = rows[pr].begin()->first;
    const Rational pv = rows[pr].begin()->second;
    row_done[pr] = 1;
    pivots.push_back({pr, pc});
    // eliminate pc from every other row
    std::vector<int> targets = col_rows[pc];
    std::sort(targets.begin(), targets.end());
    targets.erase(std::unique(targets.begin(), targets.end()), targets.end());
    for (int r : targets) {
      if (r == pr || row_done[r]) continue;
      auto it = rows[r].find(pc);
      if (it == rows[r].end()) continue;
      const Rational f = it->second / pv;
      rows[r].erase(it);
      for (const auto& [c, v] : rows[pr]) {
        if (c == pc) continue;
        Rational& cell = rows[r][c];
        cell -= f * v;
        if (cell == 0)
          rows[r].erase(c);
        else
          col_rows[c].push_back(r);
      }
      rhs[r] -= f * rhs[pr];
    }
  }

  // consistency: untouched rows must now read 0 = 0
  for (size_t r = 0; r < m; ++r)
    if (!row_done[r]) {
      if (!rows[r].empty()) return std::nullopt;  // free support columns remain
      if (rhs[r] != 0) return std::nullopt;
    }

  std::vector<Rational> xs(support.size(), Rational(0));
  for (size_t k = pivots.size(); k-- > 0;) {
    const auto [r, c] = pivots[k];
    Rational acc = rhs[r];
    Rational diag = 0;
    for (const auto& [cc, v] : rows[r]) {
      if (cc == c)
        diag = v;
      else
        acc -= v * xs[cc];
    }
    if (diag == 0) return std::nullopt;
    xs[c] = acc / diag;
  }

  std::vector<Rational> x(ls.num_vars, Rational(0));
  for (size_t k = 0; k < support.size(); ++k) x[support[k]] = xs[k];
  return x;
}

}  // namespace fnncert::lp::detail
