// SPDX-License-Identifier: Apache-2.0
#include <algorithm>
#include <deque>
#include <map>

#include "fnncert/lp.hpp"
#include "lp_internal.hpp"

namespace fnncert::lp::detail {

namespace {

using Row = std::vector<std::pair<int, Rational>>;

Rational* find_entry(Row& row, int col) {
  auto it = std::lower_bound(row.begin(), row.end(), col,
                             [](const auto& e, int c) { return e.first < c; });
  if (it != row.end() && it->first == col) return &it->second;
  return nullptr;
}

void erase_entry(Row& row, int col) {
  auto it = std::lower_bound(row.begin(), row.end(), col,
                             [](const auto& e, int c) { return e.first < c; });
  if (it != row.end() && it->first == col) row.erase(it);
}

void set_entry(Row& row, int col, const Rational& value) {
  auto it = std::lower_bound(row.begin(), row.end(), col,
                             [](const auto& e, int c) { return e.first < c; });
  if (it != row.end() && it->first == col) {
    if (value == 0)
      row.erase(it);
    else
      it->second = value;
  } else if (value != 0) {
    row.insert(it, {col, value});
  }
}

struct Work {
  std::vector<Row> eq;
  std::vector<Rational> eq_rhs;
  std::vector<char> eq_alive;
  std::vector<Row> ge;
  std::vector<Rational> ge_rhs;
  std::vector<char> col_alive;
  std::vector<std::vector<int>> col_eq;  // candidate row ids, may be stale
  std::vector<std::vector<int>> col_ge;

  ColContent snapshot(int col, int exclude_eq_row) {
    ColContent out;
    for (int r : col_eq[col]) {
      if (!eq_alive[r] || r == exclude_eq_row) continue;
      if (const Rational* c = find_entry(eq[r], col)) out.eq_entries.push_back({r, *c});
    }
    std::sort(out.eq_entries.begin(), out.eq_entries.end());
    out.eq_entries.erase(std::unique(out.eq_entries.begin(), out.eq_entries.end()),
                         out.eq_entries.end());
    for (int r : col_ge[col]) {
      if (const Rational* c = find_entry(ge[r], col)) out.ge_entries.push_back({r, *c});
    }
    std::sort(out.ge_entries.begin(), out.ge_entries.end());
    out.ge_entries.erase(std::unique(out.ge_entries.begin(), out.ge_entries.end()),
                         out.ge_entries.end());
    return out;
  }
};

struct Lifter {
  const std::vector<Record>& records;
  size_t upto;  // number of records applied before this lift

  FarkasCertificate lift(std::vector<Rational> y_eq, std::vector<Rational> y_ge) const {
    auto colsum = [&](const ColContent& c) {
      Rational s = 0;
      for (const auto& [r, v] : c.eq_entries) s += y_eq[r] * v;
      for (const auto& [r, v] : c.ge_entries) s += y_ge[r] * v;
      return s;
    };
    for (size_t k = upto; k-- > 0;) {
      const Record& rec = records[k];
      if (const auto* d = std::get_if<RecDropRow>(&rec)) {
        y_eq[d->row] = 0;
      } else if (const auto* f = std::get_if<RecFixVar>(&rec)) {
        if (f->row >= 0) y_eq[f->row] = -colsum(f->content) / f->row_coeff;
      } else if (const auto* m = std::get_if<RecMerge>(&rec)) {
        y_eq[m->row] = -colsum(m->u_content) / m->c_u;
      } else if (const auto* fo = std::get_if<RecForcing>(&rec)) {
        bool first = true;
        Rational dial = 0;
        const bool positive = fo->row_terms.front().second > 0;
        for (const auto& [col, coeff] : fo->row_terms) {
          Rational bound = -colsum(
              std::find_if(fo->cols.begin(), fo->cols.end(),
                           [&](const auto& e) { return e.first == col; })
                  ->second);
          bound /= coeff;
          if (first || (positive ? bound < dial : bound > dial)) dial = bound;
          first = false;
        }
        y_eq[fo->row] = dial;
      }
    }
    return FarkasCertificate{std::move(y_eq), std::move(y_ge)};
  }

  std::vector<Rational> lift_point(std::vector<Rational> x) const {
    for (size_t k = upto; k-- > 0;) {
      const Record& rec = records[k];
      if (const auto* f = std::get_if<RecFixVar>(&rec)) {
        x[f->col] = f->value;
      } else if (const auto* m = std::get_if<RecMerge>(&rec)) {
        x[m->col_u] = m->gamma * x[m->col_v];
      } else if (const auto* fo = std::get_if<RecForcing>(&rec)) {
        for (const auto& [col, content] : fo->cols) x[col] = 0;
      }
    }
    return x;
  }
};

}  // namespace

PresolveOutcome presolve(const LinearSystem& ls) {
  Work w;
  w.col_alive.assign(ls.num_vars, 1);
  w.col_eq.assign(ls.num_vars, {});
  w.col_ge.assign(ls.num_vars, {});
  w.eq_rhs = ls.eq_rhs;
  w.ge_rhs = ls.ge_rhs;
  w.eq_alive.assign(ls.eq.size(), 1);
  w.eq.reserve(ls.eq.size());
  for (size_t r = 0; r < ls.eq.size(); ++r) {
    Row row = ls.eq[r].terms;
    w.eq.push_back(std::move(row));
    for (const auto& [c, v] : w.eq.back()) w.col_eq[c].push_back(static_cast<int>(r));
  }
  for (size_t r = 0; r < ls.ge.size(); ++r) {
    w.ge.push_back(ls.ge[r].terms);
    for (const auto& [c, v] : w.ge.back()) w.col_ge[c].push_back(static_cast<int>(r));
  }

  std::vector<Record> records;
  bool rhs_transplantable = true;

  auto make_infeasible = [&](std::vector<Rational> y_eq, std::vector<Rational> y_ge) {
    Lifter lifter{records, records.size()};
    PresolveOutcome out;
    out.certificate = lifter.lift(std::move(y_eq), std::move(y_ge));
    return out;
  };
  auto zeros_eq = [&] { return std::vector<Rational>(ls.eq.size(), Rational(0)); };
  auto zeros_ge = [&] { return std::vector<Rational>(ls.ge.size(), Rational(0)); };

  std::deque<int> queue;
  std::vector<char> queued(ls.eq.size(), 1);
  for (size_t r = 0; r < ls.eq.size(); ++r) queue.push_back(static_cast<int>(r));
  auto enqueue = [&](int r) {
    if (w.eq_alive[r] && !queued[r]) {
      queued[r] = 1;
      queue.push_back(r);
    }
  };

  auto fix_col = [&](int col, const Rational& value) {
    w.col_alive[col] = 0;
    for (int r : w.col_eq[col]) {
      if (!w.eq_alive[r]) continue;
      if (const Rational* c = find_entry(w.eq[r], col)) {
        if (value != 0) {
          w.eq_rhs[r] -= *c * value;
          rhs_transplantable = false;
        }
        erase_entry(w.eq[r], col);
        enqueue(r);
      }
    }
    for (int r : w.col_ge[col]) {
      if (const Rational* c = find_entry(w.ge[r], col)) {
        if (value != 0) {
          w.ge_rhs[r] -= *c * value;
          rhs_transplantable = false;
        }
        erase_entry(w.ge[r], col);
      }
    }
  };

  auto merge_col = [&](int u, int v, const Rational& gamma) {
    w.col_alive[u] = 0;
    for (int r : w.col_eq[u]) {
      if (!w.eq_alive[r]) continue;
      if (const Rational* cu = find_entry(w.eq[r], u)) {
        const Rational add = *cu * gamma;
        erase_entry(w.eq[r], u);
        Rational cur = 0;
        if (const Rational* cv = find_entry(w.eq[r], v)) cur = *cv;
        set_entry(w.eq[r], v, cur + add);
        w.col_eq[v].push_back(r);
        enqueue(r);
      }
    }
    for (int r : w.col_ge[u]) {
      if (const Rational* cu = find_entry(w.ge[r], u)) {
        const Rational add = *cu * gamma;
        erase_entry(w.ge[r], u);
        Rational cur = 0;
        if (const Rational* cv = find_entry(w.ge[r], v)) cur = *cv;
        set_entry(w.ge[r], v, cur + add);
        w.col_ge[v].push_back(r);
      }
    }
  };

  while (!queue.empty()) {
    const int r = queue.front();
    queue.pop_front();
    queued[r] = 0;
    if (!w.eq_alive[r]) continue;
    Row& row = w.eq[r];

    if (row.empty()) {
      if (w.eq_rhs[r] != 0) {
        auto y = zeros_eq();
        y[r] = w.eq_rhs[r] > 0 ? 1 : -1;
        return make_infeasible(std::move(y), zeros_ge());
      }
      records.push_back(RecDropRow{r});
      w.eq_alive[r] = 0;
      continue;
    }

    if (row.size() == 1) {
      const int col = row[0].first;
      const Rational c = row[0].second;
      const Rational v = w.eq_rhs[r] / c;
      if (v < 0) {
        auto y = zeros_eq();
        y[r] = c > 0 ? -1 : 1;
        return make_infeasible(std::move(y), zeros_ge());
      }
      records.push_back(RecFixVar{col, v, r, c, w.snapshot(col, r)});
      w.eq_alive[r] = 0;
      fix_col(col, v);
      continue;
    }

    bool all_pos = true, all_neg = true;
    for (const auto& [c, v] : row) {
      if (v > 0) all_neg = false;
      if (v < 0) all_pos = false;
    }

    if (row.size() == 2 && w.eq_rhs[r] == 0 && !all_pos && !all_neg) {
      // opposite signs: x_u = gamma x_v, eliminate the larger column id
      auto [c0, v0] = row[0];
      auto [c1, v1] = row[1];
      const int u = std::max(c0, c1), keep = std::min(c0, c1);
      const Rational cu = (u == c0) ? v0 : v1;
      const Rational cv = (u == c0) ? v1 : v0;
      const Rational gamma = -cv / cu;
      records.push_back(RecMerge{r, u, keep, gamma, cu, w.snapshot(u, r)});
      w.eq_alive[r] = 0;
      merge_col(u, keep, gamma);
      continue;
    }

    if (all_pos || all_neg) {
      if (w.eq_rhs[r] == 0) {
        RecForcing rec;
        rec.row = r;
        rec.row_terms = row;
        for (const auto& [col, c] : row) rec.cols.push_back({col, w.snapshot(col, r)});
        records.push_back(std::move(rec));
        w.eq_alive[r] = 0;
        for (const auto& [col, c] :
             std::get<RecForcing>(records.back()).row_terms)
          fix_col(col, 0);
        continue;
      }
      if ((all_pos && w.eq_rhs[r] < 0) || (all_neg && w.eq_rhs[r] > 0)) {
        auto y = zeros_eq();
        y[r] = all_pos ? -1 : 1;
        return make_infeasible(std::move(y), zeros_ge());
      }
    }
  }

  // Duplicate rows (up to scaling): keep the first, conflicting rhs is an
  // immediate two-row certificate.
  std::map<Row, std::pair<int, Rational>> canon;  // canonical row -> (id, scale)
  for (size_t r = 0; r < w.eq.size(); ++r) {
    if (!w.eq_alive[r]) continue;
    const Rational sigma = w.eq[r][0].second;
    Row key = w.eq[r];
    for (auto& [c, v] : key) v /= sigma;
    auto it = canon.find(key);
    if (it == canon.end()) {
      canon.emplace(std::move(key), std::make_pair(static_cast<int>(r), sigma));
      continue;
    }
    const auto& [r1, sigma1] = it->second;
    if (w.eq_rhs[r] / sigma != w.eq_rhs[r1] / sigma1) {
      const Rational diff = w.eq_rhs[r] / sigma - w.eq_rhs[r1] / sigma1;
      const Rational t = diff > 0 ? 1 : -1;
      auto y = zeros_eq();
      y[r] = t / sigma;
      y[r1] = -t / sigma1;
      return make_infeasible(std::move(y), zeros_ge());
    }
    records.push_back(RecDropRow{static_cast<int>(r)});
    w.eq_alive[r] = 0;
  }

  // Columns no longer appearing anywhere are only bounded below; fix at 0.
  for (int col = 0; col < ls.num_vars; ++col) {
    if (!w.col_alive[col]) continue;
    bool present = false;
    for (int r : w.col_eq[col])
      if (w.eq_alive[r] && find_entry(w.eq[r], col)) present = true;
    for (int r : w.col_ge[col])
      if (find_entry(w.ge[r], col)) present = true;
    if (!present) {
      records.push_back(RecFixVar{col, Rational(0), -1, Rational(1), {}});
      w.col_alive[col] = 0;
    }
  }

  // Constant ge rows: 0 >= rhs.
  for (size_t r = 0; r < w.ge.size(); ++r) {
    if (w.ge[r].empty() && w.ge_rhs[r] > 0) {
      auto y = zeros_ge();
      y[r] = 1;
      return make_infeasible(zeros_eq(), std::move(y));
    }
  }

  auto ps = std::make_shared<Presolved>();
  ps->orig_vars = ls.num_vars;
  ps->orig_eq = ls.eq.size();
  ps->orig_ge = ls.ge.size();
  ps->records = std::move(records);
  ps->rhs_transplantable = rhs_transplantable;

  std::vector<int> col_map(ls.num_vars, -1);
  for (int c = 0; c < ls.num_vars; ++c)
    if (w.col_alive[c]) {
      col_map[c] = static_cast<int>(ps->red2orig_col.size());
      ps->red2orig_col.push_back(c);
    }
  ps->reduced.num_vars = static_cast<int>(ps->red2orig_col.size());
  if (!ls.labels.empty())
    for (int c : ps->red2orig_col) ps->reduced.labels.push_back(ls.labels[c]);

  for (size_t r = 0; r < w.eq.size(); ++r) {
    if (!w.eq_alive[r]) continue;
    SparseRow row;
    for (const auto& [c, v] : w.eq[r]) row.terms.push_back({col_map[c], v});
    row.normalize();
    ps->reduced.add_eq(std::move(row), w.eq_rhs[r]);
    ps->red2orig_eq.push_back(static_cast<int>(r));
  }
  for (size_t r = 0; r < w.ge.size(); ++r) {
    if (w.ge[r].empty() && w.ge_rhs[r] <= 0) continue;  // vacuous
    SparseRow row;
    for (const auto& [c, v] : w.ge[r]) row.terms.push_back({col_map[c], v});
    row.normalize();
    ps->reduced.add_ge(std::move(row), w.ge_rhs[r]);
    ps->red2orig_ge.push_back(static_cast<int>(r));
  }

  PresolveOutcome out;
  if (ps->reduced.num_vars == 0 && ps->reduced.eq.empty() && ps->reduced.ge.empty()) {
    Lifter lifter{ps->records, ps->records.size()};
    out.point = lifter.lift_point(std::vector<Rational>(ls.num_vars, Rational(0)));
    return out;
  }
  out.reduced = std::move(ps);
  return out;
}

const LinearSystem& reduced_system(const Presolved& ps) { return ps.reduced; }
const std::vector<int>& reduced_eq_origin(const Presolved& ps) { return ps.red2orig_eq; }
bool rhs_invariant(const Presolved& ps) { return ps.rhs_transplantable; }

FarkasCertificate lift_certificate(const Presolved& ps, const FarkasCertificate& reduced_cert) {
  std::vector<Rational> y_eq(ps.orig_eq, Rational(0));
  std::vector<Rational> y_ge(ps.orig_ge, Rational(0));
  for (size_t r = 0; r < ps.red2orig_eq.size(); ++r) y_eq[ps.red2orig_eq[r]] = reduced_cert.y_eq[r];
  for (size_t r = 0; r < ps.red2orig_ge.size(); ++r) y_ge[ps.red2orig_ge[r]] = reduced_cert.y_ge[r];
  Lifter lifter{ps.records, ps.records.size()};
  return lifter.lift(std::move(y_eq), std::move(y_ge));
}

std::vector<Rational> lift_point(const Presolved& ps, const std::vector<Rational>& reduced_point) {
  std::vector<Rational> x(ps.orig_vars, Rational(0));
  for (size_t c = 0; c < ps.red2orig_col.size(); ++c) x[ps.red2orig_col[c]] = reduced_point[c];
  Lifter lifter{ps.records, ps.records.size()};
  return lifter.lift_point(std::move(x));
}

}  // namespace fnncert::lp::detail
