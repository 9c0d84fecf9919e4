// SPDX-License-Identifier: Apache-2.0
#include "fnncert/analysis.hpp"

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <stdexcept>

#include "fnncert/qsim.hpp"
#include "fnncert/witness.hpp"

namespace fnncert::analysis {

namespace {

using Mat2 = Eigen::Matrix2cd;

// Tr[rho_pair (M (x) N)] for an isotropic pair of visibility v:
//   v/2 sum_ij M_ij N_ij + (1-v)/4 Tr M Tr N.
std::complex<double> pair_trace(const Mat2& m, const Mat2& n, double v) {
  const std::complex<double> overlap = (m.cwiseProduct(n)).sum();
  return v * 0.5 * overlap + (1.0 - v) * 0.25 * m.trace() * n.trace();
}

// I_1 on the shared-angle star strategy, via the tensor-product expansion of
// the GHZ effect. Agrees with evaluate(I1, simulate_star(..)) to machine
// precision and costs a few hundred flops, which keeps 4-D angle searches
// cheap.
double star_value(double t0, double t1, double f0, double f1, double v) {
  Mat2 a[2], id;
  a[0] = qsim::branch_observable(t0, f0).mat();
  a[1] = qsim::branch_observable(t1, f1).mat();
  id = Mat2::Identity();

  // 2 P_GHZ - 1 = |000><000| + |111><111| + |000><111| + |111><000| - 1,
  // every term a threefold tensor power of one 2x2 matrix.
  Mat2 n00 = Mat2::Zero(), n11 = Mat2::Zero(), n01 = Mat2::Zero(), n10 = Mat2::Zero();
  n00(0, 0) = 1;
  n11(1, 1) = 1;
  n01(0, 1) = 1;
  n10(1, 0) = 1;
  const Mat2 bterm[5] = {n00, n11, n01, n10, id};
  const double bsign[5] = {1, 1, 1, 1, -1};

  const witness::CorrelatorPolynomial w = witness::builtin_fnn_star(1);
  double value = w.constant;
  for (const witness::Term& t : w.terms) {
    const witness::CorrelatorSymbol& s = t.monomial[0];
    Mat2 m[3] = {id, id, id};
    bool has_b = false;
    for (size_t k = 0; k < s.parties.size(); ++k) {
      if (s.parties[k] == 3)
        has_b = true;
      else
        m[s.parties[k]] = a[s.inputs[k]];
    }
    double corr = 0.0;
    if (has_b) {
      for (int k = 0; k < 5; ++k) {
        std::complex<double> prod = bsign[k];
        for (int i = 0; i < 3; ++i) prod *= pair_trace(m[i], bterm[k], v);
        corr += prod.real();
      }
    } else {
      std::complex<double> prod = 1.0;
      for (int i = 0; i < 3; ++i) prod *= pair_trace(m[i], id, v);
      corr = prod.real();
    }
    value += t.coeff * corr;
  }
  return value;
}

double value_for(double t0, double t1, double f0, double f1, double v, Backend backend) {
  if (backend == Backend::closed_form) {
    if (f0 != 0.0 || f1 != 0.0)
      throw std::invalid_argument("closed form covers phi = 0 only; use the simulation backend");
    return closed_form_value(t0, t1, v);
  }
  return star_value(t0, t1, f0, f1, v);
}

}  // namespace

double closed_form_value(double theta0, double theta1, double v) {
  if (v < 0.0 || v > 1.0) throw std::domain_error("visibility outside [0,1]");
  const double s0 = std::sin(theta0), s1 = std::sin(theta1);
  const double c0 = std::cos(theta0), c1 = std::cos(theta1);
  return v * v * v / 4.0 * (s0 * (s1 * s1 - 2 * s0 * s1 - s0 * s0)) +
         v * v / 4.0 * (-2 * c0 * c1 - c0 * c0 + c1 * c1) - 0.5;
}

CriticalVisibility critical_visibility(double theta0, double theta1, double phi0, double phi1,
                                       Backend backend, double tol) {
  CriticalVisibility out;
  out.value_at_v1 = value_for(theta0, theta1, phi0, phi1, 1.0, backend);
  if (out.value_at_v1 <= 0.0) return out;  // no violation at any visibility

  // value(0) = -1/2 < 0 < value(1): bisect the sign change.
  double lo = 0.0, hi = 1.0;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (value_for(theta0, theta1, phi0, phi1, mid, backend) > 0.0)
      hi = mid;
    else
      lo = mid;
  }
  out.v_crit = 0.5 * (lo + hi);
  return out;
}

Optimum optimize_angles(const OptimizeOptions& options) {
  if (options.grid_resolution <= 0.0) throw std::invalid_argument("grid resolution must be > 0");
  const Backend backend = options.allow_phi ? Backend::simulation : Backend::closed_form;

  auto value = [&](double t0, double t1, double f0, double f1) {
    return value_for(t0, t1, f0, f1, 1.0, backend);
  };

  const double res = options.allow_phi ? std::max(options.grid_resolution, 0.15)
                                       : options.grid_resolution;
  auto axis = [&](const std::array<double, 2>& range) {
    std::vector<double> pts;
    for (double a = range[0]; a <= range[1] + 1e-12; a += res) pts.push_back(a);
    if (pts.empty()) pts.push_back(range[0]);
    return pts;
  };
  const std::vector<double> t0s = axis(options.theta0_range);
  const std::vector<double> t1s = axis(options.theta1_range);
  const std::vector<double> f0s = options.allow_phi ? axis(options.phi0_range)
                                                    : std::vector<double>{0.0};
  const std::vector<double> f1s = options.allow_phi ? axis(options.phi1_range)
                                                    : std::vector<double>{0.0};

  Optimum best;
  best.value = -1e300;
  // near-optimal grid points, pruned as the incumbent improves (capped so a
  // flat landscape cannot blow up memory)
  std::vector<std::array<double, 5>> near5;
  constexpr size_t kNearCap = 4096;
  for (double t0 : t0s)
    for (double t1 : t1s)
      for (double f0 : f0s)
        for (double f1 : f1s) {
          const double v = value(t0, t1, f0, f1);
          if (v > best.value) {
            best = Optimum{t0, t1, f0, f1, v, {}};
            std::erase_if(near5, [&](const auto& e) { return e[4] < best.value - 1e-6; });
          }
          if (v >= best.value - 1e-6 && near5.size() < kNearCap)
            near5.push_back({t0, t1, f0, f1, v});
        }

  std::vector<std::array<double, 4>> near;
  for (const auto& e : near5)
    if (e[4] >= best.value - 1e-6) near.push_back({e[0], e[1], e[2], e[3]});

  // coordinate descent with shrinking steps
  double angles[4] = {best.theta0, best.theta1, best.phi0, best.phi1};
  const int ncoord = options.allow_phi ? 4 : 2;
  double cur = best.value;
  double step = res;
  while (step > 1e-9) {
    bool improved = false;
    for (int c = 0; c < ncoord; ++c) {
      for (double dir : {+1.0, -1.0}) {
        while (true) {
          angles[c] += dir * step;
          const double v = value(angles[0], angles[1], angles[2], angles[3]);
          if (v > cur + options.refine_tolerance * 1e-2) {
            cur = v;
            improved = true;
          } else {
            angles[c] -= dir * step;
            break;
          }
        }
      }
    }
    if (!improved) step *= 0.5;
  }

  best.theta0 = angles[0];
  best.theta1 = angles[1];
  best.phi0 = angles[2];
  best.phi1 = angles[3];
  best.value = cur;
  best.near_optimal_grid_points = std::move(near);
  return best;
}

SweepResult visibility_sweep(double theta0, double theta1, double phi0, double phi1,
                             const std::vector<double>& v_grid, Backend backend) {
  SweepResult out;
  out.best.value = -1e300;
  for (double v : v_grid) {
    if (v < 0.0 || v > 1.0) throw std::domain_error("sweep visibility outside [0,1]");
    const double val = value_for(theta0, theta1, phi0, phi1, v, backend);
    out.points.push_back(SweepPoint{theta0, theta1, phi0, phi1, v, val});
    if (val > out.best.value) out.best = Optimum{theta0, theta1, phi0, phi1, val, {}};
  }
  return out;
}

std::string sweep_to_csv(const SweepResult& sweep) {
  std::string csv = "theta0,theta1,phi0,phi1,v,value\n";
  char buf[256];
  for (const SweepPoint& p : sweep.points) {
    std::snprintf(buf, sizeof(buf), "%.12g,%.12g,%.12g,%.12g,%.12g,%.12g\n", p.theta0, p.theta1,
                  p.phi0, p.phi1, p.v, p.value);
    csv += buf;
  }
  return csv;
}

}  // namespace fnncert::analysis
