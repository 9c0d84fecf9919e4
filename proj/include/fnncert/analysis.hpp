// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <array>
#include <optional>
#include <string>
#include <vector>

namespace fnncert::analysis {

// Closed-form quantum value of I_1 for equal per-branch angles (phi = 0) under
// isotropic noise of visibility v:
//   v^3/4 * sin(t0) (sin^2 t1 - 2 sin t0 sin t1 - sin^2 t0)
//   + v^2/4 * (-2 cos t0 cos t1 - cos^2 t0 + cos^2 t1) - 1/2
// (polynomial in v; the v = 0 limit -1/2 needs no special casing).
double closed_form_value(double theta0, double theta1, double v);

enum class Backend { closed_form, simulation };

struct CriticalVisibility {
  std::optional<double> v_crit;  // empty: no violation at any visibility
  double value_at_v1 = 0.0;
};

// Bisection root of value(v) = 0 on [0,1]. The simulation backend evaluates
// I_1 on simulate_star and supports nonzero azimuthal angles.
CriticalVisibility critical_visibility(double theta0, double theta1, double phi0, double phi1,
                                       Backend backend, double tol = 1e-6);

struct Optimum {
  double theta0 = 0.0;
  double theta1 = 0.0;
  double phi0 = 0.0;
  double phi1 = 0.0;
  double value = 0.0;
  // grid points within 1e-6 of the best value before refinement (symmetric
  // optima are reported, not collapsed)
  std::vector<std::array<double, 4>> near_optimal_grid_points;
};

struct OptimizeOptions {
  double grid_resolution = 0.02;  // radians; coarser grid is used for the 4-D search
  double refine_tolerance = 1e-8;
  bool allow_phi = false;
  // search box per coordinate; a collapsed range pins that coordinate
  std::array<double, 2> theta0_range{-3.14159265358979312, 3.14159265358979312};
  std::array<double, 2> theta1_range{-3.14159265358979312, 3.14159265358979312};
  std::array<double, 2> phi0_range{-3.14159265358979312, 3.14159265358979312};
  std::array<double, 2> phi1_range{-3.14159265358979312, 3.14159265358979312};
};

// Coarse grid search over [-pi, pi] followed by coordinate descent with
// shrinking steps, at v = 1. With allow_phi the simulated value of the
// general measurement family is optimized over (theta0, theta1, phi0, phi1).
Optimum optimize_angles(const OptimizeOptions& options = {});

struct SweepPoint {
  double theta0, theta1, phi0, phi1, v, value;
};

struct SweepResult {
  std::vector<SweepPoint> points;
  Optimum best;  // max over the grid points
};

SweepResult visibility_sweep(double theta0, double theta1, double phi0, double phi1,
                             const std::vector<double>& v_grid, Backend backend);

// CSV emission: header row, columns theta0,theta1,phi0,phi1,v,value.
std::string sweep_to_csv(const SweepResult& sweep);

}  // namespace fnncert::analysis
