// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <Eigen/Dense>

#include <array>
#include <vector>

#include "fnncert/dist.hpp"

namespace fnncert::qsim {

using Matrix = Eigen::MatrixXcd;
using Complex = std::complex<double>;

Matrix pauli_x();
Matrix pauli_y();
Matrix pauli_z();
Matrix identity(int dim);
Matrix kron(const Matrix& a, const Matrix& b);

// Embed `op`, acting on the listed qubits (0 = most significant bit of the
// basis index), into an n-qubit operator.
Matrix embed(const Matrix& op, const std::vector<int>& qubits, int num_qubits);

// Validated matrix variants. Construction checks the defining invariants:
//   DensityOperator: Hermitian (1e-12), PSD (1e-10), unit trace (1e-12)
//   Observable:      Hermitian with eigenvalues in {-1,+1} (1e-10)
//   Projector:       ||P^2 - P||_max <= 1e-12
class DensityOperator {
 public:
  explicit DensityOperator(Matrix m);
  const Matrix& mat() const { return mat_; }
  int dim() const { return static_cast<int>(mat_.rows()); }

 private:
  Matrix mat_;
};

class Observable {
 public:
  explicit Observable(Matrix m);
  const Matrix& mat() const { return mat_; }

 private:
  Matrix mat_;
};

class Projector {
 public:
  explicit Projector(Matrix m);
  const Matrix& mat() const { return mat_; }

 private:
  Matrix mat_;
};

enum class PairKind { phi_plus, singlet };

// v |psi><psi| + (1-v) I/4 on two qubits. visibility must lie in [0,1].
DensityOperator make_entangled_pair(PairKind kind, double visibility);

// sin(theta)cos(phi) X + sin(theta)sin(phi) Y + cos(theta) Z.
Observable branch_observable(double theta, double phi = 0.0);

// Rank-1 projector onto (|0...0> + |1...1>)/sqrt(2), n >= 2 qubits.
Projector ghz_projector(int num_qubits);

// Measurement strategy for the three-branch star. All branch parties use the
// same two observables; visibility is per source.
struct StarStrategy {
  double theta0 = 0.0;
  double theta1 = 0.0;
  double phi0 = 0.0;
  double phi1 = 0.0;
  std::array<double, 3> visibility{1.0, 1.0, 1.0};
};

// Born rule on three entangled pairs. Qubit order (A1,B1,A2,B2,A3,B3); the
// central party measures (B1,B2,B3) with {P_GHZ, 1 - P_GHZ}, b = 0 on GHZ
// success; branch outcome a maps to eigenvalue (-1)^a.
dist::ConditionalDistribution simulate_star(const StarStrategy& strategy);

// Two singlet pairs, A0 = X, A1 = Z, C0 = (Z+X)/sqrt2, C1 = (Z-X)/sqrt2,
// central measurement {phi+, phi-, remainder} with outcomes b = 0,1,2.
dist::ConditionalDistribution simulate_bilocal();

}  // namespace fnncert::qsim
