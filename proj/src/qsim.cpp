// SPDX-License-Identifier: Apache-2.0
#include "fnncert/qsim.hpp"

#include <cmath>
#include <stdexcept>

namespace fnncert::qsim {

namespace {

void check_hermitian(const Matrix& m, double tol, const char* what) {
  if ((m - m.adjoint()).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument(std::string(what) + ": not Hermitian");
}

}  // namespace

Matrix pauli_x() {
  Matrix m(2, 2);
  m << 0, 1, 1, 0;
  return m;
}

Matrix pauli_y() {
  Matrix m(2, 2);
  m << Complex(0, 0), Complex(0, -1), Complex(0, 1), Complex(0, 0);
  return m;
}

Matrix pauli_z() {
  Matrix m(2, 2);
  m << 1, 0, 0, -1;
  return m;
}

Matrix identity(int dim) { return Matrix::Identity(dim, dim); }

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (int i = 0; i < a.rows(); ++i)
    for (int j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

Matrix embed(const Matrix& op, const std::vector<int>& qubits, int num_qubits) {
  const int k = static_cast<int>(qubits.size());
  if (op.rows() != (1 << k)) throw std::invalid_argument("embed: operator size mismatch");
  const int dim = 1 << num_qubits;
  Matrix out = Matrix::Zero(dim, dim);
  // qubit q occupies bit (num_qubits-1-q) of the basis index
  int rest_mask = dim - 1;
  for (int q : qubits) rest_mask &= ~(1 << (num_qubits - 1 - q));
  for (int I = 0; I < dim; ++I) {
    int r = 0;
    for (int t = 0; t < k; ++t)
      r |= ((I >> (num_qubits - 1 - qubits[t])) & 1) << (k - 1 - t);
    for (int J = 0; J < dim; ++J) {
      if ((I & rest_mask) != (J & rest_mask)) continue;
      int c = 0;
      for (int t = 0; t < k; ++t)
        c |= ((J >> (num_qubits - 1 - qubits[t])) & 1) << (k - 1 - t);
      out(I, J) = op(r, c);
    }
  }
  return out;
}

DensityOperator::DensityOperator(Matrix m) : mat_(std::move(m)) {
  check_hermitian(mat_, 1e-12, "density operator");
  if (std::abs(mat_.trace() - Complex(1, 0)) > 1e-12)
    throw std::invalid_argument("density operator: trace != 1");
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_);
  if (es.eigenvalues().minCoeff() < -1e-10)
    throw std::invalid_argument("density operator: not positive semidefinite");
}

Observable::Observable(Matrix m) : mat_(std::move(m)) {
  check_hermitian(mat_, 1e-12, "observable");
  Eigen::SelfAdjointEigenSolver<Matrix> es(mat_);
  for (int i = 0; i < es.eigenvalues().size(); ++i)
    if (std::abs(std::abs(es.eigenvalues()[i]) - 1.0) > 1e-10)
      throw std::invalid_argument("observable: eigenvalues not in {-1,+1}");
}

Projector::Projector(Matrix m) : mat_(std::move(m)) {
  if (((mat_ * mat_) - mat_).cwiseAbs().maxCoeff() > 1e-12)
    throw std::invalid_argument("projector: P^2 != P");
}

DensityOperator make_entangled_pair(PairKind kind, double visibility) {
  if (visibility < 0.0 || visibility > 1.0)
    throw std::domain_error("visibility outside [0,1]");
  Eigen::VectorXcd psi(4);
  if (kind == PairKind::phi_plus)
    psi << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
  else
    psi << 0, 1 / std::sqrt(2.0), -1 / std::sqrt(2.0), 0;
  Matrix rho = visibility * (psi * psi.adjoint()) + (1 - visibility) * identity(4) / 4.0;
  return DensityOperator(std::move(rho));
}

Observable branch_observable(double theta, double phi) {
  Matrix m = std::sin(theta) * std::cos(phi) * pauli_x() +
             std::sin(theta) * std::sin(phi) * pauli_y() + std::cos(theta) * pauli_z();
  return Observable(std::move(m));
}

Projector ghz_projector(int num_qubits) {
  if (num_qubits < 2) throw std::domain_error("ghz_projector needs n >= 2");
  const int dim = 1 << num_qubits;
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(dim);
  v(0) = v(dim - 1) = 1 / std::sqrt(2.0);
  return Projector(v * v.adjoint());
}

dist::ConditionalDistribution simulate_star(const StarStrategy& strategy) {
  for (double v : strategy.visibility)
    if (v < 0.0 || v > 1.0) throw std::domain_error("visibility outside [0,1]");

  // Global order (A1,B1,A2,B2,A3,B3); B holds qubits 1,3,5.
  const Matrix rho =
      kron(kron(make_entangled_pair(PairKind::phi_plus, strategy.visibility[0]).mat(),
                make_entangled_pair(PairKind::phi_plus, strategy.visibility[1]).mat()),
           make_entangled_pair(PairKind::phi_plus, strategy.visibility[2]).mat());
  const Matrix P = ghz_projector(3).mat();
  const Matrix EB[2] = {embed(P, {1, 3, 5}, 6), embed(identity(8) - P, {1, 3, 5}, 6)};
  // rho * EB_b once per b; each outcome probability is then one 64x64 overlap.
  const Matrix R[2] = {rho * EB[0], rho * EB[1]};

  const Matrix obs[2] = {branch_observable(strategy.theta0, strategy.phi0).mat(),
                         branch_observable(strategy.theta1, strategy.phi1).mat()};
  Matrix effect[2][2];  // [input][outcome]
  for (int x = 0; x < 2; ++x)
    for (int a = 0; a < 2; ++a) effect[x][a] = (identity(2) + ((a == 0) ? 1.0 : -1.0) * obs[x]) / 2.0;

  const dist::Scenario sc = dist::Scenario::star();
  std::vector<double> table(sc.joint_inputs() * sc.joint_outputs(), 0.0);
  const Matrix id2 = identity(2);
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3) {
        const long ii = sc.input_index({x1, x2, x3, 0});
        for (int a1 = 0; a1 < 2; ++a1)
          for (int a2 = 0; a2 < 2; ++a2)
            for (int a3 = 0; a3 < 2; ++a3) {
              const Matrix K =
                  kron(kron(kron(effect[x1][a1], id2), kron(effect[x2][a2], id2)),
                       kron(effect[x3][a3], id2));
              for (int b = 0; b < 2; ++b) {
                // Tr[rho E_branch EB_b] = Tr[R_b K] for commuting effects
                const double pr = (R[b].transpose().cwiseProduct(K)).sum().real();
                table[ii * sc.joint_outputs() + sc.output_index({a1, a2, a3, b})] = pr;
              }
            }
      }
  return dist::ConditionalDistribution(sc, std::move(table));
}

dist::ConditionalDistribution simulate_bilocal() {
  // Global order (A, B1, B2, C); singlet pairs (A,B1) and (B2,C).
  const Matrix rho_pair = make_entangled_pair(PairKind::singlet, 1.0).mat();
  const Matrix rho = kron(rho_pair, rho_pair);

  Eigen::VectorXcd phip(4), phim(4);
  phip << 1 / std::sqrt(2.0), 0, 0, 1 / std::sqrt(2.0);
  phim << 1 / std::sqrt(2.0), 0, 0, -1 / std::sqrt(2.0);
  Matrix MB[3];
  MB[0] = phip * phip.adjoint();
  MB[1] = phim * phim.adjoint();
  MB[2] = identity(4) - MB[0] - MB[1];

  const Matrix A[2] = {pauli_x(), pauli_z()};
  const Matrix C[2] = {(pauli_z() + pauli_x()) / std::sqrt(2.0),
                       (pauli_z() - pauli_x()) / std::sqrt(2.0)};

  const dist::Scenario sc = dist::Scenario::bilocal();
  std::vector<double> table(sc.joint_inputs() * sc.joint_outputs(), 0.0);
  for (int x = 0; x < 2; ++x)
    for (int z = 0; z < 2; ++z) {
      const long ii = sc.input_index({x, 0, z});
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 3; ++b)
          for (int c = 0; c < 2; ++c) {
            const Matrix E = embed((identity(2) + ((a == 0) ? 1.0 : -1.0) * A[x]) / 2.0, {0}, 4) *
                             embed(MB[b], {1, 2}, 4) *
                             embed((identity(2) + ((c == 0) ? 1.0 : -1.0) * C[z]) / 2.0, {3}, 4);
            table[ii * sc.joint_outputs() + sc.output_index({a, b, c})] =
                (rho * E).trace().real();
          }
    }
  return dist::ConditionalDistribution(sc, std::move(table));
}

}  // namespace fnncert::qsim
