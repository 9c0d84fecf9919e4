// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <random>
#include <vector>

#include "fnncert/dist.hpp"
#include "fnncert/qsim.hpp"
#include "fnncert/rational.hpp"

namespace fnncert::testutil {

inline constexpr double kOptTheta0 = -1.865;
inline constexpr double kOptTheta1 = -0.415;

// Deterministic star strategy: a_i = (f_i >> x_i) & 1, b fixed. 4^3 * 2 = 128.
inline dist::ConditionalDistribution det_star(int f1, int f2, int f3, int b) {
  const dist::Scenario sc = dist::Scenario::star();
  std::vector<double> table(sc.joint_inputs() * sc.joint_outputs(), 0.0);
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3) {
        const long i = sc.input_index({x1, x2, x3, 0});
        const long o = sc.output_index({(f1 >> x1) & 1, (f2 >> x2) & 1, (f3 >> x3) & 1, b});
        table[i * sc.joint_outputs() + o] = 1.0;
      }
  return dist::ConditionalDistribution(sc, std::move(table));
}

inline std::vector<Rational> det_star_exact(int f1, int f2, int f3, int b) {
  const dist::Scenario sc = dist::Scenario::star();
  std::vector<Rational> table(sc.joint_inputs() * sc.joint_outputs(), Rational(0));
  for (int x1 = 0; x1 < 2; ++x1)
    for (int x2 = 0; x2 < 2; ++x2)
      for (int x3 = 0; x3 < 2; ++x3) {
        const long i = sc.input_index({x1, x2, x3, 0});
        const long o = sc.output_index({(f1 >> x1) & 1, (f2 >> x2) & 1, (f3 >> x3) & 1, b});
        table[i * sc.joint_outputs() + o] = 1;
      }
  return table;
}

// Exactly rational hybrid model of the form
//   p = sum_lam w_lam [a1 = f_lam(x1)] q_lam(a2,a3,b|x2,x3)
// with q_lam an exactly rational no-signaling box (mixture of local
// deterministic boxes and a PR box between A2, A3 with deterministic b).
// Feasible for the placement-1 inflation by construction.
struct RationalHybrid {
  dist::ConditionalDistribution distribution;
  std::vector<Rational> exact_table;
};

inline RationalHybrid rational_hybrid(std::uint64_t seed, int num_lambda = 2) {
  std::mt19937_64 rng(seed);
  const dist::Scenario sc = dist::Scenario::star();
  const long jo = sc.joint_outputs();
  std::vector<Rational> table(sc.joint_inputs() * jo, Rational(0));

  // rational weights over lambda, denominators <= 8
  std::vector<Rational> w(num_lambda);
  int wsum = 0;
  std::vector<int> wi(num_lambda);
  for (int l = 0; l < num_lambda; ++l) {
    wi[l] = 1 + static_cast<int>(rng() % 4);
    wsum += wi[l];
  }
  for (int l = 0; l < num_lambda; ++l) w[l] = Rational(wi[l], wsum);

  for (int l = 0; l < num_lambda; ++l) {
    const int f = static_cast<int>(rng() % 4);  // a1 = (f >> x1) & 1
    // q_lam: mixture of one local deterministic box and one PR-type box
    const int g2 = static_cast<int>(rng() % 4), g3 = static_cast<int>(rng() % 4);
    const int bloc = static_cast<int>(rng() % 2), bpr = static_cast<int>(rng() % 2);
    const int mi = static_cast<int>(rng() % 5);  // PR weight mi/4
    const Rational pr_w(mi, 4), loc_w = Rational(1) - Rational(mi, 4);

    for (int x1 = 0; x1 < 2; ++x1) {
      const int a1 = (f >> x1) & 1;
      for (int x2 = 0; x2 < 2; ++x2)
        for (int x3 = 0; x3 < 2; ++x3) {
          const long i = sc.input_index({x1, x2, x3, 0});
          // local part
          table[i * jo + sc.output_index({a1, (g2 >> x2) & 1, (g3 >> x3) & 1, bloc})] +=
              w[l] * loc_w;
          // PR part: a2 xor a3 = x2 x3, uniformly
          for (int a2 = 0; a2 < 2; ++a2) {
            const int a3 = a2 ^ (x2 & x3);
            table[i * jo + sc.output_index({a1, a2, a3, bpr})] += w[l] * pr_w / 2;
          }
        }
    }
  }

  std::vector<double> dbl(table.size());
  for (size_t k = 0; k < table.size(); ++k) dbl[k] = table[k].get_d();
  return RationalHybrid{dist::ConditionalDistribution(sc, std::move(dbl)), std::move(table)};
}

// Quantum hybrid: classical source at `placement` (uniform bit, random
// deterministic A response), the other two sources quantum phi+ pairs at the
// optimal angles; the central party projects its two remaining qubits with
// <lam|P_GHZ|lam>. A member of the hybrid class the placement's inflation
// relaxes, so the placement's extracted witness must not flag it.
inline dist::ConditionalDistribution quantum_hybrid(int placement, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const int f = static_cast<int>(rng() % 16);  // a1 = (f >> (2 lam + x1)) & 1
  const double jitter0 = (static_cast<double>(rng() % 1000) / 1000.0 - 0.5) * 0.2;
  const double jitter1 = (static_cast<double>(rng() % 1000) / 1000.0 - 0.5) * 0.2;
  const double t0 = kOptTheta0 + jitter0, t1 = kOptTheta1 + jitter1;

  using qsim::Matrix;
  const Matrix rho = qsim::kron(qsim::make_entangled_pair(qsim::PairKind::phi_plus, 1.0).mat(),
                                qsim::make_entangled_pair(qsim::PairKind::phi_plus, 1.0).mat());
  const Matrix P = qsim::ghz_projector(3).mat();
  const Matrix obs[2] = {qsim::branch_observable(t0).mat(), qsim::branch_observable(t1).mat()};

  const dist::Scenario sc = dist::Scenario::star();
  std::vector<double> table(sc.joint_inputs() * sc.joint_outputs(), 0.0);
  for (int lam = 0; lam < 2; ++lam) {
    // <lam|P|lam> on the first GHZ slot leaves a two-qubit effect
    Matrix m0(4, 4);
    for (int r = 0; r < 4; ++r)
      for (int c = 0; c < 4; ++c) m0(r, c) = P((lam << 2) | r, (lam << 2) | c);
    const Matrix mb[2] = {m0, qsim::identity(4) - m0};
    for (int x1 = 0; x1 < 2; ++x1) {
      const int a1 = (f >> (2 * lam + x1)) & 1;
      for (int x2 = 0; x2 < 2; ++x2)
        for (int x3 = 0; x3 < 2; ++x3) {
          const long i = sc.input_index({x1, x2, x3, 0});
          for (int a2 = 0; a2 < 2; ++a2)
            for (int a3 = 0; a3 < 2; ++a3)
              for (int b = 0; b < 2; ++b) {
                // qubit order (A2,B2,A3,B3)
                const Matrix E =
                    qsim::embed((qsim::identity(2) + ((a2 == 0) ? 1.0 : -1.0) * obs[x2]) / 2.0,
                                {0}, 4) *
                    qsim::embed((qsim::identity(2) + ((a3 == 0) ? 1.0 : -1.0) * obs[x3]) / 2.0,
                                {2}, 4) *
                    qsim::embed(mb[b], {1, 3}, 4);
                table[i * sc.joint_outputs() + sc.output_index({a1, a2, a3, b})] +=
                    0.5 * (rho * E).trace().real();
              }
        }
    }
  }
  dist::ConditionalDistribution d(sc, std::move(table));
  if (placement == 1) return d;
  std::vector<int> perm{0, 1, 2, 3};
  std::swap(perm[0], perm[placement - 1]);
  return dist::permute_parties(d, perm);
}

}  // namespace fnncert::testutil
