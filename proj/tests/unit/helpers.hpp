#pragma once

// Shared test fixtures. Nothing here calls the code under test except to build inputs.

#include <cmath>
#include <random>
#include <vector>

#include <Eigen/Eigenvalues>
#include <unsupported/Eigen/MatrixFunctions>

#include "quasifree/covariance.hpp"
#include "quasifree/model.hpp"

namespace testing {

using quasifree::cplx;
using quasifree::ComplexMatrix;
using quasifree::RealMatrix;

inline std::vector<double> random_couplings(std::mt19937_64& rng, int range) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> j(static_cast<std::size_t>(range + 1));
  for (auto& v : j) v = u(rng);
  return j;
}

// h_{x,x+z} = J_z written out site by site.
inline RealMatrix naive_coupling_matrix(int L, const std::vector<double>& j) {
  RealMatrix h = RealMatrix::Zero(L, L);
  for (int x = 0; x < L; ++x) {
    h(x, x) += j[0];
    for (std::size_t z = 1; z < j.size(); ++z) {
      h(x, (x + static_cast<int>(z)) % L) += j[z];
      h((x + static_cast<int>(z)) % L, x) += j[z];
    }
  }
  return h;
}

// exp(i t h) by Eigen's Pade-based matrix exponential.
inline ComplexMatrix expm_i(const RealMatrix& h, double t) {
  ComplexMatrix a = (cplx(0.0, t) * h.cast<cplx>()).eval();
  return a.exp();
}

// U diag(occ) U^dag with U a random unitary and occ in [0, 1].
inline ComplexMatrix random_admissible(std::mt19937_64& rng, int L) {
  std::normal_distribution<double> n(0.0, 1.0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  ComplexMatrix a(L, L);
  for (int i = 0; i < L; ++i)
    for (int j = 0; j < L; ++j) a(i, j) = cplx(n(rng), n(rng));
  Eigen::HouseholderQR<ComplexMatrix> qr(a);
  ComplexMatrix q = qr.householderQ();
  Eigen::VectorXcd occ(L);
  for (int i = 0; i < L; ++i) occ(i) = u(rng);
  return q * occ.asDiagonal() * q.adjoint();
}

inline double max_abs(const ComplexMatrix& m) { return m.cwiseAbs().maxCoeff(); }

}  // namespace testing
