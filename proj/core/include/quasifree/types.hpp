#pragma once

#include <complex>

#include <Eigen/Dense>

namespace quasifree {

using cplx = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using RealMatrix = Eigen::MatrixXd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kTwoPi = 2.0 * kPi;

/// Non-negative remainder of a modulo m (m > 0).
constexpr int wrap(long a, int m) {
  long r = a % m;
  return static_cast<int>(r < 0 ? r + m : r);
}

}  // namespace quasifree
