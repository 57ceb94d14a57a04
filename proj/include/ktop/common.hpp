#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace ktop {

using cxd = std::complex<double>;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using RMatrix = Eigen::MatrixXd;
using RVector = Eigen::VectorXd;

inline constexpr double kPi = 3.14159265358979323846264338327950288;
inline constexpr double kTwoPi = 2.0 * kPi;
inline constexpr double kEulerGamma = 0.57721566490153286060651209008240243;

// Composite index of the bipartite product basis: subsystem 1 is the major
// index, so (i1, i2) -> i1*n2 + i2.  Every reshape, kron and partial trace
// in this codebase uses this convention.
inline Eigen::Index composite_index(Eigen::Index i1, Eigen::Index i2, Eigen::Index n2) {
    return i1 * n2 + i2;
}

} // namespace ktop
