// types.hpp — Scalar and dense-matrix aliases used project-wide

#pragma once

#include <Eigen/Dense>

#include <complex>

namespace declab {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

namespace tol {
// Double-precision roundoff budget for dims up to 2^13.
inline constexpr double hermiticity = 1e-12;
inline constexpr double trace = 1e-12;
inline constexpr double psd_floor = -1e-10;
inline constexpr double unitarity = 1e-10;
} // namespace tol

} // namespace declab
