#pragma once

#include <complex>

#include <Eigen/Core>

namespace hankelobs {

using Complex = std::complex<double>;

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;

using RealVector = Vector<double>;
using ComplexVector = Vector<Complex>;
using RealMatrix = Matrix<double>;
using ComplexMatrix = Matrix<Complex>;

}  // namespace hankelobs
