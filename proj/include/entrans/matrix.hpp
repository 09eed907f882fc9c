#pragma once

#include <Eigen/Dense>
#include <complex>

namespace entrans {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using RealMatrix = Eigen::MatrixXd;
using Index = Eigen::Index;

}  // namespace entrans
