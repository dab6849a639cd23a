#pragma once

#include <complex>

#include <Eigen/Dense>

namespace tspr {

using Cx = std::complex<double>;
using Index = Eigen::Index;

using Vec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;
using Mat = Eigen::MatrixXcd;
using RMat = Eigen::MatrixXd;

}  // namespace tspr
