#pragma once

#include <Eigen/Dense>
#include <complex>

namespace iqmimo {

using Complex = std::complex<double>;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using RVec = Eigen::VectorXd;

} // namespace iqmimo
