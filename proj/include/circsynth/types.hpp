#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace circsynth {

using Mat = Eigen::MatrixXd;
using Vec = Eigen::VectorXd;
using RowVec = Eigen::RowVectorXd;
using CMat = Eigen::MatrixXcd;
using CVec = Eigen::VectorXcd;
using cplx = std::complex<double>;

}  // namespace circsynth
