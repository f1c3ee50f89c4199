#pragma once

#include <complex>
#include <vector>

#include <Eigen/Dense>

namespace vemove {

using cd = std::complex<double>;
using Vec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXcd;
using RVec = Eigen::VectorXd;
using RMat = Eigen::MatrixXd;

using Signal = Eigen::VectorXd;            // mono time signal
using MultiSignal = std::vector<Signal>;   // one entry per channel, equal lengths

}  // namespace vemove
