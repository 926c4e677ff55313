#pragma once

#include <Eigen/Dense>
#include <complex>

namespace holab {

using cplx = std::complex<double>;

// Group and algebra matrices are at most 3x3; fixed capacity keeps them off the heap.
using Mat = Eigen::Matrix<cplx, Eigen::Dynamic, Eigen::Dynamic, 0, 3, 3>;
using Matd = Eigen::MatrixXd;
using Vecd = Eigen::VectorXd;

inline Mat comm(const Mat& a, const Mat& b) { return a * b - b * a; }

inline double fro_dist(const Mat& a, const Mat& b) { return (a - b).norm(); }

inline Mat eye(int n) { return Mat::Identity(n, n); }

}  // namespace holab
