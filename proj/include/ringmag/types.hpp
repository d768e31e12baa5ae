#pragma once

#include <Eigen/Dense>
#include <complex>

namespace ringmag {

using Complex = std::complex<double>;

template <class T>
using Matrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic>;
template <class T>
using Vector = Eigen::Matrix<T, Eigen::Dynamic, 1>;

using MatrixXd = Eigen::MatrixXd;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXd = Eigen::VectorXd;
using VectorXcd = Eigen::VectorXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr const char* kVersion = "1.0.0";

// Oscillator units: hbar = m = omega = 1, lengths in sigma, energies in hbar*omega.

}  // namespace ringmag
