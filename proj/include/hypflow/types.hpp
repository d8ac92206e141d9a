#pragma once

#include <complex>
#include <stdexcept>
#include <string>

#include <Eigen/Dense>

namespace hypflow {

using cplx = std::complex<double>;
using Vec = Eigen::VectorXd;
using CVec = Eigen::VectorXcd;
using Mat = Eigen::MatrixXd;
using CMat = Eigen::MatrixXcd;

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr const char* kVersion = "0.1.0";

// Invalid arguments, undefined reference data, violated preconditions.
struct DomainError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iterations that did not converge or tolerances that could not be met.
struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Bad configuration or parameter gates.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline Vec vec1(double a) {
  Vec v(1);
  v << a;
  return v;
}

inline Vec vec2(double a, double b) {
  Vec v(2);
  v << a, b;
  return v;
}

}  // namespace hypflow
