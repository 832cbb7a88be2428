#pragma once

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>

namespace gidm {

using Real = double;
using Complex = std::complex<Real>;
using Index = Eigen::Index;

using Vector = Eigen::VectorXd;
using CVector = Eigen::VectorXcd;
using Matrix = Eigen::MatrixXd;
using CMatrix = Eigen::MatrixXcd;

inline constexpr Real kPi = 3.14159265358979323846264338327950288;
inline constexpr Real kTwoPi = 2.0 * kPi;

/// Invalid user-facing configuration (bad flag value, malformed file, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// A resource guard tripped (dense problem too large for in-core storage).
struct GuardViolation : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace gidm
