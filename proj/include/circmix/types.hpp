#pragma once

#include <Eigen/Dense>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace circmix {

using Real = double;
using Complex = std::complex<Real>;
using Vector3 = Eigen::Matrix<Real, 3, 1>;
using Matrix3 = Eigen::Matrix<Real, 3, 3>;
using Vector3c = Eigen::Matrix<Complex, 3, 1>;
using Matrix3c = Eigen::Matrix<Complex, 3, 3>;

inline constexpr Real kPi = std::numbers::pi_v<Real>;
inline constexpr Real kTwoPi = 2 * std::numbers::pi_v<Real>;

//! Invalid input: non-finite angles, bad density parameters, n < 2, ...
class DomainError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

//! Every optimizer start failed.
class EstimationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! Asymptotic covariance unavailable (singular Hessian).
class InferenceError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! |M^l(theta)| fell below the 1 - 2P guard.
class DegeneracyError : public std::runtime_error {
public:
  DegeneracyError(const std::string& what, int l) : std::runtime_error(what), l_(l) {}
  int offending_l() const { return l_; }

private:
  int l_;
};

//! Slope-heuristic regression could not be performed.
class CalibrationError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

//! A Monte Carlo experiment lost too many replications.
class ExperimentError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

} // namespace circmix
