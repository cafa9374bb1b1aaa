#pragma once

#include "circmix/circ.hpp"
#include "circmix/contrast.hpp"
#include "circmix/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace circmix {

//! Plug-in Fourier coefficients for l in [-L_max, L_max], stored at index l + L_max.
struct EmpiricalCoeffs {
  int L_max = 0;
  Eigen::Index n = 0;
  MixtureParams theta_used;
  //! ghat^{*l} = (1 / 2 pi n) sum_k e^{-il X_k}.
  Eigen::VectorXcd g_hat;
  //! fhat^{*l} = ghat^{*l} / M^l(theta_used).
  Eigen::VectorXcd f_hat;

  Complex g(int l) const { return g_hat(l + L_max); }
  Complex f(int l) const { return f_hat(l + L_max); }
  //! sum_{|l| <= L} |fhat^{*l}|^2.
  Real energy(int L) const;
};

//! Throws DegeneracyError (naming l) if |M^l(theta)| < 1 - 2 p_cap for some |l| <= L_max.
EmpiricalCoeffs empirical_coeffs(const Sample& sample, const MixtureParams& theta, int L_max, Real p_cap = 0.49);

//! L_max = max(10, floor(n^{1/3})).
int default_L_max(Eigen::Index n);

//! Penalized criterion crit(L) = -sum_{|l|<=L} |fhat^{*l}|^2 + lambda (2L + 1) / n.
struct LSelection {
  int L_hat = 0;
  std::vector<Real> criterion;  // indexed by L = 0..L_n
};

//! argmin of the criterion over {0, ..., L_n}; ties go to the smaller L.
LSelection select_L(const EmpiricalCoeffs& coeffs, Real lambda, int L_n);

struct SlopeFit {
  Real slope = 0;
  Real intercept = 0;
  //! lambda_hat = 2 * slope.
  Real lambda = 0;
  int window_start = 0;
  //! Couples ((2L + 1) / n, sum_{|l|<=L} |fhat^{*l}|^2) for L = 0..L_n.
  Eigen::VectorXd dimension;
  Eigen::VectorXd energy;
};

//! Least-squares line through the couples with index >= window_start.
//! Throws CalibrationError for fewer than 4 points or a nonpositive slope.
SlopeFit fit_slope(const Eigen::VectorXd& dimension, const Eigen::VectorXd& energy, int window_start);

//! First index of the regression window keeping the last `fraction` of {0..L_n}.
int slope_window_start(int L_n, Real fraction);

//! Slope heuristic over {0..L_n} (needs at least 8 levels). Default window is the last half.
SlopeFit slope_lambda(const EmpiricalCoeffs& coeffs, int L_n, Real window_fraction = 0.5);

//! (3 / pi^2)(1 + 1/eps)(1 - 2P)^{-2}; reported as a diagnostic only.
Real theoretical_penalty_floor(Real p_cap, Real epsilon = 1);

struct DensityOptions {
  std::optional<int> L_max;
  //! Explicit penalty constant; slope heuristic when empty.
  std::optional<Real> lambda;
  Real window_fraction = 0.5;
  Real p_cap = 0.49;
  Real epsilon = 1;
};

//! Projection estimator fhat_L(x) = sum_{|l|<=L} fhat^{*l} e^{ilx}.
struct DensityEstimate {
  int L_selected = 0;
  int L_max = 0;
  Eigen::Index n = 0;
  Real lambda = 0;
  bool lambda_from_slope = false;
  Real penalty_floor = 0;
  MixtureParams theta_used;
  //! fhat^{*l} for l in [-L_selected, L_selected].
  Eigen::VectorXcd coeffs;
  //! (L, criterion(L)) for L = 0..L_max.
  std::vector<std::pair<int, Real>> contrast_path;
  std::optional<SlopeFit> slope;

  Complex coeff(int l) const { return std::abs(l) > L_selected ? Complex(0) : coeffs(l + L_selected); }
  Real operator()(Real x) const;
  Eigen::VectorXd evaluate(const Eigen::VectorXd& x) const;
  //! Negative parts set to zero, then rescaled to unit mass on the (uniform) grid.
  Eigen::VectorXd evaluate_clipped(const Eigen::VectorXd& uniform_x) const;
};

//! Truncates a coefficient set to level L.
DensityEstimate projection_estimate(const EmpiricalCoeffs& coeffs, int L);

DensityEstimate estimate_density(const Sample& sample, const MixtureParams& theta, const DensityOptions& options = {});
DensityEstimate estimate_density(const Sample& sample, const FitResult& fit, const DensityOptions& options = {});

//! ||fhat - f||_2^2 with ||phi||_2^2 = (1 / 2 pi) int phi^2, by Parseval.
Real l2_error(const DensityEstimate& estimate, const ComponentDensity& d);

} // namespace circmix
