#pragma once

#include "circmix/circ.hpp"
#include "circmix/types.hpp"

#include <array>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace circmix {

//! Harmonics entering the contrast: l in [-4, 4].
inline constexpr int kContrastOrder = 4;

//! M^l(theta) = p e^{-i alpha l} + (1 - p) e^{-i beta l}.
template <typename Scalar>
std::complex<Scalar> fourier_weight(Scalar p, Scalar alpha, Scalar beta, int l)
{
  return p * std::polar(Scalar(1), -alpha * l) + (Scalar(1) - p) * std::polar(Scalar(1), -beta * l);
}

//! Gradient of M^l with respect to (p, alpha, beta).
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 3, 1> fourier_weight_gradient(Scalar p, Scalar alpha, Scalar beta, int l)
{
  using C = std::complex<Scalar>;
  const C ea = std::polar(Scalar(1), -alpha * l);
  const C eb = std::polar(Scalar(1), -beta * l);
  const C il(0, static_cast<Scalar>(l));
  Eigen::Matrix<C, 3, 1> g;
  g << ea - eb, -il * p * ea, -il * (Scalar(1) - p) * eb;
  return g;
}

//! Hessian of M^l with respect to (p, alpha, beta).
template <typename Scalar>
Eigen::Matrix<std::complex<Scalar>, 3, 3> fourier_weight_hessian(Scalar p, Scalar alpha, Scalar beta, int l)
{
  using C = std::complex<Scalar>;
  const C ea = std::polar(Scalar(1), -alpha * l);
  const C eb = std::polar(Scalar(1), -beta * l);
  const C il(0, static_cast<Scalar>(l));
  const Scalar l2 = static_cast<Scalar>(l) * static_cast<Scalar>(l);
  Eigen::Matrix<C, 3, 3> h;
  h << C(0), -il * ea, il * eb,
       -il * ea, -l2 * p * ea, C(0),
       il * eb, C(0), -l2 * (Scalar(1) - p) * eb;
  return h;
}

inline Complex fourier_weight(const MixtureParams& t, int l) { return fourier_weight(t.p, t.alpha, t.beta, l); }
inline Vector3c fourier_weight_gradient(const MixtureParams& t, int l)
{
  return fourier_weight_gradient(t.p, t.alpha, t.beta, l);
}
inline Matrix3c fourier_weight_hessian(const MixtureParams& t, int l)
{
  return fourier_weight_hessian(t.p, t.alpha, t.beta, l);
}

//! Z^l(x; theta) = Im(e^{ilx} M^l(theta)) / (2 pi).
Real contrast_term(Real x, int l, const MixtureParams& theta);
Vector3 contrast_term_gradient(Real x, int l, const MixtureParams& theta);
Matrix3 contrast_term_hessian(Real x, int l, const MixtureParams& theta);

//! S_n and its derivatives at one theta. `value` may be slightly negative:
//! the diagonal-free U-statistic is unbiased, not nonnegative.
struct ContrastValue {
  Real value = 0;
  Vector3 gradient = Vector3::Zero();
  Matrix3 hessian = Matrix3::Zero();
};

//! Trigonometric moments of a sample for l = 1..4. The contrast, gradient
//! and Hessian are quadratic forms in these, so after construction every
//! evaluation is O(1) in n.
class ContrastMoments {
public:
  //! Throws DomainError if the sample has fewer than 2 points.
  explicit ContrastMoments(const Sample& sample);

  ContrastValue evaluate(const MixtureParams& theta) const;
  Real value(const MixtureParams& theta) const;
  Eigen::Index n() const { return n_; }

private:
  struct Harmonic {
    Real sum_sin = 0, sum_cos = 0;
    Real sum_ss = 0, sum_sc = 0, sum_cc = 0;
  };
  std::array<Harmonic, kContrastOrder> h_{};
  Eigen::Index n_ = 0;
};

//! S_n(theta) = 1/(n(n-1)) sum_l [(sum_k Z_k^l)^2 - sum_k (Z_k^l)^2].
ContrastValue empirical_contrast(const Sample& sample, const MixtureParams& theta);

//! S(theta) = sum_{l=-4}^{4} Im(g^{*l} conj(M^l(theta)))^2 with
//! g^{*l} = M^l(theta0) f^{*l}. `f_coeffs` holds f^{*1}, ..., f^{*4}.
Real population_contrast(const MixtureParams& theta, const MixtureParams& theta0, std::span<const Complex> f_coeffs);
Real population_contrast(const MixtureParams& theta, const MixtureParams& theta0, const ComponentDensity& f);

//! Box for the parametric search.
struct SearchBox {
  Real p_lo = 0.01;
  Real p_hi = 0.49;
  Real angle_lo = 0;
  Real angle_hi = kPi - 1e-9;
};

struct FitOptions {
  int n_starts = 10;
  std::uint64_t seed = 0;
  SearchBox box;
  Real f_tol = 1e-10;
  Real x_tol = 1e-8;
  int max_iter = 2000;
  //! Nodes per angle of a coarse grid scanned before the random starts; the
  //! best node seeds one extra simplex search (index n_starts).  0 disables it.
  int scan_nodes = 16;
  //! Projected Newton refinement of the best simplex vertex.
  bool polish = false;
  bool compute_covariance = true;
  Real rcond_min = 1e-10;
  Real near_degenerate_radius = 0.05;
};

struct LocalMinimum {
  //! 0..n_starts-1 for random starts, n_starts for the grid-scan start.
  int start_index = 0;
  MixtureParams start;
  MixtureParams theta;
  Real contrast = 0;
  int iterations = 0;
  bool converged = false;
};

//! Sigma = A^{-1} V A^{-1} with A = Hessian of S_n at theta_hat and V the
//! plug-in score covariance.
struct AsymptoticCovariance {
  Matrix3 sigma = Matrix3::Zero();
  Matrix3 hessian = Matrix3::Zero();
  Matrix3 score_cov = Matrix3::Zero();
  //! sqrt(Sigma_jj / n).
  Vector3 std_errors = Vector3::Zero();
  Real rcond = 0;
  Eigen::Index n = 0;
};

struct FitResult {
  MixtureParams theta_hat;
  Real contrast_at_min = 0;
  int n_starts = 0;
  int converged_starts = 0;
  Eigen::Index n = 0;
  std::vector<LocalMinimum> local_minima;
  //! Sigma / n, when inference succeeded.
  std::optional<Matrix3> covariance;
  std::optional<AsymptoticCovariance> inference;
  std::string inference_error;
  bool near_degenerate = false;
};

//! (p, alpha, beta) -> (1 - p, beta, alpha) when p > 1/2.
MixtureParams canonicalize(const MixtureParams& theta);

//! |beta - alpha| mod 2pi/3 below `radius`.
bool near_degenerate(const MixtureParams& theta, Real radius = 0.05);

//! Squared distance of two angles on the circle of circumference pi.
Real angular_sq_error(Real estimate, Real truth);

//! Multi-start box-constrained minimization of S_n.
//! Throws DomainError for a bad box or n < 2, EstimationError when no start converges.
FitResult estimate_theta(const Sample& sample, const FitOptions& options = {});

//! Throws InferenceError if the Hessian's reciprocal condition number is below rcond_min.
AsymptoticCovariance asymptotic_cov(const Sample& sample, const MixtureParams& theta_hat, Real rcond_min = 1e-10);

} // namespace circmix
