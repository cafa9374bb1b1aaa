#pragma once

#include "circmix/circ.hpp"
#include "circmix/types.hpp"

#include <string>
#include <utility>
#include <vector>

namespace circmix {

enum class IdentTag {
  Identifiable,
  LabelSwitchOnly,
  PiShift,
  Bipolar,
  TwoPiOverThree,
  Collapsed,
  BoundaryP,
};

std::string to_string(IdentTag tag);

//! One term of f' = sum_j w_j f(. - shift_j).
struct ShiftWeight {
  Real shift = 0;
  Real weight = 0;
};

//! An alternative (theta', f') producing the same mixture density.
struct AliasRecipe {
  IdentTag kind = IdentTag::Identifiable;
  std::string note;
  //! p' may leave (0, P] and the angles may leave [0, pi).
  MixtureParams theta_prime;
  std::vector<ShiftWeight> f_prime_weights;

  Real weight_sum() const;
  //! f'(x) built from the component density f.
  Real f_prime(const ComponentDensity& f, Real x) const;
  //! p' f'(x - alpha') + (1 - p') f'(x - beta').
  Real mixture(const ComponentDensity& f, Real x) const;
};

struct IdentClass {
  IdentTag tag = IdentTag::Identifiable;
  std::vector<AliasRecipe> witnesses;
};

//! Tag precedence: Collapsed, BoundaryP, Bipolar, TwoPiOverThree, Identifiable.
//! Label-switch and pi-shift witnesses are always attached.
IdentClass classify(const MixtureParams& theta, Real tol = kAngleTol);

//! (1 - p, beta, alpha) with f' = f.
AliasRecipe alias_label_switch(const MixtureParams& theta);

//! (p, alpha + pi, beta + pi) with f' = f_pi.
AliasRecipe alias_pi_shift(const MixtureParams& theta);

//! beta - alpha = pi: f' = q f + (1 - q) f_pi and p' = (p + q - 1) / (2q - 1).
//! With `swapped`, the witness (p', beta, alpha) with f' = q f_pi + (1 - q) f.
//! Throws DomainError unless beta - alpha = pi (mod 2pi), q in (0, 1] and p' in (0, p].
AliasRecipe alias_bipolar(const MixtureParams& theta, Real q, bool swapped = false, Real tol = kAngleTol);

//! q giving a requested p' in (0, p] for the bipolar family.
Real bipolar_q_for(Real p, Real p_prime);

//! beta - alpha = +-2pi/3: p' = (1 - 2p) / (2 - 3p),
//! f' = (1 - p) f_{pi/3} + (1 - p) f_{-pi/3} + (2p - 1) f_pi with
//! (alpha', beta') = (alpha + pi, beta -+ pi/3); `alternative` gives
//! (alpha, beta +- 2pi/3) with f' rotated by pi. Throws DomainError otherwise.
AliasRecipe alias_case4(const MixtureParams& theta, bool alternative = false, Real tol = kAngleTol);

//! max_j |g(x_j) - g'(x_j)| over a uniform grid of `points` nodes.
Real alias_residual(const MixtureParams& theta, const AliasRecipe& recipe, const ComponentDensity& f,
                    Eigen::Index points = 2048);

//! min_j f'(x_j) on a uniform grid.
Real alias_min_density(const AliasRecipe& recipe, const ComponentDensity& f, Eigen::Index points = 2048);

//! det (sin(i gamma_j))_{i,j=1..4} and 64 prod sin(gamma_k) prod_{i<j} (cos gamma_i - cos gamma_j).
std::pair<Real, Real> det_sin_identity(const Eigen::Vector4d& gamma);

} // namespace circmix
