#include "circmix/ident.hpp"

#include <cmath>
#include <sstream>

namespace circmix {

std::string to_string(IdentTag tag)
{
  switch (tag) {
  case IdentTag::Identifiable:
    return "Identifiable";
  case IdentTag::LabelSwitchOnly:
    return "LabelSwitchOnly";
  case IdentTag::PiShift:
    return "PiShift";
  case IdentTag::Bipolar:
    return "Bipolar";
  case IdentTag::TwoPiOverThree:
    return "TwoPiOverThree";
  case IdentTag::Collapsed:
    return "Collapsed";
  case IdentTag::BoundaryP:
    return "BoundaryP";
  }
  return "Unknown";
}

Real AliasRecipe::weight_sum() const
{
  Real s = 0;
  for (const auto& t : f_prime_weights)
    s += t.weight;
  return s;
}

Real AliasRecipe::f_prime(const ComponentDensity& f, Real x) const
{
  Real v = 0;
  for (const auto& t : f_prime_weights)
    v += t.weight * f(x - t.shift);
  return v;
}

Real AliasRecipe::mixture(const ComponentDensity& f, Real x) const
{
  return theta_prime.p * f_prime(f, x - theta_prime.alpha) + (1 - theta_prime.p) * f_prime(f, x - theta_prime.beta);
}

AliasRecipe alias_label_switch(const MixtureParams& theta)
{
  return {IdentTag::LabelSwitchOnly, "label switch (1-p, beta, alpha)", {1 - theta.p, theta.beta, theta.alpha}, {{0, 1}}};
}

AliasRecipe alias_pi_shift(const MixtureParams& theta)
{
  return {IdentTag::PiShift,
          "joint pi shift (p, alpha+pi, beta+pi), f' = f_pi",
          {theta.p, theta.alpha + kPi, theta.beta + kPi},
          {{kPi, 1}}};
}

Real bipolar_q_for(Real p, Real p_prime)
{
  // p' q + (1 - p')(1 - q) = p  =>  q = (1 - p - p') / (1 - 2p').
  return (1 - p - p_prime) / (1 - 2 * p_prime);
}

AliasRecipe alias_bipolar(const MixtureParams& theta, Real q, bool swapped, Real tol)
{
  if (!congruent(theta.beta - theta.alpha, kPi, kTwoPi, tol))
    throw DomainError("alias_bipolar: beta - alpha must equal pi (mod 2pi)");
  if (!(q > 0 && q <= 1))
    throw DomainError("alias_bipolar: q must lie in (0, 1]");
  if (std::abs(2 * q - 1) < 1e-15)
    throw DomainError("alias_bipolar: q = 1/2 gives f' = f'_pi, no weight match");
  // Weight on f_alpha must stay p: p' q + (1 - p')(1 - q) = p.
  const Real p_prime = (theta.p + q - 1) / (2 * q - 1);
  if (!(p_prime > 0 && p_prime <= theta.p + 1e-15))
    throw DomainError("alias_bipolar: induced p' outside (0, p]");
  AliasRecipe r;
  r.kind = IdentTag::Bipolar;
  if (!swapped) {
    r.note = "bipolar: f' = q f + (1-q) f_pi";
    r.theta_prime = {p_prime, theta.alpha, theta.beta};
    r.f_prime_weights = {{0, q}, {kPi, 1 - q}};
  } else {
    r.note = "bipolar swapped: (p', beta, alpha), f' = q f_pi + (1-q) f";
    r.theta_prime = {p_prime, theta.beta, theta.alpha};
    r.f_prime_weights = {{kPi, q}, {0, 1 - q}};
  }
  return r;
}

AliasRecipe alias_case4(const MixtureParams& theta, bool alternative, Real tol)
{
  const Real d = theta.beta - theta.alpha;
  int sign;
  if (congruent(d, kTwoPi / 3, kTwoPi, tol))
    sign = 1;
  else if (congruent(d, -kTwoPi / 3, kTwoPi, tol))
    sign = -1;
  else
    throw DomainError("alias_case4: beta - alpha must equal +-2pi/3 (mod 2pi)");

  const Real p = theta.p;
  AliasRecipe r;
  r.kind = IdentTag::TwoPiOverThree;
  r.theta_prime.p = (1 - 2 * p) / (2 - 3 * p);
  r.f_prime_weights = {{kPi / 3, 1 - p}, {-kPi / 3, 1 - p}, {kPi, 2 * p - 1}};
  if (!alternative) {
    r.note = "2pi/3 alias (alpha+pi, beta-+pi/3)";
    r.theta_prime.alpha = theta.alpha + kPi;
    r.theta_prime.beta = theta.beta - sign * kPi / 3;
  } else {
    // Joint pi shift of the primary witness.
    r.note = "2pi/3 alias (alpha, beta+-2pi/3), f' rotated by pi";
    r.theta_prime.alpha = theta.alpha;
    r.theta_prime.beta = theta.beta + sign * kTwoPi / 3;
    for (auto& t : r.f_prime_weights)
      t.shift += kPi;
  }
  return r;
}

IdentClass classify(const MixtureParams& theta, Real tol)
{
  IdentClass out;
  const Real d = theta.beta - theta.alpha;
  if (congruent(d, 0, kTwoPi, tol))
    out.tag = IdentTag::Collapsed;
  else if (std::abs(theta.p - 0.5) <= tol)
    out.tag = IdentTag::BoundaryP;
  else if (congruent(d, kPi, kTwoPi, tol))
    out.tag = IdentTag::Bipolar;
  else if (congruent(d, kTwoPi / 3, kTwoPi, tol) || congruent(d, -kTwoPi / 3, kTwoPi, tol))
    out.tag = IdentTag::TwoPiOverThree;
  else
    out.tag = IdentTag::Identifiable;

  out.witnesses.push_back(alias_label_switch(theta));
  out.witnesses.push_back(alias_pi_shift(theta));

  // Degenerate families are constructed on the p < 1/2 labelling.
  const MixtureParams base = theta.p > 0.5 ? MixtureParams{1 - theta.p, theta.beta, theta.alpha} : theta;
  if (out.tag == IdentTag::Bipolar) {
    const Real q = bipolar_q_for(base.p, base.p / 2);
    out.witnesses.push_back(alias_bipolar(base, q, false, tol));
    out.witnesses.push_back(alias_bipolar(base, q, true, tol));
  } else if (out.tag == IdentTag::TwoPiOverThree) {
    out.witnesses.push_back(alias_case4(base, false, tol));
    out.witnesses.push_back(alias_case4(base, true, tol));
  } else if (out.tag == IdentTag::Collapsed) {
    out.witnesses.push_back({IdentTag::Collapsed, "collapsed: any p' reproduces f_alpha", {base.p / 2, base.alpha, base.alpha}, {{0, 1}}});
  }
  return out;
}

Real alias_residual(const MixtureParams& theta, const AliasRecipe& recipe, const ComponentDensity& f,
                    Eigen::Index points)
{
  Real worst = 0;
  for (Eigen::Index j = 0; j < points; ++j) {
    const Real x = kTwoPi * static_cast<Real>(j) / static_cast<Real>(points);
    worst = std::max(worst, std::abs(mixture_density(theta, f, x) - recipe.mixture(f, x)));
  }
  return worst;
}

Real alias_min_density(const AliasRecipe& recipe, const ComponentDensity& f, Eigen::Index points)
{
  Real lo = std::numeric_limits<Real>::infinity();
  for (Eigen::Index j = 0; j < points; ++j)
    lo = std::min(lo, recipe.f_prime(f, kTwoPi * static_cast<Real>(j) / static_cast<Real>(points)));
  return lo;
}

std::pair<Real, Real> det_sin_identity(const Eigen::Vector4d& gamma)
{
  Eigen::Matrix4d a;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j)
      a(i, j) = std::sin((i + 1) * gamma(j));
  Real rhs = 64;
  for (int k = 0; k < 4; ++k)
    rhs *= std::sin(gamma(k));
  for (int i = 0; i < 4; ++i)
    for (int j = i + 1; j < 4; ++j)
      rhs *= std::cos(gamma(i)) - std::cos(gamma(j));
  return {a.partialPivLu().determinant(), rhs};
}

} // namespace circmix
