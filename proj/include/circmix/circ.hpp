#pragma once

#include "circmix/rng.hpp"
#include "circmix/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace circmix {

//! Tolerance used for angle equality tests.
inline constexpr Real kAngleTol = 1e-9;

//! A point on the circle, stored as its representative in [0, 2pi).
class Angle {
public:
  Angle() = default;
  //! Throws DomainError for non-finite input.
  explicit Angle(Real radians);

  Real value() const { return value_; }
  operator Real() const { return value_; }

private:
  Real value_ = 0;
};

//! Representative of x in [0, 2pi). Throws DomainError if x is not finite.
Angle normalize(Real x);

//! Representative of x in (-pi, pi].
Real wrap_signed(Real x);

//! Signed distance from `b` to `a` on the circle of circumference `period`,
//! in (-period/2, period/2].
Real angular_difference(Real a, Real b, Real period = kTwoPi);

//! True when a and b agree modulo `period` within `tol`.
bool congruent(Real a, Real b, Real period, Real tol = kAngleTol);

struct VonMises {
  Real kappa = 0;
};
struct WrappedCauchy {
  Real gamma = 0;
};
//! Wrapped normal parameterized by rho = exp(-sigma^2 / 2).
struct WrappedNormal {
  Real rho = 0;
};
//! Values on the uniform grid 2 pi j / m, j = 0..m-1, linearly interpolated
//! and periodic. Rescaled to unit mass on construction.
struct Tabulated {
  std::vector<Real> values;
};

using DensityKind = std::variant<VonMises, WrappedCauchy, WrappedNormal, Tabulated>;

//! A circular density f with location mu, evaluated as f(x - mu).
class ComponentDensity {
public:
  //! Validates parameters; throws DomainError on bad input.
  explicit ComponentDensity(DensityKind kind, Real mu = 0);

  static ComponentDensity von_mises(Real kappa, Real mu = 0) { return ComponentDensity(VonMises{kappa}, mu); }
  static ComponentDensity wrapped_cauchy(Real gamma, Real mu = 0) { return ComponentDensity(WrappedCauchy{gamma}, mu); }
  static ComponentDensity wrapped_normal(Real rho, Real mu = 0) { return ComponentDensity(WrappedNormal{rho}, mu); }
  static ComponentDensity uniform() { return von_mises(0.0); }
  static ComponentDensity tabulated(std::vector<Real> values, Real mu = 0)
  {
    return ComponentDensity(Tabulated{std::move(values)}, mu);
  }

  const DensityKind& kind() const { return kind_; }
  Real location() const { return mu_; }

  //! The same density rotated by `shift` (f_shift(x) = f(x - shift)).
  ComponentDensity shifted(Real shift) const;

  //! Density value at x.
  Real operator()(Real x) const;

  //! Fourier coefficient f^{*l} = (1/2pi) int f(x) e^{-ilx} dx.
  Complex fourier(int l) const;

  //! One draw.
  Real sample(Rng& rng) const;

  //! Descriptor string such as "vonmises:kappa=5,mu=0".
  std::string describe() const;

  //! Short label for tables, e.g. "VM(kappa=5)".
  std::string label() const;

private:
  DensityKind kind_;
  Real mu_ = 0;
  // Tabulated only: cumulative trapezoid masses, size m + 1.
  std::vector<Real> cdf_;
};

//! theta = (p, alpha, beta) of g(x) = p f(x - alpha) + (1 - p) f(x - beta).
//! A plain value type; domain checks live in validate().
struct MixtureParams {
  Real p = 0.25;
  Real alpha = 0;
  Real beta = 0;

  Vector3 as_vector() const { return {p, alpha, beta}; }
  static MixtureParams from_vector(const Vector3& v) { return {v(0), v(1), v(2)}; }
};

//! Checks p in (0, p_cap], alpha, beta in [0, pi) and finite.
//! Throws DomainError naming the violated constraint.
void validate(const MixtureParams& theta, Real p_cap = 0.49);

//! Provenance of simulated data.
struct SampleMeta {
  std::optional<std::uint64_t> seed;
  std::optional<MixtureParams> true_theta;
  std::optional<std::string> density_name;
  //! 1 if the draw came from the alpha component, 0 otherwise.
  std::vector<std::uint8_t> labels;
};

//! Observed angles, each in [0, 2pi).
struct Sample {
  Eigen::VectorXd angles;
  SampleMeta meta;

  Eigen::Index size() const { return angles.size(); }
};

//! Wraps raw radians into a Sample; throws DomainError on non-finite values.
Sample make_sample(const std::vector<Real>& radians);

//! n i.i.d. draws from d.
Sample sample_component(const ComponentDensity& d, Eigen::Index n, Rng& rng);

//! n draws from the mixture: Y + alpha with probability p, else Y + beta.
//! Latent labels (1 for the alpha component, 0 for beta) are kept in meta
//! when `keep_labels` is set. p = 0 is allowed.
Sample sample_mixture(const MixtureParams& theta, const ComponentDensity& d, Eigen::Index n, Rng& rng,
                      bool keep_labels = false);

//! g(x) = p f(x - alpha) + (1 - p) f(x - beta).
Real mixture_density(const MixtureParams& theta, const ComponentDensity& d, Real x);

//! Empirical coefficient (1 / 2 pi n) sum_k e^{-il X_k}.
Complex empirical_fourier(const Sample& sample, int l);

//! Uniform grid of m points 2 pi j / m.
Eigen::VectorXd uniform_grid(Eigen::Index m);

} // namespace circmix
