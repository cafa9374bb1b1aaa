#include "circmix/npdens.hpp"

#include <cmath>
#include <sstream>

namespace circmix {

Real EmpiricalCoeffs::energy(int L) const
{
  Real total = 0;
  for (int l = -L; l <= L; ++l)
    total += std::norm(f(l));
  return total;
}

EmpiricalCoeffs empirical_coeffs(const Sample& sample, const MixtureParams& theta, int L_max, Real p_cap)
{
  if (L_max < 0)
    throw DomainError("L_max must be >= 0");
  if (sample.size() < 1)
    throw DomainError("empirical_coeffs: empty sample");
  EmpiricalCoeffs out;
  out.L_max = L_max;
  out.n = sample.size();
  out.theta_used = theta;
  out.g_hat.resize(2 * L_max + 1);
  out.f_hat.resize(2 * L_max + 1);

  const Real floor = 1 - 2 * p_cap;
  const Real scale = 1 / (kTwoPi * static_cast<Real>(out.n));
  out.g_hat(L_max) = 1 / kTwoPi;
  out.f_hat(L_max) = 1 / kTwoPi;
  for (int l = 1; l <= L_max; ++l) {
    const Complex m = fourier_weight(theta, l);
    if (std::abs(m) < floor - 1e-12) {
      std::ostringstream os;
      os << "|M^" << l << "(theta)| = " << std::abs(m) << " below the 1 - 2P guard " << floor;
      throw DegeneracyError(os.str(), l);
    }
    Real re = 0, im = 0;
    for (Eigen::Index k = 0; k < out.n; ++k) {
      re += std::cos(l * sample.angles(k));
      im -= std::sin(l * sample.angles(k));
    }
    const Complex g(re * scale, im * scale);
    out.g_hat(L_max + l) = g;
    out.g_hat(L_max - l) = std::conj(g);
    out.f_hat(L_max + l) = g / m;
    out.f_hat(L_max - l) = std::conj(g / m);
  }
  return out;
}

int default_L_max(Eigen::Index n)
{
  return std::max(10, static_cast<int>(std::floor(std::cbrt(static_cast<Real>(n)) + 1e-9)));
}

LSelection select_L(const EmpiricalCoeffs& coeffs, Real lambda, int L_n)
{
  if (L_n < 0)
    throw DomainError("select_L: empty set of resolution levels");
  if (L_n > coeffs.L_max)
    throw DomainError("select_L: L_n exceeds the available coefficients");
  if (!(lambda > 0))
    throw DomainError("select_L: lambda must be positive");
  LSelection out;
  out.criterion.resize(static_cast<std::size_t>(L_n + 1));
  const Real n = static_cast<Real>(coeffs.n);
  Real energy = std::norm(coeffs.f(0));
  for (int L = 0; L <= L_n; ++L) {
    if (L > 0)
      energy += 2 * std::norm(coeffs.f(L));
    const Real crit = -energy + lambda * (2 * L + 1) / n;
    out.criterion[static_cast<std::size_t>(L)] = crit;
    if (crit < out.criterion[static_cast<std::size_t>(out.L_hat)])
      out.L_hat = L;
  }
  return out;
}

SlopeFit fit_slope(const Eigen::VectorXd& dimension, const Eigen::VectorXd& energy, int window_start)
{
  if (dimension.size() != energy.size())
    throw DomainError("fit_slope: size mismatch");
  const Eigen::Index count = dimension.size() - window_start;
  if (window_start < 0 || count < 4)
    throw CalibrationError("slope heuristic needs at least 4 points in the regression window, got " +
                           std::to_string(std::max<Eigen::Index>(count, 0)));
  const Eigen::VectorXd x = dimension.tail(count);
  const Eigen::VectorXd y = energy.tail(count);
  const Real mx = x.mean();
  const Real my = y.mean();
  const Real sxx = (x.array() - mx).square().sum();
  if (!(sxx > 0))
    throw CalibrationError("slope heuristic: degenerate abscissae");
  SlopeFit out;
  out.slope = ((x.array() - mx) * (y.array() - my)).sum() / sxx;
  out.intercept = my - out.slope * mx;
  out.lambda = 2 * out.slope;
  out.window_start = window_start;
  out.dimension = dimension;
  out.energy = energy;
  if (!(out.slope > 0))
    throw CalibrationError("slope heuristic produced a nonpositive slope");
  return out;
}

int slope_window_start(int L_n, Real fraction)
{
  if (!(fraction > 0 && fraction <= 1))
    throw DomainError("slope window fraction must lie in (0, 1]");
  return static_cast<int>(std::ceil((1 - fraction) * L_n - 1e-12));
}

SlopeFit slope_lambda(const EmpiricalCoeffs& coeffs, int L_n, Real window_fraction)
{
  if (L_n + 1 < 8)
    throw CalibrationError("slope heuristic needs at least 8 resolution levels");
  if (L_n > coeffs.L_max)
    throw DomainError("slope_lambda: L_n exceeds the available coefficients");
  Eigen::VectorXd x(L_n + 1), y(L_n + 1);
  const Real n = static_cast<Real>(coeffs.n);
  Real energy = std::norm(coeffs.f(0));
  for (int L = 0; L <= L_n; ++L) {
    if (L > 0)
      energy += 2 * std::norm(coeffs.f(L));
    x(L) = (2 * L + 1) / n;
    y(L) = energy;
  }
  return fit_slope(x, y, slope_window_start(L_n, window_fraction));
}

Real theoretical_penalty_floor(Real p_cap, Real epsilon)
{
  const Real gap = 1 - 2 * p_cap;
  return 3 / (kPi * kPi) * (1 + 1 / epsilon) / (gap * gap);
}

Real DensityEstimate::operator()(Real x) const
{
  Real total = coeffs(L_selected).real();
  for (int l = 1; l <= L_selected; ++l)
    total += 2 * std::real(coeff(l) * std::polar(Real(1), l * x));
  return total;
}

Eigen::VectorXd DensityEstimate::evaluate(const Eigen::VectorXd& x) const
{
  Eigen::VectorXd out(x.size());
  for (Eigen::Index i = 0; i < x.size(); ++i)
    out(i) = (*this)(x(i));
  return out;
}

Eigen::VectorXd DensityEstimate::evaluate_clipped(const Eigen::VectorXd& uniform_x) const
{
  Eigen::VectorXd v = evaluate(uniform_x).cwiseMax(0);
  const Real mass = v.sum() * kTwoPi / static_cast<Real>(uniform_x.size());
  if (mass > 0)
    v /= mass;
  return v;
}

DensityEstimate projection_estimate(const EmpiricalCoeffs& coeffs, int L)
{
  if (L < 0 || L > coeffs.L_max)
    throw DomainError("projection level out of range");
  DensityEstimate est;
  est.L_selected = L;
  est.L_max = coeffs.L_max;
  est.n = coeffs.n;
  est.theta_used = coeffs.theta_used;
  est.coeffs = coeffs.f_hat.segment(coeffs.L_max - L, 2 * L + 1);
  return est;
}

DensityEstimate estimate_density(const Sample& sample, const MixtureParams& theta, const DensityOptions& options)
{
  const int L_max = options.L_max.value_or(default_L_max(sample.size()));
  const EmpiricalCoeffs coeffs = empirical_coeffs(sample, theta, L_max, options.p_cap);

  std::optional<SlopeFit> slope;
  Real lambda;
  if (options.lambda) {
    lambda = *options.lambda;
  } else {
    slope = slope_lambda(coeffs, L_max, options.window_fraction);
    lambda = slope->lambda;
  }
  const LSelection sel = select_L(coeffs, lambda, L_max);

  DensityEstimate est = projection_estimate(coeffs, sel.L_hat);
  est.lambda = lambda;
  est.lambda_from_slope = !options.lambda.has_value();
  est.penalty_floor = theoretical_penalty_floor(options.p_cap, options.epsilon);
  est.slope = std::move(slope);
  for (int L = 0; L <= L_max; ++L)
    est.contrast_path.emplace_back(L, sel.criterion[static_cast<std::size_t>(L)]);
  return est;
}

DensityEstimate estimate_density(const Sample& sample, const FitResult& fit, const DensityOptions& options)
{
  return estimate_density(sample, fit.theta_hat, options);
}

Real l2_error(const DensityEstimate& estimate, const ComponentDensity& d)
{
  Real total = 0;
  for (int l = -estimate.L_selected; l <= estimate.L_selected; ++l)
    total += std::norm(estimate.coeff(l) - d.fourier(l));
  for (int l = estimate.L_selected + 1; l <= 10000; ++l) {
    const Real tail = std::norm(d.fourier(l)) + std::norm(d.fourier(-l));
    if (tail < 1e-16)
      break;
    total += tail;
  }
  return total;
}

} // namespace circmix
