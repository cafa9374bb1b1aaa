#include "circmix/circ.hpp"

#include "circmix/bessel.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace circmix {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr Real kUniform = 1.0 / kTwoPi;

std::string fmt(Real v)
{
  std::ostringstream os;
  os.precision(12);
  os << v;
  return os.str();
}

// Periodic linear interpolation of a normalized table.
Real tabulated_value(const std::vector<Real>& v, Real x)
{
  const auto m = static_cast<Real>(v.size());
  const Real pos = normalize(x).value() * m / kTwoPi;
  auto j = static_cast<std::size_t>(std::floor(pos));
  const Real t = pos - static_cast<Real>(j);
  j %= v.size();
  const std::size_t k = (j + 1) % v.size();
  return (1 - t) * v[j] + t * v[k];
}

Real von_mises_draw(Real kappa, Rng& rng)
{
  if (kappa < 1e-8)
    return rng.uniform(-kPi, kPi);
  // Best & Fisher (1979).
  const Real tau = 1 + std::sqrt(1 + 4 * kappa * kappa);
  const Real rho = (tau - std::sqrt(2 * tau)) / (2 * kappa);
  const Real r = (1 + rho * rho) / (2 * rho);
  for (;;) {
    const Real z = std::cos(kPi * rng.uniform());
    const Real f = (1 + r * z) / (r + z);
    const Real c = kappa * (r - f);
    const Real u2 = rng.uniform_open();
    if (c * (2 - c) - u2 > 0 || std::log(c / u2) + 1 - c >= 0) {
      const Real angle = std::acos(std::clamp(f, Real(-1), Real(1)));
      return rng.uniform() < 0.5 ? -angle : angle;
    }
  }
}

} // namespace

Angle::Angle(Real radians)
{
  if (!std::isfinite(radians))
    throw DomainError("normalize: non-finite angle");
  Real r = std::fmod(radians, kTwoPi);
  if (r < 0)
    r += kTwoPi;
  if (r >= kTwoPi)
    r = 0;
  value_ = r;
}

Angle normalize(Real x)
{
  return Angle(x);
}

Real wrap_signed(Real x)
{
  Real r = normalize(x).value();
  return r > kPi ? r - kTwoPi : r;
}

Real angular_difference(Real a, Real b, Real period)
{
  Real d = std::fmod(a - b, period);
  if (d <= -period / 2)
    d += period;
  else if (d > period / 2)
    d -= period;
  return d;
}

bool congruent(Real a, Real b, Real period, Real tol)
{
  return std::abs(angular_difference(a, b, period)) <= tol;
}

ComponentDensity::ComponentDensity(DensityKind kind, Real mu) : kind_(std::move(kind)), mu_(mu)
{
  if (!std::isfinite(mu))
    throw DomainError("density location must be finite");
  std::visit(overloaded{
                 [](const VonMises& d) {
                   if (!(d.kappa >= 0) || !std::isfinite(d.kappa))
                     throw DomainError("von Mises kappa must be finite and >= 0");
                 },
                 [](const WrappedCauchy& d) {
                   if (!(d.gamma >= 0 && d.gamma < 1))
                     throw DomainError("wrapped Cauchy gamma must lie in [0, 1)");
                 },
                 [](const WrappedNormal& d) {
                   if (!(d.rho >= 0 && d.rho < 1))
                     throw DomainError("wrapped normal rho must lie in [0, 1)");
                 },
                 [this](Tabulated& d) {
                   if (d.values.size() < 2)
                     throw DomainError("tabulated density needs at least 2 grid values");
                   for (Real v : d.values)
                     if (!(v >= 0) || !std::isfinite(v))
                       throw DomainError("tabulated density has negative or non-finite entries");
                   const Real h = kTwoPi / static_cast<Real>(d.values.size());
                   const Real mass = h * std::accumulate(d.values.begin(), d.values.end(), Real(0));
                   if (!(mass > 0) || !std::isfinite(mass))
                     throw DomainError("tabulated density is not normalizable");
                   for (Real& v : d.values)
                     v /= mass;
                   const std::size_t m = d.values.size();
                   cdf_.assign(m + 1, 0);
                   for (std::size_t j = 0; j < m; ++j)
                     cdf_[j + 1] = cdf_[j] + 0.5 * h * (d.values[j] + d.values[(j + 1) % m]);
                 },
             },
             kind_);
}

ComponentDensity ComponentDensity::shifted(Real shift) const
{
  ComponentDensity out = *this;
  out.mu_ = mu_ + shift;
  return out;
}

Real ComponentDensity::operator()(Real x) const
{
  const Real y = x - mu_;
  return std::visit(overloaded{
                        [&](const VonMises& d) {
                          if (d.kappa == 0)
                            return kUniform;
                          return std::exp(d.kappa * (std::cos(y) - 1)) /
                                 (kTwoPi * bessel_i_scaled(0, d.kappa));
                        },
                        [&](const WrappedCauchy& d) {
                          const Real g2 = d.gamma * d.gamma;
                          return kUniform * (1 - g2) / (1 + g2 - 2 * d.gamma * std::cos(y));
                        },
                        [&](const WrappedNormal& d) {
                          Real sum = 1;
                          for (int l = 1;; ++l) {
                            const Real w = std::pow(d.rho, static_cast<Real>(l) * l);
                            if (w < 1e-16)
                              break;
                            sum += 2 * w * std::cos(l * y);
                          }
                          return kUniform * sum;
                        },
                        [&](const Tabulated& d) { return tabulated_value(d.values, y); },
                    },
                    kind_);
}

Complex ComponentDensity::fourier(int l) const
{
  const Real centred = std::visit(
      overloaded{
          [&](const VonMises& d) { return l == 0 ? kUniform : kUniform * bessel_ratio(l, d.kappa); },
          [&](const WrappedCauchy& d) { return kUniform * std::pow(d.gamma, std::abs(l)); },
          [&](const WrappedNormal& d) {
            return kUniform * std::pow(d.rho, static_cast<Real>(l) * static_cast<Real>(l));
          },
          [&](const Tabulated&) { return Real(0); },
      },
      kind_);
  if (const auto* tab = std::get_if<Tabulated>(&kind_)) {
    // Trapezoid rule on a refinement of the table grid with >= 2048 nodes.
    const auto m = static_cast<Eigen::Index>(tab->values.size());
    const Eigen::Index refine = std::max<Eigen::Index>(1, (2048 + m - 1) / m);
    const Eigen::Index nodes = m * refine;
    Complex acc = 0;
    for (Eigen::Index j = 0; j < nodes; ++j) {
      const Real x = kTwoPi * static_cast<Real>(j) / static_cast<Real>(nodes);
      acc += tabulated_value(tab->values, x) * std::polar(Real(1), -l * x);
    }
    return acc / static_cast<Real>(nodes) * std::polar(Real(1), -l * mu_);
  }
  return centred * std::polar(Real(1), -l * mu_);
}

Real ComponentDensity::sample(Rng& rng) const
{
  const Real y = std::visit(
      overloaded{
          [&](const VonMises& d) { return von_mises_draw(d.kappa, rng); },
          [&](const WrappedCauchy& d) {
            if (d.gamma == 0)
              return rng.uniform(0, kTwoPi);
            const Real scale = -std::log(d.gamma);
            return scale * std::tan(kPi * (rng.uniform_open() - 0.5));
          },
          [&](const WrappedNormal& d) {
            if (d.rho == 0)
              return rng.uniform(0, kTwoPi);
            return std::sqrt(-2 * std::log(d.rho)) * rng.normal();
          },
          [&](const Tabulated& d) {
            const Real u = rng.uniform() * cdf_.back();
            const auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
            const std::size_t m = d.values.size();
            const std::size_t j = std::min<std::size_t>(static_cast<std::size_t>(it - cdf_.begin()) - 1, m - 1);
            const Real h = kTwoPi / static_cast<Real>(m);
            const Real a = d.values[j];
            const Real b = d.values[(j + 1) % m];
            const Real cell = cdf_[j + 1] - cdf_[j];
            const Real frac = cell > 0 ? std::clamp((u - cdf_[j]) / cell, Real(0), Real(1)) : Real(0.5);
            // Invert the quadratic CDF of the linear piece.
            const Real denom = a + std::sqrt(a * a + frac * (b * b - a * a));
            const Real t = denom > 0 ? frac * (a + b) / denom : frac;
            return h * (static_cast<Real>(j) + t);
          },
      },
      kind_);
  return normalize(y + mu_).value();
}

std::string ComponentDensity::describe() const
{
  std::string body = std::visit(overloaded{
                                    [](const VonMises& d) { return "vonmises:kappa=" + fmt(d.kappa); },
                                    [](const WrappedCauchy& d) { return "wrappedcauchy:gamma=" + fmt(d.gamma); },
                                    [](const WrappedNormal& d) { return "wrappednormal:rho=" + fmt(d.rho); },
                                    [](const Tabulated& d) {
                                      return "tabulated:points=" + std::to_string(d.values.size());
                                    },
                                },
                                kind_);
  return body + ",mu=" + fmt(mu_);
}

std::string ComponentDensity::label() const
{
  return std::visit(overloaded{
                        [](const VonMises& d) { return "VM(kappa=" + fmt(d.kappa) + ")"; },
                        [](const WrappedCauchy& d) { return "WC(gamma=" + fmt(d.gamma) + ")"; },
                        [](const WrappedNormal& d) { return "WN(rho=" + fmt(d.rho) + ")"; },
                        [](const Tabulated& d) { return "TAB(" + std::to_string(d.values.size()) + ")"; },
                    },
                    kind_);
}

void validate(const MixtureParams& theta, Real p_cap)
{
  if (!std::isfinite(theta.p) || !std::isfinite(theta.alpha) || !std::isfinite(theta.beta))
    throw DomainError("mixture parameters must be finite");
  if (!(theta.p > 0 && theta.p <= p_cap))
    throw DomainError("p must lie in (0, " + fmt(p_cap) + "], got " + fmt(theta.p));
  if (!(theta.alpha >= 0 && theta.alpha < kPi))
    throw DomainError("alpha must lie in [0, pi), got " + fmt(theta.alpha));
  if (!(theta.beta >= 0 && theta.beta < kPi))
    throw DomainError("beta must lie in [0, pi), got " + fmt(theta.beta));
}

Sample make_sample(const std::vector<Real>& radians)
{
  Sample s;
  s.angles.resize(static_cast<Eigen::Index>(radians.size()));
  for (std::size_t i = 0; i < radians.size(); ++i)
    s.angles(static_cast<Eigen::Index>(i)) = normalize(radians[i]).value();
  return s;
}

Sample sample_component(const ComponentDensity& d, Eigen::Index n, Rng& rng)
{
  if (n < 1)
    throw DomainError("sample size must be >= 1");
  Sample s;
  s.angles.resize(n);
  for (Eigen::Index i = 0; i < n; ++i)
    s.angles(i) = d.sample(rng);
  s.meta.density_name = d.describe();
  return s;
}

Sample sample_mixture(const MixtureParams& theta, const ComponentDensity& d, Eigen::Index n, Rng& rng,
                      bool keep_labels)
{
  if (n < 1)
    throw DomainError("sample size must be >= 1");
  if (!(theta.p >= 0 && theta.p <= 1) || !std::isfinite(theta.alpha) || !std::isfinite(theta.beta))
    throw DomainError("invalid mixture parameters for sampling");
  Sample s;
  s.angles.resize(n);
  if (keep_labels)
    s.meta.labels.resize(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    const bool first = rng.uniform() < theta.p;
    const Real y = d.sample(rng);
    s.angles(i) = normalize(y + (first ? theta.alpha : theta.beta)).value();
    if (keep_labels)
      s.meta.labels[static_cast<std::size_t>(i)] = first ? 1 : 0;
  }
  s.meta.true_theta = theta;
  s.meta.density_name = d.describe();
  return s;
}

Real mixture_density(const MixtureParams& theta, const ComponentDensity& d, Real x)
{
  return theta.p * d(x - theta.alpha) + (1 - theta.p) * d(x - theta.beta);
}

Complex empirical_fourier(const Sample& sample, int l)
{
  const Eigen::Index n = sample.size();
  if (n == 0)
    throw DomainError("empirical_fourier: empty sample");
  Real re = 0, im = 0;
  for (Eigen::Index k = 0; k < n; ++k) {
    re += std::cos(l * sample.angles(k));
    im -= std::sin(l * sample.angles(k));
  }
  return Complex(re, im) / (kTwoPi * static_cast<Real>(n));
}

Eigen::VectorXd uniform_grid(Eigen::Index m)
{
  Eigen::VectorXd x(m);
  for (Eigen::Index j = 0; j < m; ++j)
    x(j) = kTwoPi * static_cast<Real>(j) / static_cast<Real>(m);
  return x;
}

} // namespace circmix
