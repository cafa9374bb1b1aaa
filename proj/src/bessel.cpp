#include "circmix/bessel.hpp"

#include "circmix/types.hpp"

#include <cmath>
#include <cstdlib>
#include <limits>
#include <vector>

namespace circmix {

namespace {

constexpr double kSeriesLimit = 15.0;
// Beyond this the unscaled series sum overflows.
constexpr double kSeriesOverflow = 700.0;

// e^{-x} sum_k (x/2)^{2k+nu} / (k! (k+nu)!), accumulated in log space for the
// leading factor so that large orders underflow gracefully instead of NaN.
double series_scaled(int nu, double x)
{
  if (x == 0.0)
    return nu == 0 ? 1.0 : 0.0;
  const double half = 0.5 * x;
  const double log_lead = nu * std::log(half) - std::lgamma(nu + 1.0) - x;
  const double q = half * half;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 4000; ++k) {
    term *= q / (static_cast<double>(k) * (k + nu));
    sum += term;
    if (term < sum * 1e-17)
      break;
  }
  return std::exp(log_lead) * sum;
}

// Hankel expansion of e^{-x} I_nu(x); returns NaN if the terms stop
// shrinking before reaching 1e-16 relative accuracy.
double asymptotic_scaled(int nu, double x)
{
  const double mu = 4.0 * nu * nu;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 200; ++k) {
    const double odd = 2.0 * k - 1.0;
    const double next = -term * (mu - odd * odd) / (8.0 * k * x);
    if (std::abs(next) > std::abs(term) && k > 1)
      return std::numeric_limits<double>::quiet_NaN();
    term = next;
    sum += term;
    if (std::abs(term) < 1e-17 * std::abs(sum))
      return sum / std::sqrt(kTwoPi * x);
  }
  return std::numeric_limits<double>::quiet_NaN();
}

// Miller's backward recurrence for I_nu / I_0.
double miller_ratio(int nu, double x)
{
  if (nu == 0)
    return 1.0;
  if (x == 0.0)
    return 0.0;
  const int start = 2 * (nu + static_cast<int>(std::sqrt(40.0 * nu)) +
                         static_cast<int>(std::ceil(x))) + 20;
  double above = 0.0;
  double current = 1e-300;
  double at_nu = 0.0;
  for (int k = start; k > 0; --k) {
    const double below = above + (2.0 * k / x) * current;
    above = current;
    current = below;
    if (k - 1 == nu)
      at_nu = current;
    if (std::abs(current) > 1e250) {
      current *= 1e-250;
      above *= 1e-250;
      at_nu *= 1e-250;
    }
  }
  return at_nu / current;
}

} // namespace

double bessel_i_scaled(int nu, double x)
{
  if (!(x >= 0.0) || !std::isfinite(x))
    throw DomainError("bessel_i: argument must be finite and nonnegative");
  nu = std::abs(nu);
  if (x <= kSeriesLimit)
    return series_scaled(nu, x);
  const double direct = asymptotic_scaled(nu, x);
  if (std::isfinite(direct))
    return direct;
  // The expansion cannot reach full precision here; the series has only
  // positive terms, so it stays accurate as long as it does not overflow.
  if (x <= kSeriesOverflow)
    return series_scaled(nu, x);
  return asymptotic_scaled(0, x) * miller_ratio(nu, x);
}

double bessel_i(int nu, double x)
{
  return bessel_i_scaled(nu, x) * std::exp(x);
}

double bessel_ratio(int nu, double x)
{
  if (!(x >= 0.0) || !std::isfinite(x))
    throw DomainError("bessel_ratio: argument must be finite and nonnegative");
  nu = std::abs(nu);
  if (nu == 0)
    return 1.0;
  if (x <= kSeriesLimit && nu <= 60)
    return series_scaled(nu, x) / series_scaled(0, x);
  return miller_ratio(nu, x);
}

} // namespace circmix
