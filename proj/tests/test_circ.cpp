#include "circmix/bessel.hpp"
#include "circmix/circ.hpp"
#include "circmix/rng.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>
#include <limits>

using namespace circmix;

namespace {

std::vector<ComponentDensity> named_densities()
{
  return {ComponentDensity::von_mises(1),       ComponentDensity::von_mises(5),
          ComponentDensity::von_mises(40),      ComponentDensity::wrapped_cauchy(0.8),
          ComponentDensity::wrapped_cauchy(0.3), ComponentDensity::wrapped_normal(0.8),
          ComponentDensity::wrapped_normal(0.5)};
}

} // namespace

TEST_CASE("normalize maps into [0, 2pi) and respects congruence")
{
  CHECK(normalize(0).value() == 0);
  CHECK(normalize(kTwoPi).value() == 0);
  CHECK(normalize(-kPi / 2).value() == doctest::Approx(3 * kPi / 2));
  Rng rng(1);
  for (int i = 0; i < 1000; ++i) {
    const Real x = rng.uniform(-50, 50);
    const Real y = normalize(x);
    CHECK(y >= 0);
    CHECK(y < kTwoPi);
    CHECK(normalize(y).value() == y);
    const int k = static_cast<int>(rng.uniform(-5, 5));
    CHECK(std::abs(normalize(x + kTwoPi * k) - y) < 1e-12);
  }
  CHECK_THROWS_AS(normalize(std::numeric_limits<Real>::quiet_NaN()), DomainError);
  CHECK_THROWS_AS(normalize(std::numeric_limits<Real>::infinity()), DomainError);
}

TEST_CASE("angular helpers")
{
  CHECK(angular_difference(0.1, kPi - 0.1, kPi) == doctest::Approx(0.2));
  CHECK(angular_difference(3.0, 0.5) == doctest::Approx(2.5));
  CHECK(std::abs(wrap_signed(3 * kPi / 2) + kPi / 2) < 1e-12);
  CHECK(congruent(0.3, 0.3 + 4 * kPi, kTwoPi));
  CHECK_FALSE(congruent(0.3, 0.3 + 1e-6, kTwoPi));
}

TEST_CASE("Bessel functions agree with the integral representation")
{
  for (int nu = 0; nu <= 6; ++nu)
    for (const Real x : {1e-3, 0.5, 1.0, 5.0, 12.0, 14.9, 15.1, 20.0, 40.0}) {
      const Real ref = oracle::bessel_i_integral(nu, x);
      CHECK(bessel_i(nu, x) == doctest::Approx(ref).epsilon(1e-12));
    }
  CHECK(bessel_i(0, 0) == 1);
  CHECK(bessel_i(3, 0) == 0);
  // Scaled form stays finite where I_nu itself overflows.
  CHECK(std::isfinite(bessel_i_scaled(1, 1000)));
  CHECK(bessel_i_scaled(1, 1000) == doctest::Approx(1 / std::sqrt(2 * kPi * 1000) * (1 - 3.0 / 8000)).epsilon(1e-6));
  CHECK(bessel_ratio(1, 5) == doctest::Approx(oracle::bessel_i_integral(1, 5) / oracle::bessel_i_integral(0, 5)));
  CHECK(bessel_ratio(30, 2) == doctest::Approx(oracle::bessel_i_integral(30, 2) / oracle::bessel_i_integral(0, 2)));
}

TEST_CASE("density evaluation")
{
  for (const Real x : {0.0, 1.0, 4.0}) {
    CHECK(ComponentDensity::von_mises(0)(x) == doctest::Approx(1 / kTwoPi));
    CHECK(ComponentDensity::wrapped_cauchy(0)(x) == doctest::Approx(1 / kTwoPi));
    CHECK(ComponentDensity::uniform()(x) == doctest::Approx(1 / kTwoPi));
  }
  CHECK(ComponentDensity::von_mises(1)(0) == doctest::Approx(std::exp(1.0) / (kTwoPi * oracle::bessel_i_integral(0, 1))));

  // Wrapped Cauchy and wrapped normal against their wrapped-sum definitions.
  const Real g = 0.6, sigma = std::sqrt(-2 * std::log(0.8));
  for (const Real x : {0.0, 0.7, 2.5}) {
    const Real wc = (1 - g * g) / (kTwoPi * (1 + g * g - 2 * g * std::cos(x)));
    CHECK(ComponentDensity::wrapped_cauchy(g)(x) == doctest::Approx(wc).epsilon(1e-13));
    Real wn = 0;
    for (int k = -20; k <= 20; ++k)
      wn += std::exp(-std::pow(x + kTwoPi * k, 2) / (2 * sigma * sigma)) / (sigma * std::sqrt(kTwoPi));
    CHECK(ComponentDensity::wrapped_normal(0.8)(x) == doctest::Approx(wn).epsilon(1e-13));
  }
}

TEST_CASE("densities integrate to one")
{
  auto all = named_densities();
  all.push_back(ComponentDensity::von_mises(5, 1.3));
  std::vector<Real> tab(600);
  for (std::size_t j = 0; j < tab.size(); ++j)
    tab[j] = 1 + 0.5 * std::sin(kTwoPi * j / tab.size()) + 0.2 * std::cos(3 * kTwoPi * j / tab.size());
  all.push_back(ComponentDensity::tabulated(tab));
  for (const auto& d : all)
    CHECK(oracle::integral([&](Real x) { return d(x); }, 8192) == doctest::Approx(1).epsilon(1e-8));
}

TEST_CASE("exact Fourier coefficients match quadrature")
{
  for (const auto& d : named_densities()) {
    CAPTURE(d.describe());
    CHECK(std::abs(d.fourier(0) - 1 / kTwoPi) < 1e-15);
    for (int l = 1; l <= 4; ++l) {
      const Complex exact = d.fourier(l);
      const Complex quad = oracle::fourier_quadrature([&](Real x) { return d(x); }, l, 2048);
      CHECK(std::abs(exact - quad) < 1e-10);
      CHECK(exact.imag() == 0);
      CHECK(exact.real() > 0);
      CHECK(std::abs(d.fourier(-l) - std::conj(exact)) < 1e-16);
    }
  }
  CHECK(ComponentDensity::wrapped_cauchy(0.8).fourier(2).real() == doctest::Approx(0.64 / kTwoPi));
  CHECK(ComponentDensity::wrapped_normal(0.8).fourier(3).real() == doctest::Approx(std::pow(0.8, 9) / kTwoPi));
  CHECK(ComponentDensity::von_mises(5).fourier(1).real() ==
        doctest::Approx(oracle::bessel_i_integral(1, 5) / (kTwoPi * oracle::bessel_i_integral(0, 5))));

  // Location shifts multiply by e^{-il mu}.
  const auto shifted = ComponentDensity::von_mises(5, 0.9);
  for (int l = 1; l <= 4; ++l)
    CHECK(std::abs(shifted.fourier(l) - ComponentDensity::von_mises(5).fourier(l) * std::polar(1.0, -l * 0.9)) < 1e-15);
}

TEST_CASE("Parseval partial sums are nondecreasing and bounded")
{
  for (const auto& d : named_densities()) {
    const Real total = oracle::integral([&](Real x) { return d(x) * d(x); }, 8192) / kTwoPi;
    Real partial = 0, previous = -1;
    for (int L = 0; L <= 40; ++L) {
      partial += (L == 0 ? 1 : 2) * std::norm(d.fourier(L));
      CHECK(partial >= previous);
      CHECK(partial <= total * (1 + 1e-10));
      previous = partial;
    }
  }
}

TEST_CASE("tabulated densities")
{
  std::vector<Real> tab(512);
  for (std::size_t j = 0; j < tab.size(); ++j)
    tab[j] = 2 + std::cos(kTwoPi * j / tab.size());
  const auto d = ComponentDensity::tabulated(tab);
  CHECK(d(0) == doctest::Approx(3 / (2 * kTwoPi)).epsilon(1e-4));
  CHECK(std::abs(d.fourier(1) - oracle::fourier_quadrature([&](Real x) { return d(x); }, 1, 4096)) < 1e-6);
  CHECK_THROWS_AS(ComponentDensity::tabulated({1.0, -0.5, 1.0}), DomainError);
  CHECK_THROWS_AS(ComponentDensity::tabulated({0.0, 0.0, 0.0}), DomainError);

  Rng rng(3);
  const Sample s = sample_component(d, 100000, rng);
  const Complex emp = empirical_fourier(s, 1);
  CHECK(std::abs(emp - d.fourier(1)) < 4 / std::sqrt(4 * kPi * kPi * 1e5));
}

TEST_CASE("parameter validation")
{
  CHECK_THROWS_AS(ComponentDensity::von_mises(-1), DomainError);
  CHECK_THROWS_AS(ComponentDensity::wrapped_cauchy(1.0), DomainError);
  CHECK_THROWS_AS(ComponentDensity::wrapped_normal(-0.1), DomainError);
  CHECK_NOTHROW(validate({0.25, kPi / 8, 2 * kPi / 3}));
  CHECK_THROWS_AS(validate({0.6, 0.1, 0.2}), DomainError);
  CHECK_THROWS_AS(validate({0.0, 0.1, 0.2}), DomainError);
  CHECK_THROWS_AS(validate({0.2, kPi, 0.2}), DomainError);
  CHECK_THROWS_AS(validate({0.2, 0.1, std::nan("")}), DomainError);
}

TEST_CASE("samplers are deterministic and consistent with the densities")
{
  const Real clt = 1 / std::sqrt(4 * kPi * kPi * 1e5);
  {
    Rng a(11), b(11);
    const Sample s1 = sample_component(ComponentDensity::von_mises(3), 1000, a);
    const Sample s2 = sample_component(ComponentDensity::von_mises(3), 1000, b);
    CHECK(s1.angles == s2.angles);
  }
  {
    Rng rng(12);
    const Sample s = sample_component(ComponentDensity::von_mises(0), 100000, rng);
    CHECK(std::abs(empirical_fourier(s, 1)) < 3 * clt);
  }
  {
    Rng rng(13);
    const Sample s = sample_component(ComponentDensity::wrapped_normal(0.8), 100000, rng);
    // Mean direction: Im of the first empirical coefficient is the sine mean / 2pi.
    CHECK(std::abs(empirical_fourier(s, 1).imag()) < 3 * clt);
  }
  for (const auto& d : named_densities()) {
    Rng rng(14);
    const MixtureParams theta{0.25, kPi / 8, 2 * kPi / 3};
    const Sample s = sample_mixture(theta, d, 100000, rng);
    for (int l = 1; l <= 4; ++l) {
      const Complex exact = (theta.p * std::polar(1.0, -l * theta.alpha) +
                             (1 - theta.p) * std::polar(1.0, -l * theta.beta)) * d.fourier(l);
      CAPTURE(d.describe());
      CAPTURE(l);
      CHECK(std::abs(empirical_fourier(s, l) - exact) < 4 * clt);
    }
    for (Eigen::Index i = 0; i < s.size(); ++i) {
      REQUIRE(s.angles(i) >= 0);
      REQUIRE(s.angles(i) < kTwoPi);
    }
  }
}

TEST_CASE("mixture sampling edge cases")
{
  const auto d = ComponentDensity::von_mises(50);
  {
    Rng a(5), b(5);
    const Sample mix = sample_mixture({0.0, 1.0, 2.0}, d, 2000, a, true);
    const Sample single = sample_component(d.shifted(2.0), 2000, b);
    // Label 1 marks the alpha component, which has no mass here.
    REQUIRE(mix.meta.labels.size() == 2000);
    for (auto lab : mix.meta.labels)
      REQUIRE(lab == 0);
    CHECK(std::abs(empirical_fourier(mix, 1) - empirical_fourier(single, 1)) < 0.01);
  }
  {
    Rng rng(6);
    const Sample s = sample_mixture({0.3, 1.2, 1.2}, d, 20000, rng);
    const Complex expected = d.shifted(1.2).fourier(1);
    CHECK(std::abs(empirical_fourier(s, 1) - expected) < 4 / std::sqrt(4 * kPi * kPi * 20000));
  }
  CHECK_THROWS_AS(
      [] {
        Rng rng(1);
        sample_mixture({0.2, 0, 1}, ComponentDensity::von_mises(1), 0, rng);
      }(),
      DomainError);
}

TEST_CASE("mixture density")
{
  const auto f = ComponentDensity::von_mises(5);
  for (const Real x : {0.0, 1.0, 3.0})
    CHECK(mixture_density({0.5, 0, 0}, f, x) == doctest::Approx(f(x)));
  for (const Real x : {0.0, 1.0, 3.0})
    CHECK(mixture_density({0.25, kPi / 8, 2 * kPi / 3}, ComponentDensity::uniform(), x) == doctest::Approx(1 / kTwoPi));
  CHECK(oracle::integral([&](Real x) { return mixture_density({0.25, kPi / 8, 2 * kPi / 3}, f, x); }) ==
        doctest::Approx(1).epsilon(1e-8));
}
