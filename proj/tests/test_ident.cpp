#include "circmix/ident.hpp"
#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace circmix;

namespace {

std::vector<ComponentDensity> fixtures()
{
  return {ComponentDensity::von_mises(1), ComponentDensity::von_mises(5), ComponentDensity::wrapped_cauchy(0.8),
          ComponentDensity::von_mises(2)};
}

// Independent 4x4 determinant by cofactor expansion.
Real cofactor_det(const Eigen::Matrix4d& a)
{
  Real det = 0;
  for (int c = 0; c < 4; ++c) {
    Eigen::Matrix3d minor;
    for (int i = 1; i < 4; ++i)
      for (int j = 0, k = 0; j < 4; ++j)
        if (j != c)
          minor(i - 1, k++) = a(i, j);
    const Real m = minor(0, 0) * (minor(1, 1) * minor(2, 2) - minor(1, 2) * minor(2, 1)) -
                   minor(0, 1) * (minor(1, 0) * minor(2, 2) - minor(1, 2) * minor(2, 0)) +
                   minor(0, 2) * (minor(1, 0) * minor(2, 1) - minor(1, 1) * minor(2, 0));
    det += (c % 2 ? -1 : 1) * a(0, c) * m;
  }
  return det;
}

} // namespace

TEST_CASE("classification tags")
{
  CHECK(classify({0.25, kPi / 8, 2 * kPi / 3}).tag == IdentTag::Identifiable);
  CHECK(classify({0.3, 0, kPi}).tag == IdentTag::Bipolar);
  CHECK(classify({0.4, 0, 2 * kPi / 3}).tag == IdentTag::TwoPiOverThree);
  CHECK(classify({0.4, 1, 1 - 2 * kPi / 3}).tag == IdentTag::TwoPiOverThree);
  CHECK(classify({0.4, 0.5, 0.5 + 4 * kPi / 3}).tag == IdentTag::TwoPiOverThree);
  CHECK(classify({0.2, 1.3, 1.3}).tag == IdentTag::Collapsed);
  CHECK(classify({0.5, 0.1, 1.9}).tag == IdentTag::BoundaryP);
  CHECK(classify({0.4, 0, 2 * kPi / 3 + 1e-6}).tag == IdentTag::Identifiable);
  CHECK(classify({0.4, 0, 2 * kPi / 3 + 1e-6}, 1e-5).tag == IdentTag::TwoPiOverThree);
  CHECK(to_string(IdentTag::TwoPiOverThree) == "TwoPiOverThree");

  const IdentClass plain = classify({0.25, kPi / 8, 2 * kPi / 3});
  REQUIRE(plain.witnesses.size() == 2);
  CHECK(plain.witnesses[0].kind == IdentTag::LabelSwitchOnly);
  CHECK(plain.witnesses[1].kind == IdentTag::PiShift);
}

TEST_CASE("classification is invariant under label switching and joint pi shifts")
{
  Rng rng(1);
  const std::vector<MixtureParams> bases{{0.3, 0.2, 0.2 + kPi},       {0.35, 0.4, 0.4 + 2 * kPi / 3},
                                         {0.2, 1.0, 1.0},             {0.25, kPi / 8, 2 * kPi / 3},
                                         {0.45, 2.0, 2.0 - 2 * kPi / 3}};
  for (const auto& t : bases) {
    const IdentTag tag = classify(t).tag;
    CHECK(classify({1 - t.p, t.beta, t.alpha}).tag == tag);
    CHECK(classify({t.p, t.alpha + kPi, t.beta + kPi}).tag == tag);
  }
  for (int i = 0; i < 200; ++i) {
    const MixtureParams t{rng.uniform(0.01, 0.99), rng.uniform(-5, 5), rng.uniform(-5, 5)};
    const IdentTag tag = classify(t).tag;
    CHECK(classify({1 - t.p, t.beta, t.alpha}).tag == tag);
    CHECK(classify({t.p, t.alpha + kPi, t.beta + kPi}).tag == tag);
  }
}

TEST_CASE("every witness reproduces the mixture")
{
  const std::vector<MixtureParams> thetas{{0.25, kPi / 8, 2 * kPi / 3}, {0.3, 0, kPi},   {0.4, 0, 2 * kPi / 3},
                                          {0.2, 2.5, 2.5 - 2 * kPi / 3}, {0.7, 1.0, 1 + kPi}, {0.2, 1.3, 1.3},
                                          {0.1, 0.3, 0.3 + 2 * kPi / 3}};
  for (const auto& f : fixtures())
    for (const auto& t : thetas)
      for (const auto& w : classify(t).witnesses) {
        CAPTURE(w.note);
        CHECK(std::abs(w.weight_sum() - 1) < 1e-14);
        CHECK(alias_residual(t, w, f) <= 1e-10);
      }
}

TEST_CASE("pi shift")
{
  const auto f = ComponentDensity::von_mises(5);
  Rng rng(2);
  for (int i = 0; i < 20; ++i) {
    const MixtureParams t{rng.uniform(0.01, 0.49), rng.uniform(0, kPi), rng.uniform(0, kPi)};
    const AliasRecipe r = alias_pi_shift(t);
    CHECK(alias_residual(t, r, f) <= 1e-12);
    const AliasRecipe twice = alias_pi_shift(r.theta_prime);
    CHECK(congruent(twice.theta_prime.alpha, t.alpha, kTwoPi));
    CHECK(congruent(twice.theta_prime.beta, t.beta, kTwoPi));
  }
  const auto f_pi = f.shifted(kPi);
  for (int l = 1; l <= 4; ++l)
    CHECK(std::abs(f_pi.fourier(l) - (l % 2 ? -1.0 : 1.0) * f.fourier(l)) < 1e-15);
}

TEST_CASE("bipolar family")
{
  const MixtureParams t{0.3, 0, kPi};
  const auto f = ComponentDensity::von_mises(2);
  const AliasRecipe identity = alias_bipolar(t, 1.0);
  CHECK(identity.theta_prime.p == doctest::Approx(0.3));
  CHECK(alias_residual(t, identity, f) <= 1e-12);

  const AliasRecipe r = alias_bipolar(t, 0.8);
  CHECK(r.theta_prime.p == doctest::Approx(0.1 / 0.6));
  CHECK(r.theta_prime.p <= t.p);
  CHECK(alias_residual(t, r, f) <= 1e-10);
  const AliasRecipe sw = alias_bipolar(t, 0.8, true);
  CHECK(sw.theta_prime.alpha == doctest::Approx(t.beta));
  CHECK(sw.theta_prime.beta == doctest::Approx(t.alpha));
  CHECK(alias_residual(t, sw, f) <= 1e-10);

  for (const Real p_prime : {0.05, 0.15, 0.3}) {
    const Real q = bipolar_q_for(0.3, p_prime);
    CHECK(alias_bipolar(t, q).theta_prime.p == doctest::Approx(p_prime));
  }
  CHECK_THROWS_AS(alias_bipolar({0.3, 0, 2.0}, 0.8), DomainError);
  CHECK_THROWS_AS(alias_bipolar(t, 0.0), DomainError);
}

TEST_CASE("two-pi-over-three family")
{
  const MixtureParams t{0.4, 0, 2 * kPi / 3};
  const AliasRecipe a = alias_case4(t);
  const AliasRecipe b = alias_case4(t, true);
  CHECK(a.theta_prime.p == doctest::Approx(0.25));
  CHECK(b.theta_prime.p == doctest::Approx(0.25));
  for (const auto& f : fixtures()) {
    CHECK(alias_residual(t, a, f) <= 1e-10);
    CHECK(alias_residual(t, b, f) <= 1e-10);
  }
  // p' stays in (0, 1/2) over the whole range.
  for (int i = 1; i < 100; ++i) {
    const Real p = 0.5 * i / 100;
    const Real pp = alias_case4({p, 0.2, 0.2 + 2 * kPi / 3}).theta_prime.p;
    CHECK(pp > 0);
    CHECK(pp < 0.5);
    CHECK(pp == doctest::Approx((1 - 2 * p) / (2 - 3 * p)));
  }
  const auto vm1 = ComponentDensity::von_mises(1);
  CHECK(alias_min_density(alias_case4({0.4, 0, 2 * kPi / 3}), vm1) >= 0);
  CHECK(alias_min_density(alias_case4({0.3, 0, 2 * kPi / 3}), vm1) < 0);
  CHECK_THROWS_AS(alias_case4({0.4, 0, 1.0}), DomainError);
}

TEST_CASE("determinant identity")
{
  const auto check = [](const Eigen::Vector4d& g) {
    const auto [lhs, rhs] = det_sin_identity(g);
    Eigen::Matrix4d a;
    for (int i = 0; i < 4; ++i)
      for (int j = 0; j < 4; ++j)
        a(i, j) = std::sin((i + 1) * g(j));
    CHECK(lhs == doctest::Approx(cofactor_det(a)).scale(1).epsilon(1e-12));
    CHECK(std::abs(lhs - rhs) <= 1e-8 * (1 + std::abs(rhs)));
  };
  {
    const auto [lhs, rhs] = det_sin_identity(Eigen::Vector4d(0, 0.3, 1.1, 2.0));
    CHECK(std::abs(lhs) < 1e-14);
    CHECK(rhs == 0);
  }
  {
    const auto [lhs, rhs] = det_sin_identity(Eigen::Vector4d(0.7, 0.7, 1.1, 2.0));
    CHECK(std::abs(lhs) < 1e-14);
    CHECK(rhs == 0);
  }
  Rng rng(3);
  for (int i = 0; i < 1000; ++i) {
    Eigen::Vector4d g;
    for (int k = 0; k < 4; ++k)
      g(k) = rng.uniform(-kPi, kPi);
    check(g);
  }
}
