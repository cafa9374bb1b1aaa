#include "circmix/bench.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <sstream>

using namespace circmix;

namespace {

ExperimentConfig small_config()
{
  ExperimentConfig c;
  c.n_list = {200, 400};
  c.reps = 50;
  c.seed = 99;
  return c;
}

} // namespace

TEST_CASE("config parsing")
{
  std::istringstream in("density = wc:gamma=0.8\ntheta = 0.3,0.2,1.9\nn = 100, 1000\nreps = 7\nseed = 18446744073709551615\n"
                        "starts = 4\npmax = 0.45\ntol = 1e-9,1e-7\nmax_iter = 500\nscan = 0\nL_max = 20\nlambda = 3.5\n"
                        "window = 0.4\nout = results\njobs = 2\nexperiments = mse, slope\n");
  const ExperimentConfig c = parse_experiment_config(parse_key_values(in));
  CHECK(std::holds_alternative<WrappedCauchy>(c.density.kind()));
  CHECK(c.theta0.p == 0.3);
  REQUIRE(c.n_list.size() == 2);
  CHECK(c.n_list[1] == 1000);
  CHECK(c.reps == 7);
  CHECK(*c.seed == 18446744073709551615ULL);
  CHECK(c.fit.n_starts == 4);
  CHECK(c.fit.box.p_hi == 0.45);
  CHECK(c.density_options.p_cap == 0.45);
  CHECK(c.fit.f_tol == 1e-9);
  CHECK(c.fit.x_tol == 1e-7);
  CHECK(c.fit.max_iter == 500);
  CHECK(c.fit.scan_nodes == 0);
  CHECK(*c.density_options.L_max == 20);
  CHECK(*c.density_options.lambda == 3.5);
  CHECK(c.density_options.window_fraction == 0.4);
  CHECK(c.out_dir == "results");
  CHECK(c.jobs == 2);
  CHECK(c.experiments == std::vector<std::string>{"mse", "slope"});

  const auto bad = [](const std::string& text) {
    std::istringstream s(text);
    return parse_experiment_config(parse_key_values(s));
  };
  CHECK_THROWS_AS(bad("reps = 0\n"), DomainError);
  CHECK_THROWS_AS(bad("n = 1\n"), DomainError);
  CHECK_THROWS_AS(bad("n = 10x\n"), DomainError);
  CHECK_THROWS_AS(bad("colour = blue\n"), DomainError);
  CHECK_THROWS_AS(bad("seed = -3\n"), DomainError);
  CHECK_THROWS_AS(bad("experiments = mse, plots\n"), DomainError);
  CHECK_FALSE(bad("lambda = slope\n").density_options.lambda.has_value());
  CHECK_FALSE(bad("reps = 3\n").seed.has_value());
}

TEST_CASE("parallel_for visits every index once and propagates errors")
{
  for (const int jobs : {1, 3, 8}) {
    std::vector<std::atomic<int>> hits(37);
    parallel_for(37, jobs, [&](int i) { hits[static_cast<std::size_t>(i)]++; });
    for (auto& h : hits)
      CHECK(h.load() == 1);
  }
  CHECK_THROWS_AS(parallel_for(10, 4, [](int i) {
                    if (i == 6)
                      throw ExperimentError("boom");
                  }),
                  ExperimentError);
}

TEST_CASE("experiments need a seed")
{
  ExperimentConfig c = small_config();
  c.seed.reset();
  CHECK_THROWS_AS(run_mse(c), DomainError);
}

TEST_CASE("MSE table")
{
  ExperimentConfig c = small_config();
  c.reps = 10;
  const auto rows = run_mse(c);
  REQUIRE(rows.size() == 2);
  CHECK(rows[0].n == 200);
  CHECK(rows[0].density == "VM(kappa=5)");
  for (const auto& r : rows) {
    CHECK(r.failures == 0);
    CHECK(r.mse_p >= 0);
    CHECK(std::isfinite(r.mse_alpha));
  }
  std::ostringstream a, b;
  write_mse_csv(a, rows);
  c.reps = 1;
  write_mse_csv(b, run_mse(c));
  std::ostringstream b2;
  write_mse_csv(b2, run_mse(c));
  CHECK(b.str() == b2.str());
  CHECK(a.str().find("density,n,reps,failures,mse_p,mse_alpha,mse_beta\n") != std::string::npos);
  CHECK(a.str().rfind("#", 0) == 0);
}

TEST_CASE("too many failed fits abort the experiment")
{
  ExperimentConfig c = small_config();
  c.reps = 5;
  c.fit.max_iter = 1;
  c.fit.scan_nodes = 0;
  CHECK_THROWS_AS(run_mse(c), ExperimentError);
}

TEST_CASE("normality diagnostics")
{
  ExperimentConfig c = small_config();
  c.reps = 49;
  CHECK_THROWS_AS(run_normality(c), DomainError);
  c.reps = 60;
  const NormalityResult r = run_normality(c, 400);
  CHECK(r.n == 400);
  CHECK(r.standardized.rows() + r.failures == 60);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(r.mean(j)) < 1);
    CHECK(r.variance(j) > 0.3);
    CHECK(r.variance(j) < 3);
  }
  // Raw spread shrinks roughly like 1/sqrt(n) once multiplied back.
  const NormalityResult r2 = run_normality(c, 1600);
  for (int j = 0; j < 3; ++j) {
    const Real s1 = std::sqrt((r.raw.col(j).array() - r.raw.col(j).mean()).square().mean() / 400);
    const Real s2 = std::sqrt((r2.raw.col(j).array() - r2.raw.col(j).mean()).square().mean() / 1600);
    CHECK(s1 / s2 > 1.4);
    CHECK(s1 / s2 < 2.9);
  }
}

TEST_CASE("standardization of an exactly normal injection")
{
  Rng rng(5);
  Eigen::MatrixX3d z(4000, 3);
  for (Eigen::Index i = 0; i < z.rows(); ++i)
    for (int j = 0; j < 3; ++j)
      z(i, j) = rng.normal();
  Vector3 mean, var, skew;
  column_moments(z, mean, var, skew);
  for (int j = 0; j < 3; ++j) {
    CHECK(std::abs(mean(j)) < 4 / std::sqrt(4000.0));
    CHECK(std::abs(var(j) - 1) < 0.1);
    CHECK(std::abs(skew(j)) < 0.2);
  }
}

TEST_CASE("density reconstruction")
{
  ExperimentConfig c = small_config();
  c.n_list = {1000};
  const DensityRecon r = run_density_recon(c);
  CHECK(r.x.size() == 512);
  CHECK(r.l2 <= 0.05);
  CHECK(r.g_hat.sum() * kTwoPi / 512 == doctest::Approx(1).epsilon(1e-6));
  CHECK(r.f.sum() * kTwoPi / 512 == doctest::Approx(1).epsilon(1e-6));

  c.density = ComponentDensity::uniform();
  c.density_options.lambda = 50.0;
  const DensityRecon u = run_density_recon(c);
  CHECK(u.estimate.L_selected == 0);
  CHECK((u.f_hat.array() - 1 / kTwoPi).abs().maxCoeff() < 1e-15);
}

TEST_CASE("slope run")
{
  ExperimentConfig c = small_config();
  c.density = ComponentDensity::wrapped_cauchy(0.8);
  c.n_list = {1000};
  c.density_options.L_max = 50;
  const SlopeRun r = run_slope(c);
  CHECK(r.fit.slope > 0);
  CHECK(r.fit.dimension.size() == 51);
  std::ostringstream os;
  write_slope_csv(os, r);
  CHECK(os.str().find("L,dimension,energy,in_window\n") != std::string::npos);
}
