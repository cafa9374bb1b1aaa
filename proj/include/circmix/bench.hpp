#pragma once

#include "circmix/circ.hpp"
#include "circmix/contrast.hpp"
#include "circmix/io.hpp"
#include "circmix/npdens.hpp"

#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace circmix {

struct ExperimentConfig {
  ComponentDensity density = ComponentDensity::von_mises(5);
  MixtureParams theta0{0.25, kPi / 8, 2 * kPi / 3};
  std::vector<Eigen::Index> n_list{1000};
  int reps = 50;
  std::optional<std::uint64_t> seed;
  FitOptions fit;
  DensityOptions density_options;
  std::string out_dir = ".";
  int jobs = 1;
  //! Subset of {"mse", "normality", "slope", "density"} run by the CLI.
  std::vector<std::string> experiments{"mse"};
};

//! Keys: density, theta, n (comma list), reps, seed, starts, pmax, box
//! ("p_lo,p_hi,angle_lo,angle_hi"), tol ("f_tol,x_tol" or one value),
//! max_iter, scan, L_max, lambda, window, out, jobs, experiments.
//! Throws DomainError on unknown keys or bad values.
ExperimentConfig parse_experiment_config(const KeyValues& kv);

//! Runs body(i) for i in [0, count) on up to `jobs` threads.
void parallel_for(int count, int jobs, const std::function<void(int)>& body);

struct MseRow {
  std::string density;
  Eigen::Index n = 0;
  int reps = 0;
  int failures = 0;
  Real mse_p = 0;
  Real mse_alpha = 0;
  Real mse_beta = 0;
};

//! One row per n. Angle errors use the squared distance mod pi.
//! Throws ExperimentError when more than 10% of replications fail.
std::vector<MseRow> run_mse(const ExperimentConfig& config);

struct NormalityResult {
  Eigen::Index n = 0;
  int reps = 0;
  int failures = 0;
  //! (theta_hat - theta0) / se, one row per successful replication.
  Eigen::MatrixX3d standardized;
  //! sqrt(n) (theta_hat - theta0).
  Eigen::MatrixX3d raw;
  Vector3 mean = Vector3::Zero();
  Vector3 variance = Vector3::Zero();
  Vector3 skewness = Vector3::Zero();
  //! Fraction of replications with |standardized| <= 1.96.
  Vector3 coverage95 = Vector3::Zero();
};

//! Needs reps >= 50. Uses the first entry of n_list unless `n` is given.
NormalityResult run_normality(const ExperimentConfig& config, std::optional<Eigen::Index> n = {});

//! Mean, variance (n - 1 denominator) and skewness of the columns.
void column_moments(const Eigen::MatrixX3d& values, Vector3& mean, Vector3& variance, Vector3& skewness);

struct DensityRecon {
  Eigen::Index n = 0;
  MixtureParams theta_hat;
  DensityEstimate estimate;
  Eigen::VectorXd x, f, f_hat, g, g_hat;
  Real l2 = 0;
};

//! One simulated data set: fit, estimate f, tabulate on 512 points.
DensityRecon run_density_recon(const ExperimentConfig& config, std::optional<Eigen::Index> n = {});

struct SlopeRun {
  Eigen::Index n = 0;
  MixtureParams theta_hat;
  SlopeFit fit;
  int L_hat = 0;
};

SlopeRun run_slope(const ExperimentConfig& config, std::optional<Eigen::Index> n = {});

void write_mse_csv(std::ostream& out, const std::vector<MseRow>& rows);
void write_normality_csv(std::ostream& out, const NormalityResult& r);
void write_normality_summary_csv(std::ostream& out, const NormalityResult& r);
void write_density_csv(std::ostream& out, const DensityRecon& r);
void write_slope_csv(std::ostream& out, const SlopeRun& r);

} // namespace circmix
