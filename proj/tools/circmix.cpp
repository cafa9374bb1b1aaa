//! Command-line front end: simulate, fit, density, bench, slope, ident.
//!
//! Exit codes: 0 success, 1 unexpected failure, 2 usage or input error,
//! 3 estimation error, 4 inference error, 5 degeneracy or calibration error,
//! 6 experiment error.
#include "circmix/bench.hpp"
#include "circmix/circ.hpp"
#include "circmix/contrast.hpp"
#include "circmix/ident.hpp"
#include "circmix/io.hpp"
#include "circmix/npdens.hpp"
#include "circmix/rng.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>

using namespace circmix;

namespace {

enum ExitCode : int {
  kOk = 0,
  kUnexpected = 1,
  kUsage = 2,
  kEstimation = 3,
  kInference = 4,
  kDegeneracy = 5,
  kExperiment = 6,
};

//! Output sink that writes to a file when a path is given and to stdout otherwise.
class Output {
public:
  explicit Output(const std::string& path)
  {
    if (!path.empty()) {
      file_ = std::make_unique<std::ofstream>(path);
      if (!*file_)
        throw DomainError("cannot open output file '" + path + "'");
    }
  }
  std::ostream& stream() { return file_ ? *file_ : std::cout; }

private:
  std::unique_ptr<std::ofstream> file_;
};

struct FitFlags {
  int starts = 10;
  std::uint64_t seed = 0;
  Real pmax = 0.49;
  std::string box;
  std::string tol;
  int max_iter = 2000;
  int scan = 16;
  bool polish = false;
};

void add_fit_flags(CLI::App* cmd, FitFlags& f)
{
  cmd->add_option("--starts", f.starts, "number of multistart initial points")->check(CLI::PositiveNumber);
  cmd->add_option("--seed", f.seed, "seed for the multistart initial points");
  cmd->add_option("--pmax", f.pmax, "upper bound on p in the search box");
  cmd->add_option("--box", f.box, "search box 'p_lo,p_hi,angle_lo,angle_hi'");
  cmd->add_option("--tol", f.tol, "convergence tolerances 'f_tol[,x_tol]'");
  cmd->add_option("--max-iter", f.max_iter, "iteration cap per start")->check(CLI::PositiveNumber);
  cmd->add_option("--scan", f.scan, "grid-scan nodes per angle for an extra start (0 disables)")
      ->check(CLI::NonNegativeNumber);
  cmd->add_flag("--polish", f.polish, "refine the best start with projected Newton steps");
}

FitOptions make_fit_options(const FitFlags& f)
{
  KeyValues kv{{"starts", std::to_string(f.starts)}, {"max_iter", std::to_string(f.max_iter)},
               {"seed", std::to_string(f.seed)}, {"scan", std::to_string(f.scan)}};
  if (!f.box.empty())
    kv["box"] = f.box;
  else
    kv["pmax"] = std::to_string(f.pmax);
  if (!f.tol.empty())
    kv["tol"] = f.tol;
  // Reuse the config parser so flags and config files accept the same syntax.
  ExperimentConfig cfg = parse_experiment_config(kv);
  FitOptions opts = cfg.fit;
  opts.seed = f.seed;
  opts.polish = f.polish;
  return opts;
}

Sample load_sample(const std::string& path, bool degrees)
{
  std::vector<Real> angles = read_angles_file(path);
  if (degrees)
    for (auto& a : angles)
      a *= kPi / 180;
  return make_sample(angles);
}

void warn_near_degenerate(const FitResult& fit)
{
  if (fit.near_degenerate)
    std::cerr << "warning: estimate is near a degenerate configuration (beta - alpha close to a multiple of 2pi/3); "
                 "treat p and f with caution\n";
}

int cmd_simulate(const std::string& density, const std::string& theta_text, Eigen::Index n, std::uint64_t seed,
                 const std::string& out, bool degrees)
{
  const ComponentDensity f = parse_density(density);
  const MixtureParams theta = parse_theta(theta_text, degrees);
  if (!(theta.p > 0 && theta.p < 0.5))
    throw DomainError("p must lie in (0, 0.5), got " + format_sci(theta.p));
  if (!std::isfinite(theta.alpha) || !std::isfinite(theta.beta))
    throw DomainError("angles must be finite");
  Rng rng(seed);
  Sample s = sample_mixture(theta, f, n, rng);
  Output o(out);
  write_angles(o.stream(), s);
  return kOk;
}

int cmd_fit(const std::string& in, bool degrees, const FitFlags& flags, bool no_cov, const std::string& out,
            const std::string& csv)
{
  const Sample sample = load_sample(in, degrees);
  FitOptions opts = make_fit_options(flags);
  opts.compute_covariance = !no_cov;
  const FitResult fit = estimate_theta(sample, opts);
  {
    Output o(out);
    write_fit_record(o.stream(), fit);
  }
  if (!csv.empty()) {
    const bool fresh = !std::filesystem::exists(csv) || std::filesystem::file_size(csv) == 0;
    std::ofstream c(csv, std::ios::app);
    if (!c)
      throw DomainError("cannot open CSV file '" + csv + "'");
    if (fresh)
      c << fit_csv_header() << '\n';
    c << fit_csv_row(fit) << '\n';
  }
  warn_near_degenerate(fit);
  if (!no_cov && !fit.inference) {
    std::cerr << "inference error: " << fit.inference_error << '\n';
    return kInference;
  }
  return kOk;
}

struct DensityFlags {
  std::string in;
  std::string theta;
  bool degrees = false;
  int L_max = -1;
  std::string lambda;
  Real window = 0.5;
  std::string out;
  Eigen::Index grid = 512;
  FitFlags fit;
};

MixtureParams theta_for_density(const Sample& sample, const DensityFlags& f)
{
  if (!f.theta.empty())
    return parse_theta(f.theta, f.degrees);
  FitOptions opts = make_fit_options(f.fit);
  opts.compute_covariance = false;
  const FitResult fit = estimate_theta(sample, opts);
  warn_near_degenerate(fit);
  std::cerr << "theta_hat=" << format_sci(fit.theta_hat.p) << ',' << format_sci(fit.theta_hat.alpha) << ','
            << format_sci(fit.theta_hat.beta) << '\n';
  return fit.theta_hat;
}

DensityOptions make_density_options(const DensityFlags& f)
{
  DensityOptions o;
  if (f.L_max >= 0)
    o.L_max = f.L_max;
  if (!f.lambda.empty() && f.lambda != "slope") {
    KeyValues kv{{"lambda", f.lambda}};
    o.lambda = parse_experiment_config(kv).density_options.lambda;
  }
  o.window_fraction = f.window;
  o.p_cap = make_fit_options(f.fit).box.p_hi;
  return o;
}

int cmd_density(const DensityFlags& f)
{
  const Sample sample = load_sample(f.in, f.degrees);
  const MixtureParams theta = theta_for_density(sample, f);
  const DensityEstimate est = estimate_density(sample, theta, make_density_options(f));
  std::cerr << "L_hat=" << est.L_selected << " L_max=" << est.L_max << " lambda=" << format_sci(est.lambda)
            << (est.lambda_from_slope ? " (slope heuristic)" : " (fixed)")
            << " penalty_floor=" << format_sci(est.penalty_floor) << '\n';
  Output o(f.out);
  auto& os = o.stream();
  os << "# L_hat=" << est.L_selected << " L_max=" << est.L_max << " lambda=" << format_sci(est.lambda) << '\n';
  os << "x,f_hat,f_hat_clipped\n";
  const Eigen::VectorXd x = uniform_grid(f.grid);
  const Eigen::VectorXd raw = est.evaluate(x);
  const Eigen::VectorXd clipped = est.evaluate_clipped(x);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    os << format_sci(x(i)) << ',' << format_sci(raw(i)) << ',' << format_sci(clipped(i)) << '\n';
  return kOk;
}

int cmd_slope(const DensityFlags& f)
{
  const Sample sample = load_sample(f.in, f.degrees);
  const MixtureParams theta = theta_for_density(sample, f);
  const DensityOptions opts = make_density_options(f);
  const int L_max = opts.L_max.value_or(default_L_max(sample.size()));
  const EmpiricalCoeffs coeffs = empirical_coeffs(sample, theta, L_max, opts.p_cap);
  SlopeRun run;
  run.n = sample.size();
  run.theta_hat = theta;
  run.fit = slope_lambda(coeffs, L_max, opts.window_fraction);
  run.L_hat = select_L(coeffs, run.fit.lambda, L_max).L_hat;
  std::cerr << "slope=" << format_sci(run.fit.slope) << " lambda=" << format_sci(run.fit.lambda)
            << " L_hat=" << run.L_hat << '\n';
  Output o(f.out);
  write_slope_csv(o.stream(), run);
  return kOk;
}

int cmd_bench(const std::string& config_path, std::optional<int> jobs, std::optional<std::uint64_t> seed,
              const std::string& out_dir)
{
  ExperimentConfig cfg = parse_experiment_config(read_key_values_file(config_path));
  if (jobs)
    cfg.jobs = *jobs;
  if (seed)
    cfg.seed = seed;
  if (!out_dir.empty())
    cfg.out_dir = out_dir;
  if (!cfg.seed)
    throw DomainError("bench refuses to run without a seed: set 'seed' in the config or pass --seed");
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = [&](const char* name) { return (std::filesystem::path(cfg.out_dir) / name).string(); };
  for (const auto& e : cfg.experiments) {
    if (e == "mse") {
      const auto rows = run_mse(cfg);
      Output o(path("mse.csv"));
      write_mse_csv(o.stream(), rows);
    } else if (e == "normality") {
      const auto r = run_normality(cfg);
      {
        Output o(path("normality.csv"));
        write_normality_csv(o.stream(), r);
      }
      Output s(path("normality_summary.csv"));
      write_normality_summary_csv(s.stream(), r);
    } else if (e == "slope") {
      const auto r = run_slope(cfg);
      Output o(path("slope.csv"));
      write_slope_csv(o.stream(), r);
    } else if (e == "density") {
      const auto r = run_density_recon(cfg);
      Output o(path("density.csv"));
      write_density_csv(o.stream(), r);
    }
    std::cerr << "finished " << e << '\n';
  }
  return kOk;
}

int cmd_ident(const std::string& theta_text, bool degrees, const std::string& density, Real tol,
              const std::string& out)
{
  const MixtureParams theta = parse_theta(theta_text, degrees);
  if (!(theta.p > 0 && theta.p < 1))
    throw DomainError("p must lie in (0, 1)");
  const ComponentDensity f = parse_density(density);
  const IdentClass cls = classify(theta, tol);
  Output o(out);
  auto& os = o.stream();
  os << "tag=" << to_string(cls.tag) << '\n';
  os << "kind,p_prime,alpha_prime,beta_prime,f_prime_min,residual,f_prime_shifts,note\n";
  for (const auto& w : cls.witnesses) {
    os << to_string(w.kind) << ',' << format_sci(w.theta_prime.p) << ',' << format_sci(w.theta_prime.alpha) << ','
       << format_sci(w.theta_prime.beta) << ',' << format_sci(alias_min_density(w, f)) << ','
       << format_sci(alias_residual(theta, w, f)) << ',';
    for (std::size_t i = 0; i < w.f_prime_weights.size(); ++i)
      os << (i ? ";" : "") << format_sci(w.f_prime_weights[i].weight) << '@'
         << format_sci(w.f_prime_weights[i].shift);
    os << ",\"" << w.note << "\"\n";
  }
  return kOk;
}

} // namespace

int main(int argc, char** argv)
{
  CLI::App app{"circmix: semiparametric estimation for two-component rotation mixtures on the circle"};
  app.require_subcommand(1, 1);

  // simulate
  std::string sim_density = "vonmises:kappa=5", sim_theta, sim_out;
  Eigen::Index sim_n = 0;
  std::uint64_t sim_seed = 0;
  bool sim_degrees = false;
  auto* sim = app.add_subcommand("simulate", "draw a sample from a rotation mixture");
  sim->add_option("--density", sim_density, "component density, e.g. vonmises:kappa=5");
  sim->add_option("--theta", sim_theta, "mixture parameters 'p,alpha,beta'")->required();
  sim->add_option("--n", sim_n, "sample size")->required()->check(CLI::PositiveNumber);
  sim->add_option("--seed", sim_seed, "random seed")->required();
  sim->add_option("--out", sim_out, "output file (default stdout)");
  sim->add_flag("--degrees", sim_degrees, "angles in --theta are in degrees");

  // fit
  std::string fit_in, fit_out, fit_csv;
  bool fit_degrees = false, fit_no_cov = false;
  FitFlags fit_flags;
  auto* fit = app.add_subcommand("fit", "estimate (p, alpha, beta) by minimum contrast");
  fit->add_option("--in", fit_in, "sample file, one angle per line")->required();
  add_fit_flags(fit, fit_flags);
  fit->add_option("--out", fit_out, "record file (default stdout)");
  fit->add_option("--csv", fit_csv, "append a CSV row to this file");
  fit->add_flag("--no-cov", fit_no_cov, "skip the asymptotic covariance");
  fit->add_flag("--degrees", fit_degrees, "sample angles are in degrees");

  // density and slope share flags
  DensityFlags dens_flags, slope_flags;
  const auto add_density_flags = [](CLI::App* cmd, DensityFlags& f) {
    cmd->add_option("--in", f.in, "sample file, one angle per line")->required();
    cmd->add_option("--theta", f.theta, "use these mixture parameters instead of fitting");
    cmd->add_option("--L-max", f.L_max, "largest resolution level considered")->check(CLI::NonNegativeNumber);
    cmd->add_option("--window", f.window, "fraction of levels used by the slope regression");
    cmd->add_option("--out", f.out, "output CSV (default stdout)");
    cmd->add_flag("--degrees", f.degrees, "angles are in degrees");
    add_fit_flags(cmd, f.fit);
  };
  auto* dens = app.add_subcommand("density", "adaptive estimate of the component density");
  add_density_flags(dens, dens_flags);
  dens->add_option("--lambda", dens_flags.lambda, "penalty constant, or 'slope' for the data-driven choice");
  dens->add_option("--grid", dens_flags.grid, "number of evaluation points")->check(CLI::PositiveNumber);
  auto* slope = app.add_subcommand("slope", "energy against dimension couples and the calibrated penalty");
  add_density_flags(slope, slope_flags);

  // bench
  std::string bench_config, bench_out;
  std::optional<int> bench_jobs;
  std::optional<std::uint64_t> bench_seed;
  auto* bench = app.add_subcommand("bench", "run Monte Carlo experiments from a config file");
  bench->add_option("--config", bench_config, "flat key = value config file")->required();
  bench->add_option("--jobs", bench_jobs, "worker threads")->check(CLI::PositiveNumber);
  bench->add_option("--seed", bench_seed, "root seed (overrides the config)");
  bench->add_option("--out", bench_out, "output directory (overrides the config)");

  // ident
  std::string id_theta, id_density = "vonmises:kappa=1", id_out;
  bool id_degrees = false;
  Real id_tol = 1e-4;
  auto* ident = app.add_subcommand("ident", "classify identifiability and print alias witnesses");
  ident->add_option("--theta", id_theta, "mixture parameters 'p,alpha,beta'")->required();
  ident->add_option("--density", id_density, "density used for the residual check");
  ident->add_option("--tol", id_tol, "angular tolerance for degenerate configurations")->check(CLI::PositiveNumber);
  ident->add_option("--out", id_out, "output file (default stdout)");
  ident->add_flag("--degrees", id_degrees, "angles are in degrees");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*sim)
      return cmd_simulate(sim_density, sim_theta, sim_n, sim_seed, sim_out, sim_degrees);
    if (*fit)
      return cmd_fit(fit_in, fit_degrees, fit_flags, fit_no_cov, fit_out, fit_csv);
    if (*dens)
      return cmd_density(dens_flags);
    if (*slope)
      return cmd_slope(slope_flags);
    if (*bench)
      return cmd_bench(bench_config, bench_jobs, bench_seed, bench_out);
    if (*ident)
      return cmd_ident(id_theta, id_degrees, id_density, id_tol, id_out);
  } catch (const DomainError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUsage;
  } catch (const EstimationError& e) {
    std::cerr << "estimation error: " << e.what() << '\n';
    return kEstimation;
  } catch (const InferenceError& e) {
    std::cerr << "inference error: " << e.what() << '\n';
    return kInference;
  } catch (const DegeneracyError& e) {
    std::cerr << "degeneracy error: " << e.what() << '\n';
    return kDegeneracy;
  } catch (const CalibrationError& e) {
    std::cerr << "calibration error: " << e.what() << '\n';
    return kDegeneracy;
  } catch (const ExperimentError& e) {
    std::cerr << "experiment error: " << e.what() << '\n';
    return kExperiment;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kUnexpected;
  }
  return kUnexpected;
}
