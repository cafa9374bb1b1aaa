#include "circmix/bench.hpp"

#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <ostream>
#include <sstream>
#include <thread>

namespace circmix {

namespace {

enum Stream : std::uint64_t { kMse = 1, kNormality = 2, kDensity = 3, kSlope = 4 };

std::uint64_t stream_id(Stream s, Eigen::Index n, bool fit)
{
  return (static_cast<std::uint64_t>(s) << 40) ^ (static_cast<std::uint64_t>(n) << 1) ^ (fit ? 1u : 0u);
}

std::uint64_t require_seed(const ExperimentConfig& c)
{
  if (!c.seed)
    throw DomainError("experiment needs an explicit seed");
  return *c.seed;
}

struct Replicate {
  Sample sample;
  FitOptions fit;
};

Replicate simulate(const ExperimentConfig& c, Stream s, Eigen::Index n, int rep)
{
  const std::uint64_t root = require_seed(c);
  Rng rng(derive_seed(root, stream_id(s, n, false), static_cast<std::uint64_t>(rep)));
  Replicate r{sample_mixture(c.theta0, c.density, n, rng), c.fit};
  r.fit.seed = derive_seed(root, stream_id(s, n, true), static_cast<std::uint64_t>(rep));
  return r;
}

Real to_int_checked(const std::string& key, const std::string& v)
{
  std::size_t used = 0;
  long long x;
  try {
    x = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw DomainError("config '" + key + "' must be an integer");
  }
  if (used != v.size())
    throw DomainError("config '" + key + "' must be an integer");
  return static_cast<Real>(x);
}

Real to_real_checked(const std::string& key, const std::string& v)
{
  std::size_t used = 0;
  Real x;
  try {
    x = std::stod(v, &used);
  } catch (const std::exception&) {
    throw DomainError("config '" + key + "' must be a number");
  }
  if (used != v.size())
    throw DomainError("config '" + key + "' must be a number");
  return x;
}

Vector3 signed_errors(const MixtureParams& est, const MixtureParams& truth)
{
  return {est.p - truth.p, angular_difference(est.alpha, truth.alpha, kPi), angular_difference(est.beta, truth.beta, kPi)};
}

} // namespace

ExperimentConfig parse_experiment_config(const KeyValues& kv)
{
  ExperimentConfig c;
  for (const auto& [key, value] : kv) {
    if (key == "density") {
      c.density = parse_density(value);
    } else if (key == "theta") {
      c.theta0 = parse_theta(value);
    } else if (key == "n") {
      c.n_list.clear();
      for (const auto& part : split(value, ','))
        c.n_list.push_back(static_cast<Eigen::Index>(to_int_checked(key, trim(part))));
    } else if (key == "reps") {
      c.reps = static_cast<int>(to_int_checked(key, value));
    } else if (key == "seed") {
      std::size_t used = 0;
      try {
        if (value.empty() || value[0] == '-' || value[0] == '+')
          throw DomainError("");
        c.seed = std::stoull(value, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != value.size())
        throw DomainError("config 'seed' must be a nonnegative integer");
    } else if (key == "starts") {
      c.fit.n_starts = static_cast<int>(to_int_checked(key, value));
    } else if (key == "pmax") {
      c.fit.box.p_hi = to_real_checked(key, value);
      c.density_options.p_cap = c.fit.box.p_hi;
    } else if (key == "box") {
      const auto parts = split(value, ',');
      if (parts.size() != 4)
        throw DomainError("box must be 'p_lo,p_hi,angle_lo,angle_hi'");
      c.fit.box = {to_real_checked(key, trim(parts[0])), to_real_checked(key, trim(parts[1])),
                   to_real_checked(key, trim(parts[2])), to_real_checked(key, trim(parts[3]))};
      c.density_options.p_cap = c.fit.box.p_hi;
    } else if (key == "tol") {
      const auto parts = split(value, ',');
      c.fit.f_tol = to_real_checked(key, trim(parts[0]));
      c.fit.x_tol = parts.size() > 1 ? to_real_checked(key, trim(parts[1])) : c.fit.f_tol;
    } else if (key == "scan") {
      c.fit.scan_nodes = static_cast<int>(to_int_checked(key, value));
    } else if (key == "max_iter") {
      c.fit.max_iter = static_cast<int>(to_int_checked(key, value));
    } else if (key == "L_max") {
      c.density_options.L_max = static_cast<int>(to_int_checked(key, value));
    } else if (key == "lambda") {
      if (value != "slope")
        c.density_options.lambda = to_real_checked(key, value);
    } else if (key == "window") {
      c.density_options.window_fraction = to_real_checked(key, value);
    } else if (key == "out") {
      c.out_dir = value;
    } else if (key == "jobs") {
      c.jobs = static_cast<int>(to_int_checked(key, value));
    } else if (key == "experiments") {
      c.experiments.clear();
      for (const auto& part : split(value, ',')) {
        const std::string e = trim(part);
        if (e != "mse" && e != "normality" && e != "slope" && e != "density")
          throw DomainError("unknown experiment '" + e + "'");
        c.experiments.push_back(e);
      }
    } else {
      throw DomainError("unknown config key '" + key + "'");
    }
  }
  if (c.reps < 1)
    throw DomainError("reps must be >= 1");
  if (c.n_list.empty())
    throw DomainError("n list is empty");
  for (auto n : c.n_list)
    if (n < 2)
      throw DomainError("every n must be >= 2");
  if (c.jobs < 1)
    throw DomainError("jobs must be >= 1");
  return c;
}

void parallel_for(int count, int jobs, const std::function<void(int)>& body)
{
  const int workers = std::max(1, std::min(jobs, count));
  if (workers == 1) {
    for (int i = 0; i < count; ++i)
      body(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (int i = next++; i < count; i = next++) {
        try {
          body(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error)
            error = std::current_exception();
        }
      }
    });
  for (auto& t : pool)
    t.join();
  if (error)
    std::rethrow_exception(error);
}

std::vector<MseRow> run_mse(const ExperimentConfig& config)
{
  std::vector<MseRow> rows;
  for (const Eigen::Index n : config.n_list) {
    std::vector<std::optional<Vector3>> errors(static_cast<std::size_t>(config.reps));
    parallel_for(config.reps, config.jobs, [&](int rep) {
      Replicate r = simulate(config, kMse, n, rep);
      r.fit.compute_covariance = false;
      try {
        const FitResult fit = estimate_theta(r.sample, r.fit);
        errors[static_cast<std::size_t>(rep)] =
            Vector3(std::pow(fit.theta_hat.p - config.theta0.p, 2), angular_sq_error(fit.theta_hat.alpha, config.theta0.alpha),
                    angular_sq_error(fit.theta_hat.beta, config.theta0.beta));
      } catch (const EstimationError&) {
      }
    });
    MseRow row;
    row.density = config.density.label();
    row.n = n;
    row.reps = config.reps;
    Vector3 total = Vector3::Zero();
    int ok = 0;
    for (const auto& e : errors) {
      if (!e) {
        ++row.failures;
        continue;
      }
      total += *e;
      ++ok;
    }
    if (row.failures * 10 > config.reps)
      throw ExperimentError("run_mse: " + std::to_string(row.failures) + " of " + std::to_string(config.reps) +
                            " fits failed at n=" + std::to_string(n));
    total /= static_cast<Real>(ok);
    row.mse_p = total(0);
    row.mse_alpha = total(1);
    row.mse_beta = total(2);
    rows.push_back(row);
  }
  return rows;
}

void column_moments(const Eigen::MatrixX3d& values, Vector3& mean, Vector3& variance, Vector3& skewness)
{
  const auto m = static_cast<Real>(values.rows());
  mean = values.colwise().mean().transpose();
  const Eigen::MatrixX3d centred = values.rowwise() - mean.transpose();
  const Vector3 m2 = centred.array().square().colwise().sum().transpose() / m;
  const Vector3 m3 = centred.array().cube().colwise().sum().transpose() / m;
  variance = m2 * (m / (m - 1));
  skewness = m3.array() / m2.array().pow(1.5);
}

NormalityResult run_normality(const ExperimentConfig& config, std::optional<Eigen::Index> n_opt)
{
  if (config.reps < 50)
    throw DomainError("normality experiment needs reps >= 50");
  const Eigen::Index n = n_opt.value_or(config.n_list.front());
  struct Outcome {
    Vector3 z, raw;
  };
  std::vector<std::optional<Outcome>> outcomes(static_cast<std::size_t>(config.reps));
  parallel_for(config.reps, config.jobs, [&](int rep) {
    Replicate r = simulate(config, kNormality, n, rep);
    r.fit.compute_covariance = true;
    try {
      const FitResult fit = estimate_theta(r.sample, r.fit);
      if (!fit.inference)
        return;
      const Vector3 err = signed_errors(fit.theta_hat, config.theta0);
      outcomes[static_cast<std::size_t>(rep)] =
          Outcome{err.cwiseQuotient(fit.inference->std_errors), err * std::sqrt(static_cast<Real>(n))};
    } catch (const EstimationError&) {
    }
  });

  NormalityResult res;
  res.n = n;
  res.reps = config.reps;
  std::vector<Outcome> ok;
  for (const auto& o : outcomes) {
    if (o)
      ok.push_back(*o);
    else
      ++res.failures;
  }
  if (res.failures * 10 > config.reps)
    throw ExperimentError("run_normality: covariance unavailable in " + std::to_string(res.failures) + " of " +
                          std::to_string(config.reps) + " replications");
  res.standardized.resize(static_cast<Eigen::Index>(ok.size()), 3);
  res.raw.resize(static_cast<Eigen::Index>(ok.size()), 3);
  for (std::size_t i = 0; i < ok.size(); ++i) {
    res.standardized.row(static_cast<Eigen::Index>(i)) = ok[i].z.transpose();
    res.raw.row(static_cast<Eigen::Index>(i)) = ok[i].raw.transpose();
  }
  column_moments(res.standardized, res.mean, res.variance, res.skewness);
  res.coverage95 = (res.standardized.array().abs() <= 1.96).cast<Real>().colwise().mean().transpose();
  return res;
}

DensityRecon run_density_recon(const ExperimentConfig& config, std::optional<Eigen::Index> n_opt)
{
  const Eigen::Index n = n_opt.value_or(config.n_list.front());
  Replicate r = simulate(config, kDensity, n, 0);
  r.fit.compute_covariance = false;
  const FitResult fit = estimate_theta(r.sample, r.fit);

  DensityRecon out;
  out.n = n;
  out.theta_hat = fit.theta_hat;
  out.estimate = estimate_density(r.sample, fit, config.density_options);
  out.l2 = l2_error(out.estimate, config.density);
  out.x = uniform_grid(512);
  const auto m = out.x.size();
  out.f.resize(m);
  out.f_hat.resize(m);
  out.g.resize(m);
  out.g_hat.resize(m);
  const MixtureParams& t = fit.theta_hat;
  for (Eigen::Index i = 0; i < m; ++i) {
    const Real x = out.x(i);
    out.f(i) = config.density(x);
    out.f_hat(i) = out.estimate(x);
    out.g(i) = mixture_density(config.theta0, config.density, x);
    out.g_hat(i) = t.p * out.estimate(x - t.alpha) + (1 - t.p) * out.estimate(x - t.beta);
  }
  return out;
}

SlopeRun run_slope(const ExperimentConfig& config, std::optional<Eigen::Index> n_opt)
{
  const Eigen::Index n = n_opt.value_or(config.n_list.front());
  Replicate r = simulate(config, kSlope, n, 0);
  r.fit.compute_covariance = false;
  const FitResult fit = estimate_theta(r.sample, r.fit);
  const int L_max = config.density_options.L_max.value_or(default_L_max(n));
  const EmpiricalCoeffs coeffs = empirical_coeffs(r.sample, fit.theta_hat, L_max, config.density_options.p_cap);
  SlopeRun out;
  out.n = n;
  out.theta_hat = fit.theta_hat;
  out.fit = slope_lambda(coeffs, L_max, config.density_options.window_fraction);
  out.L_hat = select_L(coeffs, out.fit.lambda, L_max).L_hat;
  return out;
}

void write_mse_csv(std::ostream& out, const std::vector<MseRow>& rows)
{
  out << "# angle errors: squared circular distance modulo pi\n";
  out << "density,n,reps,failures,mse_p,mse_alpha,mse_beta\n";
  for (const auto& r : rows)
    out << r.density << ',' << r.n << ',' << r.reps << ',' << r.failures << ',' << format_sci(r.mse_p) << ','
        << format_sci(r.mse_alpha) << ',' << format_sci(r.mse_beta) << '\n';
}

void write_normality_csv(std::ostream& out, const NormalityResult& r)
{
  out << "# n=" << r.n << " reps=" << r.reps << " failures=" << r.failures
      << "; angle errors signed modulo pi\n";
  out << "rep,z_p,z_alpha,z_beta,raw_p,raw_alpha,raw_beta\n";
  for (Eigen::Index i = 0; i < r.standardized.rows(); ++i) {
    out << i;
    for (int j = 0; j < 3; ++j)
      out << ',' << format_sci(r.standardized(i, j));
    for (int j = 0; j < 3; ++j)
      out << ',' << format_sci(r.raw(i, j));
    out << '\n';
  }
}

void write_normality_summary_csv(std::ostream& out, const NormalityResult& r)
{
  static const char* names[] = {"p", "alpha", "beta"};
  out << "coordinate,mean,variance,skewness,coverage95\n";
  for (int j = 0; j < 3; ++j)
    out << names[j] << ',' << format_sci(r.mean(j)) << ',' << format_sci(r.variance(j)) << ','
        << format_sci(r.skewness(j)) << ',' << format_sci(r.coverage95(j)) << '\n';
}

void write_density_csv(std::ostream& out, const DensityRecon& r)
{
  out << "# n=" << r.n << " L_hat=" << r.estimate.L_selected << " lambda=" << format_sci(r.estimate.lambda)
      << " l2=" << format_sci(r.l2) << '\n';
  out << "x,f,f_hat,g,g_hat\n";
  for (Eigen::Index i = 0; i < r.x.size(); ++i)
    out << format_sci(r.x(i)) << ',' << format_sci(r.f(i)) << ',' << format_sci(r.f_hat(i)) << ','
        << format_sci(r.g(i)) << ',' << format_sci(r.g_hat(i)) << '\n';
}

void write_slope_csv(std::ostream& out, const SlopeRun& r)
{
  out << "# n=" << r.n << " slope=" << format_sci(r.fit.slope) << " intercept=" << format_sci(r.fit.intercept)
      << " lambda=" << format_sci(r.fit.lambda) << " L_hat=" << r.L_hat << '\n';
  out << "L,dimension,energy,in_window\n";
  for (Eigen::Index L = 0; L < r.fit.dimension.size(); ++L)
    out << L << ',' << format_sci(r.fit.dimension(L)) << ',' << format_sci(r.fit.energy(L)) << ','
        << (L >= r.fit.window_start ? 1 : 0) << '\n';
}

} // namespace circmix
