#include "circmix/contrast.hpp"

#include "circmix/nelder_mead.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace circmix {

namespace {

constexpr Real kInvTwoPi = 1.0 / kTwoPi;

// Real and imaginary parts of M^l and its derivatives, scaled by 1/(2 pi),
// so that Z^l(x) = re * sin(lx) + im * cos(lx).
struct WeightParts {
  Real re, im;
  Vector3 re_grad, im_grad;
  Matrix3 re_hess, im_hess;
};

WeightParts weight_parts(const MixtureParams& theta, int l, bool second_order)
{
  WeightParts w;
  const Complex m = fourier_weight(theta, l);
  const Vector3c g = fourier_weight_gradient(theta, l);
  w.re = m.real() * kInvTwoPi;
  w.im = m.imag() * kInvTwoPi;
  w.re_grad = g.real() * kInvTwoPi;
  w.im_grad = g.imag() * kInvTwoPi;
  if (second_order) {
    const Matrix3c h = fourier_weight_hessian(theta, l);
    w.re_hess = h.real() * kInvTwoPi;
    w.im_hess = h.imag() * kInvTwoPi;
  }
  return w;
}

std::string fmt(Real v)
{
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

void validate_box(const SearchBox& box)
{
  if (!(box.p_lo > 0 && box.p_lo <= box.p_hi && box.p_hi < 1))
    throw DomainError("search box needs 0 < p_lo <= p_hi < 1");
  if (!(box.angle_lo >= 0 && box.angle_lo < box.angle_hi && box.angle_hi < kPi))
    throw DomainError("search box angles must satisfy 0 <= lo < hi < pi");
}

// Projected Newton steps from x; falls back to projected gradient when the
// Hessian is not positive definite. Only accepts decreasing steps.
MixtureParams polish(const ContrastMoments& moments, MixtureParams theta, const Vector3& lo, const Vector3& hi)
{
  Vector3 x = theta.as_vector();
  ContrastValue cur = moments.evaluate(theta);
  for (int it = 0; it < 30; ++it) {
    Vector3 dir;
    Eigen::LLT<Matrix3> llt(cur.hessian);
    if (llt.info() == Eigen::Success)
      dir = -llt.solve(cur.gradient);
    else
      dir = -cur.gradient;
    bool improved = false;
    for (Real t = 1; t > 1e-8; t *= 0.5) {
      const Vector3 trial = (x + t * dir).cwiseMax(lo).cwiseMin(hi);
      const Real f = moments.value(MixtureParams::from_vector(trial));
      if (f < cur.value) {
        x = trial;
        cur = moments.evaluate(MixtureParams::from_vector(x));
        improved = true;
        break;
      }
    }
    if (!improved || cur.gradient.norm() < 1e-14)
      break;
  }
  return MixtureParams::from_vector(x);
}

} // namespace

Real contrast_term(Real x, int l, const MixtureParams& theta)
{
  return std::imag(std::polar(Real(1), l * x) * fourier_weight(theta, l)) * kInvTwoPi;
}

Vector3 contrast_term_gradient(Real x, int l, const MixtureParams& theta)
{
  return (std::polar(Real(1), l * x) * fourier_weight_gradient(theta, l)).imag() * kInvTwoPi;
}

Matrix3 contrast_term_hessian(Real x, int l, const MixtureParams& theta)
{
  return (std::polar(Real(1), l * x) * fourier_weight_hessian(theta, l)).imag() * kInvTwoPi;
}

ContrastMoments::ContrastMoments(const Sample& sample) : n_(sample.size())
{
  if (n_ < 2)
    throw DomainError("contrast needs at least 2 observations, got " + std::to_string(n_));
  for (Eigen::Index k = 0; k < n_; ++k) {
    const Real x = sample.angles(k);
    for (int l = 1; l <= kContrastOrder; ++l) {
      const Real s = std::sin(l * x);
      const Real c = std::cos(l * x);
      Harmonic& h = h_[static_cast<std::size_t>(l - 1)];
      h.sum_sin += s;
      h.sum_cos += c;
      h.sum_ss += s * s;
      h.sum_sc += s * c;
      h.sum_cc += c * c;
    }
  }
}

Real ContrastMoments::value(const MixtureParams& theta) const
{
  Real total = 0;
  for (int l = 1; l <= kContrastOrder; ++l) {
    const Harmonic& h = h_[static_cast<std::size_t>(l - 1)];
    const Complex m = fourier_weight(theta, l) * kInvTwoPi;
    const Real a = m.real(), b = m.imag();
    const Real sum = a * h.sum_sin + b * h.sum_cos;
    const Real sum_sq = a * a * h.sum_ss + 2 * a * b * h.sum_sc + b * b * h.sum_cc;
    total += sum * sum - sum_sq;
  }
  // Harmonics -l contribute the same as +l.
  return 2 * total / (static_cast<Real>(n_) * static_cast<Real>(n_ - 1));
}

ContrastValue ContrastMoments::evaluate(const MixtureParams& theta) const
{
  ContrastValue out;
  for (int l = 1; l <= kContrastOrder; ++l) {
    const Harmonic& h = h_[static_cast<std::size_t>(l - 1)];
    const WeightParts w = weight_parts(theta, l, true);

    const Real sum = w.re * h.sum_sin + w.im * h.sum_cos;
    const Vector3 sum_grad = w.re_grad * h.sum_sin + w.im_grad * h.sum_cos;
    const Matrix3 sum_hess = w.re_hess * h.sum_sin + w.im_hess * h.sum_cos;

    const Real sq = w.re * w.re * h.sum_ss + 2 * w.re * w.im * h.sum_sc + w.im * w.im * h.sum_cc;
    const Vector3 z_zgrad =
        w.re * w.re_grad * h.sum_ss + (w.re * w.im_grad + w.im * w.re_grad) * h.sum_sc + w.im * w.im_grad * h.sum_cc;
    const Matrix3 zgrad_outer = w.re_grad * w.re_grad.transpose() * h.sum_ss +
                                (w.re_grad * w.im_grad.transpose() + w.im_grad * w.re_grad.transpose()) * h.sum_sc +
                                w.im_grad * w.im_grad.transpose() * h.sum_cc;
    const Matrix3 z_zhess =
        w.re * w.re_hess * h.sum_ss + (w.re * w.im_hess + w.im * w.re_hess) * h.sum_sc + w.im * w.im_hess * h.sum_cc;

    out.value += sum * sum - sq;
    out.gradient += 2 * (sum * sum_grad - z_zgrad);
    out.hessian += 2 * (sum_grad * sum_grad.transpose() + sum * sum_hess - zgrad_outer - z_zhess);
  }
  const Real scale = 2 / (static_cast<Real>(n_) * static_cast<Real>(n_ - 1));
  out.value *= scale;
  out.gradient *= scale;
  out.hessian *= scale;
  out.hessian = (0.5 * (out.hessian + out.hessian.transpose())).eval();
  return out;
}

ContrastValue empirical_contrast(const Sample& sample, const MixtureParams& theta)
{
  return ContrastMoments(sample).evaluate(theta);
}

Real population_contrast(const MixtureParams& theta, const MixtureParams& theta0, std::span<const Complex> f_coeffs)
{
  if (f_coeffs.size() < static_cast<std::size_t>(kContrastOrder))
    throw DomainError("population_contrast needs f^{*1}..f^{*4}");
  Real total = 0;
  for (int l = 1; l <= kContrastOrder; ++l) {
    const Complex g = fourier_weight(theta0, l) * f_coeffs[static_cast<std::size_t>(l - 1)];
    const Real im = std::imag(g * std::conj(fourier_weight(theta, l)));
    total += im * im;
  }
  return 2 * total;
}

Real population_contrast(const MixtureParams& theta, const MixtureParams& theta0, const ComponentDensity& f)
{
  std::array<Complex, kContrastOrder> c;
  for (int l = 1; l <= kContrastOrder; ++l)
    c[static_cast<std::size_t>(l - 1)] = f.fourier(l);
  return population_contrast(theta, theta0, c);
}

MixtureParams canonicalize(const MixtureParams& theta)
{
  if (theta.p > 0.5)
    return {1 - theta.p, theta.beta, theta.alpha};
  return theta;
}

bool near_degenerate(const MixtureParams& theta, Real radius)
{
  return std::abs(angular_difference(theta.beta - theta.alpha, 0, kTwoPi / 3)) < radius;
}

Real angular_sq_error(Real estimate, Real truth)
{
  const Real d = angular_difference(estimate, truth, kPi);
  return d * d;
}

namespace {

// Cell-centred grid over the box; the contrast costs O(1) per point, so a
// few thousand evaluations are negligible next to one simplex run.
MixtureParams grid_scan_start(const ContrastMoments& moments, const SearchBox& box, int nodes)
{
  const int p_nodes = std::max(2, nodes / 2);
  MixtureParams best_t;
  Real best_v = std::numeric_limits<Real>::infinity();
  for (int i = 0; i < p_nodes; ++i) {
    const Real p = box.p_lo + (box.p_hi - box.p_lo) * (i + 0.5) / p_nodes;
    for (int j = 0; j < nodes; ++j) {
      const Real a = box.angle_lo + (box.angle_hi - box.angle_lo) * (j + 0.5) / nodes;
      for (int k = 0; k < nodes; ++k) {
        const Real b = box.angle_lo + (box.angle_hi - box.angle_lo) * (k + 0.5) / nodes;
        const MixtureParams t{p, a, b};
        const Real v = moments.value(t);
        if (v < best_v) {
          best_v = v;
          best_t = t;
        }
      }
    }
  }
  return best_t;
}

} // namespace

FitResult estimate_theta(const Sample& sample, const FitOptions& options)
{
  validate_box(options.box);
  if (options.n_starts < 1)
    throw DomainError("need at least one optimizer start");
  if (sample.size() < 2)
    throw EstimationError("estimation needs at least 2 observations, got " + std::to_string(sample.size()));
  const ContrastMoments moments(sample);

  const SearchBox& box = options.box;
  const Vector3 lo(box.p_lo, box.angle_lo, box.angle_lo);
  const Vector3 hi(box.p_hi, box.angle_hi, box.angle_hi);
  const Vector3 step = 0.1 * (hi - lo);
  NelderMeadOptions nm;
  nm.f_tol = options.f_tol;
  nm.x_tol = options.x_tol;
  nm.max_iter = options.max_iter;

  const auto objective = [&](const Eigen::VectorXd& x) {
    return moments.value(MixtureParams{x(0), x(1), x(2)});
  };

  FitResult result;
  result.n = sample.size();
  result.n_starts = options.n_starts;
  Rng rng(options.seed);
  std::vector<MixtureParams> starts;
  for (int s = 0; s < options.n_starts; ++s) {
    MixtureParams t;
    t.p = rng.uniform(box.p_lo, box.p_hi);
    t.alpha = rng.uniform(box.angle_lo, box.angle_hi);
    t.beta = rng.uniform(box.angle_lo, box.angle_hi);
    starts.push_back(t);
  }
  if (options.scan_nodes > 0)
    starts.push_back(grid_scan_start(moments, box, options.scan_nodes));

  int best = -1;
  for (int s = 0; s < static_cast<int>(starts.size()); ++s) {
    LocalMinimum lm;
    lm.start_index = s;
    lm.start = starts[static_cast<std::size_t>(s)];
    const NelderMeadResult r = nelder_mead_box(objective, lm.start.as_vector(), lo, hi, step, nm);
    lm.theta = MixtureParams{r.x(0), r.x(1), r.x(2)};
    lm.contrast = r.f;
    lm.iterations = r.iterations;
    lm.converged = r.converged;
    result.local_minima.push_back(lm);
    if (!lm.converged)
      continue;
    ++result.converged_starts;
    // Ties within 1e-12 keep the earlier start.
    if (best < 0 || lm.contrast < result.local_minima[static_cast<std::size_t>(best)].contrast - 1e-12)
      best = s;
  }
  if (best < 0) {
    std::ostringstream os;
    os << "no optimizer start converged (" << options.n_starts << " starts, max_iter=" << options.max_iter
       << "); best values:";
    for (const auto& lm : result.local_minima)
      os << ' ' << fmt(lm.contrast);
    throw EstimationError(os.str());
  }

  MixtureParams theta = result.local_minima[static_cast<std::size_t>(best)].theta;
  Real value = result.local_minima[static_cast<std::size_t>(best)].contrast;
  if (options.polish) {
    const MixtureParams refined = polish(moments, theta, lo, hi);
    const Real refined_value = moments.value(refined);
    if (refined_value < value) {
      theta = refined;
      value = refined_value;
    }
  }
  result.theta_hat = canonicalize(theta);
  result.contrast_at_min = value;
  result.near_degenerate = near_degenerate(result.theta_hat, options.near_degenerate_radius);

  if (options.compute_covariance) {
    try {
      AsymptoticCovariance cov = asymptotic_cov(sample, result.theta_hat, options.rcond_min);
      result.covariance = cov.sigma / static_cast<Real>(result.n);
      result.inference = std::move(cov);
    } catch (const InferenceError& e) {
      result.inference_error = e.what();
    }
  }
  return result;
}

AsymptoticCovariance asymptotic_cov(const Sample& sample, const MixtureParams& theta_hat, Real rcond_min)
{
  const ContrastMoments moments(sample);
  const Eigen::Index n = sample.size();
  const Real nr = static_cast<Real>(n);

  AsymptoticCovariance out;
  out.n = n;
  out.hessian = moments.evaluate(theta_hat).hessian;

  const Eigen::SelfAdjointEigenSolver<Matrix3> eig(out.hessian, Eigen::EigenvaluesOnly);
  const Vector3 ev = eig.eigenvalues().cwiseAbs();
  out.rcond = ev.maxCoeff() > 0 ? ev.minCoeff() / ev.maxCoeff() : 0;
  if (!(out.rcond >= rcond_min))
    throw InferenceError("contrast Hessian is singular at theta_hat (rcond " + fmt(out.rcond) + " < " +
                         fmt(rcond_min) + ")");

  std::array<WeightParts, kContrastOrder> w;
  std::array<Vector3, kContrastOrder> mean_grad;
  for (int l = 1; l <= kContrastOrder; ++l) {
    auto& wl = w[static_cast<std::size_t>(l - 1)];
    wl = weight_parts(theta_hat, l, false);
    Real ss = 0, cs = 0;
    for (Eigen::Index k = 0; k < n; ++k) {
      ss += std::sin(l * sample.angles(k));
      cs += std::cos(l * sample.angles(k));
    }
    mean_grad[static_cast<std::size_t>(l - 1)] = (wl.re_grad * ss + wl.im_grad * cs) / nr;
  }

  // V = (4 / n) sum_k u_k u_k^T with u_k = sum_{l=-4}^{4} Z_k^l mean(Zdot^l).
  Matrix3 v = Matrix3::Zero();
  for (Eigen::Index k = 0; k < n; ++k) {
    const Real x = sample.angles(k);
    Vector3 u = Vector3::Zero();
    for (int l = 1; l <= kContrastOrder; ++l) {
      const auto& wl = w[static_cast<std::size_t>(l - 1)];
      const Real z = wl.re * std::sin(l * x) + wl.im * std::cos(l * x);
      u += 2 * z * mean_grad[static_cast<std::size_t>(l - 1)];
    }
    v.noalias() += u * u.transpose();
  }
  v *= 4 / nr;
  out.score_cov = 0.5 * (v + v.transpose());

  const Matrix3 a_inv = out.hessian.inverse();
  out.sigma = a_inv * out.score_cov * a_inv;
  out.sigma = (0.5 * (out.sigma + out.sigma.transpose())).eval();
  out.std_errors = (out.sigma.diagonal() / nr).cwiseMax(0).cwiseSqrt();
  return out;
}

} // namespace circmix
