#include "circmix/nelder_mead.hpp"

#include <algorithm>
#include <numeric>
#include <vector>

namespace circmix {

NelderMeadResult nelder_mead_box(const std::function<Real(const Eigen::VectorXd&)>& objective,
                                 const Eigen::VectorXd& start,
                                 const Eigen::VectorXd& lo,
                                 const Eigen::VectorXd& hi,
                                 const Eigen::VectorXd& step,
                                 const NelderMeadOptions& options)
{
  const Eigen::Index dim = start.size();
  auto project = [&](Eigen::VectorXd x) { return x.cwiseMax(lo).cwiseMin(hi).eval(); };

  std::vector<Eigen::VectorXd> simplex(static_cast<std::size_t>(dim + 1), project(start));
  for (Eigen::Index j = 0; j < dim; ++j) {
    Eigen::VectorXd v = simplex[0];
    v(j) += step(j);
    if (v(j) > hi(j))
      v(j) = simplex[0](j) - step(j);
    simplex[static_cast<std::size_t>(j + 1)] = project(v);
  }
  std::vector<Real> values(simplex.size());
  for (std::size_t i = 0; i < simplex.size(); ++i)
    values[i] = objective(simplex[i]);

  std::vector<std::size_t> order(simplex.size());
  NelderMeadResult result;
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    const std::size_t best = order.front();
    const std::size_t worst = order.back();
    const std::size_t second = order[order.size() - 2];

    Real spread = 0;
    for (const auto& v : simplex)
      spread = std::max(spread, (v - simplex[best]).cwiseAbs().maxCoeff());
    if (values[worst] - values[best] <= options.f_tol && spread <= options.x_tol) {
      result.converged = true;
      break;
    }

    Eigen::VectorXd centroid = Eigen::VectorXd::Zero(dim);
    for (std::size_t i = 0; i < simplex.size(); ++i)
      if (i != worst)
        centroid += simplex[i];
    centroid /= static_cast<Real>(dim);

    const Eigen::VectorXd reflected = project(centroid + (centroid - simplex[worst]));
    const Real f_reflected = objective(reflected);
    if (f_reflected < values[best]) {
      const Eigen::VectorXd expanded = project(centroid + 2.0 * (centroid - simplex[worst]));
      const Real f_expanded = objective(expanded);
      if (f_expanded < f_reflected) {
        simplex[worst] = expanded;
        values[worst] = f_expanded;
      } else {
        simplex[worst] = reflected;
        values[worst] = f_reflected;
      }
      continue;
    }
    if (f_reflected < values[second]) {
      simplex[worst] = reflected;
      values[worst] = f_reflected;
      continue;
    }
    const bool outside = f_reflected < values[worst];
    const Eigen::VectorXd contracted =
        outside ? project(centroid + 0.5 * (reflected - centroid)) : project(centroid + 0.5 * (simplex[worst] - centroid));
    const Real f_contracted = objective(contracted);
    if (f_contracted < (outside ? f_reflected : values[worst])) {
      simplex[worst] = contracted;
      values[worst] = f_contracted;
      continue;
    }
    for (std::size_t i = 0; i < simplex.size(); ++i) {
      if (i == best)
        continue;
      simplex[i] = project(simplex[best] + 0.5 * (simplex[i] - simplex[best]));
      values[i] = objective(simplex[i]);
    }
  }

  const auto best = static_cast<std::size_t>(std::min_element(values.begin(), values.end()) - values.begin());
  result.x = simplex[best];
  result.f = values[best];
  result.iterations = iter;
  return result;
}

} // namespace circmix
