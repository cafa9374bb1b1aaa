#pragma once

#include "circmix/types.hpp"

#include <functional>

namespace circmix {

struct NelderMeadOptions {
  //! Stop when max f - min f over the simplex is below f_tol ...
  Real f_tol = 1e-10;
  //! ... and every vertex is within x_tol (max norm) of the best one.
  Real x_tol = 1e-8;
  int max_iter = 2000;
};

struct NelderMeadResult {
  Eigen::VectorXd x;
  Real f = 0;
  int iterations = 0;
  bool converged = false;
};

//! Nelder-Mead simplex search with every trial point projected onto the box
//! [lo, hi]. `step` sets the initial simplex edge per coordinate; edges that
//! would leave the box are flipped.
NelderMeadResult nelder_mead_box(const std::function<Real(const Eigen::VectorXd&)>& objective,
                                 const Eigen::VectorXd& start,
                                 const Eigen::VectorXd& lo,
                                 const Eigen::VectorXd& hi,
                                 const Eigen::VectorXd& step,
                                 const NelderMeadOptions& options = {});

} // namespace circmix
