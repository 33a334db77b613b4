#pragma once

#include <functional>

#include <Eigen/Dense>

namespace dampsim {

struct SimplexOptions {
  int max_iterations = 2000;
  double f_tolerance = 1e-12;  // spread of objective values across the simplex
  double x_tolerance = 1e-10;  // simplex diameter
  double initial_step = 0.25;
};

struct SimplexResult {
  Eigen::VectorXd x;
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
};

// Nelder-Mead with the standard coefficients (1, 2, 1/2, 1/2).
SimplexResult nelder_mead(const std::function<double(const Eigen::VectorXd&)>& objective,
                          const Eigen::VectorXd& start, const SimplexOptions& options = {});

}  // namespace dampsim
