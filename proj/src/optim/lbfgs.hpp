#pragma once

#include <Eigen/Dense>

#include <functional>

namespace specbound::optim {

/// f(x) with its gradient written to grad.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd& grad)>;

struct LbfgsOptions {
  int memory = 10;
  int max_iter = 2000;
  double grad_tol = 1e-7;  // max-abs gradient
  double c1 = 1e-4;
  double c2 = 0.9;
  int max_line_search = 40;
};

struct LbfgsResult {
  Eigen::VectorXd x;
  double f = 0.0;
  double grad_norm = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Limited-memory BFGS with a strong-Wolfe line search; on line-search
/// failure falls back to one steepest-descent step with Armijo backtracking.
LbfgsResult lbfgs_minimize(const Objective& fn, Eigen::VectorXd x0, const LbfgsOptions& opts,
                           const std::function<void(int, double, double, double)>& trace = {});

}  // namespace specbound::optim
