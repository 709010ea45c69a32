#pragma once

#include <Eigen/Core>

#include <functional>

namespace rgarch {

/// Objective returning f(x); fills *grad when non-null. Return +inf for infeasible x.
using Objective = std::function<double(const Eigen::VectorXd& x, Eigen::VectorXd* grad)>;

struct BfgsOptions {
    int max_iter = 500;
    double grad_tol = 1e-6;
    int max_backtracks = 60;
};

struct BfgsResult {
    Eigen::VectorXd x;
    double value = 0.0;
    double grad_norm = 0.0;
    int iterations = 0;
    bool converged = false;
};

/**
 * Quasi-Newton minimization with an Armijo backtracking line search.
 * `inv_hessian0`, when non-empty, seeds the inverse-Hessian approximation.
 * Converged means the Euclidean gradient norm fell below grad_tol.
 */
BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& opts = {},
                         const Eigen::MatrixXd& inv_hessian0 = Eigen::MatrixXd());

}  // namespace rgarch
