#include "rgarch/optimize.hpp"

#include <cmath>
#include <limits>

namespace rgarch {

BfgsResult minimize_bfgs(const Objective& f, Eigen::VectorXd x0, const BfgsOptions& opts,
                         const Eigen::MatrixXd& inv_hessian0) {
    const auto m = x0.size();
    Eigen::MatrixXd H = inv_hessian0.size() == m * m ? inv_hessian0
                                                     : Eigen::MatrixXd::Identity(m, m);
    const Eigen::MatrixXd H_reset = H;

    BfgsResult res;
    res.x = std::move(x0);
    Eigen::VectorXd g(m);
    res.value = f(res.x, &g);
    if (!std::isfinite(res.value) || !g.allFinite()) {
        res.grad_norm = std::numeric_limits<double>::infinity();
        return res;
    }

    Eigen::VectorXd g_new(m);
    for (res.iterations = 0; res.iterations < opts.max_iter; ++res.iterations) {
        res.grad_norm = g.norm();
        if (res.grad_norm < opts.grad_tol) {
            res.converged = true;
            return res;
        }
        Eigen::VectorXd dir = -H * g;
        double slope = g.dot(dir);
        if (!(slope < 0.0)) {
            H = H_reset;
            dir = -H * g;
            slope = g.dot(dir);
        }

        double step = 1.0;
        bool accepted = false;
        Eigen::VectorXd x_new;
        double f_new = 0.0;
        for (int b = 0; b < opts.max_backtracks; ++b) {
            x_new = res.x + step * dir;
            f_new = f(x_new, &g_new);
            if (std::isfinite(f_new) && g_new.allFinite() &&
                f_new <= res.value + 1e-4 * step * slope) {
                accepted = true;
                break;
            }
            step *= 0.5;
        }
        if (!accepted) break;

        const Eigen::VectorXd s = x_new - res.x;
        const Eigen::VectorXd y = g_new - g;
        const double sy = s.dot(y);
        if (sy > 1e-12 * s.norm() * y.norm()) {
            const double rho = 1.0 / sy;
            const Eigen::VectorXd Hy = H * y;
            H += (rho * rho * y.dot(Hy) + rho) * (s * s.transpose()) -
                 rho * (Hy * s.transpose() + s * Hy.transpose());
        }
        res.x = std::move(x_new);
        res.value = f_new;
        g = g_new;
    }
    res.grad_norm = g.norm();
    res.converged = res.grad_norm < opts.grad_tol;
    return res;
}

}  // namespace rgarch
