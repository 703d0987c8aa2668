#ifndef VISCOCAL_LBFGS_HPP
#define VISCOCAL_LBFGS_HPP

#include <Eigen/Dense>
#include <functional>
#include <vector>

namespace viscocal {

/// f and gradient in one call; returns f, fills grad.
using ObjectiveFn = std::function<double(const Eigen::VectorXd&, Eigen::VectorXd&)>;

struct LbfgsOptions {
    int memory = 10;
    int max_iters = 280;
    double c1 = 1e-4;            // sufficient decrease
    double c2 = 0.9;             // curvature
    double grad_rel_tol = 1e-12; // stop when ||g|| <= tol * ||g0||
    int max_linesearch = 30;
    void validate() const;
};

struct LbfgsResult {
    Eigen::VectorXd x;
    double f = 0.0;
    Eigen::VectorXd grad;
    std::vector<double> history;  // f after each iteration; history[0] = f(x0)
    int iterations = 0;
    bool line_search_failed = false;  // stopped early, best-so-far returned
    bool converged = false;           // gradient tolerance reached
    int wolfe_violations = 0;         // accepted steps failing either Wolfe condition (should be 0)
};

/// Two-loop-recursion L-BFGS with a strong-Wolfe line search (bracket + zoom,
/// cubic interpolation). Every accepted step is re-checked against both Wolfe
/// conditions; violations are counted in the result.
LbfgsResult lbfgs_minimize(const ObjectiveFn& fg, const Eigen::VectorXd& x0,
                           const LbfgsOptions& opts,
                           const std::function<void(int, double)>& per_iteration = {});

} // namespace viscocal

#endif
