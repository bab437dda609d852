#pragma once

// Deterministic local optimizers: a Nelder-Mead simplex to reach the basin
// and a damped Gauss-Newton (Levenberg-style) polish on residual vectors
// with forward-difference Jacobians. Accepted steps never increase the
// objective; traces of accepted objective values are kept for inspection.

#include <functional>
#include <vector>

#include <Eigen/Dense>

namespace omcool::optim {

using ObjectiveFn = std::function<double(const std::vector<double>&)>;
using ResidualFn = std::function<Eigen::VectorXd(const std::vector<double>&)>;

struct SimplexOptions {
    int max_evals = 2000;
    double x_tol = 1e-10;    // relative simplex size
    double f_tol = 1e-12;    // absolute objective spread
    double init_step = 0.05; // relative initial vertex displacement
};

struct SimplexResult {
    std::vector<double> x;
    double f = 0.0;
    int evaluations = 0;
    bool converged = false;
    std::vector<double> accepted_trace;  // best-so-far objective after each improvement
};

SimplexResult nelder_mead(const ObjectiveFn& f, std::vector<double> x0,
                          const SimplexOptions& opt = {});

struct GaussNewtonOptions {
    int max_iters = 200;
    double step_tol = 1e-10;  // relative step size
    double f_tol = 1e-12;     // absolute cost decrease
    double fd_step = 1e-6;    // relative forward-difference step
};

struct GaussNewtonResult {
    std::vector<double> x;
    double cost = 0.0;             // sum of squared residuals
    Eigen::MatrixXd jtj;           // J^T J at the solution
    int iterations = 0;
    bool converged = false;
    std::vector<double> accepted_trace;
};

GaussNewtonResult gauss_newton(const ResidualFn& residuals, std::vector<double> x0,
                               const GaussNewtonOptions& opt = {});

}  // namespace omcool::optim
