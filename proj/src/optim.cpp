#include "omcool/optim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace omcool::optim {

SimplexResult nelder_mead(const ObjectiveFn& f, std::vector<double> x0,
                          const SimplexOptions& opt) {
    const int n = static_cast<int>(x0.size());
    SimplexResult res;
    res.x = x0;
    if (n == 0) {
        res.converged = true;
        return res;
    }

    // standard coefficients
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;

    std::vector<std::vector<double>> xs(n + 1, x0);
    std::vector<double> fs(n + 1);
    for (int i = 0; i < n; ++i) {
        double step = opt.init_step * std::abs(x0[i]);
        if (step == 0.0) step = opt.init_step;
        xs[i + 1][i] += step;
    }
    for (int i = 0; i <= n; ++i) fs[i] = f(xs[i]);
    res.evaluations = n + 1;
    res.accepted_trace.push_back(*std::min_element(fs.begin(), fs.end()));

    std::vector<int> order(n + 1);
    while (res.evaluations < opt.max_evals) {
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(), [&](int a, int b) { return fs[a] < fs[b]; });
        const int best = order[0], worst = order[n], second = order[n - 1];

        // convergence: simplex collapsed in x and f
        double size = 0.0;
        for (int i = 0; i <= n; ++i)
            for (int j = 0; j < n; ++j)
                size = std::max(size, std::abs(xs[i][j] - xs[best][j]) /
                                          std::max(1.0, std::abs(xs[best][j])));
        if (size < opt.x_tol && fs[worst] - fs[best] < opt.f_tol) {
            res.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (int i = 0; i <= n; ++i) {
            if (i == worst) continue;
            for (int j = 0; j < n; ++j) centroid[j] += xs[i][j] / n;
        }

        auto along = [&](double t) {
            std::vector<double> x(n);
            for (int j = 0; j < n; ++j) x[j] = centroid[j] + t * (centroid[j] - xs[worst][j]);
            return x;
        };

        std::vector<double> xr = along(alpha);
        const double fr = f(xr);
        ++res.evaluations;

        if (fr < fs[best]) {
            std::vector<double> xe = along(gamma);
            const double fe = f(xe);
            ++res.evaluations;
            if (fe < fr) {
                xs[worst] = std::move(xe);
                fs[worst] = fe;
            } else {
                xs[worst] = std::move(xr);
                fs[worst] = fr;
            }
        } else if (fr < fs[second]) {
            xs[worst] = std::move(xr);
            fs[worst] = fr;
        } else {
            std::vector<double> xc = along(fr < fs[worst] ? rho : -rho);
            const double fc = f(xc);
            ++res.evaluations;
            if (fc < std::min(fr, fs[worst])) {
                xs[worst] = std::move(xc);
                fs[worst] = fc;
            } else {
                // shrink toward the best vertex
                for (int i = 0; i <= n; ++i) {
                    if (i == best) continue;
                    for (int j = 0; j < n; ++j)
                        xs[i][j] = xs[best][j] + sigma * (xs[i][j] - xs[best][j]);
                    fs[i] = f(xs[i]);
                    ++res.evaluations;
                }
            }
        }
        const double cur_best = *std::min_element(fs.begin(), fs.end());
        if (cur_best < res.accepted_trace.back()) res.accepted_trace.push_back(cur_best);
    }

    const int ibest = static_cast<int>(
        std::min_element(fs.begin(), fs.end()) - fs.begin());
    res.x = xs[ibest];
    res.f = fs[ibest];
    return res;
}

GaussNewtonResult gauss_newton(const ResidualFn& residuals, std::vector<double> x0,
                               const GaussNewtonOptions& opt) {
    const int n = static_cast<int>(x0.size());
    GaussNewtonResult res;
    res.x = x0;

    Eigen::VectorXd r = residuals(x0);
    double cost = r.squaredNorm();
    res.accepted_trace.push_back(cost);
    res.jtj = Eigen::MatrixXd::Zero(n, n);
    if (n == 0) {
        res.cost = cost;
        res.converged = true;
        return res;
    }

    double lambda = 1e-3;
    const int m = static_cast<int>(r.size());
    Eigen::MatrixXd J(m, n);

    for (int iter = 0; iter < opt.max_iters; ++iter) {
        ++res.iterations;

        for (int j = 0; j < n; ++j) {
            double h = opt.fd_step * std::abs(res.x[j]);
            if (h == 0.0) h = opt.fd_step;
            std::vector<double> xp = res.x;
            xp[j] += h;
            J.col(j) = (residuals(xp) - r) / h;
        }
        res.jtj = J.transpose() * J;
        const Eigen::VectorXd g = J.transpose() * r;

        bool accepted = false;
        double step_size = 0.0;
        for (int trial = 0; trial < 12; ++trial) {
            Eigen::MatrixXd A = res.jtj;
            for (int j = 0; j < n; ++j)
                A(j, j) += lambda * std::max(res.jtj(j, j), 1e-30);
            const Eigen::VectorXd delta = A.ldlt().solve(-g);

            std::vector<double> xt = res.x;
            step_size = 0.0;
            for (int j = 0; j < n; ++j) {
                xt[j] += delta[j];
                step_size = std::max(step_size,
                                     std::abs(delta[j]) / std::max(1.0, std::abs(xt[j])));
            }
            const Eigen::VectorXd rt = residuals(xt);
            const double ct = rt.squaredNorm();
            if (ct < cost) {
                res.x = std::move(xt);
                r = rt;
                const double decrease = cost - ct;
                cost = ct;
                res.accepted_trace.push_back(cost);
                lambda = std::max(lambda / 3.0, 1e-12);
                accepted = true;
                if (decrease < opt.f_tol || step_size < opt.step_tol) {
                    res.converged = true;
                }
                break;
            }
            lambda *= 4.0;
        }
        if (!accepted) {
            // damping saturated without progress: treat as converged-in-place
            res.converged = true;
            break;
        }
        if (res.converged) break;
    }

    res.cost = cost;
    return res;
}

}  // namespace omcool::optim
