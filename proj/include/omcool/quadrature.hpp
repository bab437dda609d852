#pragma once

// One-dimensional adaptive quadrature: Gauss-Kronrod 7-15 panels refined by
// interval bisection until the embedded error estimate of every panel meets
// the tolerance. Deterministic and allocation-light; safe to call from any
// number of threads.

#include <array>
#include <cmath>
#include <cstddef>
#include <utility>
#include <vector>

namespace omcool::quad {

struct Result {
    double value = 0.0;
    double error = 0.0;        // accumulated error-estimate bound
    bool converged = false;
    std::size_t evaluations = 0;
};

struct Options {
    double rel_tol = 1e-7;     // per-panel relative acceptance
    double abs_floor = 1e-300; // absolute acceptance floor
    int max_intervals = 20000;
};

namespace detail {

// Kronrod-15 abscissae on [0,1] and the matching Gauss-7 / Kronrod-15
// weights. Even-indexed abscissae carry a Gauss weight.
inline constexpr std::array<double, 8> xgk = {
    0.000000000000000, 0.207784955007898, 0.405845151377397, 0.586087235467691,
    0.741531185599394, 0.864864423359769, 0.949107912342759, 0.991455371120813,
};
inline constexpr std::array<double, 8> wgk = {
    0.209482141084728, 0.204432940075298, 0.190350578064785, 0.169004726639267,
    0.140653259715525, 0.104790010322250, 0.063092092629979, 0.022935322010529,
};
inline constexpr std::array<double, 4> wg = {
    0.417959183673469, 0.381830050505119, 0.279705391489277, 0.129484966168870,
};

template <typename F>
inline void gk15(F& f, double a, double b, double& k15, double& err) {
    const double c = 0.5 * (a + b);
    const double h = 0.5 * (b - a);
    const double f0 = f(c);
    double gauss = wg[0] * f0;
    double kron = wgk[0] * f0;
    for (int i = 1; i < 8; ++i) {
        const double dx = h * xgk[i];
        const double fi = f(c + dx) + f(c - dx);
        kron += wgk[i] * fi;
        if ((i & 1) == 0) gauss += wg[i / 2] * fi;
    }
    k15 = kron * h;
    err = std::abs((kron - gauss) * h);
}

}  // namespace detail

template <typename F>
Result integrate(F&& f, double lo, double hi, const Options& opt = {}) {
    Result res;
    if (lo == hi) {
        res.converged = true;
        return res;
    }

    struct Panel {
        double a, b;
    };
    std::vector<Panel> stack;
    stack.push_back({lo, hi});
    int panels = 1;
    bool gave_up = false;

    while (!stack.empty()) {
        const Panel p = stack.back();
        stack.pop_back();
        double v, err;
        detail::gk15(f, p.a, p.b, v, err);
        res.evaluations += 15;

        const bool accept = err <= opt.rel_tol * std::abs(v) || err <= opt.abs_floor ||
                            panels >= opt.max_intervals || gave_up;
        if (accept) {
            if (panels >= opt.max_intervals) gave_up = true;
            res.value += v;
            res.error += err;
        } else {
            const double mid = 0.5 * (p.a + p.b);
            // Guard against bisection bottoming out on denormal-width panels.
            if (mid <= p.a || mid >= p.b) {
                res.value += v;
                res.error += err;
                continue;
            }
            stack.push_back({p.a, mid});
            stack.push_back({mid, p.b});
            ++panels;
        }
    }

    res.converged = !gave_up &&
                    (res.error <= opt.rel_tol * std::abs(res.value) || res.error <= opt.abs_floor ||
                     std::abs(res.value) < opt.abs_floor);
    return res;
}

}  // namespace omcool::quad
