#include "omcool/tls.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "omcool/quadrature.hpp"
#include "omcool/units.hpp"

namespace omcool::tls {

namespace {

constexpr double eps_max = 50.0;  // outer cutoff in eps = E/(kT); sech^2 tail ~ e^-50

double coth(double x) { return 1.0 / std::tanh(x); }

quad::Options tunneling_options(double rel_tol) {
    quad::Options opt;
    opt.rel_tol = rel_tol;
    opt.max_intervals = 4000;
    return opt;
}

[[noreturn]] void throw_quadrature(const char* where, const quad::Result& r) {
    std::ostringstream msg;
    msg << where << ": quadrature did not reach its tolerance (estimate " << r.value
        << ", error bound " << r.error << ")";
    throw QuadratureError(msg.str(), r.value, r.error);
}

void check_range(const char* where, double T) {
    if (!(T >= t_min_supported && T <= t_max_supported)) {
        std::ostringstream msg;
        msg << where << ": T = " << T << " K outside supported range [" << t_min_supported
            << ", " << t_max_supported << "] K";
        throw std::domain_error(msg.str());
    }
}

// a = Omega_m tau_m evaluated at E = eps kT. Written against the relaxation
// rate directly so the eps -> 0 limit (a -> inf) never divides by zero.
double a_of_eps(double eps, double T, double omega_m, const TlsMaterial& mat) {
    const double E = eps * units::k_B * T;
    const double rate = max_relaxation_rate(E, T, mat);
    return rate > 0.0 ? omega_m / rate : std::numeric_limits<double>::infinity();
}

// Shared driver for the two tunneling double integrals: the outer integral
// of sech^2(eps/2)/4 * shape(a(eps)) over (0, eps_max]. Inner quadrature
// errors enter the outer integrand linearly, so the worst inner relative
// error scaled by the (positive) outer value bounds their contribution and
// is folded into the returned error.
template <typename Shape>
Estimate tunneling_outer(double T, double omega_m, const TlsMaterial& mat, Shape shape,
                         const char* where, double rel_tol) {
    double inner_rel_err = 0.0;
    auto integrand = [&](double eps) {
        const double sech = 1.0 / std::cosh(0.5 * eps);
        const double weight = 0.25 * sech * sech;
        if (weight == 0.0) return 0.0;
        const double a = a_of_eps(eps, T, omega_m, mat);
        return weight * shape(a, inner_rel_err);
    };
    const auto res = quad::integrate(integrand, 0.0, eps_max, tunneling_options(rel_tol));
    const double err = res.error + inner_rel_err * std::abs(res.value);
    if (!res.converged) throw_quadrature(where, res);
    return {res.value, err};
}

double inner_damping_checked(double a, double& rel_err, double rel_tol = 1e-7) {
    if (std::isinf(a)) return 0.0;
    const double a2 = a * a;
    auto f = [a2](double v) {
        const double w = 1.0 - v * v;
        return 2.0 * v * v / (w * w + a2);
    };
    const auto res = quad::integrate(f, 0.0, 1.0, tunneling_options(rel_tol));
    if (!res.converged) throw_quadrature("inner_integral_damping", res);
    if (res.value > 0.0) rel_err = std::max(rel_err, res.error / res.value);
    return res.value;
}

double inner_spring_checked(double a, double& rel_err, double rel_tol = 1e-7) {
    if (std::isinf(a)) return 0.0;
    const double a2 = a * a;
    auto f = [a2](double v) {
        const double w = 1.0 - v * v;
        return 2.0 * v * v * w / (w * w + a2);
    };
    const auto res = quad::integrate(f, 0.0, 1.0, tunneling_options(rel_tol));
    if (!res.converged) throw_quadrature("inner_integral_spring", res);
    if (res.value > 0.0) rel_err = std::max(rel_err, res.error / res.value);
    return res.value;
}

}  // namespace

void validate(const TlsMaterial& mat) {
    if (!(mat.B > 0.0 && mat.rho > 0.0 && mat.c_s > 0.0 && mat.Pbar_Q > 0.0 &&
          mat.Pbar_Omega > 0.0 && mat.T0 > 0.0))
        throw std::invalid_argument("TlsMaterial: all fields must be > 0");
    for (const double c : {coupling_constant_q(mat), coupling_constant_omega(mat)}) {
        if (!(c > 0.0 && c < 1.0))
            throw std::invalid_argument(
                "TlsMaterial: coupling constant Pbar B^2/(rho c_s^2) outside (0, 1)");
    }
}

double coupling_constant_q(const TlsMaterial& mat) {
    return mat.Pbar_Q * mat.B * mat.B / (mat.rho * mat.c_s * mat.c_s);
}

double coupling_constant_omega(const TlsMaterial& mat) {
    return mat.Pbar_Omega * mat.B * mat.B / (mat.rho * mat.c_s * mat.c_s);
}

void validate(const TlsModel& model) {
    validate(model.material);
    if (!(model.omega_m_bare > 0.0)) throw std::invalid_argument("TlsModel: omega_m_bare must be > 0");
    if (model.q_cla_inv < 0.0) throw std::invalid_argument("TlsModel: q_cla_inv must be >= 0");
    if (model.arrhenius_V.has_value() != model.arrhenius_tau0.has_value())
        throw std::invalid_argument("TlsModel: Arrhenius parameters must be set together");
}

double occupation_derivative(double E, double T) {
    if (!(T > 0.0)) throw std::domain_error("occupation_derivative: T must be > 0");
    if (E < 0.0) throw std::domain_error("occupation_derivative: E must be >= 0");
    const double kt = units::k_B * T;
    const double sech = 1.0 / std::cosh(0.5 * E / kt);
    return 0.25 / kt * sech * sech;
}

double max_relaxation_rate(double E, double T, const TlsMaterial& mat) {
    if (!(T > 0.0)) throw std::domain_error("max_relaxation_rate: T must be > 0");
    if (E < 0.0) throw std::domain_error("max_relaxation_rate: E must be >= 0");
    const double h4 = units::hbar * units::hbar * units::hbar * units::hbar;
    const double c5 = std::pow(mat.c_s, 5);
    const double pref = 3.0 * mat.B * mat.B / (2.0 * std::numbers::pi * mat.rho * h4 * c5);
    const double x = 0.5 * E / (units::k_B * T);
    // E^3 coth(x) -> 2kT E^2 as E -> 0; switch to the series before 1/tanh
    // loses precision.
    if (x < 1e-6) return pref * E * E * (2.0 * units::k_B * T + E * x / 3.0);
    return pref * E * E * E * coth(x);
}

double inner_integral_damping(double a) {
    if (!(a > 0.0))
        throw std::domain_error("inner_integral_damping: a must be > 0 (diverges at 0)");
    double rel_err = 0.0;
    return inner_damping_checked(a, rel_err);
}

double inner_integral_spring(double a) {
    if (!(a > 0.0))
        throw std::domain_error("inner_integral_spring: a must be > 0 (log divergence at 0)");
    double rel_err = 0.0;
    return inner_spring_checked(a, rel_err);
}

Estimate q_inv_tunneling_estimate(double T, const TlsModel& model, double rel_tol) {
    check_range("q_inv_tunneling", T);
    const double C = coupling_constant_q(model.material);
    const Estimate outer = tunneling_outer(
        T, model.omega_m_bare, model.material,
        [rel_tol](double a, double& rel_err) {
            if (std::isinf(a)) return 0.0;
            return a * inner_damping_checked(a, rel_err, rel_tol);
        },
        "q_inv_tunneling", rel_tol);
    return {2.0 * C * outer.value, 2.0 * C * outer.error};
}

Estimate freq_shift_tunneling_estimate(double T, const TlsModel& model, double rel_tol) {
    check_range("freq_shift_tunneling", T);
    const double C = coupling_constant_omega(model.material);
    const Estimate outer = tunneling_outer(
        T, model.omega_m_bare, model.material,
        [rel_tol](double a, double& rel_err) { return inner_spring_checked(a, rel_err, rel_tol); },
        "freq_shift_tunneling", rel_tol);
    return {-model.omega_m_bare * C * outer.value, model.omega_m_bare * C * outer.error};
}

double q_inv_tunneling(double T, const TlsModel& model) {
    return q_inv_tunneling_estimate(T, model).value;
}

double freq_shift_tunneling(double T, const TlsModel& model) {
    return freq_shift_tunneling_estimate(T, model).value;
}

double q_inv_resonant(double T, double omega_m, const TlsMaterial& mat) {
    if (!(T > 0.0)) throw std::domain_error("q_inv_resonant: T must be > 0");
    const double C = coupling_constant_q(mat);
    return std::numbers::pi * C * std::tanh(0.5 * units::hbar * omega_m / (units::k_B * T));
}

double freq_shift_resonant(double T, double omega_m, const TlsMaterial& mat) {
    if (!(T > 0.0)) throw std::domain_error("freq_shift_resonant: T must be > 0");
    if (!(mat.T0 > 0.0)) throw std::domain_error("freq_shift_resonant: T0 must be > 0");
    return omega_m * coupling_constant_omega(mat) * std::log(T / mat.T0);
}

double arrhenius_rate(double T, const TlsModel& model) {
    if (!(T > 0.0)) throw std::domain_error("arrhenius_rate: T must be > 0");
    if (!model.arrhenius_V || !model.arrhenius_tau0)
        throw std::invalid_argument("arrhenius_rate: model has no Arrhenius parameters");
    return std::exp(-*model.arrhenius_V / (units::k_B * T)) / *model.arrhenius_tau0;
}

double mechanical_frequency(double T, const TlsModel& model) {
    check_range("mechanical_frequency", T);
    return model.omega_m_bare + freq_shift_tunneling(T, model) +
           freq_shift_resonant(T, model.omega_m_bare, model.material);
}

double mechanical_damping(double T, const TlsModel& model) {
    check_range("mechanical_damping", T);
    const double q_inv = model.q_cla_inv + q_inv_tunneling(T, model) +
                         q_inv_resonant(T, model.omega_m_bare, model.material);
    return mechanical_frequency(T, model) * q_inv;
}

namespace {

// Brent-style bracketed root refinement on g(T) = forward(T) - observed.
template <typename G>
double refine_root(G& g, double a, double b, double ga, double gb, double g_tol) {
    for (int it = 0; it < 200; ++it) {
        if (ga == 0.0 || std::abs(ga) <= g_tol) return a;
        if (gb == 0.0 || std::abs(gb) <= g_tol) return b;
        // secant step, falling back to bisection when it leaves the bracket
        double m = b - gb * (b - a) / (gb - ga);
        const double mid = 0.5 * (a + b);
        if (!(m > std::min(a, b) && m < std::max(a, b))) m = mid;
        if (std::abs(b - a) < 1e-13 * std::max(1.0, std::abs(mid))) return mid;
        const double gm = g(m);
        if (std::abs(gm) <= g_tol) return m;
        if ((ga < 0.0) == (gm < 0.0)) {
            a = m;
            ga = gm;
        } else {
            b = m;
            gb = gm;
        }
    }
    return 0.5 * (a + b);
}

}  // namespace

double thermometer(double observed, Observable observable, const TlsModel& model,
                   double t_lo, double t_hi) {
    if (!(t_lo >= t_min_supported && t_hi <= t_max_supported && t_lo < t_hi))
        throw std::domain_error("thermometer: bracket must lie inside the supported range");

    auto forward = [&](double T) {
        return observable == Observable::frequency ? mechanical_frequency(T, model)
                                                   : mechanical_damping(T, model);
    };
    auto g = [&](double T) { return forward(T) - observed; };
    const double g_tol = 1e-10 * std::abs(observed);

    constexpr int n_scan = 64;
    std::vector<double> ts(n_scan), gs(n_scan);
    for (int i = 0; i < n_scan; ++i) {
        ts[i] = t_lo + (t_hi - t_lo) * static_cast<double>(i) / (n_scan - 1);
        gs[i] = g(ts[i]);
    }

    std::vector<double> roots;
    for (int i = 0; i < n_scan; ++i) {
        if (std::abs(gs[i]) <= g_tol) {
            // exact hit on a scan node; avoid double-counting the adjacent interval
            if (roots.empty() || ts[i] - roots.back() > 1e-9 * (t_hi - t_lo))
                roots.push_back(ts[i]);
            continue;
        }
        if (i + 1 < n_scan && std::abs(gs[i + 1]) > g_tol &&
            (gs[i] < 0.0) != (gs[i + 1] < 0.0)) {
            const double r = refine_root(g, ts[i], ts[i + 1], gs[i], gs[i + 1], g_tol);
            if (roots.empty() || r - roots.back() > 1e-9 * (t_hi - t_lo)) roots.push_back(r);
        }
    }

    if (roots.empty()) {
        std::ostringstream msg;
        msg << "thermometer: unattainable observation " << observed << " in bracket [" << t_lo
            << ", " << t_hi << "] K";
        throw UnattainableObservation(msg.str());
    }
    if (roots.size() > 1) {
        std::ostringstream msg;
        msg << "thermometer: ambiguous inversion, " << roots.size() << " roots:";
        for (const double r : roots) msg << ' ' << r << " K";
        throw AmbiguousInversion(msg.str(), roots);
    }
    return roots.front();
}

}  // namespace omcool::tls
