#pragma once

// Test-side oracles, deliberately independent of the library's numerics:
// composite Simpson integration (raw variables, no smoothing substitution),
// brute-force versions of the TLS double integrals, and a time-domain RK4
// integrator for the coupled-mode equations.

#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <random>
#include <vector>

#include "omcool/tls.hpp"
#include "omcool/units.hpp"

namespace oracles {

// composite Simpson with n (even) intervals
template <typename F>
double simpson(F&& f, double a, double b, std::size_t n) {
    if (n % 2) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double sum = f(a) + f(b);
    for (std::size_t i = 1; i < n; ++i) sum += f(a + h * i) * (i % 2 ? 4.0 : 2.0);
    return sum * h / 3.0;
}

// inner TLS integrals in the raw u variable
inline double inner_damping_raw(double a, std::size_t n = 2'000'000) {
    return simpson([a](double u) { return std::sqrt(std::max(1.0 - u, 0.0)) /
                                          (u * u + a * a); },
                   0.0, 1.0, n);
}

inline double inner_spring_raw(double a, std::size_t n = 2'000'000) {
    return simpson([a](double u) { return u * std::sqrt(std::max(1.0 - u, 0.0)) /
                                          (u * u + a * a); },
                   0.0, 1.0, n);
}

// brute-force TLS double integrals: outer composite Simpson over
// eps = E/(kT) on [0, 50], inner raw-u composite Simpson per outer node
struct TlsOracle {
    std::size_t outer_n = 2000;
    std::size_t inner_n = 40'000;

    double a_of_eps(double eps, double T, const omcool::tls::TlsModel& m) const {
        const double E = eps * omcool::units::k_B * T;
        const double rate = omcool::tls::max_relaxation_rate(E, T, m.material);
        return rate > 0.0 ? m.omega_m_bare / rate : 0.0;  // 0 encodes "infinite a"
    }

    double q_inv_tunneling(double T, const omcool::tls::TlsModel& m) const {
        const double C = omcool::tls::coupling_constant_q(m.material);
        auto f = [&](double eps) {
            if (eps == 0.0) return 0.0;
            const double sech = 1.0 / std::cosh(0.5 * eps);
            const double a = a_of_eps(eps, T, m);
            if (a == 0.0) return 0.0;
            return 0.25 * sech * sech * a * inner_damping_raw(a, inner_n);
        };
        return 2.0 * C * simpson(f, 0.0, 50.0, outer_n);
    }

    double freq_shift_tunneling(double T, const omcool::tls::TlsModel& m) const {
        const double C = omcool::tls::coupling_constant_omega(m.material);
        auto f = [&](double eps) {
            if (eps == 0.0) return 0.0;
            const double sech = 1.0 / std::cosh(0.5 * eps);
            const double a = a_of_eps(eps, T, m);
            if (a == 0.0) return 0.0;
            return 0.25 * sech * sech * inner_spring_raw(a, inner_n);
        };
        return -m.omega_m_bare * C * simpson(f, 0.0, 50.0, outer_n);
    }
};

// time-domain steady state of da/dt = (i(det +/- gamma/2) - kappa/2) a +
// sqrt(eta_c kappa / 2) s_in, by RK4 until |da/dt| is negligible
inline std::complex<double> ode_steady_field(double detuning, double gamma_half_signed,
                                             double kappa, double drive_amp,
                                             double duration_kappas = 60.0) {
    using cd = std::complex<double>;
    const cd coeff(-0.5 * kappa, detuning + gamma_half_signed);
    const cd drive(drive_amp, 0.0);
    auto rhs = [&](const cd& a) { return coeff * a + drive; };
    cd a(0.0, 0.0);
    const double dt = 0.02 / (std::abs(coeff) + kappa);
    const auto steps = static_cast<std::size_t>(duration_kappas / (kappa * dt)) + 1;
    for (std::size_t i = 0; i < steps; ++i) {
        const cd k1 = rhs(a);
        const cd k2 = rhs(a + 0.5 * dt * k1);
        const cd k3 = rhs(a + 0.5 * dt * k2);
        const cd k4 = rhs(a + dt * k3);
        a += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    }
    return a;
}

// deterministic Gaussian noise stream
class Noise {
  public:
    explicit Noise(unsigned seed) : rng_(seed) {}
    double gauss() { return dist_(rng_); }

  private:
    std::mt19937 rng_;
    std::normal_distribution<double> dist_{0.0, 1.0};
};

}  // namespace oracles
