#pragma once

// Two-level-system physics of the mechanical oscillator: temperature
// dependence of its resonance frequency and damping from tunneling-assisted
// relaxation and resonant phonon-TLS interaction, plus the inverse map that
// turns a calibrated frequency or damping observation into a sample
// temperature.
//
// Conventions: the tunneling double integrals are evaluated with the outer
// substitution eps = E/(k_B T) on (0, 50] and the inner substitution
// v = sqrt(1-u), which removes the derivative singularity at u = 1. Both
// shifts use Pbar_Omega, both damping terms use Pbar_Q; the supplement fits
// the two observables with different TLS densities.

#include <optional>
#include <utility>
#include <vector>

#include "omcool/errors.hpp"

namespace omcool::tls {

struct TlsMaterial {
    double B = 0.0;           // J, deformation-potential coupling
    double rho = 0.0;         // kg/m^3
    double c_s = 0.0;         // m/s, speed of sound
    double Pbar_Q = 0.0;      // m^-3, TLS density backing the damping fit
    double Pbar_Omega = 0.0;  // m^-3, TLS density backing the frequency fit
    double T0 = 1.0;          // K, reference for the resonant frequency shift
};

void validate(const TlsMaterial& mat);

// dimensionless TLS coupling constants C = Pbar B^2 / (rho c_s^2)
double coupling_constant_q(const TlsMaterial& mat);
double coupling_constant_omega(const TlsMaterial& mat);

struct TlsModel {
    TlsMaterial material;
    double omega_m_bare = 0.0;  // rad/s, temperature-independent part of Omega_m
    double q_cla_inv = 0.0;     // clamping loss, 1/Q_cla
    std::optional<double> arrhenius_V;     // J, barrier height
    std::optional<double> arrhenius_tau0;  // s, in-well oscillation period
};

void validate(const TlsModel& model);

// Supported temperature range; the TLS regimes are only trusted here and
// evaluation outside is an error, not an extrapolation.
inline constexpr double t_min_supported = 0.1;  // K
inline constexpr double t_max_supported = 10.0; // K

// -d n0/dE of the two-level occupation n0 = 1/(exp(E/kT)+1), in 1/J.
// Closed form sech^2(E/2kT)/(4kT).
double occupation_derivative(double E, double T);

// Maximum TLS relaxation rate 1/tau_m = (3/c_s^5)(B^2/2 pi rho hbar^4)
// E^3 coth(E/2kT), 1/s. Finite (-> 0) as E -> 0.
double max_relaxation_rate(double E, double T, const TlsMaterial& mat);

// Inner integrals over the relaxation-time distribution, parametrized by
// a = Omega_m tau_m:
//   damping: int_0^1 sqrt(1-u) / (u^2 + a^2) du
//   spring:  int_0^1 u sqrt(1-u) / (u^2 + a^2) du
double inner_integral_damping(double a);
double inner_integral_spring(double a);

// Tunneling-relaxation contributions (double integrals over the thermal TLS
// ensemble). Throw QuadratureError when the tolerance is not reached.
double q_inv_tunneling(double T, const TlsModel& model);
double freq_shift_tunneling(double T, const TlsModel& model);  // rad/s, < 0

// Same values together with the propagated quadrature error bound (outer
// panel errors plus the worst inner relative error scaled into the result).
// rel_tol overrides the default 1e-7 per-integral tolerance.
struct Estimate {
    double value;
    double error;
};
Estimate q_inv_tunneling_estimate(double T, const TlsModel& model, double rel_tol = 1e-7);
Estimate freq_shift_tunneling_estimate(double T, const TlsModel& model, double rel_tol = 1e-7);

// Resonant phonon-TLS interaction, closed forms.
double q_inv_resonant(double T, double omega_m, const TlsMaterial& mat);
double freq_shift_resonant(double T, double omega_m, const TlsMaterial& mat);  // rad/s

// Thermally activated relaxation rate 1/tau_th = (1/tau0) exp(-V/kT).
// Computed for diagnostics only; it enters neither Omega_m(T) nor Q^-1(T),
// matching the supplement fit which omits it below 3 K.
double arrhenius_rate(double T, const TlsModel& model);

// Omega_m(T) = omega_m_bare + freq_shift_tunneling + freq_shift_resonant
double mechanical_frequency(double T, const TlsModel& model);

// Gamma_m(T) = Omega_m(T) (1/Q_cla + Q_tun^-1(T) + Q_res^-1(T))
double mechanical_damping(double T, const TlsModel& model);

enum class Observable { frequency, damping };

// Invert the calibrated model: find T in [t_lo, t_hi] with
// mechanical_frequency(T) (or mechanical_damping(T)) equal to `observed` to
// 1e-10 relative. A 64-point scan locates sign changes first; zero matches
// throw UnattainableObservation, multiple matches throw AmbiguousInversion
// with all roots resolved.
double thermometer(double observed, Observable observable, const TlsModel& model,
                   double t_lo, double t_hi);

}  // namespace omcool::tls
