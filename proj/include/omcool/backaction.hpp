#pragma once

// Dynamical backaction in the presence of mode splitting: the sideband
// function f(Omega), effective susceptibility, effective damping/frequency,
// and the transduction correction for the phase-modulation calibration tone.
//
// Two algebraically identical routes are kept deliberately separate: the
// main formulation built on g0 = G x_zpf, and a supplement-style route built
// on hbar G^2 against the bare susceptibility. Tests hold them together.

#include <complex>

#include "omcool/cavity.hpp"

namespace omcool::backaction {

struct MechanicalMode {
    double m_eff;    // kg
    double omega_m;  // rad/s, temperature-corrected
    double gamma_m;  // rad/s, temperature-corrected
    double x_zpf;    // m, derived
    double g0;       // rad/s, derived g0 = G x_zpf

    // x_zpf and g0 are always derived here, never set independently.
    MechanicalMode(double m_eff_, double omega_m_, double gamma_m_, double G);
};

// chi_m(Omega) = 1 / (m_eff (Omega_m^2 - Omega^2 - i Gamma_m Omega)), m/N
std::complex<double> bare_susceptibility(double Omega, const MechanicalMode& mech);

// f(Omega) = 2 g0^2 sum_pm |a_pm|^2 (L_pm(det + Omega) - L_pm(det - Omega)*), rad/s
std::complex<double> backaction_function(double Omega, const cavity::FieldPair& fields,
                                         double detuning, const cavity::CavityConfig& cav,
                                         double g0);

// chi_eff(Omega)^-1 = m_eff (Omega_m^2 - Omega^2 - i Gamma_m Omega
//                            - i Omega_m f(Omega))
std::complex<double> effective_susceptibility(double Omega, const MechanicalMode& mech,
                                              const cavity::FieldPair& fields, double detuning,
                                              const cavity::CavityConfig& cav);

struct DampingResult {
    double value;  // rad/s
    bool stable;   // false when value <= 0 (parametric amplification regime)
};

// Gamma_eff = Gamma_m + Re f(Omega_m). Instability is a flagged condition,
// not an exception; detuning sweeps legitimately cross it.
DampingResult effective_damping(const MechanicalMode& mech, const cavity::FieldPair& fields,
                                double detuning, const cavity::CavityConfig& cav);

// Omega_eff = Omega_m + Im f(Omega_m)/2
double effective_frequency(const MechanicalMode& mech, const cavity::FieldPair& fields,
                           double detuning, const cavity::CavityConfig& cav);

struct EffectiveDynamics {
    double gamma_eff;       // rad/s
    double omega_eff;       // rad/s
    bool stable;            // gamma_eff > 0
    double coupling_ratio;  // max(|Re f|, |Im f|) / kappa
    bool weak_coupling;     // coupling_ratio <= 0.1, validity of the approximations
};

// One-call evaluation of both effective quantities plus the weak-coupling
// validity guard. With refine_at_omega_eff, f is re-evaluated once at the
// shifted frequency (diagnostic; off by default, matching the model as
// fitted in which f is taken at Omega_m).
EffectiveDynamics effective_dynamics(const MechanicalMode& mech, const cavity::FieldPair& fields,
                                     double detuning, const cavity::CavityConfig& cav,
                                     bool refine_at_omega_eff = false);

// |chi_eff(Omega_mod) / chi_m(Omega_mod)|: the factor by which dynamical
// backaction modifies the transduction of the calibration phase modulation.
double calibration_transduction_factor(double Omega_mod, const MechanicalMode& mech,
                                       const cavity::FieldPair& fields, double detuning,
                                       const cavity::CavityConfig& cav);

// Supplement-style route, written against hbar G^2 and chi_m^-1 rather than
// g0 and f. Kept independent of the functions above.
std::complex<double> effective_susceptibility_gsq(double Omega, const MechanicalMode& mech,
                                                  const cavity::FieldPair& fields,
                                                  double detuning,
                                                  const cavity::CavityConfig& cav, double G);
double effective_damping_gsq(const MechanicalMode& mech, const cavity::FieldPair& fields,
                             double detuning, const cavity::CavityConfig& cav, double G);
double effective_frequency_gsq(const MechanicalMode& mech, const cavity::FieldPair& fields,
                               double detuning, const cavity::CavityConfig& cav, double G);

}  // namespace omcool::backaction
