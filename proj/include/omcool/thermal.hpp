#pragma once

// Laser-heating model, effective temperature under cooling, phonon
// occupancy, and the force-noise budget (thermal / cryostat / excess
// backaction / quantum backaction) with the imprecision-backaction product.

#include <cmath>
#include <stdexcept>

#include "omcool/cavity.hpp"
#include "omcool/units.hpp"

namespace omcool::thermal {

struct Environment {
    double T_cryo = 0.0;    // K
    double dT_stray = 0.0;  // K, laser-induced stray heating (detuning-independent)
    double beta = 0.0;      // K/W, temperature rise per absorbed power
};

inline void validate(const Environment& env) {
    if (!(env.T_cryo > 0.0)) throw std::invalid_argument("environment: T_cryo must be > 0");
    if (env.dT_stray < 0.0 || env.beta < 0.0)
        throw std::invalid_argument("environment: dT_stray and beta must be >= 0");
}

// T = T_cryo + dT_stray + beta * absorbed_power
inline double sample_temperature(const cavity::Drive& drive, const cavity::CavityConfig& cav,
                                 const Environment& env) {
    return env.T_cryo + env.dT_stray + env.beta * cavity::absorbed_power(drive, cav);
}

// Same heating written against the composite beta*kappa_abs, for fits where
// only the product is constrained: dT_WGM = product * photons * hbar omega_l.
inline double sample_temperature_from_product(double T_cryo, double dT_stray,
                                              double heating_product, double photons,
                                              double omega_l) {
    return T_cryo + dT_stray + heating_product * photons * units::hbar * omega_l;
}

// T_eff = T Gamma_m(T) / Gamma_eff
inline double effective_temperature(double T, double gamma_m_T, double gamma_eff) {
    if (!(gamma_eff > 0.0))
        throw std::domain_error(
            "effective_temperature: gamma_eff <= 0 (no steady state in this model)");
    return T * gamma_m_T / gamma_eff;
}

// Bose-Einstein occupancy 1/(exp(hbar omega / kT) - 1)
inline double mean_occupancy(double T_eff, double omega_eff) {
    if (!(T_eff > 0.0 && omega_eff > 0.0))
        throw std::domain_error("mean_occupancy: T_eff and omega_eff must be > 0");
    return 1.0 / std::expm1(units::hbar * omega_eff / (units::k_B * T_eff));
}

// classical (equipartition) occupancy kT/(hbar omega), for comparisons with
// noise-temperature conventions
inline double mean_occupancy_classical(double T_eff, double omega_eff) {
    if (!(T_eff > 0.0 && omega_eff > 0.0))
        throw std::domain_error("mean_occupancy_classical: T_eff and omega_eff must be > 0");
    return units::k_B * T_eff / (units::hbar * omega_eff);
}

// P(n=0) = 1/(1 + nbar)
inline double ground_state_probability(double n_bar) {
    if (n_bar < 0.0) throw std::domain_error("ground_state_probability: n_bar must be >= 0");
    return 1.0 / (1.0 + n_bar);
}

// S_FF^the = 2 m_eff k_B T_eff Gamma_eff (double-sided symmetrized), N^2/Hz
inline double force_noise_thermal(double m_eff, double T_eff, double gamma_eff) {
    return 2.0 * m_eff * units::k_B * T_eff * gamma_eff;
}

// S_FF^cryo = 2 m_eff k_B T_cryo Gamma_m(T_cryo)
inline double force_noise_cryo(double m_eff, double T_cryo, double gamma_m_at_cryo) {
    return 2.0 * m_eff * units::k_B * T_cryo * gamma_m_at_cryo;
}

// Quantum measurement backaction in the resolved-sideband regime,
// S_FF^qba = 4 g0^2 m_eff P_in eta_c / (omega_c Omega_m). The equivalent
// 2 hbar G^2 P_in eta_c / (omega_c Omega_m^2) form is evaluated as a
// consistency cross-check.
double force_noise_quantum(double g0, double m_eff, double P_in, double eta_c, double omega_c,
                           double omega_m);

// sqrt(S_xx_imp * S_FF) in units of hbar/2
inline double imprecision_backaction_product(double S_xx_imp, double S_FF) {
    if (S_xx_imp < 0.0 || S_FF < 0.0)
        throw std::domain_error("imprecision_backaction_product: inputs must be >= 0");
    return std::sqrt(S_xx_imp * S_FF) / (0.5 * units::hbar);
}

struct NoiseBudget {
    double S_FF_the = 0.0;   // N^2/Hz
    double S_FF_cryo = 0.0;  // N^2/Hz
    double S_FF_ba = 0.0;    // N^2/Hz, the - cryo, clamped at 0
    double S_FF_qba = 0.0;   // N^2/Hz
    double S_xx_imp = 0.0;   // m^2/Hz
    double product_over_hbar2 = 0.0;  // sqrt(S_xx_imp S_FF_the) / (hbar/2)
    bool ba_clamped = false;  // true when the - cryo came out slightly negative
};

// Assemble the budget; subtraction of two measured quantities may come out
// slightly negative, which clamps to zero with a warning flag instead of
// aborting.
NoiseBudget make_noise_budget(double S_FF_the, double S_FF_cryo, double S_FF_qba,
                              double S_xx_imp);

}  // namespace omcool::thermal
