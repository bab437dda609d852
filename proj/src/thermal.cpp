#include "omcool/thermal.hpp"

#include <cassert>
#include <cmath>

namespace omcool::thermal {

double force_noise_quantum(double g0, double m_eff, double P_in, double eta_c, double omega_c,
                           double omega_m) {
    if (!(m_eff > 0.0 && omega_c > 0.0 && omega_m > 0.0))
        throw std::domain_error("force_noise_quantum: m_eff, omega_c, omega_m must be > 0");
    if (P_in < 0.0 || eta_c < 0.0 || eta_c > 1.0)
        throw std::domain_error("force_noise_quantum: P_in >= 0 and eta_c in [0, 1] required");

    const double primary = 4.0 * g0 * g0 * m_eff * P_in * eta_c / (omega_c * omega_m);

    // identical via g0 = G x_zpf, x_zpf^2 = hbar/(2 m omega)
    const double x_zpf2 = units::hbar / (2.0 * m_eff * omega_m);
    const double G2 = g0 * g0 / x_zpf2;
    const double alternate = 2.0 * units::hbar * G2 * P_in * eta_c / (omega_c * omega_m * omega_m);
    assert(primary == 0.0 || std::abs(alternate - primary) <= 1e-9 * std::abs(primary));
    (void)alternate;

    return primary;
}

NoiseBudget make_noise_budget(double S_FF_the, double S_FF_cryo, double S_FF_qba,
                              double S_xx_imp) {
    if (S_FF_the < 0.0 || S_FF_cryo < 0.0 || S_FF_qba < 0.0 || S_xx_imp < 0.0)
        throw std::domain_error("make_noise_budget: spectral densities must be >= 0");
    NoiseBudget b;
    b.S_FF_the = S_FF_the;
    b.S_FF_cryo = S_FF_cryo;
    b.S_FF_qba = S_FF_qba;
    b.S_xx_imp = S_xx_imp;
    b.S_FF_ba = S_FF_the - S_FF_cryo;
    if (b.S_FF_ba < 0.0) {
        b.S_FF_ba = 0.0;
        b.ba_clamped = true;
    }
    b.product_over_hbar2 = imprecision_backaction_product(S_xx_imp, S_FF_the);
    return b;
}

}  // namespace omcool::thermal
