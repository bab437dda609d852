#include "omcool/backaction.hpp"

#include <cmath>
#include <stdexcept>

#include "omcool/units.hpp"

namespace omcool::backaction {

using cavity::Branch;
using std::complex;

MechanicalMode::MechanicalMode(double m_eff_, double omega_m_, double gamma_m_, double G)
    : m_eff(m_eff_), omega_m(omega_m_), gamma_m(gamma_m_) {
    if (!(m_eff > 0.0 && omega_m > 0.0 && gamma_m > 0.0))
        throw std::invalid_argument("MechanicalMode: m_eff, omega_m, gamma_m must be > 0");
    x_zpf = std::sqrt(units::hbar / (2.0 * m_eff * omega_m));
    g0 = G * x_zpf;
}

complex<double> bare_susceptibility(double Omega, const MechanicalMode& mech) {
    const complex<double> denom(mech.omega_m * mech.omega_m - Omega * Omega,
                                -mech.gamma_m * Omega);
    return 1.0 / (mech.m_eff * denom);
}

complex<double> backaction_function(double Omega, const cavity::FieldPair& fields,
                                    double detuning, const cavity::CavityConfig& cav,
                                    double g0) {
    const complex<double> sp =
        std::norm(fields.a_plus) *
        (cavity::lorentzian_response(detuning + Omega, Branch::plus, cav) -
         std::conj(cavity::lorentzian_response(detuning - Omega, Branch::plus, cav)));
    const complex<double> sm =
        std::norm(fields.a_minus) *
        (cavity::lorentzian_response(detuning + Omega, Branch::minus, cav) -
         std::conj(cavity::lorentzian_response(detuning - Omega, Branch::minus, cav)));
    return 2.0 * g0 * g0 * (sp + sm);
}

complex<double> effective_susceptibility(double Omega, const MechanicalMode& mech,
                                         const cavity::FieldPair& fields, double detuning,
                                         const cavity::CavityConfig& cav) {
    const complex<double> f = backaction_function(Omega, fields, detuning, cav, mech.g0);
    const complex<double> inv =
        mech.m_eff * (complex<double>(mech.omega_m * mech.omega_m - Omega * Omega,
                                      -mech.gamma_m * Omega) -
                      complex<double>(0.0, mech.omega_m) * f);
    return 1.0 / inv;
}

DampingResult effective_damping(const MechanicalMode& mech, const cavity::FieldPair& fields,
                                double detuning, const cavity::CavityConfig& cav) {
    const double g =
        mech.gamma_m +
        backaction_function(mech.omega_m, fields, detuning, cav, mech.g0).real();
    return {g, g > 0.0};
}

double effective_frequency(const MechanicalMode& mech, const cavity::FieldPair& fields,
                           double detuning, const cavity::CavityConfig& cav) {
    return mech.omega_m +
           0.5 * backaction_function(mech.omega_m, fields, detuning, cav, mech.g0).imag();
}

EffectiveDynamics effective_dynamics(const MechanicalMode& mech, const cavity::FieldPair& fields,
                                     double detuning, const cavity::CavityConfig& cav,
                                     bool refine_at_omega_eff) {
    complex<double> f = backaction_function(mech.omega_m, fields, detuning, cav, mech.g0);
    if (refine_at_omega_eff) {
        const double omega_1 = mech.omega_m + 0.5 * f.imag();
        f = backaction_function(omega_1, fields, detuning, cav, mech.g0);
    }
    EffectiveDynamics out;
    out.gamma_eff = mech.gamma_m + f.real();
    out.omega_eff = mech.omega_m + 0.5 * f.imag();
    out.stable = out.gamma_eff > 0.0;
    out.coupling_ratio = std::max(std::abs(f.real()), std::abs(f.imag())) / cav.kappa;
    out.weak_coupling = out.coupling_ratio <= 0.1;
    return out;
}

double calibration_transduction_factor(double Omega_mod, const MechanicalMode& mech,
                                       const cavity::FieldPair& fields, double detuning,
                                       const cavity::CavityConfig& cav) {
    return std::abs(effective_susceptibility(Omega_mod, mech, fields, detuning, cav)) /
           std::abs(bare_susceptibility(Omega_mod, mech));
}

// ---- supplement-style route --------------------------------------------

namespace {

complex<double> sideband_sum(double Omega, const cavity::FieldPair& fields, double detuning,
                             const cavity::CavityConfig& cav) {
    return std::norm(fields.a_plus) *
               (cavity::lorentzian_response(detuning + Omega, Branch::plus, cav) -
                std::conj(cavity::lorentzian_response(detuning - Omega, Branch::plus, cav))) +
           std::norm(fields.a_minus) *
               (cavity::lorentzian_response(detuning + Omega, Branch::minus, cav) -
                std::conj(cavity::lorentzian_response(detuning - Omega, Branch::minus, cav)));
}

}  // namespace

complex<double> effective_susceptibility_gsq(double Omega, const MechanicalMode& mech,
                                             const cavity::FieldPair& fields, double detuning,
                                             const cavity::CavityConfig& cav, double G) {
    const complex<double> chi_m_inv =
        mech.m_eff * complex<double>(mech.omega_m * mech.omega_m - Omega * Omega,
                                     -mech.gamma_m * Omega);
    const complex<double> inv = chi_m_inv - complex<double>(0.0, units::hbar) * G * G *
                                                sideband_sum(Omega, fields, detuning, cav);
    return 1.0 / inv;
}

double effective_damping_gsq(const MechanicalMode& mech, const cavity::FieldPair& fields,
                             double detuning, const cavity::CavityConfig& cav, double G) {
    const double pref = 2.0 * mech.x_zpf * mech.x_zpf * G * G;
    return mech.gamma_m +
           pref * sideband_sum(mech.omega_m, fields, detuning, cav).real();
}

double effective_frequency_gsq(const MechanicalMode& mech, const cavity::FieldPair& fields,
                               double detuning, const cavity::CavityConfig& cav, double G) {
    const double pref = mech.x_zpf * mech.x_zpf * G * G;
    return mech.omega_m +
           pref * sideband_sum(mech.omega_m, fields, detuning, cav).imag();
}

}  // namespace omcool::backaction
