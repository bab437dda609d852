#pragma once

// Split whispering-gallery-mode optics. Backscattering couples the two
// counterpropagating modes into symmetric/antisymmetric eigenmodes a+/a-
// whose resonances sit at +/- gamma_split/2 around the mean cavity
// frequency. Both are driven by the same input field.

#include <complex>
#include <stdexcept>

#include "omcool/units.hpp"

namespace omcool::cavity {

struct CavityConfig {
    double omega_c = 0.0;      // rad/s, mean WGM frequency (shift-corrected)
    double kappa = 0.0;        // rad/s, total linewidth
    double kappa_ex = 0.0;     // rad/s, taper coupling rate
    double gamma_split = 0.0;  // rad/s, mode splitting
    double G = 0.0;            // rad/s per m, frequency pull d(omega_c)/dx
    double kappa_abs = 0.0;    // rad/s, photon absorption rate

    double eta_c() const { return kappa > 0.0 ? kappa_ex / kappa : 0.0; }
};

inline void validate(const CavityConfig& c) {
    if (!(c.kappa > 0.0)) throw std::invalid_argument("cavity: kappa must be > 0");
    if (c.kappa_ex < 0.0 || c.kappa_ex > c.kappa)
        throw std::invalid_argument("cavity: kappa_ex must lie in [0, kappa]");
    if (c.kappa_abs < 0.0 || c.kappa_abs > c.kappa - c.kappa_ex)
        throw std::invalid_argument("cavity: kappa_abs must lie in [0, kappa - kappa_ex]");
    if (c.gamma_split < 0.0) throw std::invalid_argument("cavity: gamma_split must be >= 0");
}

struct Drive {
    double P_in = 0.0;     // W
    double detuning = 0.0; // rad/s, laser frequency minus mean cavity frequency
    double lambda = 0.0;   // m

    double omega_l() const { return units::optical_angular_frequency(lambda); }
    // input field amplitude, sqrt(photons/s); taken real and positive
    double s_in() const { return std::sqrt(P_in / (units::hbar * omega_l())); }
};

struct FieldPair {
    std::complex<double> a_plus{0.0, 0.0};   // sqrt(photons)
    std::complex<double> a_minus{0.0, 0.0};
};

enum class Branch { plus, minus };

// L_sigma(detuning) = 1 / (-i(detuning +/- gamma/2) + kappa/2), units s.
// |L| peaks at detuning = -/+ gamma/2 with value 2/kappa.
inline std::complex<double> lorentzian_response(double detuning, Branch branch,
                                                const CavityConfig& cav) {
    const double sign = branch == Branch::plus ? 1.0 : -1.0;
    return 1.0 / std::complex<double>(0.5 * cav.kappa,
                                      -(detuning + sign * 0.5 * cav.gamma_split));
}

// Mean intracavity fields a_pm = sqrt(kappa_ex/2) L_pm(detuning) s_in.
inline FieldPair mean_fields(const Drive& drive, const CavityConfig& cav) {
    const double amp = std::sqrt(0.5 * cav.kappa_ex) * drive.s_in();
    FieldPair out;
    out.a_plus = amp * lorentzian_response(drive.detuning, Branch::plus, cav);
    out.a_minus = amp * lorentzian_response(drive.detuning, Branch::minus, cav);
    return out;
}

// |a+|^2 + |a-|^2. The a+ a-* cross term has no azimuthally symmetric
// component and never couples to the breathing mode, so it is absent here.
inline double total_photons(const FieldPair& f) {
    return std::norm(f.a_plus) + std::norm(f.a_minus);
}

// kappa_abs (|a+|^2 + |a-|^2) hbar omega_l, W
inline double absorbed_power(const Drive& drive, const CavityConfig& cav) {
    return cav.kappa_abs * total_photons(mean_fields(drive, cav)) * units::hbar *
           drive.omega_l();
}

// Static radiation-pressure displacement of the mechanical mode,
// xbar = -(hbar G / m_eff Omega_m^2) (|a+|^2 + |a-|^2).
inline double static_displacement(const FieldPair& fields, double m_eff, double omega_m,
                                  double G) {
    if (!(m_eff > 0.0) || !(omega_m > 0.0))
        throw std::invalid_argument("static_displacement: m_eff and omega_m must be > 0");
    return -units::hbar * G * total_photons(fields) / (m_eff * omega_m * omega_m);
}

}  // namespace omcool::cavity
