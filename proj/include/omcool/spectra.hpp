#pragma once

// Displacement-noise spectra: synthesis from the effective susceptibility,
// absolute calibration against the phase-modulation tone, Lorentzian peak
// fitting, and noise thermometry by spectral integration.
//
// All spectra are double-sided symmetrized densities sampled on a positive
// frequency grid in Hz. Variances integrate the fitted peak over angular
// frequency and include the mirrored negative-frequency peak.

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "omcool/backaction.hpp"
#include "omcool/cavity.hpp"

namespace omcool::spectra {

enum class Units { raw_detector, meters_squared };

struct CalibrationTone {
    double f_mod = 0.0;  // Hz
    double depth = 0.0;  // rad, phase-modulation depth
    double known_displacement_equiv = 0.0;  // m, rms displacement the tone represents
};

struct Spectrum {
    std::vector<double> freq;  // Hz, strictly increasing
    std::vector<double> psd;   // value^2 / Hz
    Units units = Units::meters_squared;
    std::optional<CalibrationTone> calib;

    static constexpr const char* convention = "double-sided symmetrized";
};

void validate(const Spectrum& s);

// S_xx(Omega) = S_xx_imp + |chi_eff(Omega)|^2 S_FF, pointwise on the grid,
// with white force noise and white imprecision.
Spectrum synthesize_spectrum(std::vector<double> grid_hz,
                             const backaction::MechanicalMode& mech,
                             const cavity::FieldPair& fields, double detuning,
                             const cavity::CavityConfig& cav, double S_FF, double S_xx_imp);

// Add the calibration tone as a delta-like peak in the bin containing f_mod.
// The injected power is (transduction * known_displacement_equiv)^2, i.e.
// the tone as it appears after optomechanical de-amplification.
void inject_tone(Spectrum& s, const CalibrationTone& tone, double transduction);

// Rescale a raw-detector spectrum to absolute displacement units using the
// integrated calibration-tone peak (+/- 3 bins, rectangular-bin assumption).
// The tone's displacement-equivalent reference is corrected by the
// transduction factor |chi_eff/chi_m| at the modulation frequency.
Spectrum calibrate_spectrum(const Spectrum& raw, const CalibrationTone& tone,
                            double transduction);

struct PeakFit {
    double omega_eff = 0.0;   // rad/s
    double gamma_eff = 0.0;   // rad/s (FWHM in angular units)
    double area = 0.0;        // m^2, total variance <x^2> including the mirrored peak
    double background = 0.0;  // m^2/Hz
    double residual_norm = 0.0;  // rms relative residual over the window
};

// Least-squares fit of background + (A/pi)(Gamma/2)/((Omega-Omega0)^2 +
// (Gamma/2)^2) over the window (symmetric-Lorentzian approximation, valid
// for Q >> 1). Throws on degenerate windows, missing peaks and
// non-convergence.
PeakFit fit_lorentzian(const Spectrum& spec, std::pair<double, double> window_hz);

// Equipartition: T_eff = m_eff Omega_eff^2 <x^2> / k_B, background excluded.
double noise_temperature(const PeakFit& fit, double m_eff);

}  // namespace omcool::spectra
