#pragma once

// Physical constants (CODATA, fixed) and the frequency conventions used
// throughout: all internal math is in angular frequency (rad/s) and SI base
// units. Plain Hz, nm, ... appear only at the I/O boundary.

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace omcool::units {

inline constexpr double hbar = 1.054571817e-34;   // J s
inline constexpr double k_B = 1.380649e-23;       // J/K
inline constexpr double c_light = 2.99792458e8;   // m/s

inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Hz -> rad/s
inline double angular(double f_hz) { return two_pi * f_hz; }

// rad/s -> Hz
inline double hz(double omega) { return omega / two_pi; }

// vacuum wavelength [m] -> optical angular frequency [rad/s]
inline double optical_angular_frequency(double lambda_m) {
    if (!(lambda_m > 0.0))
        throw std::invalid_argument("optical_angular_frequency: wavelength must be > 0");
    return two_pi * c_light / lambda_m;
}

}  // namespace omcool::units
