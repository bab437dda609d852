#pragma once

// CSV file formats:
//   Spectrum: '#'-prefixed metadata lines (units=, convention=, optional
//     f_mod_hz=, phase_depth_rad=, tone_x_eq_m=), a 'freq_hz,psd' header
//     row, then data rows. Values are written with 17 significant digits so
//     parse -> serialize round-trips bit-exactly for finite values.
//   Detuning series: optional '# p_in_w=' / '# t_cryo_k=' metadata, a header
//     row naming the present columns, then data rows. Missing sigma columns
//     default to Gamma_eff/20 (frequency) and Gamma_eff/5 (damping); the
//     t_noise_k column is optional per row.
// Frequencies are plain Hz in files and converted to rad/s on load.

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "omcool/fitseries.hpp"
#include "omcool/spectra.hpp"

namespace omcool::io {

void write_spectrum(std::ostream& os, const spectra::Spectrum& s);
void write_spectrum_file(const std::string& path, const spectra::Spectrum& s);
spectra::Spectrum read_spectrum(std::istream& is, const std::string& origin = "<stream>");
spectra::Spectrum read_spectrum_file(const std::string& path);

struct DetuningSeries {
    std::vector<fitseries::DetuningPoint> points;
    std::optional<double> p_in_w;
    std::optional<double> t_cryo_k;
};

void write_series(std::ostream& os, const DetuningSeries& series);
void write_series_file(const std::string& path, const DetuningSeries& series);
DetuningSeries read_series(std::istream& is, const std::string& origin = "<stream>");
DetuningSeries read_series_file(const std::string& path);

}  // namespace omcool::io
