#include "omcool/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "omcool/optim.hpp"
#include "omcool/units.hpp"

namespace omcool::spectra {

namespace {

std::size_t bin_of(const Spectrum& s, double f) {
    const auto it = std::lower_bound(s.freq.begin(), s.freq.end(), f);
    if (it == s.freq.begin()) return 0;
    if (it == s.freq.end()) return s.freq.size() - 1;
    const std::size_t hi = static_cast<std::size_t>(it - s.freq.begin());
    return (f - s.freq[hi - 1] < s.freq[hi] - f) ? hi - 1 : hi;
}

double bin_width(const Spectrum& s, std::size_t i) {
    if (i + 1 < s.freq.size()) return s.freq[i + 1] - s.freq[i];
    return s.freq[i] - s.freq[i - 1];
}

}  // namespace

void validate(const Spectrum& s) {
    if (s.freq.size() != s.psd.size())
        throw std::invalid_argument("spectrum: freq and psd lengths differ");
    if (s.freq.size() < 8) throw std::invalid_argument("spectrum: fewer than 8 points");
    for (std::size_t i = 0; i + 1 < s.freq.size(); ++i)
        if (!(s.freq[i] < s.freq[i + 1]))
            throw std::invalid_argument("spectrum: freq must be strictly increasing");
    for (const double p : s.psd)
        if (!(p >= 0.0)) throw std::invalid_argument("spectrum: psd must be >= 0");
}

Spectrum synthesize_spectrum(std::vector<double> grid_hz,
                             const backaction::MechanicalMode& mech,
                             const cavity::FieldPair& fields, double detuning,
                             const cavity::CavityConfig& cav, double S_FF, double S_xx_imp) {
    Spectrum out;
    out.freq = std::move(grid_hz);
    out.psd.resize(out.freq.size());
    out.units = Units::meters_squared;
    for (std::size_t i = 0; i < out.freq.size(); ++i) {
        const double Omega = units::angular(out.freq[i]);
        const auto chi = backaction::effective_susceptibility(Omega, mech, fields, detuning, cav);
        out.psd[i] = S_xx_imp + std::norm(chi) * S_FF;
    }
    validate(out);
    return out;
}

void inject_tone(Spectrum& s, const CalibrationTone& tone, double transduction) {
    validate(s);
    if (!(tone.f_mod > s.freq.front() && tone.f_mod < s.freq.back()))
        throw std::invalid_argument("inject_tone: f_mod outside the spectrum span");
    const std::size_t i = bin_of(s, tone.f_mod);
    const double amp = transduction * tone.known_displacement_equiv;
    s.psd[i] += amp * amp / bin_width(s, i);
    s.calib = tone;
}

Spectrum calibrate_spectrum(const Spectrum& raw, const CalibrationTone& tone,
                            double transduction) {
    validate(raw);
    if (raw.units != Units::raw_detector)
        throw std::invalid_argument("calibrate_spectrum: input must be in raw detector units");
    if (!(tone.f_mod > raw.freq.front() && tone.f_mod < raw.freq.back())) {
        std::ostringstream msg;
        msg << "calibrate_spectrum: tone at " << tone.f_mod << " Hz outside spectrum span ["
            << raw.freq.front() << ", " << raw.freq.back() << "] Hz";
        throw std::invalid_argument(msg.str());
    }
    if (!(tone.known_displacement_equiv > 0.0) || !(transduction > 0.0))
        throw std::invalid_argument(
            "calibrate_spectrum: tone displacement equivalent and transduction must be > 0");

    const std::size_t center = bin_of(raw, tone.f_mod);
    const std::size_t n = raw.freq.size();

    // local background: median over an annulus around the tone window
    std::vector<double> bg_samples;
    for (std::size_t i = center >= 25 ? center - 25 : 0; i < std::min(center + 26, n); ++i) {
        const std::size_t d = i > center ? i - center : center - i;
        if (d > 4) bg_samples.push_back(raw.psd[i]);
    }
    if (bg_samples.size() < 8) {
        std::ostringstream msg;
        msg << "calibrate_spectrum: tone at " << tone.f_mod
            << " Hz too close to the spectrum edge to estimate background";
        throw std::invalid_argument(msg.str());
    }
    std::nth_element(bg_samples.begin(), bg_samples.begin() + bg_samples.size() / 2,
                     bg_samples.end());
    const double bg = bg_samples[bg_samples.size() / 2];

    double peak = 0.0;
    double tone_power = 0.0;  // raw units (integrated over Hz)
    for (std::size_t i = center >= 3 ? center - 3 : 0; i < std::min(center + 4, n); ++i) {
        peak = std::max(peak, raw.psd[i]);
        tone_power += std::max(raw.psd[i] - bg, 0.0) * bin_width(raw, i);
    }
    const double snr = bg > 0.0 ? peak / bg : std::numeric_limits<double>::infinity();
    if (!(snr > 5.0)) {
        std::ostringstream msg;
        msg << "calibrate_spectrum: tone SNR " << snr << " at " << tone.f_mod
            << " Hz below the required 5";
        throw std::runtime_error(msg.str());
    }
    if (!(tone_power > 0.0)) {
        std::ostringstream msg;
        msg << "calibrate_spectrum: no tone power found within +/-3 bins of " << tone.f_mod
            << " Hz";
        throw std::runtime_error(msg.str());
    }

    // The tone reaches the detector de-amplified: its displacement-equivalent
    // power is (transduction * x_eq)^2. Real motion is transduced normally.
    const double ref = transduction * tone.known_displacement_equiv;
    const double k = ref * ref / tone_power;

    Spectrum out = raw;
    for (double& p : out.psd) p *= k;
    out.units = Units::meters_squared;
    out.calib = tone;
    return out;
}

PeakFit fit_lorentzian(const Spectrum& spec, std::pair<double, double> window_hz) {
    validate(spec);
    const auto lo = std::lower_bound(spec.freq.begin(), spec.freq.end(), window_hz.first);
    const auto hi = std::upper_bound(spec.freq.begin(), spec.freq.end(), window_hz.second);
    const std::size_t i0 = static_cast<std::size_t>(lo - spec.freq.begin());
    const std::size_t i1 = static_cast<std::size_t>(hi - spec.freq.begin());
    if (i1 < i0 + 16) throw std::invalid_argument("fit_lorentzian: fewer than 16 points in window");

    std::vector<double> w(spec.freq.begin() + i0, spec.freq.begin() + i1);
    std::vector<double> y(spec.psd.begin() + i0, spec.psd.begin() + i1);
    const std::size_t m = w.size();
    for (double& f : w) f = units::angular(f);

    // initial guesses from the raw shape
    std::size_t ipk = 0;
    for (std::size_t i = 1; i < m; ++i)
        if (y[i] > y[ipk]) ipk = i;
    double bg0 = std::min(y.front(), y.back());
    const double height = y[ipk] - bg0;
    if (!(height > 0.0) || !(y[ipk] > 4.0 * std::max(bg0, 1e-300)))
        throw std::runtime_error("fit_lorentzian: no peak found in window");

    double half_lo = w.front(), half_hi = w.back();
    for (std::size_t i = ipk; i-- > 0;)
        if (y[i] - bg0 < 0.5 * height) {
            half_lo = w[i];
            break;
        }
    for (std::size_t i = ipk + 1; i < m; ++i)
        if (y[i] - bg0 < 0.5 * height) {
            half_hi = w[i];
            break;
        }
    double gamma0 = std::max(half_hi - half_lo, 4.0 * (w[1] - w[0]));
    const double omega0 = w[ipk];
    const double a0 = height * std::numbers::pi * 0.5 * gamma0;

    // parameters: omega0, log(gamma), log(A), bg (raw Lorentzian weight A)
    auto unpack = [&](const std::vector<double>& p, double Om) {
        const double g = std::exp(p[1]);
        const double A = std::exp(p[2]);
        const double d = Om - p[0];
        return p[3] + (A / std::numbers::pi) * (0.5 * g) / (d * d + 0.25 * g * g);
    };
    const double yscale = y[ipk];
    optim::ResidualFn residuals = [&](const std::vector<double>& p) {
        Eigen::VectorXd r(m);
        for (std::size_t i = 0; i < m; ++i) r[i] = (unpack(p, w[i]) - y[i]) / yscale;
        return r;
    };

    std::vector<double> p0 = {omega0, std::log(gamma0), std::log(a0), bg0};
    optim::GaussNewtonOptions gopt;
    gopt.max_iters = 100;
    const auto fit = optim::gauss_newton(residuals, p0, gopt);
    if (!fit.converged)
        throw std::runtime_error("fit_lorentzian: did not converge within iteration budget");

    PeakFit out;
    out.omega_eff = fit.x[0];
    out.gamma_eff = std::exp(fit.x[1]);
    // variance: the fitted positive-frequency peak integrates to A over
    // angular frequency; <x^2> = 2A/(2 pi) counting the mirrored peak.
    out.area = 2.0 * std::exp(fit.x[2]) / units::two_pi;
    out.background = fit.x[3];
    out.residual_norm = std::sqrt(fit.cost / static_cast<double>(m));
    if (!(out.gamma_eff > 0.0) || out.omega_eff < w.front() || out.omega_eff > w.back())
        throw std::runtime_error("fit_lorentzian: fit left the window (no usable peak)");
    return out;
}

double noise_temperature(const PeakFit& fit, double m_eff) {
    if (fit.area < 0.0) throw std::domain_error("noise_temperature: negative fitted area");
    if (!(m_eff > 0.0)) throw std::domain_error("noise_temperature: m_eff must be > 0");
    return m_eff * fit.omega_eff * fit.omega_eff * fit.area / units::k_B;
}

}  // namespace omcool::spectra
