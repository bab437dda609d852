#include "omcool/csv.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "omcool/errors.hpp"
#include "omcool/units.hpp"

namespace omcool::io {

namespace {

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
    std::ostringstream msg;
    msg << origin << ":" << line << ": " << what;
    throw ParseError(msg.str());
}

double parse_double(const std::string& tok, const std::string& origin, int line) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(tok, &pos);
        if (pos != tok.size()) fail(origin, line, "trailing characters in number '" + tok + "'");
        return v;
    } catch (const ParseError&) {
        throw;
    } catch (const std::exception&) {
        fail(origin, line, "not a number: '" + tok + "'");
    }
}

std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

// '# key=value' metadata line; returns false when the line is not metadata
bool parse_meta(const std::string& line, std::string& key, std::string& value) {
    if (line.empty() || line[0] != '#') return false;
    const auto eq = line.find('=');
    if (eq == std::string::npos) return false;
    key = trim(line.substr(1, eq - 1));
    value = trim(line.substr(eq + 1));
    return true;
}

std::ofstream open_out(const std::string& path) {
    std::ofstream os(path);
    if (!os) throw ParseError("cannot open for writing: " + path);
    return os;
}

std::ifstream open_in(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open: " + path);
    return is;
}

}  // namespace

void write_spectrum(std::ostream& os, const spectra::Spectrum& s) {
    spectra::validate(s);
    os << "# units="
       << (s.units == spectra::Units::raw_detector ? "raw_detector" : "meters_squared") << '\n';
    os << "# convention=" << spectra::Spectrum::convention << '\n';
    if (s.calib) {
        os << "# f_mod_hz=" << fmt(s.calib->f_mod) << '\n';
        os << "# phase_depth_rad=" << fmt(s.calib->depth) << '\n';
        os << "# tone_x_eq_m=" << fmt(s.calib->known_displacement_equiv) << '\n';
    }
    os << "freq_hz,psd\n";
    for (std::size_t i = 0; i < s.freq.size(); ++i)
        os << fmt(s.freq[i]) << ',' << fmt(s.psd[i]) << '\n';
}

void write_spectrum_file(const std::string& path, const spectra::Spectrum& s) {
    auto os = open_out(path);
    write_spectrum(os, s);
}

spectra::Spectrum read_spectrum(std::istream& is, const std::string& origin) {
    spectra::Spectrum s;
    spectra::CalibrationTone tone;
    bool has_tone = false, units_seen = false, header_seen = false;

    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            std::string key, value;
            if (!parse_meta(t, key, value)) continue;  // plain comment
            if (key == "units") {
                units_seen = true;
                if (value == "raw_detector")
                    s.units = spectra::Units::raw_detector;
                else if (value == "meters_squared")
                    s.units = spectra::Units::meters_squared;
                else
                    fail(origin, lineno, "unknown units '" + value + "'");
            } else if (key == "convention") {
                if (value != spectra::Spectrum::convention)
                    fail(origin, lineno, "unsupported convention '" + value + "'");
            } else if (key == "f_mod_hz") {
                tone.f_mod = parse_double(value, origin, lineno);
                has_tone = true;
            } else if (key == "phase_depth_rad") {
                tone.depth = parse_double(value, origin, lineno);
                has_tone = true;
            } else if (key == "tone_x_eq_m") {
                tone.known_displacement_equiv = parse_double(value, origin, lineno);
                has_tone = true;
            } else {
                fail(origin, lineno, "unknown metadata key '" + key + "'");
            }
            continue;
        }
        if (!header_seen) {
            if (trim(t) != "freq_hz,psd")
                fail(origin, lineno, "expected header 'freq_hz,psd', got '" + t + "'");
            header_seen = true;
            continue;
        }
        const auto cols = split_csv(t);
        if (cols.size() != 2) fail(origin, lineno, "expected 2 columns");
        s.freq.push_back(parse_double(trim(cols[0]), origin, lineno));
        s.psd.push_back(parse_double(trim(cols[1]), origin, lineno));
    }
    if (!header_seen) fail(origin, lineno, "missing 'freq_hz,psd' header");
    if (!units_seen) fail(origin, lineno, "missing 'units=' metadata");
    if (has_tone) s.calib = tone;
    spectra::validate(s);
    return s;
}

spectra::Spectrum read_spectrum_file(const std::string& path) {
    auto is = open_in(path);
    return read_spectrum(is, path);
}

void write_series(std::ostream& os, const DetuningSeries& series) {
    if (series.p_in_w) os << "# p_in_w=" << fmt(*series.p_in_w) << '\n';
    if (series.t_cryo_k) os << "# t_cryo_k=" << fmt(*series.t_cryo_k) << '\n';
    os << "detuning_hz,omega_eff_hz,gamma_eff_hz,sigma_omega_hz,sigma_gamma_hz,t_noise_k\n";
    for (const auto& p : series.points) {
        os << fmt(units::hz(p.detuning)) << ',' << fmt(units::hz(p.omega_eff_meas)) << ','
           << fmt(units::hz(p.gamma_eff_meas)) << ',' << fmt(units::hz(p.sigma_omega)) << ','
           << fmt(units::hz(p.sigma_gamma)) << ',';
        if (p.t_noise_meas) os << fmt(*p.t_noise_meas);
        os << '\n';
    }
}

void write_series_file(const std::string& path, const DetuningSeries& series) {
    auto os = open_out(path);
    write_series(os, series);
}

DetuningSeries read_series(std::istream& is, const std::string& origin) {
    DetuningSeries out;
    std::vector<std::string> header;
    std::string line;
    int lineno = 0;

    const std::vector<std::string> known = {"detuning_hz",    "omega_eff_hz",
                                            "gamma_eff_hz",   "sigma_omega_hz",
                                            "sigma_gamma_hz", "t_noise_k"};

    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t[0] == '#') {
            std::string key, value;
            if (!parse_meta(t, key, value)) continue;
            if (key == "p_in_w")
                out.p_in_w = parse_double(value, origin, lineno);
            else if (key == "t_cryo_k")
                out.t_cryo_k = parse_double(value, origin, lineno);
            else
                fail(origin, lineno, "unknown metadata key '" + key + "'");
            continue;
        }
        if (header.empty()) {
            for (auto& col : split_csv(t)) {
                const std::string name = trim(col);
                bool ok = false;
                for (const auto& k : known) ok = ok || k == name;
                if (!ok) fail(origin, lineno, "unknown column '" + name + "'");
                header.push_back(name);
            }
            for (const auto& required : {"detuning_hz", "omega_eff_hz", "gamma_eff_hz"}) {
                bool found = false;
                for (const auto& h : header) found = found || h == required;
                if (!found)
                    fail(origin, lineno, std::string("missing required column '") + required + "'");
            }
            continue;
        }
        const auto cols = split_csv(t);
        if (cols.size() != header.size())
            fail(origin, lineno, "expected " + std::to_string(header.size()) + " columns, got " +
                                     std::to_string(cols.size()));
        fitseries::DetuningPoint p;
        bool has_so = false, has_sg = false;
        for (std::size_t i = 0; i < header.size(); ++i) {
            const std::string v = trim(cols[i]);
            if (header[i] == "t_noise_k") {
                if (!v.empty()) p.t_noise_meas = parse_double(v, origin, lineno);
                continue;
            }
            if (v.empty()) fail(origin, lineno, "empty value in column '" + header[i] + "'");
            const double x = units::angular(parse_double(v, origin, lineno));
            if (header[i] == "detuning_hz") p.detuning = x;
            if (header[i] == "omega_eff_hz") p.omega_eff_meas = x;
            if (header[i] == "gamma_eff_hz") p.gamma_eff_meas = x;
            if (header[i] == "sigma_omega_hz") {
                p.sigma_omega = x;
                has_so = true;
            }
            if (header[i] == "sigma_gamma_hz") {
                p.sigma_gamma = x;
                has_sg = true;
            }
        }
        // the resonance frequency is read from spectra with far better
        // accuracy than the damping rate; defaults reflect that
        if (!has_so) p.sigma_omega = p.gamma_eff_meas / 20.0;
        if (!has_sg) p.sigma_gamma = p.gamma_eff_meas / 5.0;
        if (!(p.sigma_omega > 0.0 && p.sigma_gamma > 0.0))
            fail(origin, lineno, "sigma values must be > 0");
        out.points.push_back(p);
    }
    if (header.empty()) fail(origin, lineno, "missing header row");
    return out;
}

DetuningSeries read_series_file(const std::string& path) {
    auto is = open_in(path);
    return read_series(is, path);
}

}  // namespace omcool::io
