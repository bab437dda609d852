// omcool command-line front end: TLS curves, thermometry, detuning sweeps,
// the coupled detuning-series fit, spectrum synthesis/analysis and the
// force-noise budget. All tabular output is plot-ready CSV; frequencies in
// Hz, temperatures in K, powers in W, 9 significant digits.
//
// Exit codes: 0 success, 2 config/parse error, 3 numerical non-convergence,
// 4 physical-regime error (instability, unattainable thermometry, range).

#include <cstdio>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "omcool/backaction.hpp"
#include "omcool/cavity.hpp"
#include "omcool/config.hpp"
#include "omcool/csv.hpp"
#include "omcool/errors.hpp"
#include "omcool/fitseries.hpp"
#include "omcool/spectra.hpp"
#include "omcool/thermal.hpp"
#include "omcool/tls.hpp"
#include "omcool/units.hpp"

namespace {

using namespace omcool;

constexpr int exit_ok = 0;
constexpr int exit_config = 2;
constexpr int exit_numerics = 3;
constexpr int exit_regime = 4;

std::string fmt9(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.8e", v);
    return buf;
}

// output sink: stdout by default, file when --output is given
struct Sink {
    std::unique_ptr<std::ofstream> file;
    std::ostream& stream() { return file ? *file : std::cout; }

    explicit Sink(const std::string& path) {
        if (!path.empty()) {
            file = std::make_unique<std::ofstream>(path);
            if (!*file) throw ParseError("cannot open for writing: " + path);
        }
    }
};

struct ChainState {
    cavity::FieldPair fields;
    double T = 0.0;
    double omega_m = 0.0;
    double gamma_m = 0.0;
    backaction::EffectiveDynamics dyn{};
    backaction::MechanicalMode mech;
};

// forward chain at the config's drive detuning
ChainState evaluate_chain(const io::RunConfig& cfg, double detuning, bool refine = false) {
    cavity::Drive drive = cfg.drive;
    drive.detuning = detuning;
    const auto fields = cavity::mean_fields(drive, cfg.cav);
    const double T = thermal::sample_temperature(drive, cfg.cav, cfg.env);
    const double omega_m = tls::mechanical_frequency(T, cfg.tls_model);
    const double gamma_m = tls::mechanical_damping(T, cfg.tls_model);
    backaction::MechanicalMode mech(cfg.m_eff, omega_m, gamma_m, cfg.cav.G);
    const auto dyn = backaction::effective_dynamics(mech, fields, detuning, cfg.cav, refine);
    return {fields, T, omega_m, gamma_m, dyn, mech};
}

int cmd_tls_curve(const io::RunConfig& cfg, double t_min, double t_max, int n,
                  const std::string& output) {
    if (n < 1) throw std::invalid_argument("tls-curve: need at least one point");
    if (n == 1 && t_min != t_max)
        throw std::invalid_argument("tls-curve: a single point needs t_min == t_max");
    Sink sink(output);
    auto& os = sink.stream();
    os << "t_k,omega_m_hz,q_inv_total,q_inv_cla,q_inv_tun,q_inv_res,domega_tun_hz,domega_res_hz\n";
    for (int i = 0; i < n; ++i) {
        const double T = n == 1 ? t_min : t_min + (t_max - t_min) * i / (n - 1.0);
        const double q_tun = tls::q_inv_tunneling(T, cfg.tls_model);
        const double q_res =
            tls::q_inv_resonant(T, cfg.tls_model.omega_m_bare, cfg.tls_model.material);
        const double q_total = cfg.tls_model.q_cla_inv + q_tun + q_res;
        const double d_tun = tls::freq_shift_tunneling(T, cfg.tls_model);
        const double d_res =
            tls::freq_shift_resonant(T, cfg.tls_model.omega_m_bare, cfg.tls_model.material);
        const double omega = cfg.tls_model.omega_m_bare + d_tun + d_res;
        os << fmt9(T) << ',' << fmt9(units::hz(omega)) << ',' << fmt9(q_total) << ','
           << fmt9(cfg.tls_model.q_cla_inv) << ',' << fmt9(q_tun) << ',' << fmt9(q_res) << ','
           << fmt9(units::hz(d_tun)) << ',' << fmt9(units::hz(d_res)) << '\n';
    }
    return exit_ok;
}

int cmd_thermometer(const io::RunConfig& cfg, double observed_hz, const std::string& observable,
                    double t_lo, double t_hi, const std::string& output) {
    const auto kind = observable == "damping" ? tls::Observable::damping
                                              : tls::Observable::frequency;
    const double observed = units::angular(observed_hz);
    const double T = tls::thermometer(observed, kind, cfg.tls_model, t_lo, t_hi);
    const double forward = kind == tls::Observable::frequency
                               ? tls::mechanical_frequency(T, cfg.tls_model)
                               : tls::mechanical_damping(T, cfg.tls_model);
    Sink sink(output);
    sink.stream() << "t_k,residual_hz\n"
                  << fmt9(T) << ',' << fmt9(units::hz(forward - observed)) << '\n';
    return exit_ok;
}

int cmd_sweep(const io::RunConfig& cfg, double dmin_hz, double dmax_hz, int n, bool refine,
              const std::string& output) {
    if (n < 2) throw std::invalid_argument("sweep: need at least two points");
    Sink sink(output);
    auto& os = sink.stream();
    os << "detuning_hz,omega_eff_hz,gamma_eff_hz,t_k,t_eff_k,n_bar,p0,cooling_factor,stable\n";
    const double t_base = cfg.env.T_cryo + cfg.env.dT_stray;
    for (int i = 0; i < n; ++i) {
        const double d_hz = dmin_hz + (dmax_hz - dmin_hz) * i / (n - 1.0);
        const auto st = evaluate_chain(cfg, units::angular(d_hz), refine);
        os << fmt9(d_hz) << ',' << fmt9(units::hz(st.dyn.omega_eff)) << ','
           << fmt9(units::hz(st.dyn.gamma_eff)) << ',' << fmt9(st.T) << ',';
        if (st.dyn.stable) {
            const double t_eff =
                thermal::effective_temperature(st.T, st.gamma_m, st.dyn.gamma_eff);
            const double n_bar = thermal::mean_occupancy(t_eff, st.dyn.omega_eff);
            os << fmt9(t_eff) << ',' << fmt9(n_bar) << ','
               << fmt9(thermal::ground_state_probability(n_bar)) << ',' << fmt9(t_base / t_eff)
               << ",1\n";
        } else {
            os << ",,,,0\n";
        }
    }
    return exit_ok;
}

int cmd_fit(const io::RunConfig& cfg, const std::string& series_path,
            const std::string& output) {
    const io::DetuningSeries series = io::read_series_file(series_path);

    fitseries::ModelSet models = cfg.model_set();
    fitseries::FitParameters initial = cfg.initial_fit_parameters();
    if (series.p_in_w) initial.P_in_eff = *series.p_in_w;
    if (series.t_cryo_k) models.T_cryo = *series.t_cryo_k;

    fitseries::FitOptions opt;
    opt.weight = cfg.fit.weight;
    opt.max_simplex_evals = cfg.fit.max_simplex_evals;
    opt.max_gn_iters = cfg.fit.max_gn_iters;
    opt.multi_start = cfg.fit.multi_start;
    opt.seed = cfg.fit.seed;

    const auto result = fitseries::fit(series.points, initial, models, opt);

    Sink sink(output);
    auto& os = sink.stream();
    os << "# converged=" << (result.converged ? 1 : 0) << '\n';
    os << "# objective=" << fmt9(result.objective) << '\n';
    os << "# evaluations=" << result.iterations << '\n';
    os << "# kappa_hz=" << fmt9(units::hz(result.params.kappa)) << '\n';
    os << "# gamma_split_hz=" << fmt9(units::hz(result.params.gamma_split)) << '\n';
    os << "# p_in_eff_w=" << fmt9(result.params.P_in_eff) << '\n';
    os << "# omega_m_bare_hz=" << fmt9(units::hz(result.params.omega_m_bare)) << '\n';
    os << "# dt_stray_k=" << fmt9(result.params.dT_stray) << '\n';
    os << "# heating_product_k_per_j=" << fmt9(result.params.heating_product) << '\n';
    for (std::size_t i = 0; i < result.floated_names.size(); ++i)
        os << "# sigma_" << result.floated_names[i] << '='
           << fmt9(std::sqrt(std::max(result.covariance[i][i], 0.0))) << '\n';
    if (!result.warning.empty()) os << "# warning=" << result.warning << '\n';

    const auto report =
        fitseries::consistency_report(series.points, result.params, models);
    os << "detuning_hz,omega_eff_model_hz,gamma_eff_model_hz,t_k,t_eff_model_k,cooling_factor,"
          "n_bar_model,p0_model,t_eff_noise_k,n_bar_noise,resid_omega,resid_gamma,stable\n";
    for (std::size_t i = 0; i < report.size(); ++i) {
        const auto& row = report[i];
        os << fmt9(units::hz(row.detuning)) << ',' << fmt9(units::hz(row.omega_eff)) << ','
           << fmt9(units::hz(row.gamma_eff)) << ',' << fmt9(row.T) << ','
           << fmt9(row.t_eff_model) << ',' << fmt9(row.cooling_factor) << ','
           << fmt9(row.n_bar_model) << ',' << fmt9(row.p0_model) << ',';
        if (row.t_eff_noise) os << fmt9(*row.t_eff_noise);
        os << ',';
        if (row.n_bar_noise) os << fmt9(*row.n_bar_noise);
        os << ',' << fmt9(result.residuals_omega[i]) << ',' << fmt9(result.residuals_gamma[i])
           << ',' << (row.stable ? 1 : 0) << '\n';
    }
    return result.converged ? exit_ok : exit_numerics;
}

int cmd_spectrum_synthesize(const io::RunConfig& cfg, double fmin_hz, double fmax_hz, int points,
                            double tone_fmod_hz, double tone_depth, double tone_x_eq,
                            const std::string& output) {
    const auto st = evaluate_chain(cfg, cfg.drive.detuning);
    if (!st.dyn.stable)
        throw std::domain_error("spectrum: unstable operating point (gamma_eff <= 0)");

    if (fmin_hz == 0.0 && fmax_hz == 0.0) {
        const double f0 = units::hz(st.dyn.omega_eff);
        const double span = 30.0 * units::hz(st.dyn.gamma_eff);
        fmin_hz = f0 - span;
        fmax_hz = f0 + span;
    }
    if (points < 8) throw std::invalid_argument("spectrum: need at least 8 grid points");
    std::vector<double> grid(points);
    for (int i = 0; i < points; ++i)
        grid[i] = fmin_hz + (fmax_hz - fmin_hz) * i / (points - 1.0);

    const double s_ff = thermal::force_noise_thermal(cfg.m_eff, st.T, st.gamma_m);
    const double s_imp = cfg.s_xx_imp.value_or(0.0);
    auto spec = spectra::synthesize_spectrum(std::move(grid), st.mech, st.fields,
                                             cfg.drive.detuning, cfg.cav, s_ff, s_imp);
    if (tone_fmod_hz > 0.0) {
        spectra::CalibrationTone tone{tone_fmod_hz, tone_depth, tone_x_eq};
        const double trans = backaction::calibration_transduction_factor(
            units::angular(tone_fmod_hz), st.mech, st.fields, cfg.drive.detuning, cfg.cav);
        spectra::inject_tone(spec, tone, trans);
    }

    Sink sink(output);
    io::write_spectrum(sink.stream(), spec);
    return exit_ok;
}

int cmd_spectrum_analyze(const io::RunConfig& cfg, const std::string& input, double window_lo,
                         double window_hi, double tone_x_eq, const std::string& output) {
    spectra::Spectrum spec = io::read_spectrum_file(input);

    if (spec.units == spectra::Units::raw_detector) {
        if (!spec.calib)
            throw std::invalid_argument("analyze: raw spectrum without tone metadata");
        spectra::CalibrationTone tone = *spec.calib;
        if (tone_x_eq > 0.0) tone.known_displacement_equiv = tone_x_eq;
        const auto st = evaluate_chain(cfg, cfg.drive.detuning);
        const double trans = backaction::calibration_transduction_factor(
            units::angular(tone.f_mod), st.mech, st.fields, cfg.drive.detuning, cfg.cav);
        spec = spectra::calibrate_spectrum(spec, tone, trans);
    }

    if (window_lo == 0.0 && window_hi == 0.0) {
        window_lo = spec.freq.front();
        window_hi = spec.freq.back();
    }
    const auto fit = spectra::fit_lorentzian(spec, {window_lo, window_hi});
    const double t_eff = spectra::noise_temperature(fit, cfg.m_eff);
    const double n_bar = thermal::mean_occupancy(t_eff, fit.omega_eff);

    Sink sink(output);
    auto& os = sink.stream();
    os << "# omega_eff_hz=" << fmt9(units::hz(fit.omega_eff)) << '\n';
    os << "# gamma_eff_hz=" << fmt9(units::hz(fit.gamma_eff)) << '\n';
    os << "# area_m2=" << fmt9(fit.area) << '\n';
    os << "# background_m2_hz=" << fmt9(fit.background) << '\n';
    os << "# residual_norm=" << fmt9(fit.residual_norm) << '\n';
    os << "# t_eff_k=" << fmt9(t_eff) << '\n';
    os << "# n_bar=" << fmt9(n_bar) << '\n';
    os << "# p0=" << fmt9(thermal::ground_state_probability(n_bar)) << '\n';
    return exit_ok;
}

int cmd_budget(const io::RunConfig& cfg, const std::string& output) {
    const auto st = evaluate_chain(cfg, cfg.drive.detuning);
    if (!st.dyn.stable)
        throw std::domain_error("budget: unstable operating point (gamma_eff <= 0)");
    const double t_eff = thermal::effective_temperature(st.T, st.gamma_m, st.dyn.gamma_eff);

    const double s_the = thermal::force_noise_thermal(cfg.m_eff, t_eff, st.dyn.gamma_eff);
    const double gamma_m_cryo = tls::mechanical_damping(cfg.env.T_cryo, cfg.tls_model);
    const double s_cryo = thermal::force_noise_cryo(cfg.m_eff, cfg.env.T_cryo, gamma_m_cryo);
    const double s_qba =
        thermal::force_noise_quantum(st.mech.g0, cfg.m_eff, cfg.drive.P_in, cfg.cav.eta_c(),
                                     cfg.cav.omega_c, st.omega_m);
    const double s_imp = cfg.s_xx_imp.value_or(0.0);
    const auto budget = thermal::make_noise_budget(s_the, s_cryo, s_qba, s_imp);

    Sink sink(output);
    auto& os = sink.stream();
    os << "# t_k=" << fmt9(st.T) << '\n';
    os << "# t_eff_k=" << fmt9(t_eff) << '\n';
    os << "# gamma_m_hz=" << fmt9(units::hz(st.gamma_m)) << '\n';
    os << "# gamma_eff_hz=" << fmt9(units::hz(st.dyn.gamma_eff)) << '\n';
    os << "# s_ff_the_n2_hz=" << fmt9(budget.S_FF_the) << '\n';
    os << "# s_ff_cryo_n2_hz=" << fmt9(budget.S_FF_cryo) << '\n';
    os << "# s_ff_ba_n2_hz=" << fmt9(budget.S_FF_ba) << '\n';
    os << "# s_ff_qba_n2_hz=" << fmt9(budget.S_FF_qba) << '\n';
    os << "# s_xx_imp_m2_hz=" << fmt9(budget.S_xx_imp) << '\n';
    os << "# product_hbar_over_2=" << fmt9(budget.product_over_hbar2) << '\n';
    os << "# cryo_fraction=" << fmt9(budget.S_FF_the > 0.0 ? budget.S_FF_cryo / budget.S_FF_the : 0.0)
       << '\n';
    os << "# ba_fraction=" << fmt9(budget.S_FF_the > 0.0 ? budget.S_FF_ba / budget.S_FF_the : 0.0)
       << '\n';
    if (budget.ba_clamped) os << "# warning=ba clamped to 0 (the < cryo)\n";
    return exit_ok;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sideband-cooling analysis toolkit for split-mode optomechanical cavities"};
    app.require_subcommand(1);

    std::string config_path, output, series_path, input, observable = "frequency", mode;
    double t_min = 0.6, t_max = 3.0, dmin_hz = 0.0, dmax_hz = 0.0;
    double observed_hz = 0.0, t_lo = 0.1, t_hi = 10.0;
    double fmin_hz = 0.0, fmax_hz = 0.0;
    double window_lo = 0.0, window_hi = 0.0;
    double tone_fmod = 0.0, tone_depth = 0.0, tone_x_eq = 0.0;
    int points = 101;
    bool refine = false;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--output", output, "write output here instead of stdout");
    };

    auto* tlscurve = app.add_subcommand("tls-curve", "TLS frequency/damping decomposition vs T");
    add_common(tlscurve);
    tlscurve->add_option("--tmin", t_min, "lowest temperature, K");
    tlscurve->add_option("--tmax", t_max, "highest temperature, K");
    tlscurve->add_option("--points", points, "number of rows");

    auto* thermo = app.add_subcommand("thermometer", "invert the TLS calibration to a temperature");
    add_common(thermo);
    thermo->add_option("--observed-freq-hz", observed_hz, "observed value, Hz")->required();
    thermo->add_option("--observable", observable, "frequency or damping")
        ->check(CLI::IsMember({"frequency", "damping"}));
    thermo->add_option("--tlo", t_lo, "bracket low end, K");
    thermo->add_option("--thi", t_hi, "bracket high end, K");

    auto* sweep = app.add_subcommand("sweep", "effective dynamics across a detuning range");
    add_common(sweep);
    sweep->add_option("--dmin-hz", dmin_hz, "lowest detuning, Hz")->required();
    sweep->add_option("--dmax-hz", dmax_hz, "highest detuning, Hz")->required();
    sweep->add_option("--points", points, "number of rows");
    sweep->add_flag("--refine-spring", refine, "re-evaluate f at the shifted frequency once");

    auto* fitcmd = app.add_subcommand("fit", "coupled fit of a measured detuning series");
    add_common(fitcmd);
    fitcmd->add_option("--series", series_path, "detuning-series CSV")->required();

    auto* spectrum = app.add_subcommand("spectrum", "synthesize or analyze a displacement spectrum");
    add_common(spectrum);
    spectrum->add_option("--mode", mode, "synthesize or analyze")
        ->required()
        ->check(CLI::IsMember({"synthesize", "analyze"}));
    spectrum->add_option("--input", input, "spectrum CSV to analyze");
    spectrum->add_option("--fmin-hz", fmin_hz, "grid start (synthesize)");
    spectrum->add_option("--fmax-hz", fmax_hz, "grid end (synthesize)");
    spectrum->add_option("--points", points, "grid size (synthesize)");
    spectrum->add_option("--window-lo-hz", window_lo, "fit window start (analyze)");
    spectrum->add_option("--window-hi-hz", window_hi, "fit window end (analyze)");
    spectrum->add_option("--tone-fmod-hz", tone_fmod, "calibration tone frequency");
    spectrum->add_option("--tone-depth-rad", tone_depth, "phase modulation depth");
    spectrum->add_option("--tone-x-eq-m", tone_x_eq, "tone displacement equivalent");

    auto* budget = app.add_subcommand("budget", "force-noise budget at the configured detuning");
    add_common(budget);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return exit_config;
    }

    try {
        const io::RunConfig cfg = io::load_config(config_path);
        if (tlscurve->parsed()) return cmd_tls_curve(cfg, t_min, t_max, points, output);
        if (thermo->parsed())
            return cmd_thermometer(cfg, observed_hz, observable, t_lo, t_hi, output);
        if (sweep->parsed()) return cmd_sweep(cfg, dmin_hz, dmax_hz, points, refine, output);
        if (fitcmd->parsed()) return cmd_fit(cfg, series_path, output);
        if (spectrum->parsed()) {
            if (mode == "synthesize")
                return cmd_spectrum_synthesize(cfg, fmin_hz, fmax_hz, points, tone_fmod,
                                               tone_depth, tone_x_eq, output);
            if (input.empty()) throw std::invalid_argument("analyze: --input is required");
            return cmd_spectrum_analyze(cfg, input, window_lo, window_hi, tone_x_eq, output);
        }
        if (budget->parsed()) return cmd_budget(cfg, output);
        return exit_config;
    } catch (const UnattainableObservation& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_regime;
    } catch (const AmbiguousInversion& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_regime;
    } catch (const QuadratureError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numerics;
    } catch (const ParseError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::domain_error& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_regime;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_config;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_numerics;
    }
}
