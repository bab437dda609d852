#pragma once

// Detuning-series forward model and the coupled weighted fit of
// Omega_eff(detuning) and Gamma_eff(detuning): mean fields -> absorbed-power
// heating -> TLS-corrected mechanics -> dynamical backaction -> effective
// temperature. Plus the consistency comparison between model-predicted and
// noise-thermometry effective temperatures.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "omcool/cavity.hpp"
#include "omcool/thermal.hpp"
#include "omcool/tls.hpp"

namespace omcool::fitseries {

struct DetuningPoint {
    double detuning = 0.0;        // rad/s
    double omega_eff_meas = 0.0;  // rad/s
    double gamma_eff_meas = 0.0;  // rad/s
    double sigma_omega = 0.0;     // rad/s, > 0
    double sigma_gamma = 0.0;     // rad/s, > 0
    std::optional<double> t_noise_meas;  // K, raw noise temperature (pre-correction)
};

struct FitParameters {
    double kappa = 0.0;            // rad/s
    double gamma_split = 0.0;      // rad/s
    double P_in_eff = 0.0;         // W
    double omega_m_bare = 0.0;     // rad/s
    double dT_stray = 0.0;         // K
    double heating_product = 0.0;  // K/J, beta*kappa_abs composite

    // floated fields move during optimization, frozen ones never do
    struct Mask {
        bool kappa = true;
        bool gamma_split = true;
        bool P_in_eff = true;
        bool omega_m_bare = false;
        bool dT_stray = true;
        bool heating_product = true;
    } mask;
};

// Everything the forward model needs besides the floated parameters. The
// cavity config supplies eta_c (kappa_ex tracks kappa at fixed eta_c), G and
// omega_c; the TLS model supplies the calibrated material and clamping loss.
struct ModelSet {
    tls::TlsModel tls_model;
    cavity::CavityConfig cav_base;
    double m_eff = 0.0;   // kg
    double T_cryo = 0.0;  // K
    double lambda = 0.0;  // m
};

struct PointPrediction {
    double omega_eff = 0.0;  // rad/s
    double gamma_eff = 0.0;  // rad/s
    double T = 0.0;          // K, sample temperature
    double T_eff = 0.0;      // K (equals T when unstable; see `stable`)
    double omega_m = 0.0;    // rad/s, TLS-corrected
    double gamma_m = 0.0;    // rad/s, TLS-corrected
    double photons = 0.0;    // |a+|^2 + |a-|^2
    bool stable = true;
};

PointPrediction predict_point(double detuning, const FitParameters& params,
                              const ModelSet& models);

// J = w sum((Omega_meas - Omega_pred)/sigma_Omega)^2
//   + (1-w) sum((Gamma_meas - Gamma_pred)/sigma_Gamma)^2,
// with unstable predictions contributing 1e6 (1 + |Gamma_pred|/Gamma_m) each.
double objective(std::span<const DetuningPoint> series, const FitParameters& params,
                 const ModelSet& models, double weight);

struct FitOptions {
    double weight = 0.9;        // relative weight of the frequency (spring) residuals
    int max_simplex_evals = 2000;
    int max_gn_iters = 200;
    double step_tol = 1e-10;
    double obj_tol = 1e-12;
    int multi_start = 1;
    unsigned seed = 0;
};

struct FitResult {
    FitParameters params;
    double objective = 0.0;
    std::vector<double> residuals_omega;  // (meas - pred)/sigma per point
    std::vector<double> residuals_gamma;
    std::vector<bool> flagged;            // unstable prediction at this point
    std::vector<std::vector<double>> covariance;  // floated params, natural units
    std::vector<std::string> floated_names;       // row/column labels for covariance
    std::vector<double> objective_trace;          // accepted-step objectives, both stages
    bool converged = false;
    int iterations = 0;  // total objective evaluations
    std::string warning;  // e.g. singular-Jacobian identifiability hint
};

// Two-stage minimization: Nelder-Mead simplex to the basin, then damped
// Gauss-Newton with a forward-difference Jacobian. Positive parameters are
// optimized in log-space. Deterministic given options.
FitResult fit(std::span<const DetuningPoint> series, const FitParameters& initial,
              const ModelSet& models, const FitOptions& options = {});

struct ConsistencyRow {
    double detuning = 0.0;       // rad/s
    double omega_eff = 0.0;      // rad/s, model
    double gamma_eff = 0.0;      // rad/s, model
    double T = 0.0;              // K, model sample temperature
    double t_eff_model = 0.0;    // K
    double cooling_factor = 0.0; // (T_cryo + dT_stray)/T_eff
    double n_bar_model = 0.0;
    double p0_model = 0.0;
    std::optional<double> t_eff_noise;  // K, measured, de-amplification corrected
    std::optional<double> n_bar_noise;
    bool stable = true;
};

// Per-point comparison of model T_eff against measured noise temperatures.
// Measured values are multiplied by the squared transduction factor
// |chi_eff/chi_m|^2 at the (predicted) effective frequency, undoing the
// naive calibration of the de-amplified tone.
std::vector<ConsistencyRow> consistency_report(std::span<const DetuningPoint> series,
                                               const FitParameters& params,
                                               const ModelSet& models);

}  // namespace omcool::fitseries
