#include "omcool/fitseries.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <sstream>
#include <stdexcept>

#include <Eigen/Dense>

#include "omcool/backaction.hpp"
#include "omcool/optim.hpp"
#include "omcool/units.hpp"

namespace omcool::fitseries {

namespace {

cavity::CavityConfig cavity_for(const FitParameters& p, const ModelSet& m) {
    cavity::CavityConfig cav = m.cav_base;
    const double eta_c = m.cav_base.eta_c();
    cav.kappa = p.kappa;
    cav.kappa_ex = eta_c * p.kappa;  // eta_c is held fixed while kappa floats
    cav.gamma_split = p.gamma_split;
    cav.kappa_abs = cav.kappa - cav.kappa_ex;
    return cav;
}

constexpr double instability_penalty_scale = 1e6;

// floated-parameter packing: positive quantities in log space
struct Packing {
    std::vector<double*> slots;
    std::vector<std::string> names;

    static Packing of(FitParameters& p) {
        Packing pk;
        auto add = [&](bool on, double* slot, const char* name) {
            if (on) {
                pk.slots.push_back(slot);
                pk.names.emplace_back(name);
            }
        };
        add(p.mask.kappa, &p.kappa, "kappa");
        add(p.mask.gamma_split, &p.gamma_split, "gamma_split");
        add(p.mask.P_in_eff, &p.P_in_eff, "P_in_eff");
        add(p.mask.omega_m_bare, &p.omega_m_bare, "omega_m_bare");
        add(p.mask.dT_stray, &p.dT_stray, "dT_stray");
        add(p.mask.heating_product, &p.heating_product, "heating_product");
        return pk;
    }

    std::vector<double> to_log() const {
        std::vector<double> x(slots.size());
        for (std::size_t i = 0; i < slots.size(); ++i) {
            if (!(*slots[i] > 0.0))
                throw std::invalid_argument("fit: floated parameter '" + names[i] +
                                            "' must start > 0 (log-space optimization)");
            x[i] = std::log(*slots[i]);
        }
        return x;
    }

    void from_log(const std::vector<double>& x) const {
        for (std::size_t i = 0; i < slots.size(); ++i) *slots[i] = std::exp(x[i]);
    }
};

}  // namespace

PointPrediction predict_point(double detuning, const FitParameters& params,
                              const ModelSet& models) {
    PointPrediction out;

    cavity::CavityConfig cav = cavity_for(params, models);
    cavity::Drive drive{params.P_in_eff, detuning, models.lambda};
    const cavity::FieldPair fields = cavity::mean_fields(drive, cav);
    out.photons = cavity::total_photons(fields);

    out.T = thermal::sample_temperature_from_product(models.T_cryo, params.dT_stray,
                                                     params.heating_product, out.photons,
                                                     drive.omega_l());

    tls::TlsModel tls_model = models.tls_model;
    tls_model.omega_m_bare = params.omega_m_bare;
    out.omega_m = tls::mechanical_frequency(out.T, tls_model);
    out.gamma_m = tls::mechanical_damping(out.T, tls_model);

    const backaction::MechanicalMode mech(models.m_eff, out.omega_m, out.gamma_m, cav.G);
    const auto dyn = backaction::effective_dynamics(mech, fields, detuning, cav);
    out.omega_eff = dyn.omega_eff;
    out.gamma_eff = dyn.gamma_eff;
    out.stable = dyn.stable;
    out.T_eff = dyn.stable ? thermal::effective_temperature(out.T, out.gamma_m, out.gamma_eff)
                           : out.T;
    return out;
}

double objective(std::span<const DetuningPoint> series, const FitParameters& params,
                 const ModelSet& models, double weight) {
    if (series.empty()) throw std::invalid_argument("objective: empty detuning series");
    if (!(weight >= 0.0 && weight <= 1.0))
        throw std::invalid_argument("objective: weight must lie in [0, 1]");
    double j = 0.0;
    for (const auto& pt : series) {
        const PointPrediction pred = predict_point(pt.detuning, params, models);
        if (!pred.stable) {
            j += instability_penalty_scale * (1.0 + std::abs(pred.gamma_eff) / pred.gamma_m);
            continue;
        }
        const double ro = (pt.omega_eff_meas - pred.omega_eff) / pt.sigma_omega;
        const double rg = (pt.gamma_eff_meas - pred.gamma_eff) / pt.sigma_gamma;
        j += weight * ro * ro + (1.0 - weight) * rg * rg;
    }
    return j;
}

FitResult fit(std::span<const DetuningPoint> series, const FitParameters& initial,
              const ModelSet& models, const FitOptions& options) {
    for (const auto& pt : series)
        if (!(pt.sigma_omega > 0.0 && pt.sigma_gamma > 0.0))
            throw std::invalid_argument("fit: all sigma must be > 0");

    FitParameters work = initial;
    const Packing packing = Packing::of(work);
    const std::size_t n_float = packing.slots.size();
    if (series.size() < 2 * n_float)
        throw std::invalid_argument("fit: need at least 2x more points than floated parameters");

    const double w = options.weight;
    const double sw = std::sqrt(w), sg = std::sqrt(1.0 - w);

    // residual vector: two entries per point; unstable points put their
    // penalty in the gamma slot and zero the omega slot
    auto residuals_at = [&](const std::vector<double>& x) {
        packing.from_log(x);
        Eigen::VectorXd r(2 * series.size());
        for (std::size_t i = 0; i < series.size(); ++i) {
            const auto& pt = series[i];
            const PointPrediction pred = predict_point(pt.detuning, work, models);
            if (!pred.stable) {
                r[2 * i] = 0.0;
                r[2 * i + 1] = std::sqrt(instability_penalty_scale *
                                         (1.0 + std::abs(pred.gamma_eff) / pred.gamma_m));
                continue;
            }
            r[2 * i] = sw * (pt.omega_eff_meas - pred.omega_eff) / pt.sigma_omega;
            r[2 * i + 1] = sg * (pt.gamma_eff_meas - pred.gamma_eff) / pt.sigma_gamma;
        }
        return r;
    };
    optim::ObjectiveFn objective_at = [&](const std::vector<double>& x) {
        return residuals_at(x).squaredNorm();
    };

    FitResult out;
    out.floated_names = packing.names;

    const std::vector<double> x_init = packing.to_log();
    std::vector<std::vector<double>> starts{x_init};
    if (options.multi_start > 1) {
        std::mt19937 rng(options.seed);
        std::uniform_real_distribution<double> jitter(-0.2, 0.2);
        for (int s = 1; s < options.multi_start; ++s) {
            std::vector<double> x = x_init;
            for (double& v : x) v += jitter(rng);
            starts.push_back(std::move(x));
        }
    }

    double best_cost = std::numeric_limits<double>::infinity();
    std::vector<double> best_x = x_init;
    bool best_converged = false;
    Eigen::MatrixXd best_jtj;

    for (const auto& start : starts) {
        optim::SimplexOptions sopt;
        sopt.max_evals = options.max_simplex_evals;
        sopt.f_tol = options.obj_tol;
        sopt.x_tol = options.step_tol;
        const auto simplex = optim::nelder_mead(objective_at, start, sopt);
        out.iterations += simplex.evaluations;

        optim::GaussNewtonOptions gopt;
        gopt.max_iters = options.max_gn_iters;
        gopt.step_tol = options.step_tol;
        gopt.f_tol = options.obj_tol;
        const auto gn = optim::gauss_newton(residuals_at, simplex.x, gopt);
        out.iterations += gn.iterations * (static_cast<int>(n_float) + 2);

        if (out.objective_trace.empty()) {
            out.objective_trace = simplex.accepted_trace;
            out.objective_trace.insert(out.objective_trace.end(), gn.accepted_trace.begin(),
                                       gn.accepted_trace.end());
        }
        if (gn.cost < best_cost) {
            best_cost = gn.cost;
            best_x = gn.x;
            best_converged = gn.converged;
            best_jtj = gn.jtj;
        }
    }

    packing.from_log(best_x);
    out.params = work;
    out.objective = best_cost;
    out.converged = best_converged;

    // per-point diagnostics at the optimum
    out.residuals_omega.resize(series.size());
    out.residuals_gamma.resize(series.size());
    out.flagged.resize(series.size());
    for (std::size_t i = 0; i < series.size(); ++i) {
        const auto& pt = series[i];
        const PointPrediction pred = predict_point(pt.detuning, out.params, models);
        out.flagged[i] = !pred.stable;
        out.residuals_omega[i] =
            pred.stable ? (pt.omega_eff_meas - pred.omega_eff) / pt.sigma_omega : 0.0;
        out.residuals_gamma[i] =
            pred.stable ? (pt.gamma_eff_meas - pred.gamma_eff) / pt.sigma_gamma : 0.0;
    }

    // covariance from the final Gauss-Newton J^T J, mapped from log space to
    // natural units (d theta = theta d log theta)
    const std::size_t dof =
        2 * series.size() > n_float ? 2 * series.size() - n_float : 1;
    const double s2 = best_cost / static_cast<double>(dof);
    out.covariance.assign(n_float, std::vector<double>(n_float, 0.0));
    if (n_float > 0) {
        const Eigen::FullPivLU<Eigen::MatrixXd> lu(best_jtj);
        if (!lu.isInvertible()) {
            std::ostringstream msg;
            msg << "singular Jacobian (rank " << lu.rank() << " of " << n_float
                << "): some floated parameters are unidentifiable from this series; "
                   "consider freezing one of";
            for (const auto& nm : packing.names) msg << ' ' << nm;
            out.warning = msg.str();
        } else {
            const Eigen::MatrixXd cov_log = lu.inverse() * s2;
            for (std::size_t i = 0; i < n_float; ++i)
                for (std::size_t j = 0; j < n_float; ++j)
                    out.covariance[i][j] =
                        cov_log(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) *
                        (*packing.slots[i]) * (*packing.slots[j]);
        }
    }
    return out;
}

std::vector<ConsistencyRow> consistency_report(std::span<const DetuningPoint> series,
                                               const FitParameters& params,
                                               const ModelSet& models) {
    std::vector<ConsistencyRow> rows;
    rows.reserve(series.size());
    const double t_base = models.T_cryo + params.dT_stray;
    for (const auto& pt : series) {
        const PointPrediction pred = predict_point(pt.detuning, params, models);
        ConsistencyRow row;
        row.detuning = pt.detuning;
        row.omega_eff = pred.omega_eff;
        row.gamma_eff = pred.gamma_eff;
        row.T = pred.T;
        row.stable = pred.stable;
        row.t_eff_model = pred.T_eff;
        if (pred.stable) {
            row.cooling_factor = t_base / pred.T_eff;
            row.n_bar_model = thermal::mean_occupancy(pred.T_eff, pred.omega_eff);
            row.p0_model = thermal::ground_state_probability(row.n_bar_model);
            if (pt.t_noise_meas) {
                // undo the naive calibration of the de-amplified tone
                const cavity::CavityConfig cav = cavity_for(params, models);
                const cavity::Drive drive{params.P_in_eff, pt.detuning, models.lambda};
                const cavity::FieldPair fields = cavity::mean_fields(drive, cav);
                const backaction::MechanicalMode mech(models.m_eff, pred.omega_m, pred.gamma_m,
                                                      cav.G);
                const double t = backaction::calibration_transduction_factor(
                    pred.omega_eff, mech, fields, pt.detuning, cav);
                row.t_eff_noise = *pt.t_noise_meas * t * t;
                row.n_bar_noise = thermal::mean_occupancy(*row.t_eff_noise, pred.omega_eff);
            }
        }
        rows.push_back(row);
    }
    return rows;
}

}  // namespace omcool::fitseries
