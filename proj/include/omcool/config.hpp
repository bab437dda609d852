#pragma once

// Run configuration: flat sectioned key-value text (INI-like). Frequencies
// are plain Hz in the file and converted to rad/s on load; unknown sections
// or keys are rejected with the offending name. Module invariants are
// re-validated after loading.

#include <optional>
#include <string>

#include "omcool/cavity.hpp"
#include "omcool/fitseries.hpp"
#include "omcool/thermal.hpp"
#include "omcool/tls.hpp"

namespace omcool::io {

struct FitConfig {
    double weight = 0.9;
    fitseries::FitParameters::Mask mask;
    int max_simplex_evals = 2000;
    int max_gn_iters = 200;
    int multi_start = 1;
    unsigned seed = 0;
};

struct RunConfig {
    cavity::CavityConfig cav;
    double m_eff = 0.0;  // kg
    tls::TlsModel tls_model;
    thermal::Environment env;
    cavity::Drive drive;
    std::optional<double> s_xx_imp;  // m^2/Hz, measurement imprecision
    FitConfig fit;

    // floated-parameter starting values assembled from the sections above
    fitseries::FitParameters initial_fit_parameters() const;
    fitseries::ModelSet model_set() const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(std::istream& is, const std::string& origin = "<stream>");

}  // namespace omcool::io
