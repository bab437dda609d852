#include "omcool/config.hpp"

#include <fstream>
#include <istream>
#include <map>
#include <set>
#include <sstream>

#include "omcool/errors.hpp"
#include "omcool/units.hpp"

namespace omcool::io {

namespace {

struct KeyValue {
    std::string value;
    int line = 0;
    mutable bool used = false;
};

using Section = std::map<std::string, KeyValue>;

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

[[noreturn]] void fail(const std::string& origin, int line, const std::string& what) {
    std::ostringstream msg;
    msg << origin << ":" << line << ": " << what;
    throw ParseError(msg.str());
}

class Reader {
  public:
    Reader(const Section& section, std::string origin, std::string name)
        : section_(section), origin_(std::move(origin)), name_(std::move(name)) {}

    std::optional<double> number(const std::string& key) const {
        const auto it = section_.find(key);
        if (it == section_.end()) return std::nullopt;
        it->second.used = true;
        try {
            std::size_t pos = 0;
            const double v = std::stod(it->second.value, &pos);
            if (pos != it->second.value.size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            fail(origin_, it->second.line,
                 "[" + name_ + "] " + key + ": not a number: '" + it->second.value + "'");
        }
    }

    double require(const std::string& key) const {
        const auto v = number(key);
        if (!v) throw ParseError(origin_ + ": missing required key '" + key + "' in section [" +
                                 name_ + "]");
        return *v;
    }

    double number_or(const std::string& key, double fallback) const {
        const auto v = number(key);
        return v ? *v : fallback;
    }

    std::optional<bool> flag(const std::string& key) const {
        const auto it = section_.find(key);
        if (it == section_.end()) return std::nullopt;
        it->second.used = true;
        const std::string v = it->second.value;
        if (v == "true" || v == "1") return true;
        if (v == "false" || v == "0") return false;
        fail(origin_, it->second.line,
             "[" + name_ + "] " + key + ": expected true/false, got '" + v + "'");
    }

    void finish() const {
        for (const auto& [key, kv] : section_) {
            if (!kv.used)
                fail(origin_, kv.line, "unknown key '" + key + "' in section [" + name_ + "]");
        }
    }

  private:
    const Section& section_;
    std::string origin_;
    std::string name_;
};

}  // namespace

fitseries::FitParameters RunConfig::initial_fit_parameters() const {
    fitseries::FitParameters p;
    p.kappa = cav.kappa;
    p.gamma_split = cav.gamma_split;
    p.P_in_eff = drive.P_in;
    p.omega_m_bare = tls_model.omega_m_bare;
    p.dT_stray = env.dT_stray;
    p.heating_product = env.beta * cav.kappa_abs;
    p.mask = fit.mask;
    return p;
}

fitseries::ModelSet RunConfig::model_set() const {
    fitseries::ModelSet m;
    m.tls_model = tls_model;
    m.cav_base = cav;
    m.m_eff = m_eff;
    m.T_cryo = env.T_cryo;
    m.lambda = drive.lambda;
    return m;
}

RunConfig parse_config(std::istream& is, const std::string& origin) {
    const std::set<std::string> known_sections = {"cavity", "mechanics", "tls",
                                                  "environment", "drive", "fit"};
    std::map<std::string, Section> sections;
    std::string current;
    std::string line;
    int lineno = 0;

    while (std::getline(is, line)) {
        ++lineno;
        // strip comments ('#' or ';' to end of line)
        const auto cpos = line.find_first_of("#;");
        if (cpos != std::string::npos) line.erase(cpos);
        const std::string t = trim(line);
        if (t.empty()) continue;
        if (t.front() == '[') {
            if (t.back() != ']') fail(origin, lineno, "malformed section header '" + t + "'");
            current = trim(t.substr(1, t.size() - 2));
            if (!known_sections.count(current))
                fail(origin, lineno, "unknown section [" + current + "]");
            sections[current];
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) fail(origin, lineno, "expected 'key = value', got '" + t + "'");
        if (current.empty()) fail(origin, lineno, "key before any [section]");
        const std::string key = trim(t.substr(0, eq));
        const std::string value = trim(t.substr(eq + 1));
        if (key.empty() || value.empty()) fail(origin, lineno, "empty key or value");
        if (sections[current].count(key))
            fail(origin, lineno, "duplicate key '" + key + "' in section [" + current + "]");
        sections[current][key] = {value, lineno, false};
    }

    RunConfig cfg;

    {
        Reader r(sections["drive"], origin, "drive");
        cfg.drive.P_in = r.require("p_in_w");
        cfg.drive.detuning = units::angular(r.require("detuning_hz"));
        cfg.drive.lambda = r.require("lambda_nm") * 1e-9;
        if (!(cfg.drive.P_in >= 0.0)) throw ParseError(origin + ": [drive] p_in_w must be >= 0");
        r.finish();
    }
    {
        Reader r(sections["cavity"], origin, "cavity");
        cfg.cav.kappa = units::angular(r.require("kappa_hz"));
        const auto eta = r.number("eta_c");
        const auto kex = r.number("kappa_ex_hz");
        if (eta && kex)
            throw ParseError(origin + ": [cavity] give either eta_c or kappa_ex_hz, not both");
        if (!eta && !kex)
            throw ParseError(origin + ": [cavity] needs eta_c or kappa_ex_hz");
        cfg.cav.kappa_ex = eta ? *eta * cfg.cav.kappa : units::angular(*kex);
        cfg.cav.gamma_split = units::angular(r.require("gamma_split_hz"));
        cfg.cav.G = units::angular(r.require("g_hz_per_m"));
        cfg.cav.kappa_abs = units::angular(
            r.number_or("kappa_abs_hz", units::hz(cfg.cav.kappa - cfg.cav.kappa_ex)));
        cfg.cav.omega_c = units::angular(r.number_or(
            "omega_c_hz", units::hz(units::optical_angular_frequency(cfg.drive.lambda))));
        cavity::validate(cfg.cav);
        r.finish();
    }
    {
        Reader r(sections["mechanics"], origin, "mechanics");
        cfg.m_eff = r.require("m_eff_kg");
        if (!(cfg.m_eff > 0.0)) throw ParseError(origin + ": [mechanics] m_eff_kg must be > 0");
        r.finish();
    }
    {
        Reader r(sections["tls"], origin, "tls");
        cfg.tls_model.omega_m_bare = units::angular(r.require("omega_m_bare_hz"));
        const auto qcla = r.number("q_cla");
        const auto qinv = r.number("q_cla_inv");
        if (qcla && qinv)
            throw ParseError(origin + ": [tls] give either q_cla or q_cla_inv, not both");
        cfg.tls_model.q_cla_inv = qinv ? *qinv : (qcla ? 1.0 / *qcla : 0.0);
        cfg.tls_model.material.B = r.require("b_j");
        cfg.tls_model.material.rho = r.require("rho_kg_m3");
        cfg.tls_model.material.c_s = r.require("c_s_m_s");
        cfg.tls_model.material.Pbar_Q = r.require("pbar_q_m3");
        cfg.tls_model.material.Pbar_Omega = r.require("pbar_omega_m3");
        cfg.tls_model.material.T0 = r.number_or("t0_k", 1.0);
        const auto v = r.number("arrhenius_v_j");
        const auto tau0 = r.number("arrhenius_tau0_s");
        if (v.has_value() != tau0.has_value())
            throw ParseError(origin + ": [tls] arrhenius_v_j and arrhenius_tau0_s go together");
        cfg.tls_model.arrhenius_V = v;
        cfg.tls_model.arrhenius_tau0 = tau0;
        tls::validate(cfg.tls_model);
        r.finish();
    }
    {
        Reader r(sections["environment"], origin, "environment");
        cfg.env.T_cryo = r.require("t_cryo_k");
        cfg.env.dT_stray = r.number_or("dt_stray_k", 0.0);
        cfg.env.beta = r.number_or("beta_k_per_w", 0.0);
        const auto imp = r.number("s_xx_imp_m2_hz");
        if (imp) {
            if (!(*imp >= 0.0))
                throw ParseError(origin + ": [environment] s_xx_imp_m2_hz must be >= 0");
            cfg.s_xx_imp = imp;
        }
        thermal::validate(cfg.env);
        r.finish();
    }
    if (sections.count("fit")) {
        Reader r(sections["fit"], origin, "fit");
        cfg.fit.weight = r.number_or("weight", 0.9);
        if (!(cfg.fit.weight >= 0.0 && cfg.fit.weight <= 1.0))
            throw ParseError(origin + ": [fit] weight must lie in [0, 1]");
        auto set = [&](const char* key, bool& slot) {
            const auto f = r.flag(key);
            if (f) slot = *f;
        };
        set("float_kappa", cfg.fit.mask.kappa);
        set("float_gamma_split", cfg.fit.mask.gamma_split);
        set("float_p_in", cfg.fit.mask.P_in_eff);
        set("float_omega_m_bare", cfg.fit.mask.omega_m_bare);
        set("float_dt_stray", cfg.fit.mask.dT_stray);
        set("float_heating_product", cfg.fit.mask.heating_product);
        cfg.fit.max_simplex_evals = static_cast<int>(r.number_or("max_simplex_evals", 2000));
        cfg.fit.max_gn_iters = static_cast<int>(r.number_or("max_gn_iters", 200));
        cfg.fit.multi_start = static_cast<int>(r.number_or("multi_start", 1));
        cfg.fit.seed = static_cast<unsigned>(r.number_or("seed", 0));
        r.finish();
    }

    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw ParseError("cannot open config: " + path);
    return parse_config(is, path);
}

}  // namespace omcool::io
