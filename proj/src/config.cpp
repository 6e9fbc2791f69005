#include "eitfwm/config.hpp"

#include <algorithm>
#include <cctype>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>
#include <cstdio>
#include <fstream>
#include <map>
#include <regex>
#include <set>
#include <sstream>

namespace eitfwm {

namespace pt = boost::property_tree;

const char* kind_name(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::slow_light: return "slow_light";
        case ExperimentKind::stored_light: return "stored_light";
        case ExperimentKind::kernel_study: return "kernel_study";
        case ExperimentKind::joint_mode_study: return "joint_mode_study";
        case ExperimentKind::od_sweep: return "od_sweep";
        case ExperimentKind::decay_sweep: return "decay_sweep";
        case ExperimentKind::sensitivity_study: return "sensitivity_study";
    }
    return "?";
}

const char* solver_name(SolverKind s) {
    switch (s) {
        case SolverKind::time_domain: return "time_domain";
        case SolverKind::spectral: return "spectral";
        case SolverKind::kernels: return "kernels";
        case SolverKind::joint: return "joint";
    }
    return "?";
}

bool ExperimentSpec::uses(SolverKind s) const { return std::find(solvers.begin(), solvers.end(), s) != solvers.end(); }

MediumParams ExperimentSpec::medium_at(double alpha0L) const {
    MediumParams m = medium;
    m.alpha0L = alpha0L;
    if (delta_is_light_shift) m.delta = m.light_shift();
    return m;
}

PulseSpec ExperimentSpec::pulse_for(const MediumParams& m) const {
    PulseSpec p = pulse;
    if (bandwidth_ge) {
        const DerivedRates d = derive(m);
        p.fwhm = fwhm_for_bandwidth(*bandwidth_ge * d.gamma_E);
    }
    return p;
}

TimeGrid ExperimentSpec::time_grid(const PulseSpec& p, const MediumParams& m) const {
    double a = t_start ? *t_start : p.window_start() - lead;
    double b;
    if (t_end) {
        b = *t_end;
    } else {
        const DerivedRates d = derive(m);
        double last = p.window_end();
        if (has_control) last = std::max(last, control.t_on());
        b = last + (d.degenerate ? 0.0 : d.delay()) + tail;
    }
    const double k0 = std::floor(a / dt + 1e-9);
    TimeGrid g;
    g.dt = dt;
    g.t0 = k0 * dt;
    g.n = static_cast<std::size_t>(std::ceil((b - g.t0) / dt - 1e-9)) + 1;
    return g;
}

StorageScenario ExperimentSpec::scenario() const {
    StorageScenario sc;
    sc.medium = medium_at(medium.alpha0L);
    sc.pulse = pulse_for(sc.medium);
    sc.schedule = control;
    sc.grid = grid;
    sc.grid.keep_space_time = grid.keep_space_time;
    sc.dt = dt;
    sc.lead = lead;
    sc.tail = tail;
    return sc;
}

cplx parse_complex(const std::string& raw) {
    std::string s;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) s += c;
    static const std::regex re_full(R"(^([+-]?[0-9.]+(?:[eE][+-]?[0-9]+)?)(?:([+-](?:[0-9.]+(?:[eE][+-]?[0-9]+)?)?)[ij])?$)");
    static const std::regex re_imag(R"(^([+-]?(?:[0-9.]+(?:[eE][+-]?[0-9]+)?)?)[ij]$)");
    std::smatch m;
    auto num = [&](const std::string& x) {
        if (x.empty() || x == "+") return 1.0;
        if (x == "-") return -1.0;
        return std::stod(x);
    };
    if (std::regex_match(s, m, re_full)) {
        const double re = std::stod(m[1].str());
        const double im = m[2].matched ? num(m[2].str()) : 0.0;
        return {re, im};
    }
    if (std::regex_match(s, m, re_imag)) return {0.0, num(m[1].str())};
    throw ValidationError("cannot parse complex value '" + raw + "'");
}

std::string format_complex(cplx c) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g%+.12gi", c.real(), c.imag());
    return buf;
}

namespace {

std::vector<std::string> split_list(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) {
        item.erase(0, item.find_first_not_of(" \t"));
        item.erase(item.find_last_not_of(" \t") + 1);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

class Section {
public:
    Section(const pt::ptree* t, std::string name) : tree_(t), name_(std::move(name)) {}

    bool present() const { return tree_ != nullptr; }

    std::optional<std::string> str(const std::string& key) {
        seen_.insert(key);
        if (!tree_) return std::nullopt;
        auto v = tree_->get_optional<std::string>(pt::ptree::path_type(key, '\0'));
        if (!v) return std::nullopt;
        std::string s = *v;
        auto hash = s.find('#');
        if (hash != std::string::npos) s = s.substr(0, hash);
        s.erase(s.find_last_not_of(" \t") + 1);
        return s;
    }

    std::optional<double> num(const std::string& key) {
        auto s = str(key);
        if (!s) return std::nullopt;
        try {
            std::size_t pos = 0;
            double v = std::stod(*s, &pos);
            if (pos != s->size()) throw std::invalid_argument("trailing");
            return v;
        } catch (const std::exception&) {
            throw ValidationError("[" + name_ + "] " + key + ": expected a number, got '" + *s + "'");
        }
    }

    std::optional<bool> flag(const std::string& key) {
        auto s = str(key);
        if (!s) return std::nullopt;
        if (*s == "true" || *s == "1" || *s == "yes" || *s == "on") return true;
        if (*s == "false" || *s == "0" || *s == "no" || *s == "off") return false;
        throw ValidationError("[" + name_ + "] " + key + ": expected a boolean, got '" + *s + "'");
    }

    std::optional<cplx> cnum(const std::string& key) {
        auto s = str(key);
        if (!s) return std::nullopt;
        try {
            return parse_complex(*s);
        } catch (const ValidationError&) {
            throw ValidationError("[" + name_ + "] " + key + ": expected a complex number, got '" + *s + "'");
        }
    }

    std::vector<double> nums(const std::string& key) {
        std::vector<double> out;
        auto s = str(key);
        if (!s) return out;
        for (const auto& x : split_list(*s, ',')) {
            try {
                out.push_back(std::stod(x));
            } catch (const std::exception&) {
                throw ValidationError("[" + name_ + "] " + key + ": bad list entry '" + x + "'");
            }
        }
        return out;
    }

    void reject_unknown() const {
        if (!tree_) return;
        for (const auto& kv : *tree_)
            if (!seen_.count(kv.first)) throw ValidationError("[" + name_ + "] unknown key '" + kv.first + "'");
    }

private:
    const pt::ptree* tree_;
    std::string name_;
    std::set<std::string> seen_;
};

const std::map<std::string, ExperimentKind> kinds = {
    {"slow_light", ExperimentKind::slow_light},         {"stored_light", ExperimentKind::stored_light},
    {"kernel_study", ExperimentKind::kernel_study},     {"joint_mode_study", ExperimentKind::joint_mode_study},
    {"od_sweep", ExperimentKind::od_sweep},             {"decay_sweep", ExperimentKind::decay_sweep},
    {"sensitivity_study", ExperimentKind::sensitivity_study}};

std::vector<std::string> required_sections(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::slow_light: return {"medium", "pulse", "grid"};
        case ExperimentKind::kernel_study: return {"medium", "grid"};
        case ExperimentKind::joint_mode_study: return {"medium", "pulse", "grid"};
        default: return {"medium", "pulse", "control", "grid"};
    }
}

std::vector<SolverKind> default_solvers(ExperimentKind k) {
    switch (k) {
        case ExperimentKind::slow_light: return {SolverKind::time_domain, SolverKind::spectral, SolverKind::kernels};
        case ExperimentKind::kernel_study: return {SolverKind::kernels};
        case ExperimentKind::joint_mode_study: return {SolverKind::joint};
        default: return {SolverKind::time_domain};
    }
}

}  // namespace

ExperimentSpec parse_spec(const std::string& text, const std::string& origin) {
    pt::ptree tree;
    try {
        std::istringstream ss(text);
        pt::read_ini(ss, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ValidationError(origin + ": " + e.message() + " (line " + std::to_string(e.line()) + ")");
    }
    static const std::set<std::string> known = {"experiment", "medium", "pulse", "control", "grid"};
    for (const auto& kv : tree)
        if (!known.count(kv.first)) throw ValidationError("unknown section [" + kv.first + "]");

    auto sec = [&](const char* n) { return Section(tree.get_child_optional(n).get_ptr(), n); };

    ExperimentSpec s;
    s.origin = origin;
    Section ex = sec("experiment");
    if (!ex.present()) {
        std::string msg = "missing sections: [experiment]";
        for (const char* n : {"medium", "pulse", "control", "grid"})
            if (!tree.get_child_optional(n)) msg += std::string(" [") + n + "]";
        throw ValidationError(msg + " (the [experiment] kind decides which are required)");
    }
    auto kind = ex.str("kind");
    if (!kind) throw ValidationError("[experiment] kind: required");
    auto it = kinds.find(*kind);
    if (it == kinds.end()) throw ValidationError("[experiment] kind: unknown value '" + *kind + "'");
    s.kind = it->second;

    std::vector<std::string> missing;
    for (const auto& r : required_sections(s.kind))
        if (!tree.get_child_optional(r)) missing.push_back(r);
    if (!missing.empty()) {
        std::string msg = std::string("missing sections for kind ") + kind_name(s.kind) + ":";
        for (auto& m : missing) msg += " [" + m + "]";
        throw ValidationError(msg);
    }

    s.name = ex.str("name").value_or(kind_name(s.kind));
    if (auto v = ex.str("solvers")) {
        for (const auto& x : split_list(*v, ',')) {
            if (x == "time_domain") s.solvers.push_back(SolverKind::time_domain);
            else if (x == "spectral") s.solvers.push_back(SolverKind::spectral);
            else if (x == "kernels") s.solvers.push_back(SolverKind::kernels);
            else if (x == "joint") s.solvers.push_back(SolverKind::joint);
            else throw ValidationError("[experiment] solvers: unknown solver '" + x + "'");
        }
    } else {
        s.solvers = default_solvers(s.kind);
    }
    s.eit_only_overlay = ex.flag("eit_only_overlay").value_or(false);
    s.homogeneous_overlay = ex.flag("homogeneous_overlay").value_or(true);
    s.storage_times = ex.nums("storage_times_us");
    s.alpha0L_list = ex.nums("alpha0L_list");
    if (auto v = ex.str("r_values"))
        for (const auto& x : split_list(*v, ',')) s.r_values.push_back(parse_complex(x));
    if (auto v = ex.str("od_points")) {
        for (const auto& item : split_list(*v, ';')) {
            auto f = split_list(item, ':');
            if (f.size() != 3) throw ValidationError("[experiment] od_points: expected alpha0L:omega_mhz:fwhm_us, got '" + item + "'");
            s.od_points.push_back({std::stod(f[0]), from_mhz(std::stod(f[1])), std::stod(f[2])});
        }
    }
    s.z = ex.num("z").value_or(1.0);
    s.snapshot_time = ex.num("snapshot_time_us");
    if (auto v = ex.str("h_form")) {
        if (*v == "expanded") s.kernel_opts.h_form = HForm::expanded;
        else if (*v == "exact") s.kernel_opts.h_form = HForm::exact;
        else throw ValidationError("[experiment] h_form: expected expanded or exact");
    }
    ex.reject_unknown();

    Section md = sec("medium");
    if (auto v = md.num("alpha0L")) s.medium.alpha0L = *v;
    if (auto v = md.num("gamma_mhz")) s.medium.gamma = from_mhz(*v);
    if (auto v = md.num("gamma0_mhz")) s.medium.gamma0 = from_mhz(*v);
    if (auto v = md.num("delta_hf_mhz")) s.medium.delta_hf = from_mhz(*v);
    if (auto v = md.num("omega_mhz")) s.medium.omega = from_mhz(*v);
    if (auto v = md.num("clebsch_ratio")) s.medium.clebsch_ratio = *v;
    if (auto v = md.str("delta_mhz")) {
        if (*v == "light_shift") {
            s.delta_is_light_shift = true;
        } else {
            try {
                s.medium.delta = from_mhz(std::stod(*v));
            } catch (const std::exception&) {
                throw ValidationError("[medium] delta_mhz: expected a number or light_shift");
            }
        }
    }
    md.reject_unknown();
    if (s.delta_is_light_shift) s.medium.delta = s.medium.light_shift();
    try {
        s.medium.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("[medium] ") + e.what());
    }

    Section pl = sec("pulse");
    if (auto v = pl.str("shape")) {
        if (*v == "truncated_gaussian") s.pulse.shape = PulseShape::truncated_gaussian;
        else if (*v == "custom_samples") s.pulse.shape = PulseShape::custom_samples;
        else throw ValidationError("[pulse] shape: expected truncated_gaussian or custom_samples");
    }
    if (auto v = pl.str("samples_csv")) {
        PulseSpec c = load_custom_pulse(*v);
        c.amplitude = s.pulse.amplitude;
        s.pulse = c;
    }
    if (auto v = pl.num("fwhm_us")) s.pulse.fwhm = *v;
    s.bandwidth_ge = pl.num("bandwidth_ge");
    if (s.bandwidth_ge && !(*s.bandwidth_ge > 0)) throw ValidationError("[pulse] bandwidth_ge must be > 0");
    if (auto v = pl.num("center_us")) s.pulse.center = *v;
    if (auto v = pl.cnum("amplitude")) s.pulse.amplitude = *v;
    if (auto v = pl.cnum("stokes_ratio")) s.pulse.stokes_ratio = *v;
    if (auto v = pl.num("trunc_start_us")) s.pulse.trunc_start = *v;
    if (auto v = pl.num("trunc_end_us")) s.pulse.trunc_end = *v;
    pl.reject_unknown();
    if (pl.present()) {
        try {
            s.pulse_for(s.medium).validate();
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("[pulse] ") + e.what());
        }
    }

    Section ct = sec("control");
    s.has_control = ct.present();
    s.control.omega_write = s.control.omega_read = s.medium.omega;
    if (auto v = ct.num("omega_write_mhz")) s.control.omega_write = from_mhz(*v);
    if (auto v = ct.num("omega_read_mhz")) s.control.omega_read = from_mhz(*v);
    if (auto v = ct.num("t_off_us")) s.control.t_off = *v;
    if (auto v = ct.num("storage_time_us")) s.control.storage_time = *v;
    if (auto v = ct.str("switch")) {
        if (*v == "instantaneous") s.control.switch_model.kind = SwitchModel::instantaneous;
        else if (*v == "linear_ramp") s.control.switch_model.kind = SwitchModel::linear_ramp;
        else throw ValidationError("[control] switch: expected instantaneous or linear_ramp");
    }
    if (auto v = ct.num("ramp_us")) s.control.switch_model.ramp = *v;
    ct.reject_unknown();
    if (s.has_control) {
        try {
            s.control.validate();
        } catch (const ValidationError& e) {
            throw ValidationError(std::string("[control] ") + e.what());
        }
    }

    Section gr = sec("grid");
    if (auto v = gr.num("nz")) s.grid.nz = static_cast<int>(*v);
    if (auto v = gr.num("substeps")) s.grid.substeps = static_cast<int>(*v);
    if (auto v = gr.num("record_stride")) s.grid.record_stride = static_cast<std::size_t>(*v);
    if (auto v = gr.num("dt_us")) s.dt = *v;
    s.t_start = gr.num("t_start_us");
    s.t_end = gr.num("t_end_us");
    if (auto v = gr.num("lead_us")) s.lead = *v;
    if (auto v = gr.num("tail_us")) s.tail = *v;
    if (auto v = gr.num("bandwidth_mhz")) s.spectral.bandwidth = s.kernel_opts.bandwidth = from_mhz(*v);
    if (auto v = gr.num("n_omega")) s.spectral.min_points = static_cast<std::size_t>(*v);
    if (auto v = gr.num("kernel_points")) s.kernel_opts.n_points = static_cast<std::size_t>(*v);
    if (auto v = gr.flag("keep_m22")) s.spectral.keep_m22 = *v;
    if (auto v = gr.num("kernel_t_min_us")) s.kernel_t_min = *v;
    if (auto v = gr.num("kernel_t_max_us")) s.kernel_t_max = *v;
    if (auto v = gr.num("joint_nz")) s.joint.nz = static_cast<int>(*v);
    gr.reject_unknown();
    if (s.grid.nz < 2) throw ValidationError("[grid] nz must be >= 2");
    if (!(s.dt > 0)) throw ValidationError("[grid] dt_us must be > 0");
    if (s.grid.substeps < 0) throw ValidationError("[grid] substeps must be >= 0");
    if (s.grid.record_stride < 1) throw ValidationError("[grid] record_stride must be >= 1");

    switch (s.kind) {
        case ExperimentKind::decay_sweep:
            if (s.storage_times.size() < 4) throw ValidationError("[experiment] storage_times_us: decay_sweep needs >= 4 values");
            break;
        case ExperimentKind::od_sweep:
            if (s.od_points.empty()) throw ValidationError("[experiment] od_points: required for od_sweep");
            break;
        case ExperimentKind::sensitivity_study:
            if (s.r_values.empty()) throw ValidationError("[experiment] r_values: required for sensitivity_study");
            break;
        case ExperimentKind::joint_mode_study:
            if (s.alpha0L_list.empty()) s.alpha0L_list = {s.medium.alpha0L};
            break;
        default: break;
    }
    return s;
}

ExperimentSpec load_spec_file(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("cannot read spec file " + path);
    std::stringstream ss;
    ss << f.rdbuf();
    return parse_spec(ss.str(), path);
}

}  // namespace eitfwm
