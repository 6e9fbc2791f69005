#include "eitfwm/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <future>

#include "eitfwm/analysis.hpp"
#include "eitfwm/kernels.hpp"

namespace eitfwm {

namespace {

void say(const RunOptions& o, const std::string& s) {
    if (o.log) o.log(s);
}

std::string tag(double v) {
    std::string s = fmt_num(v);
    for (auto& c : s) {
        if (c == '.') c = 'p';
        if (c == '-') c = 'm';
    }
    return s;
}

double log_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const auto n = static_cast<double>(x.size());
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += std::log(x[i]) / n;
        my += std::log(y[i]) / n;
    }
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (std::log(x[i]) - mx) * (std::log(x[i]) - mx);
        sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
    }
    return sxx > 0 ? sxy / sxx : 0.0;
}

cvec joint_input(const MediumParams& m, const BoundaryInputs& in) {
    const cplx G = m.Gamma_at(m.omega);
    cvec F(in.grid.n);
    for (std::size_t i = 0; i < F.size(); ++i) F[i] = in.signal[i] - I * (G / m.delta_hf) * in.stokes[i];
    return F;
}

json energies(const cvec& sig, const cvec& stk, double dt) {
    return {{"signal", pulse_energy(sig, dt)}, {"stokes", pulse_energy(stk, dt)}};
}

void append(std::vector<std::string>& to, const std::vector<std::string>& from, const std::string& prefix = "") {
    for (const auto& w : from) to.push_back(prefix + w);
}

// ---- slow light -------------------------------------------------------------

void run_slow_light(const ExperimentSpec& spec, const RunOptions& opt, ArtifactWriter& W, RunOutcome& out) {
    const MediumParams m = spec.medium_at(spec.medium.alpha0L);
    const PulseSpec pulse = spec.pulse_for(m);
    const TimeGrid g = spec.time_grid(pulse, m);
    const BoundaryInputs in = sample_inputs(pulse, g);
    const DerivedRates d = derive(m);
    W.trace("inputs.csv", g, {{"signal", in.signal}, {"stokes", in.stokes}}, "boundary inputs at z=0");
    json& R = out.summary["results"];
    R["pulse"] = {{"fwhm_us", pulse.fwhm}, {"bandwidth_over_gamma_E", pulse_bandwidth(pulse) / d.gamma_E}};
    R["input_energy"] = energies(in.signal, in.stokes, g.dt);

    std::vector<std::pair<std::string, std::pair<cvec, cvec>>> outputs;
    std::optional<Snapshot> snap;
    const Control ctl = Control::constant(m.omega);

    if (spec.uses(SolverKind::time_domain)) {
        say(opt, "time-domain integration");
        GridSpec gs = spec.grid;
        gs.keep_space_time = opt.dump;
        MbOptions mo;
        if (spec.snapshot_time) mo.snapshot_times = {*spec.snapshot_time};
        MbResult r = integrate(m, in, ctl, gs, mo);
        W.trace("time_domain.csv", g, {{"signal", r.fields.signal_out}, {"stokes", r.fields.stokes_out}},
                "Maxwell-Bloch output at z=1");
        R["time_domain"] = {{"substeps", r.substeps}, {"output_energy", energies(r.fields.signal_out, r.fields.stokes_out, g.dt)}};
        append(out.warnings, r.warnings, "time_domain: ");
        if (opt.dump)
            W.space_time("time_domain_fields.csv",
                         {{"eps", &r.fields.eps}, {"eps_prime_conj", &r.fields.eps_prime_conj}, {"S", &r.atoms.S}, {"P", &r.atoms.P}},
                         "space-time fields from the Maxwell-Bloch run");
        if (!r.snapshots.empty()) snap = r.snapshots.front();
        outputs.push_back({"time_domain", {r.fields.signal_out, r.fields.stokes_out}});
        if (spec.eit_only_overlay) {
            MbResult e = integrate_eit_only(m, in, ctl, gs, {});
            W.trace("eit_only.csv", g, {{"signal", e.fields.signal_out}}, "EIT-only model output at z=1");
        }
    }
    if (spec.uses(SolverKind::spectral)) {
        say(opt, "spectral propagation");
        SpectralFields s = propagate_spectral(m, in, spec.z, spec.spectral);
        W.trace("spectral.csv", g, {{"signal", s.signal}, {"stokes", s.stokes}}, "frequency-domain output at z");
        R["spectral"] = {{"alias_fraction", s.alias_fraction}, {"n_omega", s.n_omega},
                         {"output_energy", energies(s.signal, s.stokes, g.dt)}};
        append(out.warnings, s.warnings, "spectral: ");
        outputs.push_back({"spectral", {s.signal, s.stokes}});
    }
    TimeGrid kg;
    if (spec.uses(SolverKind::kernels)) {
        kg = kernel_grid(spec.kernel_t_min, spec.kernel_t_max, g.dt);
        for (KernelMethod meth : {KernelMethod::numeric_integral, KernelMethod::closed_form_finite_GE, KernelMethod::box_limit}) {
            say(opt, std::string("kernel convolution: ") + method_name(meth));
            KernelSet ks = meth == KernelMethod::numeric_integral ? kernels_numeric(m, spec.z, kg, spec.kernel_opts)
                           : meth == KernelMethod::closed_form_finite_GE ? kernels_closed_form(m, spec.z, kg)
                                                                         : kernels_box_limit(m, spec.z, kg);
            IoPrediction p = io_relation(in, ks);
            W.trace(std::string("kernels_") + method_name(meth) + ".csv", g,
                    {{"signal", p.signal}, {"stokes", p.stokes}, {"S", p.S}},
                    std::string("kernel input-output prediction, ") + method_name(meth));
            append(out.warnings, ks.warnings, std::string("kernels ") + method_name(meth) + ": ");
            outputs.push_back({std::string("kernels_") + method_name(meth), {p.signal, p.stokes}});
        }
    }
    json cmp = json::object();
    for (std::size_t a = 0; a < outputs.size(); ++a)
        for (std::size_t b = a + 1; b < outputs.size(); ++b)
            cmp[outputs[b].first + "_vs_" + outputs[a].first] = {
                {"signal", rel_l2_abs(outputs[b].second.first, outputs[a].second.first)},
                {"stokes", rel_l2_abs(outputs[b].second.second, outputs[a].second.second)}};
    R["rel_l2_abs"] = cmp;

    if (snap) {
        const int nz = spec.grid.nz;
        const int stride = std::max(1, nz / 16);
        std::vector<double> zs;
        cvec td;
        for (int j = stride; j <= nz; j += stride) {
            zs.push_back(double(j) / nz);
            td.push_back(snap->S[static_cast<std::size_t>(j)]);
        }
        if (kg.n == 0) kg = kernel_grid(spec.kernel_t_min, spec.kernel_t_max, g.dt);
        const cvec cf = spinwave_profile_kernels(m, in, zs, snap->t, KernelMethod::closed_form_finite_GE, kg);
        const cvec bx = spinwave_profile_kernels(m, in, zs, snap->t, KernelMethod::box_limit, kg);
        std::vector<std::vector<double>> rows;
        for (std::size_t k = 0; k < zs.size(); ++k)
            rows.push_back({zs[k], td[k].real(), td[k].imag(), cf[k].real(), cf[k].imag(), bx[k].real(), bx[k].imag()});
        W.table("spinwave_snapshot.csv", {"z", "time_domain_re", "time_domain_im", "closed_form_re", "closed_form_im", "box_re", "box_im"},
                rows, "spin-wave profile S(z) at the snapshot time");
        R["spinwave_snapshot"] = {{"t_us", snap->t},
                                  {"closed_vs_time_domain", rel_l2_abs(cf, td)},
                                  {"box_vs_time_domain", rel_l2_abs(bx, td)},
                                  {"box_vs_closed", rel_l2_abs(bx, cf)}};
    }
}

// ---- stored light -----------------------------------------------------------

void run_stored(const ExperimentSpec& spec, const RunOptions& opt, ArtifactWriter& W, RunOutcome& out) {
    StorageScenario sc = spec.scenario();
    sc.grid.keep_space_time = opt.dump;
    const TimeGrid g = sc.time_grid();
    const BoundaryInputs in = sample_inputs(sc.pulse, g);
    W.trace("inputs.csv", g, {{"signal", in.signal}, {"stokes", in.stokes}}, "boundary inputs at z=0");

    say(opt, "storage run and slow-light reference");
    auto ref = std::async(std::launch::async, [&] {
        GridSpec gs = sc.grid;
        gs.keep_space_time = false;
        return integrate(sc.medium, in, Control::constant(sc.schedule.omega_write), gs, {});
    });
    std::future<StorageResult> eit;
    if (spec.eit_only_overlay)
        eit = std::async(std::launch::async, [&] {
            StorageScenario e = sc;
            e.eit_only = true;
            e.grid.keep_space_time = false;
            return run_storage(e);
        });
    const StorageResult r = run_storage(sc);
    const MbResult slow = ref.get();

    const auto& f = r.run.fields;
    W.trace("storage.csv", g, {{"signal", f.signal_out}, {"stokes", f.stokes_out}}, "stored-light output at z=1");
    W.trace("leak.csv", r.leak.grid, {{"signal", r.leak.signal}, {"stokes", r.leak.stokes}}, "leakage segment t < t_off");
    W.trace("retrieved.csv", r.retrieved.grid, {{"signal", r.retrieved.signal}, {"stokes", r.retrieved.stokes}},
            "retrieval segment t >= t_on");
    W.trace("slow_light_reference.csv", g, {{"signal", slow.fields.signal_out}, {"stokes", slow.fields.stokes_out}},
            "same input with the control left on");
    if (eit.valid()) {
        const StorageResult e = eit.get();
        W.trace("eit_only.csv", g, {{"signal", e.run.fields.signal_out}}, "EIT-only stored-light output");
    }
    std::vector<std::vector<double>> rows;
    for (std::size_t j = 0; j < r.S_off.size(); ++j)
        rows.push_back({double(j) / (r.S_off.size() - 1), r.S_off[j].real(), r.S_off[j].imag(), r.S_read[j].real(), r.S_read[j].imag()});
    W.table("spinwave_storage.csv", {"z", "S_off_re", "S_off_im", "S_read_re", "S_read_im"}, rows,
            "spin wave at switch-off and just before read-out");
    if (opt.dump)
        W.space_time("storage_fields.csv",
                     {{"eps", &f.eps}, {"eps_prime_conj", &f.eps_prime_conj}, {"S", &r.run.atoms.S}, {"P", &r.run.atoms.P}},
                     "space-time fields of the storage run");

    // retrieved shape vs the slow-light tail shifted by the storage time
    const Segment tail = segment_of(g, slow.fields.signal_out, slow.fields.stokes_out, sc.schedule.t_off, g.t_end() - sc.schedule.storage_time);
    const std::size_t n = std::min(tail.signal.size(), r.retrieved.signal.size());
    auto head = [n](const cvec& x) { return cvec(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)); };
    const EfficiencyReport e = efficiency_report(r);
    json& R = out.summary["results"];
    R["efficiency"] = {{"signal", e.efficiency[0]}, {"stokes", e.efficiency[1]}};
    R["input_energy"] = {{"signal", e.input_energy[0]}, {"stokes", e.input_energy[1]}};
    R["leak_energy"] = {{"signal", e.leak_energy[0]}, {"stokes", e.leak_energy[1]}};
    R["retrieved_energy"] = {{"signal", e.retrieved_energy[0]}, {"stokes", e.retrieved_energy[1]}};
    R["stokes_gain"] = e.stokes_gain;
    R["snapshot_relation_error"] = r.snapshot_relation_error;
    R["shape_xcorr_vs_slow_light"] = {{"signal", xcorr_peak(head(tail.signal), head(r.retrieved.signal), 0)},
                                      {"stokes", xcorr_peak(head(tail.stokes), head(r.retrieved.stokes), 0)}};
    R["efficiency_note"] = "retrieved energy over input energy per channel; the Stokes input mostly leaks";
    append(out.warnings, e.warnings);
    append(out.warnings, r.warnings);
}

// ---- kernels ----------------------------------------------------------------

void run_kernel_study(const ExperimentSpec& spec, const RunOptions& opt, ArtifactWriter& W, RunOutcome& out) {
    const MediumParams m = spec.medium_at(spec.medium.alpha0L);
    const DerivedRates d = derive(m);
    const TimeGrid kg = kernel_grid(spec.kernel_t_min, spec.kernel_t_max, spec.dt);
    say(opt, "numeric kernels");
    const KernelSet num = kernels_numeric(m, spec.z, kg, spec.kernel_opts);
    say(opt, "closed-form and box-limit kernels");
    const KernelSet cf = kernels_closed_form(m, spec.z, kg);
    const KernelSet bx = kernels_box_limit(m, spec.z, kg);

    auto cols = [&](KernelId id) {
        return std::vector<Column>{{"numeric", num[id].samples}, {"closed_form", cf[id].samples}, {"box", bx[id].samples}};
    };
    const std::pair<const char*, KernelId> panels[] = {{"f1", KernelId::f1}, {"h1", KernelId::h1}, {"f2", KernelId::f2},
                                                        {"h2", KernelId::h2}, {"f3", KernelId::f3}, {"h3", KernelId::h3},
                                                        {"g2", KernelId::g2}};
    for (const auto& [nm, id] : panels) {
        auto c = cols(id);
        if (id == KernelId::f3) c.push_back({"g3_numeric", num[KernelId::g3].samples});
        W.trace(std::string("kernel_") + nm + ".csv", kg, c, std::string("kernel ") + nm + "(z,t): numeric, closed form, box limit");
    }

    const double bw = (spec.bandwidth_ge ? *spec.bandwidth_ge : 0.1) * d.gamma_E;
    json dist, hf, imp;
    for (KernelId id : all_kernels) {
        const auto sa = [&](double w) { return sampled_spectrum(num[id], kg, w); };
        const auto sc = [&](double w) { return sampled_spectrum(cf[id], kg, w); };
        const auto sb = [&](double w) { return box_spectrum(m, id, spec.z, w); };
        dist[kernel_name(id)] = {{"numeric_vs_closed", band_limited_distance(sa, sc, bw)},
                                 {"box_vs_closed", band_limited_distance(sb, sc, bw)}};
        json list = json::array();
        for (const auto& im : bx[id].impulses) list.push_back({{"t_us", im.t}, {"weight", to_json(im.weight)}});
        for (const auto& im : cf[id].impulses) list.push_back({{"t_us", im.t}, {"weight", to_json(im.weight)}, {"closed_form", true}});
        if (!list.empty()) imp[kernel_name(id)] = list;
    }
    const double r = d.gN_over_omega;
    const std::pair<KernelId, KernelId> pairs[] = {{KernelId::h1, KernelId::f1}, {KernelId::h2, KernelId::f2}, {KernelId::h3, KernelId::f3}};
    for (const auto& [h, f] : pairs) {
        const HForm hf_form = spec.kernel_opts.h_form;
        const auto sh = [&, h = h](double w) { return kernel_spectrum_numeric(m, h, spec.z, w, hf_form); };
        const auto sf = [&, f = f](double w) { return -r * kernel_spectrum_numeric(m, f, spec.z, w, hf_form); };
        hf[kernel_name(h)] = band_limited_distance(sf, sh, bw);
    }
    double peak_f3 = 0;
    for (auto v : num[KernelId::f3].samples) peak_f3 = std::max(peak_f3, std::abs(v.imag()));
    json& R = out.summary["results"];
    R["window_bandwidth"] = bw;
    R["band_limited_distance"] = dist;
    R["h_plus_r_f_over_h"] = hf;
    R["impulses"] = imp;
    R["peak_abs_im_f3"] = peak_f3;
    R["box_height_abs_delta_R"] = std::abs(d.delta_R) * spec.z;
    R["support_us"] = spec.z / d.v_g;
    append(out.warnings, num.warnings);
}

// ---- joint mode -------------------------------------------------------------

struct JointRow {
    double a0L = 0, fwhm = 0, divergence = 0, mb_vs_joint = -1;
    TimeGrid g;
    cvec Fin, full, hom, sig_part, stk_part, mbF;
};

void run_joint(const ExperimentSpec& spec, const RunOptions& opt, ArtifactWriter& W, RunOutcome& out) {
    say(opt, "joint-mode propagation over " + std::to_string(spec.alpha0L_list.size()) + " optical depths");
    const bool with_mb = spec.uses(SolverKind::time_domain);
    auto rows = parallel_map(spec.alpha0L_list, [&](const double& a) {
        JointRow row;
        const MediumParams m = spec.medium_at(a);
        const PulseSpec pulse = spec.pulse_for(m);
        row.a0L = a;
        row.fwhm = pulse.fwhm;
        row.g = spec.time_grid(pulse, m);
        const BoundaryInputs in = sample_inputs(pulse, row.g);
        const Control ctl = Control::constant(m.omega);
        const JointModeRecord full = evolve_joint(m, in, ctl, JointMode::full, spec.joint);
        row.Fin = joint_input(m, in);
        row.full = full.F_out;
        row.sig_part = full.signal_part_out;
        row.stk_part = full.stokes_part_out;
        if (spec.homogeneous_overlay) {
            row.hom = evolve_joint(m, in, ctl, JointMode::homogeneous, spec.joint).F_out;
            row.divergence = rel_l2_abs(row.hom, row.full);
        }
        if (with_mb) {
            GridSpec gs = spec.grid;
            gs.keep_space_time = false;
            const MbResult r = integrate(m, in, ctl, gs, {});
            row.mbF = decompose_joint(m, row.g, r.fields.signal_out, r.fields.stokes_out, ctl).F_out;
            row.mb_vs_joint = rel_l2_abs(row.full, row.mbF);
        }
        return row;
    });
    std::vector<std::vector<double>> table;
    json list = json::array();
    for (const auto& row : rows) {
        std::vector<Column> c{{"F_in", row.Fin}, {"F_full", row.full}, {"signal_part", row.sig_part}, {"stokes_part", row.stk_part}};
        if (!row.hom.empty()) c.push_back({"F_homogeneous", row.hom});
        if (!row.mbF.empty()) c.push_back({"F_time_domain", row.mbF});
        W.trace("joint_a0L_" + tag(row.a0L) + ".csv", row.g, c, "joint mode F at z=1, alpha0L=" + fmt_num(row.a0L));
        table.push_back({row.a0L, row.fwhm, row.divergence, row.mb_vs_joint});
        list.push_back({{"alpha0L", row.a0L}, {"fwhm_us", row.fwhm}, {"full_vs_homogeneous", row.divergence},
                        {"time_domain_vs_joint", row.mb_vs_joint}});
    }
    W.table("joint_divergence.csv", {"alpha0L", "fwhm_us", "full_vs_homogeneous", "time_domain_vs_joint"}, table,
            "full vs homogeneous joint-mode divergence per optical depth (-1 = not computed)");
    out.summary["results"]["joint"] = list;
}

// ---- sweeps -----------------------------------------------------------------

void run_od_sweep(const ExperimentSpec& spec, const RunOptions& opt, ArtifactWriter& W, RunOutcome& out) {
    say(opt, "optical-depth sweep over " + std::to_string(spec.od_points.size()) + " points");
    StorageScenario sc = spec.scenario();
    const auto entries = od_sweep(sc, spec.od_points);
    std::vector<std::vector<double>> table;
    json list = json::array();
    for (const auto& e : entries) {
        const auto& f = e.storage.run.fields;
        W.trace("od_a0L_" + tag(e.point.alpha0L) + ".csv", f.grid, {{"signal", f.signal_out}, {"stokes", f.stokes_out}},
                "stored-light output at alpha0L=" + fmt_num(e.point.alpha0L));
        table.push_back({e.point.alpha0L, to_mhz(e.point.omega), e.point.fwhm, e.flag.value, e.flag.valid ? 1.0 : 0.0,
                         e.report.efficiency[0], e.report.efficiency[1], e.stokes_retrieved_energy, e.stokes_leak_gain});
        list.push_back({{"alpha0L", e.point.alpha0L}, {"omega_mhz", to_mhz(e.point.omega)}, {"fwhm_us", e.point.fwhm},
                        {"breakdown", e.flag.value}, {"perturbative_valid", e.flag.valid},
                        {"efficiency", {{"signal", e.report.efficiency[0]}, {"stokes", e.report.efficiency[1]}}},
                        {"stokes_leak_gain", e.stokes_leak_gain}});
        append(out.warnings, e.storage.warnings, "alpha0L " + fmt_num(e.point.alpha0L) + ": ");
        append(out.warnings, e.report.warnings, "alpha0L " + fmt_num(e.point.alpha0L) + ": ");
    }
    W.table("od_sweep.csv",
            {"alpha0L", "omega_mhz", "fwhm_us", "breakdown", "perturbative_valid", "efficiency_signal", "efficiency_stokes",
             "stokes_retrieved_energy", "stokes_leak_gain"},
            table, "per-point efficiencies and Stokes gain");
    out.summary["results"]["points"] = list;
}

void run_decay(const ExperimentSpec& spec, const RunOptions& opt, ArtifactWriter& W, RunOutcome& out) {
    say(opt, "storage-time sweep over " + std::to_string(spec.storage_times.size()) + " values");
    const StorageScenario sc = spec.scenario();
    const DecaySweepResult r = decay_sweep(sc, spec.storage_times);
    std::vector<std::vector<double>> table;
    for (std::size_t k = 0; k < r.storage_times.size(); ++k)
        table.push_back({r.storage_times[k], r.energy[0][k], r.energy[1][k], r.normalized[0][k], r.normalized[1][k]});
    W.table("decay.csv", {"storage_time_us", "energy_signal", "energy_stokes", "normalized_signal", "normalized_stokes"},
            table, "retrieved energy per storage time");
    const double tau_cfg = 1.0 / (2.0 * sc.medium.gamma0);
    json fits;
    const char* ch[2] = {"signal", "stokes"};
    for (int c = 0; c < 2; ++c) {
        const DecayFit& f = r.fit[c];
        fits[ch[c]] = {{"tau_us", f.no_decay ? json(nullptr) : json(f.tau)},
                       {"tau_interval_us", {f.tau_lo, std::isinf(f.tau_hi) ? json(nullptr) : json(f.tau_hi)}},
                       {"log_residual_rms", f.residual},
                       {"relative_error", f.no_decay ? json(nullptr) : json(std::abs(f.tau - tau_cfg) / tau_cfg)}};
        append(out.warnings, f.warnings, std::string(ch[c]) + " fit: ");
    }
    out.summary["results"]["configured_tau_us"] = tau_cfg;
    out.summary["results"]["fit"] = fits;
}

void run_sensitivity(const ExperimentSpec& spec, const RunOptions& opt, ArtifactWriter& W, RunOutcome& out) {
    StorageScenario sc = spec.scenario();
    say(opt, "Stokes-seed runs for " + std::to_string(spec.r_values.size()) + " ratios");
    const auto runs = parallel_map(spec.r_values, [&](const cplx& r) {
        StorageScenario s = sc;
        s.pulse.stokes_ratio = r;
        return run_storage(s);
    });
    std::vector<std::vector<double>> table;
    json rows = json::array();
    for (std::size_t k = 0; k < runs.size(); ++k) {
        const auto& x = runs[k];
        const auto& ref = runs.front();
        const auto& f = x.run.fields;
        W.trace("seed_" + std::to_string(k) + ".csv", f.grid, {{"signal", f.signal_out}, {"stokes", f.stokes_out}},
                "stored-light output for stokes_ratio=" + format_complex(spec.r_values[k]));
        const double d[4] = {rel_l2_abs(x.leak.signal, ref.leak.signal), rel_l2_abs(x.leak.stokes, ref.leak.stokes),
                             rel_l2_abs(x.retrieved.signal, ref.retrieved.signal),
                             rel_l2_abs(x.retrieved.stokes, ref.retrieved.stokes)};
        table.push_back({spec.r_values[k].real(), spec.r_values[k].imag(), d[0], d[1], d[2], d[3]});
        rows.push_back({{"r", to_json(spec.r_values[k])}, {"leak_signal", d[0]}, {"leak_stokes", d[1]},
                        {"retrieved_signal", d[2]}, {"retrieved_stokes", d[3]}});
    }
    W.table("sensitivity.csv", {"r_re", "r_im", "leak_signal", "leak_stokes", "retrieved_signal", "retrieved_stokes"}, table,
            "magnitude L2 deviation of each segment from the first stokes_ratio");
    json& R = out.summary["results"];
    R["deviation"] = rows;

    if (!spec.alpha0L_list.empty() && spec.r_values.size() >= 2) {
        say(opt, "optical-depth scaling of the seed sensitivity");
        const std::vector<cplx> rv{spec.r_values[0], spec.r_values[1]};
        auto rs = parallel_map(spec.alpha0L_list, [&](const double& a) {
            StorageScenario s = sc;
            s.medium = spec.medium_at(a);
            return stokes_sensitivity(s, rv)[1];
        });
        std::vector<double> xs, ys0, ys1;
        std::vector<std::vector<double>> t2;
        for (std::size_t k = 0; k < rs.size(); ++k) {
            const double a = spec.alpha0L_list[k];
            const double x = a * sc.medium.gamma / sc.medium.delta_hf;
            xs.push_back(x);
            ys0.push_back(rs[k].retrieved_signal);
            ys1.push_back(rs[k].retrieved_stokes);
            t2.push_back({a, x, rs[k].leak_stokes, rs[k].retrieved_signal, rs[k].retrieved_stokes});
        }
        W.table("sensitivity_scaling.csv", {"alpha0L", "fwm_parameter", "leak_stokes", "retrieved_signal", "retrieved_stokes"}, t2,
                "seed sensitivity vs alpha0L gamma / delta_hf");
        bool positive = std::all_of(ys0.begin(), ys0.end(), [](double v) { return v > 0; }) &&
                        std::all_of(ys1.begin(), ys1.end(), [](double v) { return v > 0; });
        if (positive && xs.size() >= 2)
            R["scaling_exponent"] = {{"retrieved_signal", log_slope(xs, ys0)}, {"retrieved_stokes", log_slope(xs, ys1)}};
    }
}

}  // namespace

cvec spinwave_profile_kernels(const MediumParams& m, const BoundaryInputs& in, const std::vector<double>& z, double t,
                              KernelMethod method, const TimeGrid& kg) {
    if (method == KernelMethod::numeric_integral)
        throw ValidationError("spinwave_profile_kernels: use closed_form or box_limit");
    cvec S(z.size());
    for (std::size_t k = 0; k < z.size(); ++k) {
        const KernelSet ks = method == KernelMethod::box_limit ? kernels_box_limit(m, z[k], kg) : kernels_closed_form(m, z[k], kg);
        S[k] = io_relation_at(in, ks, t).S;
    }
    return S;
}

json derived_to_json(const MediumParams& m) {
    const DerivedRates d = derive(m);
    const BreakdownInfo b = breakdown_flag(m);
    json j = {{"light_shift_khz", to_mhz(d.light_shift) * 1e3},
              {"delta_R_khz", to_mhz(d.delta_R) * 1e3},
              {"gamma_E_khz", to_mhz(d.gamma_E) * 1e3},
              {"gN_over_omega", d.gN_over_omega},
              {"breakdown", {{"value", b.value}, {"valid", b.valid}, {"threshold_alpha0L", b.threshold_alpha0L}}}};
    if (!d.degenerate) {
        j["v_g_over_2pi_khz"] = to_mhz(d.v_g) * 1e3;
        j["delay_us"] = d.delay();
    }
    return j;
}

json spec_to_json(const ExperimentSpec& s) {
    json j;
    j["kind"] = kind_name(s.kind);
    j["name"] = s.name;
    j["origin"] = s.origin;
    json solvers = json::array();
    for (auto k : s.solvers) solvers.push_back(solver_name(k));
    j["solvers"] = solvers;
    const MediumParams& m = s.medium;
    j["medium"] = {{"alpha0L", m.alpha0L}, {"gamma_mhz", to_mhz(m.gamma)}, {"gamma0_mhz", to_mhz(m.gamma0)},
                   {"delta_hf_mhz", to_mhz(m.delta_hf)}, {"delta_mhz", to_mhz(m.delta)},
                   {"delta_is_light_shift", s.delta_is_light_shift}, {"omega_mhz", to_mhz(m.omega)},
                   {"clebsch_ratio", m.clebsch_ratio}};
    const PulseSpec p = s.pulse_for(s.medium);
    j["pulse"] = {{"shape", p.shape == PulseShape::truncated_gaussian ? "truncated_gaussian" : "custom_samples"},
                  {"fwhm_us", p.fwhm}, {"center_us", p.center}, {"amplitude", to_json(p.amplitude)},
                  {"stokes_ratio", to_json(p.stokes_ratio)}, {"window_us", {p.window_start(), p.window_end()}}};
    if (s.bandwidth_ge) j["pulse"]["bandwidth_ge"] = *s.bandwidth_ge;
    if (s.has_control)
        j["control"] = {{"omega_write_mhz", to_mhz(s.control.omega_write)}, {"omega_read_mhz", to_mhz(s.control.omega_read)},
                        {"t_off_us", s.control.t_off}, {"storage_time_us", s.control.storage_time},
                        {"switch", s.control.switch_model.kind == SwitchModel::instantaneous ? "instantaneous" : "linear_ramp"},
                        {"ramp_us", s.control.switch_model.ramp}};
    j["grid"] = {{"nz", s.grid.nz}, {"dt_us", s.dt}, {"substeps", s.grid.substeps}, {"record_stride", s.grid.record_stride},
                 {"lead_us", s.lead}, {"tail_us", s.tail}, {"bandwidth_mhz", to_mhz(s.spectral.bandwidth)},
                 {"n_omega", s.spectral.min_points}, {"kernel_points", s.kernel_opts.n_points},
                 {"kernel_t_us", {s.kernel_t_min, s.kernel_t_max}}, {"joint_nz", s.joint.nz}};
    if (s.t_start) j["grid"]["t_start_us"] = *s.t_start;
    if (s.t_end) j["grid"]["t_end_us"] = *s.t_end;
    j["h_form"] = s.kernel_opts.h_form == HForm::expanded ? "expanded" : "exact";
    j["z"] = s.z;
    if (!s.storage_times.empty()) j["storage_times_us"] = s.storage_times;
    if (!s.alpha0L_list.empty()) j["alpha0L_list"] = s.alpha0L_list;
    if (!s.r_values.empty()) {
        json r = json::array();
        for (auto v : s.r_values) r.push_back(to_json(v));
        j["r_values"] = r;
    }
    if (!s.od_points.empty()) {
        json r = json::array();
        for (auto& p2 : s.od_points) r.push_back({{"alpha0L", p2.alpha0L}, {"omega_mhz", to_mhz(p2.omega)}, {"fwhm_us", p2.fwhm}});
        j["od_points"] = r;
    }
    if (s.snapshot_time) j["snapshot_time_us"] = *s.snapshot_time;
    j["eit_only_overlay"] = s.eit_only_overlay;
    j["homogeneous_overlay"] = s.homogeneous_overlay;
    return j;
}

RunOutcome run_experiment(const ExperimentSpec& spec, const RunOptions& opt) {
    ArtifactWriter W(opt.out_dir);
    RunOutcome out;
    out.summary["name"] = spec.name;
    out.summary["kind"] = kind_name(spec.kind);
    out.summary["derived"] = derived_to_json(spec.medium_at(spec.medium.alpha0L));
    out.summary["results"] = json::object();
    const BreakdownInfo b = breakdown_flag(spec.medium);
    if (!b.valid) out.warnings.push_back("alpha0L gamma / (2 delta_hf) >= 1: perturbative FWM picture not valid");

    switch (spec.kind) {
        case ExperimentKind::slow_light: run_slow_light(spec, opt, W, out); break;
        case ExperimentKind::stored_light: run_stored(spec, opt, W, out); break;
        case ExperimentKind::kernel_study: run_kernel_study(spec, opt, W, out); break;
        case ExperimentKind::joint_mode_study: run_joint(spec, opt, W, out); break;
        case ExperimentKind::od_sweep: run_od_sweep(spec, opt, W, out); break;
        case ExperimentKind::decay_sweep: run_decay(spec, opt, W, out); break;
        case ExperimentKind::sensitivity_study: run_sensitivity(spec, opt, W, out); break;
    }
    out.summary["warnings"] = out.warnings;
    W.json_file("summary.json", out.summary, "results summary");
    W.manifest(spec_to_json(spec));
    for (const auto& f : W.files()) out.files.push_back(f.first);
    out.files.push_back("manifest.json");
    return out;
}

}  // namespace eitfwm
