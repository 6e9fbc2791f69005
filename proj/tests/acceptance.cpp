// Acceptance suite: one PASS/FAIL line per criterion.
//   acceptance            run all
//   acceptance 2 3        run a subset
// Exit status is nonzero when any selected criterion fails.
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "eitfwm/analysis.hpp"
#include "eitfwm/config.hpp"
#include "eitfwm/experiment.hpp"
#include "eitfwm/jointmode.hpp"
#include "eitfwm/kernels.hpp"
#include "eitfwm/mb_solver.hpp"
#include "eitfwm/presets.hpp"
#include "eitfwm/spectral.hpp"

using namespace eitfwm;

namespace {

struct Check {
    std::string what;
    bool ok;
};

struct Outcome {
    std::vector<Check> checks;
    void add(bool ok, const std::string& what) { checks.push_back({what, ok}); }
    bool ok() const {
        for (const auto& c : checks)
            if (!c.ok) return false;
        return true;
    }
};

std::string f(const char* fmt, double a, double b = 0, double c = 0, double d = 0) {
    char buf[256];
    std::snprintf(buf, sizeof buf, fmt, a, b, c, d);
    return buf;
}

ExperimentSpec preset(const char* name) { return parse_spec(find_preset(name)->ini, name); }

double seconds_since(std::chrono::steady_clock::time_point t0) {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

// ---------------------------------------------------------------------------

Outcome c1() {
    Outcome o;
    const ExperimentSpec s = preset("fig4");
    const MediumParams m = s.medium_at(s.medium.alpha0L);
    const PulseSpec p = s.pulse_for(m);
    const BoundaryInputs in = sample_inputs(p, s.time_grid(p, m));
    GridSpec gs = s.grid;
    gs.keep_space_time = false;
    const auto t0 = std::chrono::steady_clock::now();
    const MbResult mb = integrate(m, in, Control::constant(m.omega), gs);
    const double el = seconds_since(t0);
    SpectralOptions exact = s.spectral;
    exact.keep_m22 = true;
    const SpectralFields fx = propagate_spectral(m, in, 1.0, exact);
    const SpectralFields fa = propagate_spectral(m, in, 1.0, s.spectral);
    const double es = rel_l2_abs(mb.fields.signal_out, fx.signal), ek = rel_l2_abs(mb.fields.stokes_out, fx.stokes);
    o.add(es <= 0.02, f("|eps| rel L2 %.2e <= 0.02", es));
    o.add(ek <= 0.02, f("|eps'*| rel L2 %.2e <= 0.02", ek));
    o.add(el < 60, f("time-domain runtime %.1f s < 60 s", el));
    const double as = rel_l2_abs(mb.fields.signal_out, fa.signal), ak = rel_l2_abs(mb.fields.stokes_out, fa.stokes);
    o.add(true, f("info: against the M22-dropped closed-form T: %.2e / %.2e", as, ak));
    return o;
}

Outcome c2() {
    Outcome o;
    const ExperimentSpec s = preset("fig8");
    const MediumParams m = s.medium_at(s.medium.alpha0L);
    const DerivedRates d = derive(m);
    const TimeGrid kg = kernel_grid(s.kernel_t_min, s.kernel_t_max, s.dt);
    const KernelSet num = kernels_numeric(m, s.z, kg, s.kernel_opts);
    const KernelSet cf = kernels_closed_form(m, s.z, kg);
    const double bw = 0.1 * d.gamma_E;
    for (KernelId id : all_kernels) {
        const double dist = band_limited_distance([&](double w) { return sampled_spectrum(num[id], kg, w); },
                                                  [&](double w) { return sampled_spectrum(cf[id], kg, w); }, bw);
        o.add(dist <= 0.05, std::string(kernel_name(id)) + f(": numeric vs closed form %.2f%% <= 5%%", 100 * dist));
    }
    // box limit approached monotonically as the control is raised, window fixed
    for (KernelId id : all_kernels) {
        std::vector<double> ds;
        for (double k : {1.0, std::sqrt(3.0), 3.0}) {
            MediumParams mk = m;
            mk.omega = m.omega * k;
            mk.delta = mk.light_shift();
            const KernelSet ck = kernels_closed_form(mk, s.z, kg);
            ds.push_back(band_limited_distance([&](double w) { return box_spectrum(mk, id, s.z, w); },
                                               [&](double w) { return sampled_spectrum(ck[id], kg, w); }, bw));
        }
        o.add(ds[1] < ds[0] && ds[2] < ds[1],
              std::string(kernel_name(id)) + f(": box vs closed form %.2e > %.2e > %.2e", ds[0], ds[1], ds[2]));
    }
    const KernelSet bx = kernels_box_limit(m, s.z, kg);
    double box_h = 0, num_h = 0;
    for (auto v : bx[KernelId::f3].samples) box_h = std::max(box_h, std::abs(v.imag()));
    for (auto v : num[KernelId::f3].samples) num_h = std::max(num_h, std::abs(v.imag()));
    const double khz = 1e3 / two_pi;
    o.add(std::abs(box_h - std::abs(d.delta_R)) <= 1e-9 * std::abs(d.delta_R) && std::abs(box_h * khz - 14.6) < 0.05,
          f("box peak |Im f3|/2pi %.3f kHz = |Delta_R|/2pi %.3f kHz (14.6)", box_h * khz, std::abs(d.delta_R) * khz));
    o.add(std::abs(d.v_g * khz - 16.7) < 0.05, f("v_g/(2pi L) %.3f kHz (16.7), support %.3f us", d.v_g * khz, s.z / d.v_g));
    o.add(true, f("info: numeric peak |Im f3|/2pi %.2f kHz", num_h * khz));
    return o;
}

Outcome c3() {
    Outcome o;
    const ExperimentSpec s = preset("fig8");
    const MediumParams m = s.medium_at(s.medium.alpha0L);
    const DerivedRates d = derive(m);
    const double bw = 0.1 * d.gamma_E, r = d.gN_over_omega;
    const std::pair<KernelId, KernelId> pairs[] = {{KernelId::h1, KernelId::f1}, {KernelId::h2, KernelId::f2}, {KernelId::h3, KernelId::f3}};
    int j = 1;
    for (const auto& [h, fk] : pairs) {
        const double e = band_limited_distance(
            [&, fk = fk](double w) { return -r * kernel_spectrum_numeric(m, fk, s.z, w, s.kernel_opts.h_form); },
            [&, h = h](double w) { return kernel_spectrum_numeric(m, h, s.z, w, s.kernel_opts.h_form); }, bw);
        o.add(e <= 0.03, f("j=%.0f: |h + (gN/Omega) f| / |h| = %.2f%% <= 3%%", j, 100 * e));
        ++j;
    }
    const TimeGrid kg = kernel_grid(s.kernel_t_min, s.kernel_t_max, s.dt);
    const KernelSet num = kernels_numeric(m, s.z, kg, s.kernel_opts);
    double worst = 0, scale = 0;
    for (std::size_t i = 0; i < kg.n; ++i) {
        worst = std::max(worst, std::abs(num[KernelId::g3].samples[i] + num[KernelId::f3].samples[i]));
        scale = std::max(scale, std::abs(num[KernelId::f3].samples[i]));
    }
    o.add(worst <= 1e-10 * scale, f("g3 = -f3 by construction: max dev %.1e (rel)", worst / scale));
    double dev = 0, ref = 0;
    for (int k = -400; k <= 400; ++k) {
        const double w = 3.0 * bw * k / 400.0;
        dev = std::max(dev, std::abs(g3_spectrum_expm(m, s.z, w) + kernel_spectrum_numeric(m, KernelId::f3, s.z, w)));
        ref = std::max(ref, std::abs(kernel_spectrum_numeric(m, KernelId::f3, s.z, w)));
    }
    o.add(dev <= 1e-6 * ref, f("g3 via independent matrix exponential vs -f3: %.1e <= 1e-6", dev / ref));
    return o;
}

Outcome c4() {
    Outcome o;
    const ExperimentSpec s = preset("fig4");
    const MediumParams m = s.medium_at(s.medium.alpha0L);
    const PulseSpec p = s.pulse_for(m);
    const BoundaryInputs in = sample_inputs(p, s.time_grid(p, m));
    GridSpec gs = s.grid;
    gs.keep_space_time = false;
    MbOptions mo;
    mo.snapshot_times = {*s.snapshot_time};
    const MbResult mb = integrate(m, in, Control::constant(m.omega), gs, mo);
    const Snapshot& sn = mb.snapshots.front();
    std::vector<double> zs;
    cvec td;
    for (int j = gs.nz / 16; j <= gs.nz; j += gs.nz / 16) {
        zs.push_back(double(j) / gs.nz);
        td.push_back(sn.S[static_cast<std::size_t>(j)]);
    }
    const TimeGrid kg = kernel_grid(s.kernel_t_min, s.kernel_t_max, s.dt);
    const cvec cf = spinwave_profile_kernels(m, in, zs, sn.t, KernelMethod::closed_form_finite_GE, kg);
    const cvec bx = spinwave_profile_kernels(m, in, zs, sn.t, KernelMethod::box_limit, kg);
    const double a = rel_l2_abs(cf, td), b = rel_l2_abs(bx, td), c = rel_l2_abs(bx, cf);
    o.add(a <= 0.10, f("S(z) at t=%.0f us: finite-Gamma_E kernels vs time domain %.2f%% <= 10%%", sn.t, 100 * a));
    o.add(b <= 0.10, f("box limit vs time domain %.2f%% <= 10%%", 100 * b));
    o.add(c <= 0.10, f("box limit vs finite-Gamma_E kernels %.2f%% <= 10%%", 100 * c));
    return o;
}

Outcome c5() {
    Outcome o;
    const ExperimentSpec s = preset("fig5");
    const std::vector<double> a0 = {10, 50, 100};
    auto div = parallel_map(a0, [&](const double& a) {
        const MediumParams m = s.medium_at(a);
        const PulseSpec p = s.pulse_for(m);
        const BoundaryInputs in = sample_inputs(p, s.time_grid(p, m));
        const Control ctl = Control::constant(m.omega);
        const auto full = evolve_joint(m, in, ctl, JointMode::full, s.joint);
        const auto hom = evolve_joint(m, in, ctl, JointMode::homogeneous, s.joint);
        return rel_l2_abs(hom.F_out, full.F_out);
    });
    o.add(div[0] < 0.05, f("alpha0L=10: full vs homogeneous %.2f%% < 5%%", 100 * div[0]));
    o.add(div[1] > 0.15, f("alpha0L=50: %.1f%% > 15%%", 100 * div[1]));
    o.add(div[2] > 0.15, f("alpha0L=100: %.1f%% > 15%%", 100 * div[2]));
    return o;
}

Outcome c6() {
    Outcome o;
    // (a) shape invariance against the slow-light run
    ExperimentSpec s = preset("fig2");
    StorageScenario sc = s.scenario();
    sc.schedule.storage_time = 50;
    const TimeGrid g = sc.time_grid();
    const BoundaryInputs in = sample_inputs(sc.pulse, g);
    const StorageResult r = run_storage(sc);
    const MbResult slow = integrate(sc.medium, in, Control::constant(sc.schedule.omega_write), sc.grid);
    const Segment tail = segment_of(g, slow.fields.signal_out, slow.fields.stokes_out, sc.schedule.t_off,
                                    g.t_end() - sc.schedule.storage_time);
    const std::size_t n = std::min(tail.signal.size(), r.retrieved.signal.size());
    auto head = [n](const cvec& x) { return cvec(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n)); };
    const double xs = xcorr_peak(head(tail.signal), head(r.retrieved.signal), 0);
    const double xk = xcorr_peak(head(tail.stokes), head(r.retrieved.stokes), 0);
    o.add(xs >= 0.98, f("retrieved vs shifted slow-light signal: xcorr %.5f >= 0.98", xs));
    o.add(xk >= 0.98, f("retrieved vs shifted slow-light Stokes: xcorr %.5f >= 0.98", xk));
    o.add(r.snapshot_relation_error <= 0.005, f("S(t_read) = S(t_off) e^{-Gamma0 T}: %.1e <= 0.5%%", r.snapshot_relation_error));
    // (b) decay constant
    const ExperimentSpec sd = preset("fig3");
    const StorageScenario base = sd.scenario();
    const DecaySweepResult dr = decay_sweep(base, sd.storage_times);
    const double tau = 1.0 / (2.0 * base.medium.gamma0);
    for (int c = 0; c < 2; ++c) {
        const double e = std::abs(dr.fit[c].tau - tau) / tau;
        o.add(!dr.fit[c].no_decay && e <= 0.05,
              std::string(c ? "Stokes" : "signal") + f(" decay fit tau %.1f us vs configured %.1f us (%.2f%% <= 5%%)", dr.fit[c].tau, tau, 100 * e));
    }
    return o;
}

Outcome c7() {
    Outcome o;
    const ExperimentSpec s = preset("fig7");
    const StorageScenario sc = s.scenario();
    const std::vector<cplx> rv{s.r_values[0], s.r_values[1]};
    auto rows = parallel_map(s.alpha0L_list, [&](const double& a) {
        StorageScenario x = sc;
        x.medium = s.medium_at(a);
        return stokes_sensitivity(x, rv)[1];
    });
    const SensitivityRow& r52 = rows.back();
    const double q0 = r52.leak_stokes / r52.retrieved_signal, q1 = r52.leak_stokes / r52.retrieved_stokes;
    o.add(q0 >= 5, f("alpha0L=52: leak Stokes dev %.3f / retrieved signal dev %.4f = %.1fx >= 5x", r52.leak_stokes, r52.retrieved_signal, q0));
    o.add(q1 >= 5, f("alpha0L=52: leak Stokes dev / retrieved Stokes dev %.4f = %.1fx >= 5x", r52.retrieved_stokes, q1));
    std::vector<double> x, y0, y1;
    for (std::size_t k = 0; k < rows.size(); ++k) {
        x.push_back(s.alpha0L_list[k] * sc.medium.gamma / sc.medium.delta_hf);
        y0.push_back(rows[k].retrieved_signal);
        y1.push_back(rows[k].retrieved_stokes);
    }
    auto slope = [&](const std::vector<double>& y) {
        double mx = 0, my = 0, sxx = 0, sxy = 0;
        for (std::size_t i = 0; i < x.size(); ++i) {
            mx += std::log(x[i]) / x.size();
            my += std::log(y[i]) / x.size();
        }
        for (std::size_t i = 0; i < x.size(); ++i) {
            sxx += std::pow(std::log(x[i]) - mx, 2);
            sxy += (std::log(x[i]) - mx) * (std::log(y[i]) - my);
        }
        return sxy / sxx;
    };
    const double e0 = slope(y0), e1 = slope(y1);
    o.add(std::abs(e0 - 2) <= 0.5, f("retrieved signal deviation exponent %.2f in [1.5, 2.5]", e0));
    o.add(std::abs(e1 - 2) <= 0.5, f("retrieved Stokes deviation exponent %.2f in [1.5, 2.5]", e1));
    return o;
}

// small problem shared by the property checks
struct Small {
    MediumParams m;
    PulseSpec p;
    TimeGrid g;
    BoundaryInputs in;
    GridSpec gs{32, 0, 1, false};
    Small() {
        m.alpha0L = 20;
        m.delta = m.light_shift();
        p.fwhm = 1.5;
        p.center = 0;
        p.stokes_ratio = cplx(0.7, 0.2);
        g = TimeGrid::span(-4, 8, 0.02);
        in = sample_inputs(p, g);
    }
};

double max_rel(const cvec& a, const cvec& b) {
    double d = 0, s = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        d = std::max(d, std::abs(a[i] - b[i]));
        s = std::max(s, std::abs(b[i]));
    }
    return s > 0 ? d / s : d;
}

Outcome c8() {
    Outcome o;
    Small sm;
    const cplx lam(0.3, -1.7);
    BoundaryInputs sc = sm.in;
    for (auto& v : sc.signal) v *= lam;
    for (auto& v : sc.stokes) v *= lam;
    auto scaled = [&](cvec v) {
        for (auto& x : v) x *= lam;
        return v;
    };
    const Control ctl = Control::constant(sm.m.omega);
    {
        const MbResult a = integrate(sm.m, sm.in, ctl, sm.gs), b = integrate(sm.m, sc, ctl, sm.gs);
        const double e = std::max(max_rel(b.fields.signal_out, scaled(a.fields.signal_out)), max_rel(b.fields.stokes_out, scaled(a.fields.stokes_out)));
        o.add(e < 1e-12, f("linearity, time domain: %.1e", e));
    }
    {
        const SpectralFields a = propagate_spectral(sm.m, sm.in, 1.0), b = propagate_spectral(sm.m, sc, 1.0);
        const double e = std::max(max_rel(b.signal, scaled(a.signal)), max_rel(b.stokes, scaled(a.stokes)));
        o.add(e < 1e-12, f("linearity, spectral: %.1e", e));
    }
    {
        const KernelSet ks = kernels_closed_form(sm.m, 1.0, kernel_grid(-2, 6, sm.g.dt));
        const IoPrediction a = io_relation(sm.in, ks), b = io_relation(sc, ks);
        const double e = std::max(max_rel(b.signal, scaled(a.signal)), max_rel(b.S, scaled(a.S)));
        o.add(e < 1e-12, f("linearity, kernels: %.1e", e));
    }
    {
        JointOptions jo;
        jo.nz = 64;
        const auto a = evolve_joint(sm.m, sm.in, ctl, JointMode::full, jo), b = evolve_joint(sm.m, sc, ctl, JointMode::full, jo);
        const double e = max_rel(b.F_out, scaled(a.F_out));
        o.add(e < 1e-12, f("linearity, joint mode: %.1e", e));
    }
    {
        BoundaryInputs z = sm.in;
        std::fill(z.signal.begin(), z.signal.end(), cplx{});
        std::fill(z.stokes.begin(), z.stokes.end(), cplx{});
        GridSpec gs = sm.gs;
        gs.keep_space_time = true;
        const MbResult r = integrate(sm.m, z, ctl, gs);
        const SpectralFields sp = propagate_spectral(sm.m, z, 1.0);
        bool zero = true;
        for (auto v : r.fields.signal_out) zero &= v == cplx{};
        for (auto v : r.fields.stokes_out) zero &= v == cplx{};
        for (auto v : r.atoms.S.data) zero &= v == cplx{};
        for (auto v : r.atoms.P.data) zero &= v == cplx{};
        for (auto v : sp.signal) zero &= v == cplx{};
        o.add(zero, "zero input gives identically zero fields and coherences");
    }
    {
        const double tc = 1.0;
        BoundaryInputs tr = sm.in;
        const std::size_t ic = sm.g.index_at_or_after(tc);
        for (std::size_t i = ic + 1; i < tr.grid.n; ++i) tr.signal[i] = tr.stokes[i] = 0.0;
        const MbResult a = integrate(sm.m, sm.in, ctl, sm.gs), b = integrate(sm.m, tr, ctl, sm.gs);
        double e = 0;
        for (std::size_t i = 0; i <= ic; ++i)
            e = std::max({e, std::abs(a.fields.signal_out[i] - b.fields.signal_out[i]), std::abs(a.fields.stokes_out[i] - b.fields.stokes_out[i])});
        o.add(e == 0.0, f("causality: outputs up to the truncation time unchanged (max diff %.1e)", e));
    }
    {
        const SpectralFields sp = propagate_spectral(sm.m, sm.in, 1.0);
        const ParsevalPair pp = parseval_energies(sp.signal, sm.g.dt);
        const double e = std::abs(pp.time_domain - pp.freq_domain) / pp.time_domain;
        o.add(e <= 1e-6, f("Parseval: %.1e <= 1e-6", e));
    }
    {
        const MediumParams m = preset("fig8").medium_at(80);
        double worst = 0;
        for (int k = -200; k <= 200; ++k) {
            const double w = from_mhz(0.5) * k / 200.0;
            const SpectralPoint sp = spectral_point(m, w);
            worst = std::max(worst, std::abs(transfer_matrix(m, 1.0, w).det() * std::exp(-2.0 * I * sp.sigma) - 1.0));
        }
        o.add(worst <= 1e-9, f("det T e^{-2 i sigma z} = 1: max dev %.1e", worst));
    }
    for (double gmhz : {145.0, 150.0}) {
        MediumParams m;
        m.gamma = from_mhz(gmhz);
        const double th = 2 * m.delta_hf / m.gamma;
        m.alpha0L = th * 0.999;
        const bool below = breakdown_flag(m).valid;
        m.alpha0L = th * 1.001;
        const bool above = breakdown_flag(m).valid;
        const double rep = breakdown_flag(m).threshold_alpha0L;
        o.add(below && !above && std::abs(rep - th) <= 1e-12 * th && std::abs(th - 100) <= 10,
              f("breakdown flag trips at alpha0L = %.1f for gamma/2pi = %.0f MHz", th, gmhz));
    }
    return o;
}

const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria = {
    {"oracle equivalence, time domain vs frequency domain", c1},
    {"kernel hierarchy: numeric vs closed form vs box limit", c2},
    {"h to f proportionality and g3 = -f3", c3},
    {"spin-wave snapshot: time domain vs kernel pictures", c4},
    {"joint-mode threshold in optical depth", c5},
    {"storage protocol: shape invariance and decay fit", c6},
    {"Stokes-seed insensitivity of the retrieved pulses", c7},
    {"property suite", c8},
};

}  // namespace

int main(int argc, char** argv) {
    std::set<int> pick;
    for (int i = 1; i < argc; ++i) pick.insert(std::atoi(argv[i]));
    int failed = 0;
    for (std::size_t k = 0; k < criteria.size(); ++k) {
        const int id = static_cast<int>(k) + 1;
        if (!pick.empty() && !pick.count(id)) continue;
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = criteria[k].second();
        } catch (const std::exception& e) {
            o.add(false, std::string("exception: ") + e.what());
        }
        const bool ok = o.ok();
        failed += !ok;
        std::printf("criterion %d %s  %s  (%.1f s)\n", id, ok ? "PASS" : "FAIL", criteria[k].first.c_str(), seconds_since(t0));
        for (const auto& c : o.checks) std::printf("    [%s] %s\n", c.ok ? "ok" : "xx", c.what.c_str());
        std::fflush(stdout);
    }
    return failed ? 1 : 0;
}
