#include "eitfwm/mb_solver.hpp"

#include <algorithm>
#include <sstream>

#include "eitfwm/analysis.hpp"

namespace eitfwm {

cvec SpaceTimeField::profile(std::size_t it) const {
    const auto w = static_cast<std::size_t>(nz + 1);
    return cvec(data.begin() + static_cast<std::ptrdiff_t>(it * w),
                data.begin() + static_cast<std::ptrdiff_t>((it + 1) * w));
}

double stiff_rate(const MediumParams& p, double max_omega) {
    double r = std::max(p.gamma, max_omega);
    r = std::max(r, std::abs(p.Gamma_at(max_omega)));
    r = std::max(r, std::abs(p.Gamma_at(0.0)));
    return r;
}

int auto_substeps(const MediumParams& p, double max_omega, double dt) {
    return std::max(1, static_cast<int>(std::ceil(dt * stiff_rate(p, max_omega) / 0.09)));
}

namespace {

struct Stepper {
    const MediumParams& p;
    int nz;
    double dz, kappa;
    bool eit_only;
    cvec ks[4], kp[4], ts, tp;

    Stepper(const MediumParams& prm, int n, bool eit)
        : p(prm), nz(n), dz(1.0 / n), kappa(prm.kappa()), eit_only(eit) {
        for (auto& v : ks) v.assign(static_cast<std::size_t>(n + 1), 0.0);
        for (auto& v : kp) v.assign(static_cast<std::size_t>(n + 1), 0.0);
        ts.assign(static_cast<std::size_t>(n + 1), 0.0);
        tp = ts;
    }

    // Fields along z from the boundary values by trapezoid integration.
    void fields(const cvec& s, const cvec& pp, cplx e0, cplx ep0, double om, cvec* e_out, cvec* ep_out) const {
        const cplx ce = I * kappa * 0.5 * dz;
        const cplx cs = -I * kappa * (om / p.delta_hf) * 0.5 * dz;
        cplx e = e0, ep = eit_only ? cplx{0.0} : ep0;
        (*e_out)[0] = e;
        (*ep_out)[0] = ep;
        for (int j = 1; j <= nz; ++j) {
            e += ce * (pp[j - 1] + pp[j]);
            if (!eit_only) ep += cs * (s[j - 1] + s[j]);
            (*e_out)[j] = e;
            (*ep_out)[j] = ep;
        }
    }

    void rhs(const cvec& s, const cvec& pp, cplx e0, cplx ep0, double om, cplx G0, cplx G, cvec& ds, cvec& dp) const {
        const cplx ce = I * kappa * 0.5 * dz;
        const cplx cs = -I * kappa * (om / p.delta_hf) * 0.5 * dz;
        const cplx src = I * (om / p.delta_hf) * kappa;
        const cplx iom = I * om, ik = I * kappa;
        cplx e = e0, ep = ep0;
        for (int j = 0; j <= nz; ++j) {
            if (j > 0) {
                e += ce * (pp[j - 1] + pp[j]);
                if (!eit_only) ep += cs * (s[j - 1] + s[j]);
            }
            ds[j] = -G0 * s[j] + iom * pp[j] + (eit_only ? cplx{0.0} : src * ep);
            dp[j] = -G * pp[j] + iom * s[j] + ik * e;
        }
    }

    void step(cvec& s, cvec& pp, double h, cplx ea, cplx eb, cplx ec, cplx sa, cplx sb, cplx sc, double om) {
        const cplx G0 = p.Gamma0_at(om), G = p.Gamma_at(om);
        const std::size_t n = s.size();
        rhs(s, pp, ea, sa, om, G0, G, ks[0], kp[0]);
        for (std::size_t j = 0; j < n; ++j) { ts[j] = s[j] + 0.5 * h * ks[0][j]; tp[j] = pp[j] + 0.5 * h * kp[0][j]; }
        rhs(ts, tp, eb, sb, om, G0, G, ks[1], kp[1]);
        for (std::size_t j = 0; j < n; ++j) { ts[j] = s[j] + 0.5 * h * ks[1][j]; tp[j] = pp[j] + 0.5 * h * kp[1][j]; }
        rhs(ts, tp, eb, sb, om, G0, G, ks[2], kp[2]);
        for (std::size_t j = 0; j < n; ++j) { ts[j] = s[j] + h * ks[2][j]; tp[j] = pp[j] + h * kp[2][j]; }
        rhs(ts, tp, ec, sc, om, G0, G, ks[3], kp[3]);
        const double h6 = h / 6.0;
        for (std::size_t j = 0; j < n; ++j) {
            s[j] += h6 * (ks[0][j] + 2.0 * ks[1][j] + 2.0 * ks[2][j] + ks[3][j]);
            pp[j] += h6 * (kp[0][j] + 2.0 * kp[1][j] + 2.0 * kp[2][j] + kp[3][j]);
        }
    }
};

double max_abs(const cvec& v) {
    double m = 0;
    for (auto x : v) m = std::max(m, std::abs(x));
    return m;
}

void check_inputs(const MediumParams& p, const BoundaryInputs& in, const GridSpec& grid) {
    p.validate();
    if (grid.nz < 2) throw ValidationError("grid: nz must be >= 2");
    if (in.grid.n < 2) throw ValidationError("grid: need at least 2 time samples");
    if (in.signal.size() != in.grid.n || in.stokes.size() != in.grid.n)
        throw ValidationError("grid: boundary inputs are not sampled on the time grid");
    if (grid.record_stride == 0) throw ValidationError("grid: record_stride must be >= 1");
}

}  // namespace

MbResult integrate(const MediumParams& p, const BoundaryInputs& in, const Control& control, const GridSpec& grid,
                   MbOptions opt) {
    check_inputs(p, in, grid);
    const TimeGrid& tg = in.grid;
    const double dt = tg.dt;
    MbResult res;

    int sub = grid.substeps;
    const double rate = stiff_rate(p, control.max_omega);
    if (sub <= 0) {
        sub = auto_substeps(p, control.max_omega, dt);
    } else if (dt / sub * rate >= 0.1) {
        std::ostringstream m;
        m << "step size: h*max(gamma, Omega, |Gamma|) = " << dt / sub * rate << " >= 0.1; raise substeps";
        throw ValidationError(m.str());
    }
    res.substeps = sub;
    const double h = dt / sub;

    const int nz = grid.nz;
    const auto w = static_cast<std::size_t>(nz + 1);
    cvec s(w, 0.0), pp(w, 0.0), e(w), ep(w);
    Stepper st(p, nz, opt.eit_only);

    double peak_in = std::max(max_abs(in.signal), max_abs(in.stokes));
    const double blowup = opt.blowup_factor * std::max(peak_in, 1e-300);

    FieldRecord& fr = res.fields;
    fr.grid = tg;
    fr.signal_out.resize(tg.n);
    fr.stokes_out.resize(tg.n);
    auto init_field = [&](SpaceTimeField& f) {
        f.nz = nz;
        if (!grid.keep_space_time) return;
        std::size_t nrec = (tg.n + grid.record_stride - 1) / grid.record_stride;
        f.t.reserve(nrec);
        f.data.reserve(nrec * w);
    };
    init_field(fr.eps);
    init_field(fr.eps_prime_conj);
    init_field(res.atoms.S);
    init_field(res.atoms.P);

    std::vector<std::size_t> snap_idx;
    for (double ts : opt.snapshot_times) {
        if (ts < tg.t0 || ts > tg.t_end()) throw ValidationError("snapshot time outside the time grid");
        snap_idx.push_back(std::min(tg.index_at_or_after(ts), tg.n - 1));
    }
    res.snapshots.resize(snap_idx.size());

    std::vector<double> om_mid(static_cast<std::size_t>(sub));
    for (std::size_t i = 0; i < tg.n; ++i) {
        const double ti = tg.t(i);
        const double om_i = control(ti);
        st.fields(s, pp, in.signal[i], in.stokes[i], om_i, &e, &ep);
        fr.signal_out[i] = e[nz];
        fr.stokes_out[i] = ep[nz];
        if (!std::isfinite(e[nz].real()) || !std::isfinite(e[nz].imag()) || !std::isfinite(ep[nz].real()) ||
            !std::isfinite(ep[nz].imag()))
            throw SolverError("non-finite field at t = " + std::to_string(ti));
        double mag = std::max({max_abs(e), max_abs(ep), max_abs(s), max_abs(pp)});
        if (mag > blowup) throw SolverError("instability: |field| exceeded blow-up threshold at t = " + std::to_string(ti));

        if (grid.keep_space_time && i % grid.record_stride == 0) {
            auto put = [&](SpaceTimeField& f, const cvec& v) {
                f.t.push_back(ti);
                f.data.insert(f.data.end(), v.begin(), v.end());
            };
            put(fr.eps, e);
            put(fr.eps_prime_conj, ep);
            put(res.atoms.S, s);
            put(res.atoms.P, pp);
        }
        for (std::size_t k = 0; k < snap_idx.size(); ++k) {
            if (snap_idx[k] == i) res.snapshots[k] = Snapshot{ti, s, pp, e, ep};
        }
        if (i + 1 == tg.n) break;

        const cplx e_a = in.signal[i], e_b = in.signal[i + 1];
        const cplx s_a = in.stokes[i], s_b = in.stokes[i + 1];
        bool dark = opt.dark_fast_path && e_a == 0.0 && e_b == 0.0 && s_a == 0.0 && s_b == 0.0;
        for (int k = 0; k < sub; ++k) {
            om_mid[static_cast<std::size_t>(k)] = control(ti + (k + 0.5) * h);
            dark = dark && om_mid[static_cast<std::size_t>(k)] == 0.0;
        }
        if (dark) {
            // Omega = 0 and no input: s decouples, p is already negligible
            double ms = max_abs(s), mp = max_abs(pp);
            if (mp <= 1e-14 * ms || mp == 0.0) {
                const cplx f = std::exp(-p.Gamma0_at(0.0) * dt);
                for (auto& x : s) x *= f;
                std::fill(pp.begin(), pp.end(), cplx{0.0});
                ++res.dark_intervals;
                continue;
            }
        }
        for (int k = 0; k < sub; ++k) {
            const double a = double(k) / sub, b = (k + 0.5) / sub, c = (k + 1.0) / sub;
            auto lerp = [](cplx x, cplx y, double f) { return x + (y - x) * f; };
            st.step(s, pp, h, lerp(e_a, e_b, a), lerp(e_a, e_b, b), lerp(e_a, e_b, c), lerp(s_a, s_b, a),
                    lerp(s_a, s_b, b), lerp(s_a, s_b, c), om_mid[static_cast<std::size_t>(k)]);
        }
    }
    if (opt.eit_only) std::fill(fr.stokes_out.begin(), fr.stokes_out.end(), cplx{0.0});
    return res;
}

MbResult integrate_eit_only(const MediumParams& p, const BoundaryInputs& in, const Control& control,
                            const GridSpec& grid, MbOptions opt) {
    opt.eit_only = true;
    return integrate(p, in, control, grid, opt);
}

Segment segment_of(const TimeGrid& g, const cvec& sig, const cvec& stk, double a, double b) {
    Segment out;
    std::size_t i0 = g.index_at_or_after(a), i1 = g.index_at_or_after(b);
    if (i1 < i0) i1 = i0;
    out.grid = TimeGrid{g.t(i0), g.dt, i1 - i0};
    out.signal.assign(sig.begin() + static_cast<std::ptrdiff_t>(i0), sig.begin() + static_cast<std::ptrdiff_t>(i1));
    out.stokes.assign(stk.begin() + static_cast<std::ptrdiff_t>(i0), stk.begin() + static_cast<std::ptrdiff_t>(i1));
    return out;
}

StorageResult storage_run(const MediumParams& p, const BoundaryInputs& in, const ControlSchedule& schedule,
                          const GridSpec& grid, MbOptions opt) {
    schedule.validate();
    const TimeGrid& tg = in.grid;
    const double t_on = schedule.t_on();
    if (schedule.t_off < tg.t0 || schedule.t_off > tg.t_end()) throw ValidationError("storage: t_off outside the time grid");
    if (t_on >= tg.t_end()) throw ValidationError("storage: retrieval window outside the time grid");

    opt.snapshot_times = {schedule.t_off, t_on};
    StorageResult r;
    r.run = integrate(p, in, Control::from_schedule(schedule), grid, opt);
    const FieldRecord& f = r.run.fields;
    r.leak = segment_of(tg, f.signal_out, f.stokes_out, tg.t0, schedule.t_off);
    r.retrieved = segment_of(tg, f.signal_out, f.stokes_out, t_on, tg.t_end() + tg.dt);
    r.S_off = r.run.snapshots[0].S;
    r.S_read = r.run.snapshots[1].S;

    const double T = r.run.snapshots[1].t - r.run.snapshots[0].t;
    const cplx decay = std::exp(-p.Gamma0_at(0.0) * T);
    double num = 0, den = 0;
    for (std::size_t j = 0; j < r.S_off.size(); ++j) {
        num += std::norm(r.S_read[j] - r.S_off[j] * decay);
        den += std::norm(r.S_off[j] * decay);
    }
    r.snapshot_relation_error = den > 0 ? std::sqrt(num / den) : 0.0;

    r.input_signal_energy = pulse_energy(in.signal, tg.dt);
    r.input_stokes_energy = pulse_energy(in.stokes, tg.dt);
    r.warnings = r.run.warnings;
    if (r.input_signal_energy > 0 && pulse_energy(r.leak.signal, tg.dt) > 0.99 * r.input_signal_energy)
        r.warnings.push_back("leakage exceeds 99% of the input signal energy: nothing stored");
    return r;
}

}  // namespace eitfwm
