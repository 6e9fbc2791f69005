#include "eitfwm/jointmode.hpp"

#include <algorithm>

namespace eitfwm {

JointModeRecord decompose_joint(const MediumParams& p, const TimeGrid& g, const cvec& eps, const cvec& eps_pc,
                                const Control& control) {
    if (eps.size() != g.n || eps_pc.size() != g.n) throw ValidationError("decompose_joint: traces not on grid");
    JointModeRecord r;
    r.grid = g;
    r.F_out.resize(g.n);
    r.signal_part_out = eps;
    r.stokes_part_out.resize(g.n);
    r.stokes_out = eps_pc;
    for (std::size_t i = 0; i < g.n; ++i) {
        const cplx G = p.Gamma_at(control(g.t(i)));
        r.stokes_part_out[i] = -I * (G / p.delta_hf) * eps_pc[i];
        r.F_out[i] = r.signal_part_out[i] + r.stokes_part_out[i];
    }
    return r;
}

cvec adiabatic_P(const MediumParams& p, const cvec& S, const cvec& eps, double omega_t) {
    if (S.size() != eps.size()) throw ValidationError("adiabatic_P: S and eps sizes differ");
    const cplx G = p.Gamma_at(omega_t);
    const double kap = p.kappa();
    cvec P(S.size());
    for (std::size_t j = 0; j < S.size(); ++j) P[j] = I * (omega_t / G) * S[j] + I * (kap / G) * eps[j];
    return P;
}

namespace {

struct JointRhs {
    const MediumParams& p;
    int nz;
    double dz, kappa;
    bool homogeneous;

    struct Rates {
        double om, vg, DR;
        cplx G0, G, decay, drive;
    };

    Rates rates(double om) const {
        Rates r;
        r.om = om;
        r.vg = om * om / (kappa * kappa);
        r.DR = -om * om / p.delta_hf;
        r.G0 = p.Gamma0_at(om);
        r.G = p.Gamma_at(om);
        r.decay = r.G0 + om * om / r.G;
        r.drive = kappa * om / r.G;
        return r;
    }

    cplx stokes_at_end(const cvec& s, cplx ep0, double om) const {
        const cplx cs = -I * kappa * (om / p.delta_hf) * 0.5 * dz;
        cplx ep = ep0;
        for (int j = 1; j <= nz; ++j) ep += cs * (s[j - 1] + s[j]);
        return ep;
    }

    void operator()(const cvec& F, const cvec& s, cplx F0, cplx ep0, const Rates& r, cvec& dF, cvec& ds) const {
        const cplx cs = -I * kappa * (r.om / p.delta_hf) * 0.5 * dz;
        auto Fa = [&](int j) { return j == 0 ? F0 : F[static_cast<std::size_t>(j)]; };
        cplx ep = ep0;
        dF[0] = 0.0;
        ds[0] = -r.decay * s[0] - r.drive * F0;
        for (int j = 1; j <= nz; ++j) {
            ep += cs * (s[j - 1] + s[j]);
            cplx dFdz;
            if (j == 1)
                dFdz = (nz >= 2 ? (Fa(2) - F0) / (2.0 * dz) : (Fa(1) - F0) / dz);
            else if (j == nz)
                dFdz = (3.0 * Fa(j) - 4.0 * Fa(j - 1) + Fa(j - 2)) / (2.0 * dz);
            else
                dFdz = (2.0 * Fa(j + 1) + 3.0 * Fa(j) - 6.0 * Fa(j - 1) + Fa(j - 2)) / (6.0 * dz);
            dF[j] = -r.vg * dFdz + (homogeneous ? cplx{0.0} : I * r.DR * ep);
            ds[j] = -r.decay * s[j] - r.drive * Fa(j);
        }
    }
};

}  // namespace

JointModeRecord evolve_joint(const MediumParams& p, const BoundaryInputs& in, const Control& control, JointMode mode,
                             const JointOptions& opt) {
    p.validate();
    if (opt.nz < 4) throw ValidationError("joint: nz must be >= 4");
    if (in.grid.n < 2 || in.signal.size() != in.grid.n || in.stokes.size() != in.grid.n)
        throw ValidationError("joint: boundary inputs are not sampled on the time grid");
    if (opt.record_stride == 0) throw ValidationError("joint: record_stride must be >= 1");
    const TimeGrid& tg = in.grid;
    const int nz = opt.nz;
    const double dz = 1.0 / nz, dt = tg.dt;
    JointRhs rhs{p, nz, dz, p.kappa(), mode == JointMode::homogeneous};

    const double om_max = control.max_omega;
    const double vg_max = om_max * om_max / p.kappa2();
    const double rate_max = std::abs(p.Gamma0_at(om_max) + om_max * om_max / p.Gamma_at(om_max));
    int sub = opt.substeps;
    if (sub <= 0)
        sub = std::max({1, static_cast<int>(std::ceil(vg_max * dt / dz / opt.cfl)),
                        static_cast<int>(std::ceil(dt * rate_max / 0.2))});
    const double h = dt / sub;

    const auto w = static_cast<std::size_t>(nz + 1);
    cvec F(w, 0.0), s(w, 0.0);
    cvec k[4], l[4], tF(w), ts(w);
    for (int q = 0; q < 4; ++q) {
        k[q].assign(w, 0.0);
        l[q].assign(w, 0.0);
    }

    JointModeRecord rec;
    rec.grid = tg;
    rec.substeps = sub;
    rec.F_out.resize(tg.n);
    rec.signal_part_out.resize(tg.n);
    rec.stokes_part_out.resize(tg.n);
    rec.stokes_out.resize(tg.n);
    rec.F.nz = rec.S.nz = rec.eps_prime_conj.nz = nz;

    auto bF = [&](double f, std::size_t i, double om) {
        const cplx e = in.signal[i] + (in.signal[i + 1] - in.signal[i]) * f;
        const cplx ep = in.stokes[i] + (in.stokes[i + 1] - in.stokes[i]) * f;
        return std::pair<cplx, cplx>{e - I * (p.Gamma_at(om) / p.delta_hf) * ep, ep};
    };

    const double peak = std::max(1e-300, [&] {
        double m = 0;
        for (std::size_t i = 0; i < tg.n; ++i) m = std::max({m, std::abs(in.signal[i]), std::abs(in.stokes[i])});
        return m;
    }());

    for (std::size_t i = 0; i < tg.n; ++i) {
        const double ti = tg.t(i);
        const double om_i = control(ti);
        const cplx G_i = p.Gamma_at(om_i);
        F[0] = in.signal[i] - I * (G_i / p.delta_hf) * in.stokes[i];
        const cplx ep_end = rhs.stokes_at_end(s, in.stokes[i], om_i);
        rec.F_out[i] = F[nz];
        rec.stokes_out[i] = ep_end;
        rec.stokes_part_out[i] = -I * (G_i / p.delta_hf) * ep_end;
        rec.signal_part_out[i] = F[nz] - rec.stokes_part_out[i];
        if (!std::isfinite(std::abs(F[nz])) || std::abs(F[nz]) > 1e6 * peak)
            throw SolverError("joint: instability at t = " + std::to_string(ti));
        if (opt.keep_space_time && i % opt.record_stride == 0) {
            rec.F.t.push_back(ti);
            rec.F.data.insert(rec.F.data.end(), F.begin(), F.end());
            rec.S.t.push_back(ti);
            rec.S.data.insert(rec.S.data.end(), s.begin(), s.end());
            cvec ep(w);
            const cplx cs = -I * rhs.kappa * (om_i / p.delta_hf) * 0.5 * dz;
            ep[0] = in.stokes[i];
            for (int j = 1; j <= nz; ++j) ep[j] = ep[j - 1] + cs * (s[j - 1] + s[j]);
            rec.eps_prime_conj.t.push_back(ti);
            rec.eps_prime_conj.data.insert(rec.eps_prime_conj.data.end(), ep.begin(), ep.end());
        }
        if (i + 1 == tg.n) break;

        for (int q = 0; q < sub; ++q) {
            const double a = double(q) / sub, b = (q + 0.5) / sub, c = (q + 1.0) / sub;
            const double om = control(ti + (q + 0.5) * h);
            const auto r = rhs.rates(om);
            auto [Fa, epa] = bF(a, i, om);
            auto [Fb, epb] = bF(b, i, om);
            auto [Fc, epc] = bF(c, i, om);
            F[0] = Fa;
            rhs(F, s, Fa, epa, r, k[0], l[0]);
            for (std::size_t j = 0; j < w; ++j) { tF[j] = F[j] + 0.5 * h * k[0][j]; ts[j] = s[j] + 0.5 * h * l[0][j]; }
            rhs(tF, ts, Fb, epb, r, k[1], l[1]);
            for (std::size_t j = 0; j < w; ++j) { tF[j] = F[j] + 0.5 * h * k[1][j]; ts[j] = s[j] + 0.5 * h * l[1][j]; }
            rhs(tF, ts, Fb, epb, r, k[2], l[2]);
            for (std::size_t j = 0; j < w; ++j) { tF[j] = F[j] + h * k[2][j]; ts[j] = s[j] + h * l[2][j]; }
            rhs(tF, ts, Fc, epc, r, k[3], l[3]);
            for (std::size_t j = 0; j < w; ++j) {
                F[j] += h / 6.0 * (k[0][j] + 2.0 * k[1][j] + 2.0 * k[2][j] + k[3][j]);
                s[j] += h / 6.0 * (l[0][j] + 2.0 * l[1][j] + 2.0 * l[2][j] + l[3][j]);
            }
            F[0] = Fc;
        }
    }
    return rec;
}

SpaceTimeField spinwave_from_joint(const MediumParams& p, const SpaceTimeField& F, const Control& control,
                                   const cvec& S_initial) {
    p.validate();
    const auto w = static_cast<std::size_t>(F.nz + 1);
    const std::size_t nt = F.nt();
    if (nt < 2 || F.data.size() != nt * w) throw ValidationError("spinwave_from_joint: malformed F record");
    if (!S_initial.empty() && S_initial.size() != w) throw ValidationError("spinwave_from_joint: bad initial S");
    const double kap = p.kappa();
    SpaceTimeField S;
    S.nz = F.nz;
    S.t = F.t;
    S.data.resize(nt * w);
    cvec s = S_initial.empty() ? cvec(w, 0.0) : S_initial;
    std::copy(s.begin(), s.end(), S.data.begin());
    for (std::size_t i = 0; i + 1 < nt; ++i) {
        const double t0 = F.t[i], dt = F.t[i + 1] - F.t[i];
        double om_max = std::max(control(t0), control(t0 + dt));
        const double rate = std::abs(p.Gamma0_at(om_max) + om_max * om_max / p.Gamma_at(om_max));
        const int sub = std::max(4, static_cast<int>(std::ceil(dt * rate / 0.2)));
        const double h = dt / sub;
        for (std::size_t j = 0; j < w; ++j) {
            const cplx Fa = F.data[i * w + j], Fb = F.data[(i + 1) * w + j];
            cplx x = s[j];
            for (int q = 0; q < sub; ++q) {
                const double om = control(t0 + (q + 0.5) * h);
                const cplx decay = p.Gamma0_at(om) + om * om / p.Gamma_at(om);
                const cplx drive = kap * om / p.Gamma_at(om);
                auto f = [&](cplx y, double frac) { return -decay * y - drive * (Fa + (Fb - Fa) * frac); };
                const double a = double(q) / sub, b = (q + 0.5) / sub, c = (q + 1.0) / sub;
                const cplx k1 = f(x, a), k2 = f(x + 0.5 * h * k1, b), k3 = f(x + 0.5 * h * k2, b), k4 = f(x + h * k3, c);
                x += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            }
            s[j] = x;
            S.data[(i + 1) * w + j] = x;
        }
    }
    return S;
}

}  // namespace eitfwm
