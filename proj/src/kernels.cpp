#include "eitfwm/kernels.hpp"

#include <cmath>

#include "eitfwm/spectral.hpp"

namespace eitfwm {

const char* kernel_name(KernelId id) {
    static const char* names[] = {"f1", "f2", "f3", "g2", "g3", "h1", "h2", "h3"};
    return names[static_cast<int>(id)];
}

const char* method_name(KernelMethod m) {
    switch (m) {
        case KernelMethod::numeric_integral: return "numeric_integral";
        case KernelMethod::closed_form_finite_GE: return "closed_form_finite_GE";
        case KernelMethod::box_limit: return "box_limit";
    }
    return "?";
}

TimeGrid kernel_grid(double t_min, double t_max, double dt) {
    if (!(dt > 0) || !(t_max > t_min)) throw ValidationError("kernel grid: need dt > 0 and t_max > t_min");
    const double k0 = std::floor(t_min / dt), k1 = std::ceil(t_max / dt);
    return TimeGrid{k0 * dt, dt, static_cast<std::size_t>(k1 - k0) + 1};
}

namespace {

bool is_h(KernelId id) { return id == KernelId::h1 || id == KernelId::h2 || id == KernelId::h3; }

KernelId f_of(KernelId id) {
    switch (id) {
        case KernelId::h1: return KernelId::f1;
        case KernelId::h2: return KernelId::f2;
        case KernelId::h3: return KernelId::f3;
        default: return id;
    }
}

struct Consts {
    double DR, vg, GE, ratio;  // ratio = g sqrt(N) / Omega
};

Consts consts(const MediumParams& p) {
    DerivedRates d = derive(p);
    if (d.degenerate) throw ValidationError("kernels: closed forms need omega > 0");
    return {d.delta_R, d.v_g, d.gamma_E, d.gN_over_omega};
}

}  // namespace

cplx kernel_spectrum_numeric(const MediumParams& p, KernelId id, double z, double w, HForm h_form) {
    const SpectralPoint sp = spectral_point(p, w);
    const Mat2 T = transfer_matrix(p, z, w);
    const cplx e2 = std::exp(2.0 * I * sp.sigma * z);
    const double kap = p.kappa(), Om = p.omega, D = p.delta_hf;
    const cplx G0 = p.Gamma0_at(Om), G = p.Gamma_at(Om);
    const cplx F = sp.F;
    auto pole = [&]() {
        const cplx wg = w + I * G0;
        if (std::abs(wg) < 1e-12) throw SolverError("pole proximity: (omega + i Gamma0) ~ 0, use gamma0 > 0");
        return wg;
    };
    auto exact_h12 = [&]() {
        const cplx e = std::exp(I * sp.sigma * z);
        const cplx xz = sp.xi * z;
        const cplx sh_xi = std::abs(xz) < 1e-8 ? cplx{z} : std::sinh(xz) / sp.xi;
        const cplx c = p.kappa2() / (2.0 * F);
        const double DR = -Om * Om / D;
        return -kap * Om / F * e *
               (std::cosh(xz) + (I * sp.sigma - 2.0 * DR * (G - I * w) / D * c) * sh_xi);
    };
    switch (id) {
        case KernelId::f1: return e2;
        case KernelId::f2: return T.a11 - e2;
        case KernelId::f3: return T.a12;
        case KernelId::g2: return T.a22 - 1.0;
        case KernelId::g3: return T.a21;
        case KernelId::h1: return -kap * Om / F * e2;
        case KernelId::h2: {
            if (h_form == HForm::exact) return exact_h12() + kap * Om / F * e2;
            const cplx wg = pole();
            return kap * Om * Om * Om * (F + e2 * (2.0 * I * Om * Om * sp.sigma * z - F)) / (F * D * D * wg * wg);
        }
        case KernelId::h3: {
            if (h_form == HForm::exact) {
                const cplx e = std::exp(I * sp.sigma * z);
                const cplx xz = sp.xi * z;
                const cplx sh_xi = std::abs(xz) < 1e-8 ? cplx{z} : std::sinh(xz) / sp.xi;
                const cplx c = p.kappa2() / (2.0 * F);
                const double DR = -Om * Om / D;
                const cplx Gw = G - I * w;
                return kap * Om / F * e *
                       (I * Gw / D * std::cosh(xz) + (sp.sigma * Gw / D - I * 2.0 * DR * c) * sh_xi);
            }
            const cplx wg = pole();
            return kap * Om * (Om * Om * e2 - F) / (D * wg * F);
        }
    }
    return 0.0;
}

cplx g3_spectrum_expm(const MediumParams& p, double z, double w) {
    return transfer_matrix_expm(p, z, w, false).a21;
}

KernelSet kernels_numeric(const MediumParams& p, double z, const TimeGrid& t_grid, const NumericKernelOptions& opt) {
    p.validate();
    if (z < 0 || z > 1) throw ValidationError("kernels: z must lie in [0, 1]");
    if (!(opt.bandwidth > 0) || opt.n_points < 16) throw ValidationError("kernels: bad quadrature settings");
    KernelSet ks;
    ks.t_grid = t_grid;
    ks.z = z;
    ks.method = KernelMethod::numeric_integral;
    const std::size_t N = next_pow2(opt.n_points);
    const double dtk = two_pi / opt.bandwidth;
    const double dw_over_2pi = opt.bandwidth / static_cast<double>(N) / two_pi;
    const double span = 0.5 * static_cast<double>(N) * dtk;
    if (t_grid.t0 < -span || t_grid.t_end() > span)
        ks.warnings.push_back("kernel grid extends past the quadrature period; values there are set to 0");

    for (KernelId id : all_kernels) {
        if (id == KernelId::g3) continue;  // = -f3 by construction
        cvec X(N);
        for (std::size_t k = 0; k < N; ++k) X[k] = kernel_spectrum_numeric(p, id, z, bin_omega(k, N, dtk), opt.h_form);
        dft(X, -1);  // sum_k X_k e^{-i w_k m dtk}
        Kernel& K = ks[id];
        K.samples.resize(t_grid.n);
        for (std::size_t i = 0; i < t_grid.n; ++i) {
            const double t = t_grid.t(i);
            if (t < -span || t >= span - dtk) {
                K.samples[i] = 0.0;
                continue;
            }
            const double x = t / dtk;
            const double fl = std::floor(x);
            const double a = x - fl;
            auto idx = [&](double m) {
                long long mm = static_cast<long long>(m) % static_cast<long long>(N);
                if (mm < 0) mm += static_cast<long long>(N);
                return static_cast<std::size_t>(mm);
            };
            K.samples[i] = ((1.0 - a) * X[idx(fl)] + a * X[idx(fl + 1.0)]) * dw_over_2pi;
        }
    }
    Kernel& g3 = ks[KernelId::g3];
    g3 = ks[KernelId::f3];
    for (auto& v : g3.samples) v = -v;
    if (std::abs(p.delta - p.light_shift()) > 1e-12 * p.delta_hf)
        ks.warnings.push_back("delta != delta_s: kernels include the residual two-photon detuning");
    return ks;
}

namespace {

// 3-point Gauss-Legendre average of f over [t - h, t + h].
template <class Fn>
cplx cell_avg(Fn f, double t, double h) {
    static const double x = std::sqrt(0.6);
    return (5.0 * f(t - x * h) + 8.0 * f(t) + 5.0 * f(t + x * h)) / 18.0;
}

double avg_sign(double t, double h) {
    if (t >= h) return 1.0;
    if (t <= -h) return -1.0;
    return t / h;
}

double avg_abs(double t, double h) {
    if (std::abs(t) >= h) return std::abs(t);
    return (t * t + h * h) / (2.0 * h);
}

void scale_h(KernelSet& ks, double ratio) {
    for (KernelId h : {KernelId::h1, KernelId::h2, KernelId::h3}) {
        Kernel k = ks[f_of(h)];
        for (auto& v : k.samples) v *= -ratio;
        for (auto& im : k.impulses) im.weight *= -ratio;
        ks[h] = std::move(k);
    }
}

void negate_into(const Kernel& src, Kernel& dst) {
    dst = src;
    for (auto& v : dst.samples) v = -v;
    for (auto& im : dst.impulses) im.weight = -im.weight;
}

}  // namespace

cplx closed_form_value(const MediumParams& p, KernelId id, double z, double t) {
    const Consts c = consts(p);
    if (is_h(id)) return -c.ratio * closed_form_value(p, f_of(id), z, t);
    if (z <= 0) return 0.0;
    const double tau = z / c.vg, G = c.GE, sz = std::sqrt(z);
    const double ga = std::exp(-G * G * (t - tau) * (t - tau) / (4.0 * z));
    const double er = std::erf(G * (tau - t) / (2.0 * sz));
    const double sg = t >= 0 ? 1.0 : -1.0;
    const double D2 = c.DR * c.DR;
    const double rpz = std::sqrt(std::numbers::pi / z);
    switch (id) {
        case KernelId::f1: return G * ga / (2.0 * std::sqrt(std::numbers::pi * z));
        case KernelId::f2: return D2 * (-ga / (2.0 * G * rpz) + 0.5 * std::abs(t) + 0.5 * t * er);
        case KernelId::f3: return I * c.DR * 0.5 * (sg + er);
        case KernelId::g2: return D2 * (ga / (G * rpz) + 0.5 * (tau - t) * (er + sg));
        case KernelId::g3: return -I * c.DR * 0.5 * (sg + er);
        default: return 0.0;
    }
}

KernelSet kernels_closed_form(const MediumParams& p, double z, const TimeGrid& g) {
    p.validate();
    if (z < 0 || z > 1) throw ValidationError("kernels: z must lie in [0, 1]");
    const Consts c = consts(p);
    KernelSet ks;
    ks.t_grid = g;
    ks.z = z;
    ks.method = KernelMethod::closed_form_finite_GE;
    for (auto& k : ks.k) k.samples.assign(g.n, 0.0);
    if (z == 0.0) {
        ks[KernelId::f1].impulses.push_back({0.0, 1.0});
        scale_h(ks, c.ratio);
        return ks;
    }
    const double tau = z / c.vg, G = c.GE, sz = std::sqrt(z);
    const double D2 = c.DR * c.DR, rpz = std::sqrt(std::numbers::pi / z);
    const double h = 0.5 * g.dt;
    auto ga = [&](double t) { return std::exp(-G * G * (t - tau) * (t - tau) / (4.0 * z)); };
    auto er = [&](double t) { return std::erf(G * (tau - t) / (2.0 * sz)); };
    for (std::size_t i = 0; i < g.n; ++i) {
        const double t = g.t(i);
        const cplx a_ga = cell_avg([&](double s) { return cplx{ga(s)}; }, t, h);
        const cplx a_er = cell_avg([&](double s) { return cplx{er(s)}; }, t, h);
        const cplx a_ter = cell_avg([&](double s) { return cplx{s * er(s)}; }, t, h);
        const double sg = avg_sign(t, h), ab = avg_abs(t, h);
        ks[KernelId::f1].samples[i] = G * a_ga / (2.0 * std::sqrt(std::numbers::pi * z));
        ks[KernelId::f2].samples[i] = D2 * (-a_ga / (2.0 * G * rpz) + 0.5 * ab + 0.5 * a_ter);
        ks[KernelId::f3].samples[i] = I * c.DR * 0.5 * (sg + a_er);
        // (tau - t)(erf + Sign) averaged: tau <erf> - <t erf> + tau <Sign> - <|t|>
        ks[KernelId::g2].samples[i] = D2 * (a_ga / (G * rpz) + 0.5 * (tau * a_er - a_ter + tau * sg - ab));
    }
    ks[KernelId::g2].impulses.push_back({0.0, -z * D2 / (G * G)});
    negate_into(ks[KernelId::f3], ks[KernelId::g3]);
    scale_h(ks, c.ratio);
    if (std::abs(p.delta - p.light_shift()) > 1e-12 * p.delta_hf || p.gamma0 != 0.0)
        ks.warnings.push_back("closed forms assume delta = delta_s and gamma0 = 0");
    return ks;
}

KernelSet kernels_box_limit(const MediumParams& p, double z, const TimeGrid& g) {
    p.validate();
    if (z < 0 || z > 1) throw ValidationError("kernels: z must lie in [0, 1]");
    const Consts c = consts(p);
    KernelSet ks;
    ks.t_grid = g;
    ks.z = z;
    ks.method = KernelMethod::box_limit;
    for (auto& k : ks.k) k.samples.assign(g.n, 0.0);
    const double tau = z / c.vg, h = 0.5 * g.dt, D2 = c.DR * c.DR;
    ks[KernelId::f1].impulses.push_back({tau, 1.0});
    for (std::size_t i = 0; i < g.n; ++i) {
        const double t = g.t(i);
        const double lo = std::max(t - h, 0.0), hi = std::min(t + h, tau);
        if (hi <= lo) continue;
        const double len = (hi - lo) / g.dt, mom = 0.5 * (hi * hi - lo * lo) / g.dt;
        ks[KernelId::f3].samples[i] = I * c.DR * len;
        ks[KernelId::f2].samples[i] = D2 * mom;
        ks[KernelId::g2].samples[i] = D2 * (tau * len - mom);
    }
    negate_into(ks[KernelId::f3], ks[KernelId::g3]);
    scale_h(ks, c.ratio);
    return ks;
}

cplx box_spectrum(const MediumParams& p, KernelId id, double z, double w) {
    const Consts c = consts(p);
    if (is_h(id)) return -c.ratio * box_spectrum(p, f_of(id), z, w);
    const double tau = z / c.vg, D2 = c.DR * c.DR;
    const cplx E = std::exp(I * w * tau);
    cplx I0, I1;  // int_0^tau e^{iwt} dt, int_0^tau t e^{iwt} dt
    if (std::abs(w * tau) < 1e-4) {
        I0 = tau + I * w * tau * tau / 2.0;
        I1 = tau * tau / 2.0 + I * w * tau * tau * tau / 3.0;
    } else {
        const cplx iw = I * w;
        I0 = (E - 1.0) / iw;
        I1 = tau * E / iw - (E - 1.0) / (iw * iw);
    }
    switch (id) {
        case KernelId::f1: return E;
        case KernelId::f2: return D2 * I1;
        case KernelId::f3: return I * c.DR * I0;
        case KernelId::g2: return D2 * (tau * I0 - I1);
        case KernelId::g3: return -I * c.DR * I0;
        default: return 0.0;
    }
}

cplx sampled_spectrum(const Kernel& k, const TimeGrid& g, double w) {
    cplx acc = 0.0;
    cplx ph = std::exp(I * w * g.t0);
    const cplx step = std::exp(I * w * g.dt);
    for (std::size_t n = 0; n < k.samples.size(); ++n) {
        acc += k.samples[n] * ph;
        ph *= step;
    }
    acc *= g.dt;
    for (const auto& im : k.impulses) acc += im.weight * std::exp(I * w * im.t);
    return acc;
}

double band_limited_distance(const SpectrumFn& a, const SpectrumFn& b, double bw, int n_omega) {
    if (!(bw > 0) || n_omega < 3) throw ValidationError("band_limited_distance: bad band");
    double num = 0, den = 0;
    const double w_max = 3.0 * bw;
    for (int i = 0; i < n_omega; ++i) {
        const double w = -w_max + 2.0 * w_max * i / (n_omega - 1);
        const double W = std::exp(-4.0 * std::numbers::ln2 * w * w / (bw * bw));
        const cplx A = a(w), B = b(w);
        num += W * W * std::norm(A - B);
        den += W * W * std::norm(B);
    }
    return den > 0 ? std::sqrt(num / den) : 0.0;
}

namespace {

long long aligned_offset(const BoundaryInputs& in, const KernelSet& ks) {
    const double dt = in.grid.dt;
    if (std::abs(ks.t_grid.dt - dt) > 1e-9 * dt) throw ValidationError("io_relation: kernel and input time steps differ");
    const double m0 = ks.t_grid.t0 / dt;
    if (std::abs(m0 - std::round(m0)) > 1e-6) throw ValidationError("io_relation: kernel grid not aligned to multiples of dt");
    if (in.signal.size() != in.grid.n || in.stokes.size() != in.grid.n)
        throw ValidationError("io_relation: inputs not sampled on their grid");
    return static_cast<long long>(std::llround(m0));
}

cplx interp(const cvec& x, const TimeGrid& g, double t) {
    const double u = (t - g.t0) / g.dt;
    if (u < 0 || u > static_cast<double>(g.n - 1)) return 0.0;
    const auto i = static_cast<std::size_t>(std::floor(u));
    if (i + 1 >= g.n) return x[g.n - 1];
    const double a = u - static_cast<double>(i);
    return (1.0 - a) * x[i] + a * x[i + 1];
}

void convolve_into(cvec& out, const Kernel& k, const cvec& x, long long m0, double dt, const TimeGrid& g) {
    const auto n = static_cast<long long>(x.size());
    const auto nk = static_cast<long long>(k.samples.size());
    for (long long j = 0; j < n; ++j) {
        const cplx xj = x[static_cast<std::size_t>(j)];
        if (xj == 0.0) continue;
        const cplx a = xj * dt;
        long long m_lo = std::max(0LL, -(j + m0)), m_hi = std::min(nk, n - (j + m0));
        for (long long m = m_lo; m < m_hi; ++m)
            out[static_cast<std::size_t>(j + m0 + m)] += a * k.samples[static_cast<std::size_t>(m)];
    }
    for (const auto& im : k.impulses)
        for (std::size_t i = 0; i < g.n; ++i) out[i] += im.weight * interp(x, g, g.t(i) - im.t);
}

cplx convolve_at(const Kernel& k, const cvec& x, const TimeGrid& kg, const TimeGrid& g, double t) {
    cplx acc = 0.0;
    for (std::size_t m = 0; m < k.samples.size(); ++m) {
        if (k.samples[m] == 0.0) continue;
        acc += k.samples[m] * interp(x, g, t - kg.t(m));
    }
    acc *= g.dt;
    for (const auto& im : k.impulses) acc += im.weight * interp(x, g, t - im.t);
    return acc;
}

}  // namespace

IoPrediction io_relation(const BoundaryInputs& in, const KernelSet& ks) {
    const long long m0 = aligned_offset(in, ks);
    const TimeGrid& g = in.grid;
    const double dt = g.dt;
    IoPrediction out;
    out.grid = g;
    out.signal.assign(g.n, 0.0);
    out.stokes = in.stokes;
    out.S.assign(g.n, 0.0);
    convolve_into(out.signal, ks[KernelId::f1], in.signal, m0, dt, g);
    convolve_into(out.signal, ks[KernelId::f2], in.signal, m0, dt, g);
    convolve_into(out.signal, ks[KernelId::f3], in.stokes, m0, dt, g);
    convolve_into(out.stokes, ks[KernelId::g2], in.stokes, m0, dt, g);
    convolve_into(out.stokes, ks[KernelId::g3], in.signal, m0, dt, g);
    convolve_into(out.S, ks[KernelId::h1], in.signal, m0, dt, g);
    convolve_into(out.S, ks[KernelId::h2], in.signal, m0, dt, g);
    convolve_into(out.S, ks[KernelId::h3], in.stokes, m0, dt, g);
    return out;
}

IoPoint io_relation_at(const BoundaryInputs& in, const KernelSet& ks, double t) {
    aligned_offset(in, ks);
    const TimeGrid& g = in.grid;
    const TimeGrid& kg = ks.t_grid;
    IoPoint r;
    r.signal = convolve_at(ks[KernelId::f1], in.signal, kg, g, t) + convolve_at(ks[KernelId::f2], in.signal, kg, g, t) +
               convolve_at(ks[KernelId::f3], in.stokes, kg, g, t);
    r.stokes = interp(in.stokes, g, t) + convolve_at(ks[KernelId::g2], in.stokes, kg, g, t) +
               convolve_at(ks[KernelId::g3], in.signal, kg, g, t);
    r.S = convolve_at(ks[KernelId::h1], in.signal, kg, g, t) + convolve_at(ks[KernelId::h2], in.signal, kg, g, t) +
          convolve_at(ks[KernelId::h3], in.stokes, kg, g, t);
    return r;
}

}  // namespace eitfwm
