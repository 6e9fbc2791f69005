#include "eitfwm/spectral.hpp"

#include <fftw3.h>

#include <mutex>

namespace eitfwm {

namespace {
std::mutex plan_mutex;  // fftw planning is not thread safe

cplx sinh_over(cplx x, cplx q, double z) {
    // sinh(x)/q with x = q z, continuous at q = 0
    if (std::abs(x) < 1e-8) return z * (1.0 + x * x / 6.0);
    return std::sinh(x) / q;
}

void check_F(cplx F, const MediumParams& p, double omega) {
    if (std::abs(F) < 1e-14 * p.gamma * p.gamma)
        throw SolverError("singular response: F(omega) ~ 0 at omega = " + std::to_string(omega));
}
}  // namespace

std::size_t next_pow2(std::size_t n) {
    std::size_t k = 1;
    while (k < n) k <<= 1;
    return k;
}

double bin_omega(std::size_t k, std::size_t N, double dt) {
    const double base = two_pi / (static_cast<double>(N) * dt);
    return k < N / 2 ? base * static_cast<double>(k) : base * (static_cast<double>(k) - static_cast<double>(N));
}

void dft(cvec& data, int sign) {
    const int n = static_cast<int>(data.size());
    auto* buf = reinterpret_cast<fftw_complex*>(data.data());
    fftw_plan plan;
    {
        std::lock_guard<std::mutex> lock(plan_mutex);
        plan = fftw_plan_dft_1d(n, buf, buf, sign > 0 ? FFTW_BACKWARD : FFTW_FORWARD, FFTW_ESTIMATE);
    }
    fftw_execute(plan);
    std::lock_guard<std::mutex> lock(plan_mutex);
    fftw_destroy_plan(plan);
}

Mat2 expm2(const Mat2& M, double z) {
    const cplx mu = 0.5 * M.trace();
    const cplx q = std::sqrt(mu * mu - M.det());
    const cplx qz = q * z;
    const cplx ch = std::cosh(qz), sh = sinh_over(qz, q, z);
    const cplx e = std::exp(mu * z);
    Mat2 E;
    E.a11 = e * (ch + sh * (M.a11 - mu));
    E.a22 = e * (ch + sh * (M.a22 - mu));
    E.a12 = e * sh * M.a12;
    E.a21 = e * sh * M.a21;
    return E;
}

SpectralPoint spectral_point(const MediumParams& p, double omega, bool flip_branch) {
    const cplx G0 = p.Gamma0_at(p.omega), G = p.Gamma_at(p.omega);
    const double DR = -p.omega * p.omega / p.delta_hf;
    SpectralPoint sp;
    sp.omega = omega;
    sp.F = p.omega * p.omega + (G - I * omega) * (G0 - I * omega);
    check_F(sp.F, p, omega);
    const cplx c = p.kappa2() / (2.0 * sp.F);  // alpha0 gamma / 4F
    sp.sigma = c * (I * G0 + omega);
    const cplx g = G0 - I * omega;
    sp.beta = std::sqrt(g * g + 4.0 * DR * DR);
    if (flip_branch) sp.beta = -sp.beta;
    sp.xi = c * sp.beta;
    return sp;
}

Mat2 transfer_matrix(const MediumParams& p, double z, double omega, bool flip_branch) {
    if (z == 0.0) return Mat2{};
    const SpectralPoint sp = spectral_point(p, omega, flip_branch);
    const double DR = -p.omega * p.omega / p.delta_hf;
    const cplx e = std::exp(I * sp.sigma * z);
    const cplx xz = sp.xi * z;
    const cplx ch = std::cosh(xz);
    const cplx sh_xi = sinh_over(xz, sp.xi, z);  // sinh(xi z)/xi
    Mat2 T;
    T.a11 = e * (ch + I * sp.sigma * sh_xi);
    T.a22 = e * (ch - I * sp.sigma * sh_xi);
    // 2 DR/beta sinh(xi z) = 2 DR (c) sinh(xi z)/xi with c = alpha0 gamma / 4F
    const cplx c = p.kappa2() / (2.0 * sp.F);
    const cplx off = I * 2.0 * DR * c * sh_xi;
    T.a12 = e * off;
    T.a21 = -e * off;
    return T;
}

Mat2 coupling_matrix(const MediumParams& p, double omega, bool keep_m22) {
    const cplx G0 = p.Gamma0_at(p.omega), G = p.Gamma_at(p.omega);
    const cplx F = p.omega * p.omega + (G - I * omega) * (G0 - I * omega);
    check_F(F, p, omega);
    const cplx pref = I * p.kappa2() / F;
    const double r = p.omega * p.omega / p.delta_hf;
    Mat2 M;
    M.a11 = pref * (omega + I * G0);
    M.a12 = -pref * r;
    M.a21 = pref * r;
    M.a22 = keep_m22 ? -pref * (r / p.delta_hf) * (omega + I * G) : cplx{0.0};
    return M;
}

Mat2 transfer_matrix_expm(const MediumParams& p, double z, double omega, bool keep_m22) {
    return expm2(coupling_matrix(p, omega, keep_m22), z);
}

namespace {

struct Frame {
    std::size_t N = 0;
    double dt = 0, band = 0;
    cvec E, S;  // input spectra
};

Frame make_frame(const BoundaryInputs& in, const SpectralOptions& opt, SpectralFields* info) {
    if (in.grid.n < 2 || in.signal.size() != in.grid.n || in.stokes.size() != in.grid.n)
        throw ValidationError("spectral: boundary inputs are not sampled on the time grid");
    if (!(opt.bandwidth > 0)) throw ValidationError("spectral: bandwidth must be > 0");
    Frame f;
    f.dt = in.grid.dt;
    f.N = next_pow2(std::max(opt.min_points, 2 * in.grid.n));
    f.E.assign(f.N, 0.0);
    f.S.assign(f.N, 0.0);
    std::copy(in.signal.begin(), in.signal.end(), f.E.begin());
    std::copy(in.stokes.begin(), in.stokes.end(), f.S.begin());
    dft(f.E, +1);
    dft(f.S, +1);
    const double grid_band = two_pi / f.dt;
    f.band = std::min(opt.bandwidth, grid_band);
    if (info) {
        info->bandwidth_used = f.band;
        info->n_omega = f.N;
        if (grid_band < opt.bandwidth) info->warnings.push_back("transform bandwidth limited by the time grid spacing");
        double out = 0, tot = 0;
        for (std::size_t k = 0; k < f.N; ++k) {
            const double e = std::norm(f.E[k]) + std::norm(f.S[k]);
            tot += e;
            if (std::abs(bin_omega(k, f.N, f.dt)) > 0.5 * f.band) out += e;
        }
        info->alias_fraction = tot > 0 ? out / tot : 0.0;
        if (info->alias_fraction > 1e-6) info->warnings.push_back("aliasing: input energy outside the integration band exceeds 1e-6");
    }
    return f;
}

Mat2 pick_T(const MediumParams& p, double z, double w, bool keep_m22) {
    return keep_m22 ? transfer_matrix_expm(p, z, w, true) : transfer_matrix(p, z, w);
}

}  // namespace

SpectralFields propagate_spectral(const MediumParams& p, const BoundaryInputs& in, double z,
                                  const SpectralOptions& opt) {
    p.validate();
    if (z < 0 || z > 1) throw ValidationError("spectral: z must lie in [0, 1]");
    SpectralFields out;
    out.grid = in.grid;
    Frame f = make_frame(in, opt, &out);
    cvec A(f.N), B(f.N);
    for (std::size_t k = 0; k < f.N; ++k) {
        const double w = bin_omega(k, f.N, f.dt);
        if (std::abs(w) > 0.5 * f.band) {
            A[k] = B[k] = 0.0;
            continue;
        }
        const Mat2 T = pick_T(p, z, w, opt.keep_m22);
        A[k] = T.a11 * f.E[k] + T.a12 * f.S[k];
        B[k] = T.a21 * f.E[k] + T.a22 * f.S[k];
    }
    dft(A, -1);
    dft(B, -1);
    const double inv = 1.0 / static_cast<double>(f.N);
    out.signal.resize(in.grid.n);
    out.stokes.resize(in.grid.n);
    for (std::size_t i = 0; i < in.grid.n; ++i) {
        out.signal[i] = A[i] * inv;
        out.stokes[i] = B[i] * inv;
    }
    return out;
}

SpectralSpinWave spinwave_spectral(const MediumParams& p, const BoundaryInputs& in, const std::vector<double>& z,
                                   const SpectralOptions& opt) {
    p.validate();
    SpectralSpinWave out;
    out.z = z;
    out.grid = in.grid;
    Frame f = make_frame(in, opt, nullptr);
    const double kappa = p.kappa();
    const cplx G = p.Gamma_at(p.omega), G0 = p.Gamma0_at(p.omega);
    const double inv = 1.0 / static_cast<double>(f.N);
    cvec X(f.N);
    for (double zz : z) {
        if (zz < 0 || zz > 1) throw ValidationError("spectral: z must lie in [0, 1]");
        for (std::size_t k = 0; k < f.N; ++k) {
            const double w = bin_omega(k, f.N, f.dt);
            if (std::abs(w) > 0.5 * f.band) {
                X[k] = 0.0;
                continue;
            }
            const Mat2 T = pick_T(p, zz, w, opt.keep_m22);
            const cplx e = T.a11 * f.E[k] + T.a12 * f.S[k];
            const cplx ep = T.a21 * f.E[k] + T.a22 * f.S[k];
            const cplx F = p.omega * p.omega + (G - I * w) * (G0 - I * w);
            X[k] = -(kappa * p.omega / F) * (e - I * ((G - I * w) / p.delta_hf) * ep);
        }
        dft(X, -1);
        cvec row(in.grid.n);
        for (std::size_t i = 0; i < in.grid.n; ++i) row[i] = X[i] * inv;
        out.S.push_back(std::move(row));
    }
    return out;
}

ParsevalPair parseval_energies(const cvec& x, double dt) {
    ParsevalPair r;
    for (auto v : x) r.time_domain += std::norm(v) * dt;
    cvec X = x;
    dft(X, +1);
    double s = 0;
    for (auto v : X) s += std::norm(v);
    r.freq_domain = s * dt / static_cast<double>(x.size());
    return r;
}

}  // namespace eitfwm
