#include <doctest.h>

#include "eitfwm/analysis.hpp"
#include "eitfwm/kernels.hpp"
#include "eitfwm/spectral.hpp"

using namespace eitfwm;

namespace {
MediumParams fig8() {
    MediumParams m;
    m.alpha0L = 80;
    m.gamma = from_mhz(150);
    m.omega = from_mhz(10);
    return m.with_compensated_shift();
}

cplx area(const Kernel& k, const TimeGrid& g) {
    cplx s = 0;
    for (auto v : k.samples) s += v * g.dt;
    for (const auto& im : k.impulses) s += im.weight;
    return s;
}
}  // namespace

TEST_CASE("kernel grid sits on multiples of dt") {
    const TimeGrid g = kernel_grid(-1.03, 2.0, 0.01);
    CHECK(std::abs(g.t0 / 0.01 - std::round(g.t0 / 0.01)) < 1e-9);
    CHECK(g.t0 <= -1.03 + 1e-12);
    CHECK(g.t_end() >= 2.0 - 1e-12);
}

TEST_CASE("g3 = -f3 for numeric and closed-form sets") {
    const MediumParams m = fig8();
    const TimeGrid g = kernel_grid(-5, 20, 0.02);
    NumericKernelOptions o;
    o.n_points = 1u << 14;
    for (const KernelSet& ks : {kernels_numeric(m, 1, g, o), kernels_closed_form(m, 1, g), kernels_box_limit(m, 1, g)})
        for (std::size_t i = 0; i < g.n; ++i) CHECK(ks[KernelId::g3].samples[i] == -ks[KernelId::f3].samples[i]);
}

TEST_CASE("g3 from the matrix exponential agrees with -f3") {
    const MediumParams m = fig8();
    for (double w : {-0.2, -0.05, 0.0, 0.03, 0.1}) {
        const cplx a = g3_spectrum_expm(m, 1, w), b = kernel_spectrum_numeric(m, KernelId::f3, 1, w);
        CHECK(std::abs(a + b) <= 1e-9 * std::abs(b));
    }
}

TEST_CASE("closed-form f1 has unit area and peaks at the group delay") {
    const MediumParams m = fig8();
    const TimeGrid g = kernel_grid(-10, 30, 0.01);
    const KernelSet cf = kernels_closed_form(m, 1, g);
    CHECK(std::abs(area(cf[KernelId::f1], g) - 1.0) < 1e-3);
    std::size_t imax = 0;
    for (std::size_t i = 0; i < g.n; ++i)
        if (std::abs(cf[KernelId::f1].samples[i]) > std::abs(cf[KernelId::f1].samples[imax])) imax = i;
    CHECK(std::abs(g.t(imax) - derive(m).delay()) < 0.05);
}

TEST_CASE("box-limit descriptors: support, areas and h = -(gN/Omega) f") {
    const MediumParams m = fig8();
    const DerivedRates d = derive(m);
    const TimeGrid g = kernel_grid(-10, 30, 0.001);
    const KernelSet bx = kernels_box_limit(m, 1, g);
    const double tau = d.delay();
    REQUIRE(bx[KernelId::f1].impulses.size() == 1);
    CHECK(bx[KernelId::f1].impulses[0].t == doctest::Approx(tau));
    CHECK(bx[KernelId::f1].samples.size() == g.n);
    for (std::size_t i = 0; i < g.n; ++i)
        if (g.t(i) < -g.dt || g.t(i) > tau + g.dt)
            for (KernelId id : {KernelId::f2, KernelId::f3, KernelId::g2}) CHECK(bx[id].samples[i] == cplx{});
    const cplx a3 = area(bx[KernelId::f3], g), a2 = area(bx[KernelId::f2], g);
    CHECK(std::abs(a3 - I * d.delta_R * tau) < 1e-3 * std::abs(d.delta_R * tau));
    CHECK(std::abs(a2 - d.delta_R * d.delta_R * tau * tau / 2) < 1e-3 * d.delta_R * d.delta_R * tau * tau / 2);
    for (auto [h, f] : {std::pair{KernelId::h1, KernelId::f1}, {KernelId::h2, KernelId::f2}, {KernelId::h3, KernelId::f3}}) {
        for (std::size_t i = 0; i < g.n; i += 97) CHECK(std::abs(bx[h].samples[i] + d.gN_over_omega * bx[f].samples[i]) < 1e-12);
        if (!bx[f].impulses.empty()) CHECK(std::abs(bx[h].impulses[0].weight + d.gN_over_omega * bx[f].impulses[0].weight) < 1e-12);
    }
    // analytic spectrum matches the sampled descriptor
    for (double w : {0.0, 0.05, -0.2}) {
        CHECK(std::abs(box_spectrum(m, KernelId::f3, 1, w) - sampled_spectrum(bx[KernelId::f3], g, w)) < 1e-3 * std::abs(d.delta_R * tau));
        CHECK(std::abs(box_spectrum(m, KernelId::f1, 1, w) - std::exp(I * w * tau)) < 1e-12);
    }
}

TEST_CASE("perturbative ordering of the numeric kernels") {
    const MediumParams m = fig8();
    const DerivedRates d = derive(m);
    const TimeGrid g = kernel_grid(-10, 30, 0.01);
    const KernelSet num = kernels_numeric(m, 1, g);
    double f3 = 0, f2 = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
        f3 = std::max(f3, std::abs(num[KernelId::f3].samples[i]));
        f2 = std::max(f2, std::abs(num[KernelId::f2].samples[i]));
    }
    // informational spread is wider than [0.9, 1.1] because sinh(x)/x = 1.13 at these parameters
    MESSAGE("|f3|max / |Delta_R| = " << f3 / std::abs(d.delta_R) << ", |f2|max / (Delta_R^2 tau) = " << f2 / (d.delta_R * d.delta_R * d.delay()));
    CHECK(f3 / std::abs(d.delta_R) > 0.9);
    CHECK(f3 / std::abs(d.delta_R) < 1.25);
}

TEST_CASE("FWM off: hyperfine splitting to infinity kills f2, f3, g2, g3") {
    MediumParams m = fig8();
    m.delta_hf = from_mhz(1e9);
    m.delta = m.light_shift();
    const TimeGrid g = kernel_grid(-10, 30, 0.02);
    NumericKernelOptions o;
    o.n_points = 1u << 14;
    const KernelSet num = kernels_numeric(m, 1, g, o);
    double big = 0, f1 = 0;
    for (std::size_t i = 0; i < g.n; ++i) {
        for (KernelId id : {KernelId::f2, KernelId::f3, KernelId::g2, KernelId::g3}) big = std::max(big, std::abs(num[id].samples[i]));
        f1 = std::max(f1, std::abs(num[KernelId::f1].samples[i]));
    }
    // residual coupling falls off as 1/delta_hf
    CHECK(big < 1e-4 * f1);
}

TEST_CASE("closed-form FWM kernels lose their weight as z -> 0") {
    const MediumParams m = fig8();
    const TimeGrid g = kernel_grid(-2, 2, 0.001);
    const KernelSet cf = kernels_closed_form(m, 1e-4, g);
    const DerivedRates d = derive(m);
    const double full = std::abs(d.delta_R) * d.delay();
    for (KernelId id : {KernelId::f2, KernelId::f3, KernelId::g2}) CHECK(std::abs(area(cf[id], g)) < 1e-3 * full);
    CHECK(std::abs(area(cf[KernelId::f1], g) - 1.0) < 1e-3);
}

TEST_CASE("io_relation needs aligned grids") {
    const MediumParams m = fig8();
    PulseSpec p;
    p.fwhm = 6.6;
    // input grid offset is free: kernel lags are whole multiples of dt
    const BoundaryInputs shifted = sample_inputs(p, TimeGrid::span(-15.005, 45, 0.01));
    CHECK_NOTHROW(io_relation(shifted, kernels_box_limit(m, 1, kernel_grid(-10, 30, 0.01))));
    KernelSet bad = kernels_box_limit(m, 1, kernel_grid(-10, 30, 0.01));
    bad.t_grid.t0 += 0.004;
    CHECK_THROWS_AS(io_relation(shifted, bad), ValidationError);
    const KernelSet coarse = kernels_box_limit(m, 1, kernel_grid(-10, 30, 0.02));
    const BoundaryInputs ok = sample_inputs(p, TimeGrid::span(-15, 45, 0.01));
    CHECK_THROWS_AS(io_relation(ok, coarse), ValidationError);
}

TEST_CASE("box-limit io: zero Stokes seed gives -i Delta_R times the running integral") {
    const MediumParams m = fig8();
    const DerivedRates d = derive(m);
    PulseSpec p;
    p.fwhm = 30;
    p.stokes_ratio = 0.0;
    const TimeGrid g = TimeGrid::span(-70, 90, 0.01);
    const BoundaryInputs in = sample_inputs(p, g);
    const KernelSet bx = kernels_box_limit(m, 1, kernel_grid(-1, 12, 0.01));
    const IoPrediction io = io_relation(in, bx);
    // third term of the Stokes relation: g3 * eps = -i Delta_R int_{t - tau}^{t} eps
    const double tau = d.delay();
    const std::size_t nt = static_cast<std::size_t>(std::llround(tau / g.dt));
    cvec pred(g.n, 0.0);
    for (std::size_t i = 0; i < g.n; ++i) {
        cplx s = 0;
        for (std::size_t k = (i > nt ? i - nt : 0); k <= i; ++k) s += in.signal[k] * g.dt;
        pred[i] = -I * d.delta_R * s;
    }
    CHECK(rel_l2(io.stokes, pred) < 0.01);
}

TEST_CASE("band-limited distance basics") {
    const auto a = [](double) { return cplx(1.0); };
    const auto b = [](double) { return cplx(1.1); };
    CHECK(band_limited_distance(a, a, 1.0) == 0.0);
    CHECK(band_limited_distance(b, a, 1.0) == doctest::Approx(0.1));
}
