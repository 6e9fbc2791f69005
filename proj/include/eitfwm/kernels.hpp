#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include "eitfwm/params.hpp"
#include "eitfwm/pulses.hpp"

namespace eitfwm {

enum class KernelId { f1, f2, f3, g2, g3, h1, h2, h3 };
inline constexpr std::array<KernelId, 8> all_kernels{KernelId::f1, KernelId::f2, KernelId::f3, KernelId::g2,
                                                     KernelId::g3, KernelId::h1, KernelId::h2, KernelId::h3};
const char* kernel_name(KernelId id);

enum class KernelMethod { numeric_integral, closed_form_finite_GE, box_limit };
const char* method_name(KernelMethod m);

// Which h2, h3 integrands the numeric path uses: the O(1/dhf^2) expansion or the
// exact transfer-matrix expressions.
enum class HForm { expanded, exact };

struct Impulse {
    double t = 0;
    cplx weight;
};

// Samples are cell averages over [t - dt/2, t + dt/2]; impulses are carried separately.
struct Kernel {
    cvec samples;
    std::vector<Impulse> impulses;
};

struct KernelSet {
    TimeGrid t_grid;
    double z = 1.0;
    KernelMethod method = KernelMethod::numeric_integral;
    std::array<Kernel, 8> k;
    std::vector<std::string> warnings;

    Kernel& operator[](KernelId id) { return k[static_cast<std::size_t>(id)]; }
    const Kernel& operator[](KernelId id) const { return k[static_cast<std::size_t>(id)]; }
};

// Grid with spacing dt whose samples are integer multiples of dt.
TimeGrid kernel_grid(double t_min, double t_max, double dt);

struct NumericKernelOptions {
    double bandwidth = from_mhz(160.0);
    std::size_t n_points = 1u << 16;
    HForm h_form = HForm::expanded;
};

// Spectrum K(omega) of a kernel; kernel(t') = (1/2pi) int K(omega) e^{-i omega t'} d omega.
cplx kernel_spectrum_numeric(const MediumParams& p, KernelId id, double z, double omega, HForm h_form = HForm::expanded);
// g3 spectrum from the matrix-exponential route, independent of the closed form.
cplx g3_spectrum_expm(const MediumParams& p, double z, double omega);

KernelSet kernels_numeric(const MediumParams& p, double z, const TimeGrid& t_grid, const NumericKernelOptions& opt = {});
KernelSet kernels_closed_form(const MediumParams& p, double z, const TimeGrid& t_grid);
KernelSet kernels_box_limit(const MediumParams& p, double z, const TimeGrid& t_grid);

// Pointwise closed forms (Sign(0) = 1), used for plotting and spot checks.
cplx closed_form_value(const MediumParams& p, KernelId id, double z, double t);
// Analytic spectrum of the box-limit descriptors.
cplx box_spectrum(const MediumParams& p, KernelId id, double z, double omega);

// Fourier sum of a sampled kernel: sum_n k_n e^{i w t_n} dt + impulses.
cplx sampled_spectrum(const Kernel& k, const TimeGrid& g, double omega);

using SpectrumFn = std::function<cplx(double)>;
// Relative L2 distance ||W (a - b)|| / ||W b|| with W = exp(-4 ln2 w^2 / dw^2).
double band_limited_distance(const SpectrumFn& a, const SpectrumFn& b, double bandwidth, int n_omega = 801);

struct IoPrediction {
    TimeGrid grid;
    cvec signal, stokes, S;
};

// Convolution of the boundary traces with a kernel set.
IoPrediction io_relation(const BoundaryInputs& in, const KernelSet& ks);
// Same at a single time.
struct IoPoint {
    cplx signal, stokes, S;
};
IoPoint io_relation_at(const BoundaryInputs& in, const KernelSet& ks, double t);

}  // namespace eitfwm
