#pragma once

#include <string>
#include <vector>

#include "eitfwm/params.hpp"
#include "eitfwm/pulses.hpp"

namespace eitfwm {

struct Mat2 {
    cplx a11{1.0}, a12{0.0}, a21{0.0}, a22{1.0};
    cplx det() const { return a11 * a22 - a12 * a21; }
    cplx trace() const { return a11 + a22; }
};

Mat2 expm2(const Mat2& M, double z);

// F, sigma, xi, beta at one angular frequency, reference control.
struct SpectralPoint {
    double omega = 0;
    cplx F, sigma, xi, beta;
};

SpectralPoint spectral_point(const MediumParams& p, double omega, bool flip_branch = false);

// Closed-form transfer matrix with the M22 entry dropped.
Mat2 transfer_matrix(const MediumParams& p, double z, double omega, bool flip_branch = false);
// Coupling matrix M of d/dz (eps, eps'*) = M (eps, eps'*), optionally keeping M22.
Mat2 coupling_matrix(const MediumParams& p, double omega, bool keep_m22);
// Transfer matrix through the matrix exponential of M (exact for constant control).
Mat2 transfer_matrix_expm(const MediumParams& p, double z, double omega, bool keep_m22);

struct SpectralOptions {
    double bandwidth = from_mhz(160.0);  // angular integration bandwidth B
    std::size_t min_points = 1u << 14;
    bool keep_m22 = false;
};

struct SpectralFields {
    TimeGrid grid;
    cvec signal, stokes;
    double alias_fraction = 0;  // input energy outside |omega| < B/2
    double bandwidth_used = 0;
    std::size_t n_omega = 0;
    std::vector<std::string> warnings;
};

SpectralFields propagate_spectral(const MediumParams& p, const BoundaryInputs& in, double z,
                                  const SpectralOptions& opt = {});

// S(z_k, t) on the input grid for each requested z, one row per z.
struct SpectralSpinWave {
    std::vector<double> z;
    TimeGrid grid;
    std::vector<cvec> S;
};

SpectralSpinWave spinwave_spectral(const MediumParams& p, const BoundaryInputs& in, const std::vector<double>& z,
                                   const SpectralOptions& opt = {});

// Energy of a trace computed in t and through its discrete spectrum.
struct ParsevalPair {
    double time_domain = 0, freq_domain = 0;
};
ParsevalPair parseval_energies(const cvec& x, double dt);

// Thin FFTW wrapper: y_k = sum_n x_n exp(sign * 2 pi i k n / N).
void dft(cvec& data, int sign);
std::size_t next_pow2(std::size_t n);
// Angular frequency of bin k for an N point transform with spacing dt.
double bin_omega(std::size_t k, std::size_t N, double dt);

}  // namespace eitfwm
