#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <stdexcept>
#include <string>

namespace eitfwm {

using cplx = std::complex<double>;
inline constexpr cplx I{0.0, 1.0};
inline constexpr double two_pi = 2.0 * std::numbers::pi;

// Rates are angular frequencies in rad/us, times in us.  Config files use MHz.
inline constexpr double from_mhz(double f_mhz) { return two_pi * f_mhz; }
inline constexpr double to_mhz(double w) { return w / two_pi; }

class ValidationError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct MediumParams {
    double alpha0L = 80.0;
    double gamma = from_mhz(150.0);
    double gamma0 = from_mhz(270e-6);
    double delta_hf = from_mhz(6835.0);
    double delta = 0.0;  // absolute two-photon detuning
    double omega = from_mhz(10.0);
    double clebsch_ratio = -std::numbers::sqrt3;
    double length = 1.0;

    // Throws ValidationError naming the first violated constraint.
    void validate() const;

    // Light shift clebsch^2 * omega^2 / delta_hf at the reference control.
    double light_shift() const;
    double light_shift(double omega_t) const;

    // Copy with delta set so that delta - light_shift(omega) == 0.
    MediumParams with_compensated_shift() const;

    // Squared coupling kappa^2 = alpha0 * gamma / 2 (L = 1).
    double kappa2() const { return 0.5 * alpha0L * gamma / length; }
    double kappa() const { return std::sqrt(kappa2()); }

    // Complex decay rates at an instantaneous control value.
    cplx Gamma0_at(double omega_t) const;
    cplx Gamma_at(double omega_t) const;
};

struct DerivedRates {
    double light_shift = 0;
    double delta_R = 0;
    double v_g = 0;
    double gamma_E = 0;
    double kappa = 0;       // g sqrt(N) in normalized units, sqrt(alpha0 gamma / 2)
    double kappa2 = 0;      // alpha0 gamma / 2
    double gN_over_omega = 0;
    cplx Gamma0;
    cplx Gamma;
    double theta2 = 0;      // tan^2 theta
    bool degenerate = false;  // omega == 0, no EIT

    double delay() const { return degenerate ? INFINITY : 1.0 / v_g; }
};

DerivedRates derive(const MediumParams& p);

struct BreakdownInfo {
    double value = 0;          // |Delta_R| L / v_g
    bool valid = true;         // value < 1
    double threshold_alpha0L = 0;  // 2 Delta_hf / gamma
};

BreakdownInfo breakdown_flag(const MediumParams& p);

}  // namespace eitfwm
