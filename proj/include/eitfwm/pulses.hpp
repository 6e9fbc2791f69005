#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "eitfwm/params.hpp"

namespace eitfwm {

using cvec = std::vector<cplx>;

struct TimeGrid {
    double t0 = 0;
    double dt = 0.01;
    std::size_t n = 0;

    double t(std::size_t i) const { return t0 + dt * static_cast<double>(i); }
    double t_end() const { return n ? t(n - 1) : t0; }
    std::vector<double> times() const;
    // Index of the first sample with t >= x (clamped to n).
    std::size_t index_at_or_after(double x) const;

    static TimeGrid span(double t_start, double t_end, double dt);
};

enum class PulseShape { truncated_gaussian, custom_samples };

struct PulseSpec {
    PulseShape shape = PulseShape::truncated_gaussian;
    double fwhm = 6.6;        // intensity FWHM, us
    double center = 0.0;
    cplx amplitude = 1.0;
    cplx stokes_ratio = 1.0;  // eps'*(0,t) = r eps(0,t)
    std::optional<double> trunc_start, trunc_end;  // default center -/+ 2 fwhm
    std::vector<double> custom_t;  // for custom_samples
    cvec custom_values;

    double window_start() const;
    double window_end() const;
    void validate() const;
    // Envelope value at time t (0 outside the truncation window).
    cplx envelope(double t) const;
};

struct BoundaryInputs {
    TimeGrid grid;
    cvec signal;  // eps(0, t_i)
    cvec stokes;  // eps'*(0, t_i)
};

BoundaryInputs sample_inputs(const PulseSpec& spec, const TimeGrid& grid);

// Angular bandwidth of a truncated Gaussian: 2 ln2 / (pi fwhm).
double pulse_bandwidth(const PulseSpec& spec);
double fwhm_for_bandwidth(double bandwidth);

struct SwitchModel {
    enum Kind { instantaneous, linear_ramp } kind = instantaneous;
    double ramp = 0.0;  // us
};

struct ControlSchedule {
    double omega_write = from_mhz(10.0);
    double omega_read = from_mhz(10.0);
    double t_off = 0.0;
    double storage_time = 0.0;
    SwitchModel switch_model;

    void validate() const;
    double omega(double t) const;
    double t_on() const { return t_off + storage_time; }
    double max_omega() const { return std::max(omega_write, omega_read); }
};

// Callable control used by the time-domain solvers.
struct Control {
    std::function<double(double)> fn;
    double max_omega = 0;

    double operator()(double t) const { return fn(t); }
    static Control constant(double omega);
    static Control from_schedule(const ControlSchedule& s);
};

std::vector<double> sample_control(const ControlSchedule& schedule, const TimeGrid& grid);

// Two-column (t, re, im) csv reader for custom envelopes.
PulseSpec load_custom_pulse(const std::string& path);

}  // namespace eitfwm
