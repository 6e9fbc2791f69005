#include "eitfwm/pulses.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace eitfwm {

std::vector<double> TimeGrid::times() const {
    std::vector<double> out(n);
    for (std::size_t i = 0; i < n; ++i) out[i] = t(i);
    return out;
}

std::size_t TimeGrid::index_at_or_after(double x) const {
    if (x <= t0) return 0;
    double k = std::ceil((x - t0) / dt - 1e-9);
    return std::min<std::size_t>(n, static_cast<std::size_t>(k));
}

TimeGrid TimeGrid::span(double t_start, double t_end, double dt) {
    if (!(dt > 0) || !(t_end > t_start)) throw ValidationError("time grid: need dt > 0 and t_end > t_start");
    TimeGrid g;
    g.t0 = t_start;
    g.dt = dt;
    g.n = static_cast<std::size_t>(std::floor((t_end - t_start) / dt + 1e-9)) + 1;
    return g;
}

double PulseSpec::window_start() const {
    if (trunc_start) return *trunc_start;
    if (shape == PulseShape::custom_samples && !custom_t.empty()) return custom_t.front();
    return center - 2.0 * fwhm;
}

double PulseSpec::window_end() const {
    if (trunc_end) return *trunc_end;
    if (shape == PulseShape::custom_samples && !custom_t.empty()) return custom_t.back();
    return center + 2.0 * fwhm;
}

void PulseSpec::validate() const {
    if (shape == PulseShape::truncated_gaussian) {
        if (!(fwhm > 0)) throw ValidationError("pulse: fwhm must be > 0");
        if (!(window_start() <= center && center <= window_end()))
            throw ValidationError("pulse: truncation window must contain the center");
    } else {
        if (custom_t.size() < 2 || custom_t.size() != custom_values.size())
            throw ValidationError("pulse: custom_samples needs >= 2 matching (t, value) rows");
        if (!std::is_sorted(custom_t.begin(), custom_t.end()))
            throw ValidationError("pulse: custom sample times must be increasing");
    }
}

cplx PulseSpec::envelope(double t) const {
    if (t < window_start() || t > window_end()) return 0.0;
    if (shape == PulseShape::truncated_gaussian) {
        double x = (t - center) / fwhm;
        return amplitude * std::exp(-2.0 * std::numbers::ln2 * x * x);
    }
    auto it = std::upper_bound(custom_t.begin(), custom_t.end(), t);
    if (it == custom_t.begin() || it == custom_t.end()) {
        return (t == custom_t.back()) ? amplitude * custom_values.back() : cplx{0.0};
    }
    std::size_t k = static_cast<std::size_t>(it - custom_t.begin());
    double a = (t - custom_t[k - 1]) / (custom_t[k] - custom_t[k - 1]);
    return amplitude * ((1.0 - a) * custom_values[k - 1] + a * custom_values[k]);
}

BoundaryInputs sample_inputs(const PulseSpec& spec, const TimeGrid& grid) {
    spec.validate();
    if (grid.n < 2) throw ValidationError("pulse: time grid has fewer than 2 samples");
    if (grid.t0 > spec.window_start() || grid.t_end() < spec.window_end())
        throw ValidationError("pulse: time grid does not cover the truncation window");
    if (spec.shape == PulseShape::truncated_gaussian && spec.fwhm / grid.dt < 16.0)
        throw ValidationError("pulse: grid too coarse, fewer than 16 samples across the FWHM");
    BoundaryInputs in;
    in.grid = grid;
    in.signal.resize(grid.n);
    in.stokes.resize(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) {
        in.signal[i] = spec.envelope(grid.t(i));
        in.stokes[i] = spec.stokes_ratio * in.signal[i];
    }
    return in;
}

double pulse_bandwidth(const PulseSpec& spec) {
    if (spec.shape != PulseShape::truncated_gaussian)
        throw ValidationError("pulse_bandwidth: only defined for truncated_gaussian pulses");
    if (!(spec.fwhm > 0)) throw ValidationError("pulse: fwhm must be > 0");
    return 2.0 * std::numbers::ln2 / (std::numbers::pi * spec.fwhm);
}

double fwhm_for_bandwidth(double bandwidth) {
    if (!(bandwidth > 0)) throw ValidationError("bandwidth must be > 0");
    return 2.0 * std::numbers::ln2 / (std::numbers::pi * bandwidth);
}

void ControlSchedule::validate() const {
    if (!(omega_write >= 0) || !(omega_read >= 0)) throw ValidationError("control: Rabi frequencies must be >= 0");
    if (!(storage_time >= 0)) throw ValidationError("control: storage_time must be >= 0");
    if (switch_model.kind == SwitchModel::linear_ramp && !(switch_model.ramp > 0))
        throw ValidationError("control: linear ramp needs a positive duration");
}

double ControlSchedule::omega(double t) const {
    if (storage_time == 0.0 && omega_write == omega_read) return omega_write;
    const double t1 = t_on();
    if (switch_model.kind == SwitchModel::instantaneous) {
        if (t < t_off) return omega_write;
        if (t < t1) return 0.0;
        return omega_read;
    }
    // ramps sit before each boundary so they belong to the earlier segment
    const double r = switch_model.ramp;
    if (t < t_off - r) return omega_write;
    if (t < t_off) return omega_write * (t_off - t) / r;
    if (t < t1 - r) return 0.0;
    if (t < t1) return omega_read * (t - (t1 - r)) / r;
    return omega_read;
}

Control Control::constant(double omega) {
    return Control{[omega](double) { return omega; }, omega};
}

Control Control::from_schedule(const ControlSchedule& s) {
    s.validate();
    return Control{[s](double t) { return s.omega(t); }, s.max_omega()};
}

std::vector<double> sample_control(const ControlSchedule& schedule, const TimeGrid& grid) {
    schedule.validate();
    std::vector<double> out(grid.n);
    for (std::size_t i = 0; i < grid.n; ++i) out[i] = schedule.omega(grid.t(i));
    return out;
}

PulseSpec load_custom_pulse(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw ValidationError("pulse: cannot open custom samples file " + path);
    PulseSpec p;
    p.shape = PulseShape::custom_samples;
    std::string line;
    while (std::getline(f, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::replace(line.begin(), line.end(), ',', ' ');
        std::istringstream ss(line);
        double t, re, im = 0;
        if (!(ss >> t >> re)) continue;  // header
        ss >> im;
        p.custom_t.push_back(t);
        p.custom_values.emplace_back(re, im);
    }
    p.validate();
    auto peak = std::max_element(p.custom_values.begin(), p.custom_values.end(),
                                 [](cplx a, cplx b) { return std::abs(a) < std::abs(b); });
    p.center = p.custom_t[static_cast<std::size_t>(peak - p.custom_values.begin())];
    return p;
}

}  // namespace eitfwm
