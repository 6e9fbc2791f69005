#pragma once

#include <functional>
#include <future>
#include <string>
#include <vector>

#include "eitfwm/mb_solver.hpp"
#include "eitfwm/params.hpp"
#include "eitfwm/pulses.hpp"

namespace eitfwm {

// Trapezoidal sum of |x|^2 dt.
double pulse_energy(const cvec& x, double dt);
// Energy over samples with a <= t < b; throws on an empty window.
double pulse_energy(const cvec& x, const TimeGrid& g, double a, double b);

// ||a - ref|| / ||ref||
double rel_l2(const cvec& a, const cvec& ref);
// || |a| - |ref| || / ||ref||, phase insensitive.
double rel_l2_abs(const cvec& a, const cvec& ref);
// max over lags |sum conj(a_n) b_{n+lag}| / (||a|| ||b||).
double xcorr_peak(const cvec& a, const cvec& b, int max_lag);

struct DecayFit {
    double tau = 0;        // us; infinity when there is no decay
    double amplitude = 0;
    double residual = 0;   // rms of log residuals
    double tau_lo = 0, tau_hi = 0;  // one-sigma interval from the slope error
    bool no_decay = false;
    std::vector<std::string> warnings;
};

DecayFit fit_decay(const std::vector<double>& times, const std::vector<double>& energies);

// A stored-light run described by physical inputs.
struct StorageScenario {
    MediumParams medium;
    PulseSpec pulse;
    ControlSchedule schedule;
    GridSpec grid{128, 0, 1, false};
    double dt = 0.01;
    double lead = 1.0;   // grid starts this long before the pulse window
    double tail = 40.0;  // grid ends this long after the control is restored
    bool eit_only = false;

    TimeGrid time_grid() const;
};

StorageResult run_storage(const StorageScenario& sc);

struct EfficiencyReport {
    double input_energy[2]{};      // signal, Stokes
    double leak_energy[2]{};
    double retrieved_energy[2]{};
    double efficiency[2]{};        // retrieved / input
    double normalized[2]{1.0, 1.0};  // relative to a zero-storage run when supplied
    bool stokes_gain = false;      // efficiency > 1 on the Stokes channel
    std::vector<std::string> warnings;
};

EfficiencyReport efficiency_report(const StorageResult& r, const StorageResult* zero_storage = nullptr);

struct SensitivityRow {
    cplx r;
    double leak_signal = 0, leak_stokes = 0, retrieved_signal = 0, retrieved_stokes = 0;
};

// Relative L2 (magnitude) deviation of each segment from the first entry of r_values.
std::vector<SensitivityRow> stokes_sensitivity(const StorageScenario& base, const std::vector<cplx>& r_values);

struct OdPoint {
    double alpha0L = 10;
    double omega = from_mhz(8.3);
    double fwhm = 6.0;
};

struct OdSweepEntry {
    OdPoint point;
    BreakdownInfo flag;
    StorageResult storage;
    EfficiencyReport report;
    double stokes_retrieved_energy = 0;
    double stokes_leak_gain = 0;  // leaked Stokes energy / input Stokes energy
};

// Pulses are placed with their peak one FWHM before t_off and truncated at t_off.
std::vector<OdSweepEntry> od_sweep(const StorageScenario& base, const std::vector<OdPoint>& points);

struct DecaySweepResult {
    std::vector<double> storage_times;
    std::vector<double> energy[2];      // retrieved energies per channel
    std::vector<double> normalized[2];  // relative to the first storage time
    DecayFit fit[2];
};

DecaySweepResult decay_sweep(const StorageScenario& base, const std::vector<double>& storage_times);

// Runs f over items concurrently; results keep the input order.
template <class T, class F>
auto parallel_map(const std::vector<T>& items, F f) -> std::vector<decltype(f(items.front()))> {
    using R = decltype(f(items.front()));
    std::vector<std::future<R>> fut;
    fut.reserve(items.size());
    for (const auto& it : items) fut.push_back(std::async(std::launch::async, f, std::cref(it)));
    std::vector<R> out;
    out.reserve(items.size());
    for (auto& x : fut) out.push_back(x.get());
    return out;
}

}  // namespace eitfwm
