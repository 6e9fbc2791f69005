#include "eitfwm/analysis.hpp"

#include <algorithm>
#include <limits>
#include <numeric>

namespace eitfwm {

double pulse_energy(const cvec& x, double dt) {
    if (x.empty()) return 0.0;
    double s = 0;
    for (auto v : x) s += std::norm(v);
    s -= 0.5 * (std::norm(x.front()) + std::norm(x.back()));
    return s * dt;
}

double pulse_energy(const cvec& x, const TimeGrid& g, double a, double b) {
    if (x.size() != g.n) throw ValidationError("pulse_energy: trace not on grid");
    const std::size_t i0 = g.index_at_or_after(a), i1 = g.index_at_or_after(b);
    if (i1 <= i0) throw ValidationError("pulse_energy: empty window");
    return pulse_energy(cvec(x.begin() + static_cast<std::ptrdiff_t>(i0), x.begin() + static_cast<std::ptrdiff_t>(i1)),
                        g.dt);
}

double rel_l2(const cvec& a, const cvec& ref) {
    if (a.size() != ref.size()) throw ValidationError("rel_l2: size mismatch");
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        num += std::norm(a[i] - ref[i]);
        den += std::norm(ref[i]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

double rel_l2_abs(const cvec& a, const cvec& ref) {
    if (a.size() != ref.size()) throw ValidationError("rel_l2_abs: size mismatch");
    double num = 0, den = 0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const double d = std::abs(a[i]) - std::abs(ref[i]);
        num += d * d;
        den += std::norm(ref[i]);
    }
    return den > 0 ? std::sqrt(num / den) : std::sqrt(num);
}

double xcorr_peak(const cvec& a, const cvec& b, int max_lag) {
    double na = 0, nb = 0;
    for (auto v : a) na += std::norm(v);
    for (auto v : b) nb += std::norm(v);
    if (na == 0 || nb == 0) return 0.0;
    const auto n = static_cast<long long>(std::min(a.size(), b.size()));
    double best = 0;
    for (long long lag = -max_lag; lag <= max_lag; ++lag) {
        cplx acc = 0.0;
        for (long long i = std::max(0LL, -lag); i < n && i + lag < n; ++i)
            acc += std::conj(a[static_cast<std::size_t>(i)]) * b[static_cast<std::size_t>(i + lag)];
        best = std::max(best, std::abs(acc));
    }
    return best / std::sqrt(na * nb);
}

DecayFit fit_decay(const std::vector<double>& t, const std::vector<double>& e) {
    if (t.size() != e.size()) throw ValidationError("fit_decay: size mismatch");
    if (t.size() < 4) throw ValidationError("fit_decay: need at least 4 points");
    for (double v : e)
        if (!(v > 0)) throw ValidationError("fit_decay: energies must be positive");
    const auto n = static_cast<double>(t.size());
    std::vector<double> y(e.size());
    std::transform(e.begin(), e.end(), y.begin(), [](double v) { return std::log(v); });
    const double mt = std::accumulate(t.begin(), t.end(), 0.0) / n;
    const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        sxx += (t[i] - mt) * (t[i] - mt);
        sxy += (t[i] - mt) * (y[i] - my);
    }
    if (sxx == 0) throw ValidationError("fit_decay: storage times must differ");
    const double slope = sxy / sxx, icpt = my - slope * mt;
    double ss = 0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const double r = y[i] - (icpt + slope * t[i]);
        ss += r * r;
    }
    DecayFit f;
    f.amplitude = std::exp(icpt);
    f.residual = std::sqrt(ss / n);
    const double se = std::sqrt(ss / std::max(1.0, n - 2.0) / sxx);
    const double inf = std::numeric_limits<double>::infinity();
    const double scale = std::max(1.0, std::abs(my));
    if (slope >= -1e-14 * scale) {
        f.no_decay = true;
        f.tau = inf;
        f.tau_lo = se > 0 ? 1.0 / se : inf;
        f.tau_hi = inf;
    } else {
        f.tau = -1.0 / slope;
        f.tau_lo = -1.0 / (slope - se);
        f.tau_hi = slope + se < 0 ? -1.0 / (slope + se) : inf;
    }
    std::vector<std::size_t> order(t.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(), [&](auto a, auto b) { return t[a] < t[b]; });
    for (std::size_t k = 1; k < order.size(); ++k) {
        if (e[order[k]] > e[order[k - 1]] * (1 + 1e-12)) {
            f.warnings.push_back("non-monotonic energies; log residual rms = " + std::to_string(f.residual));
            break;
        }
    }
    return f;
}

TimeGrid StorageScenario::time_grid() const {
    const double t0 = pulse.window_start() - lead;
    const double t1 = schedule.t_on() + tail;
    // keep t_off and t_on on grid points
    const double k0 = std::floor((t0 - schedule.t_off) / dt);
    TimeGrid g;
    g.dt = dt;
    g.t0 = schedule.t_off + k0 * dt;
    g.n = static_cast<std::size_t>(std::ceil((t1 - g.t0) / dt - 1e-9)) + 1;
    return g;
}

StorageResult run_storage(const StorageScenario& sc) {
    const TimeGrid g = sc.time_grid();
    const BoundaryInputs in = sample_inputs(sc.pulse, g);
    MbOptions opt;
    opt.eit_only = sc.eit_only;
    return storage_run(sc.medium, in, sc.schedule, sc.grid, opt);
}

EfficiencyReport efficiency_report(const StorageResult& r, const StorageResult* zero) {
    EfficiencyReport e;
    const double dt = r.run.fields.grid.dt;
    e.input_energy[0] = r.input_signal_energy;
    e.input_energy[1] = r.input_stokes_energy;
    e.leak_energy[0] = pulse_energy(r.leak.signal, dt);
    e.leak_energy[1] = pulse_energy(r.leak.stokes, dt);
    e.retrieved_energy[0] = pulse_energy(r.retrieved.signal, dt);
    e.retrieved_energy[1] = pulse_energy(r.retrieved.stokes, dt);
    for (int c = 0; c < 2; ++c) e.efficiency[c] = e.input_energy[c] > 0 ? e.retrieved_energy[c] / e.input_energy[c] : 0.0;
    if (e.efficiency[0] > 1.0) e.warnings.push_back("signal efficiency above 1");
    e.stokes_gain = e.efficiency[1] > 1.0;
    if (e.stokes_gain) e.warnings.push_back("Stokes efficiency above 1 (FWM gain)");
    if (zero) {
        const EfficiencyReport z = efficiency_report(*zero);
        for (int c = 0; c < 2; ++c) e.normalized[c] = z.retrieved_energy[c] > 0 ? e.retrieved_energy[c] / z.retrieved_energy[c] : 0.0;
    }
    return e;
}

std::vector<SensitivityRow> stokes_sensitivity(const StorageScenario& base, const std::vector<cplx>& r_values) {
    if (r_values.empty()) throw ValidationError("stokes_sensitivity: r_values must include a reference");
    auto results = parallel_map(r_values, [&](const cplx& r) {
        StorageScenario sc = base;
        sc.pulse.stokes_ratio = r;
        return run_storage(sc);
    });
    const StorageResult& ref = results.front();
    std::vector<SensitivityRow> rows;
    for (std::size_t k = 0; k < r_values.size(); ++k) {
        const StorageResult& x = results[k];
        SensitivityRow row;
        row.r = r_values[k];
        row.leak_signal = rel_l2_abs(x.leak.signal, ref.leak.signal);
        row.leak_stokes = rel_l2_abs(x.leak.stokes, ref.leak.stokes);
        row.retrieved_signal = rel_l2_abs(x.retrieved.signal, ref.retrieved.signal);
        row.retrieved_stokes = rel_l2_abs(x.retrieved.stokes, ref.retrieved.stokes);
        rows.push_back(row);
    }
    return rows;
}

std::vector<OdSweepEntry> od_sweep(const StorageScenario& base, const std::vector<OdPoint>& points) {
    return parallel_map(points, [&](const OdPoint& pt) {
        StorageScenario sc = base;
        sc.medium.alpha0L = pt.alpha0L;
        sc.medium.omega = pt.omega;
        sc.schedule.omega_write = sc.schedule.omega_read = pt.omega;
        sc.pulse.fwhm = pt.fwhm;
        sc.pulse.center = sc.schedule.t_off - pt.fwhm;
        sc.pulse.trunc_start = sc.pulse.center - 2.0 * pt.fwhm;
        sc.pulse.trunc_end = sc.schedule.t_off;
        OdSweepEntry e;
        e.point = pt;
        e.flag = breakdown_flag(sc.medium);
        e.storage = run_storage(sc);
        e.report = efficiency_report(e.storage);
        e.stokes_retrieved_energy = e.report.retrieved_energy[1];
        e.stokes_leak_gain = e.report.input_energy[1] > 0 ? e.report.leak_energy[1] / e.report.input_energy[1] : 0.0;
        if (!e.flag.valid) e.storage.warnings.push_back("perturbative treatment invalid at this optical depth");
        return e;
    });
}

DecaySweepResult decay_sweep(const StorageScenario& base, const std::vector<double>& times) {
    if (times.size() < 4) throw ValidationError("decay_sweep: need at least 4 storage times");
    auto runs = parallel_map(times, [&](const double& T) {
        StorageScenario sc = base;
        sc.schedule.storage_time = T;
        return efficiency_report(run_storage(sc));
    });
    DecaySweepResult out;
    out.storage_times = times;
    for (int c = 0; c < 2; ++c) {
        for (const auto& r : runs) out.energy[c].push_back(r.retrieved_energy[c]);
        for (double v : out.energy[c]) out.normalized[c].push_back(out.energy[c].front() > 0 ? v / out.energy[c].front() : 0.0);
        out.fit[c] = fit_decay(times, out.energy[c]);
    }
    return out;
}

}  // namespace eitfwm
