#pragma once

#include <string>
#include <vector>

#include "eitfwm/params.hpp"
#include "eitfwm/pulses.hpp"

namespace eitfwm {

// The time axis comes from the boundary inputs; GridSpec only fixes the z cells
// and the inner RK4 stepping.
struct GridSpec {
    int nz = 128;
    int substeps = 0;              // RK4 steps per record interval, 0 = automatic
    std::size_t record_stride = 1;  // keep every k-th time sample in space-time records
    bool keep_space_time = true;
};

// Complex field on (nz+1) z nodes x recorded times.
struct SpaceTimeField {
    int nz = 0;
    std::vector<double> t;
    cvec data;  // row-major by time: data[it * (nz+1) + iz]

    std::size_t nt() const { return t.size(); }
    cplx at(int iz, std::size_t it) const { return data[it * static_cast<std::size_t>(nz + 1) + static_cast<std::size_t>(iz)]; }
    cvec profile(std::size_t it) const;
};

struct FieldRecord {
    SpaceTimeField eps, eps_prime_conj;
    TimeGrid grid;
    cvec signal_out;  // eps(1, t) on the full grid
    cvec stokes_out;  // eps'*(1, t)
};

struct SpinWaveRecord {
    SpaceTimeField S, P;
};

struct Snapshot {
    double t = 0;
    cvec S, P, eps, eps_prime_conj;  // z profiles
};

struct MbOptions {
    bool eit_only = false;
    std::vector<double> snapshot_times;
    double blowup_factor = 1e6;
    bool dark_fast_path = true;
};

struct MbResult {
    FieldRecord fields;
    SpinWaveRecord atoms;
    std::vector<Snapshot> snapshots;
    int substeps = 0;
    std::size_t dark_intervals = 0;
    std::vector<std::string> warnings;
};

// Largest rate the RK4 substep has to resolve: max(gamma, Omega, |Gamma|).
double stiff_rate(const MediumParams& p, double max_omega);
int auto_substeps(const MediumParams& p, double max_omega, double dt);

MbResult integrate(const MediumParams& p, const BoundaryInputs& in, const Control& control,
                   const GridSpec& grid, MbOptions opt = {});
MbResult integrate_eit_only(const MediumParams& p, const BoundaryInputs& in, const Control& control,
                            const GridSpec& grid, MbOptions opt = {});

struct Segment {
    TimeGrid grid;
    cvec signal, stokes;
};

struct StorageResult {
    Segment leak;       // t < t_off
    Segment retrieved;  // t > t_off + storage_time
    cvec S_off;         // S(z, t_off+)
    cvec S_read;        // S(z, t_read-)
    double snapshot_relation_error = 0;  // |S_read - S_off e^{-Gamma0 T}| / |S_off e^{-Gamma0 T}|
    double input_signal_energy = 0, input_stokes_energy = 0;
    MbResult run;
    std::vector<std::string> warnings;
};

StorageResult storage_run(const MediumParams& p, const BoundaryInputs& in, const ControlSchedule& schedule,
                          const GridSpec& grid, MbOptions opt = {});

// Split a full output trace at [t_off, t_on].
Segment segment_of(const TimeGrid& g, const cvec& sig, const cvec& stk, double a, double b);

}  // namespace eitfwm
