#pragma once

#include <optional>
#include <string>
#include <vector>

#include "eitfwm/analysis.hpp"
#include "eitfwm/jointmode.hpp"
#include "eitfwm/kernels.hpp"
#include "eitfwm/mb_solver.hpp"
#include "eitfwm/spectral.hpp"

namespace eitfwm {

enum class ExperimentKind { slow_light, stored_light, kernel_study, joint_mode_study, od_sweep, decay_sweep, sensitivity_study };
enum class SolverKind { time_domain, spectral, kernels, joint };

const char* kind_name(ExperimentKind k);
const char* solver_name(SolverKind s);

struct ExperimentSpec {
    ExperimentKind kind = ExperimentKind::slow_light;
    std::string name;
    std::string origin;  // file path or preset name

    MediumParams medium;
    bool delta_is_light_shift = false;
    PulseSpec pulse;
    std::optional<double> bandwidth_ge;  // pulse bandwidth as a fraction of Gamma_E
    ControlSchedule control;
    bool has_control = false;

    GridSpec grid;
    double dt = 0.01;
    std::optional<double> t_start, t_end;
    double lead = 1.0, tail = 40.0;
    SpectralOptions spectral;
    NumericKernelOptions kernel_opts;
    JointOptions joint;
    double kernel_t_min = -10, kernel_t_max = 30;

    std::vector<SolverKind> solvers;
    bool eit_only_overlay = false;
    bool homogeneous_overlay = true;
    std::vector<double> storage_times;
    std::vector<double> alpha0L_list;
    std::vector<OdPoint> od_points;
    std::vector<cplx> r_values;
    double z = 1.0;
    std::optional<double> snapshot_time;

    bool uses(SolverKind s) const;
    // Medium/pulse adjusted for a given optical depth (light shift and bandwidth rules re-applied).
    MediumParams medium_at(double alpha0L) const;
    PulseSpec pulse_for(const MediumParams& m) const;
    TimeGrid time_grid(const PulseSpec& pulse, const MediumParams& m) const;
    StorageScenario scenario() const;
};

// INI text with sections [experiment] [medium] [pulse] [control] [grid].
ExperimentSpec parse_spec(const std::string& ini_text, const std::string& origin);
ExperimentSpec load_spec_file(const std::string& path);

cplx parse_complex(const std::string& s);
std::string format_complex(cplx c);

}  // namespace eitfwm
