#include "eitfwm/presets.hpp"

namespace eitfwm {

namespace {

// Rb-87 D1 numbers throughout: hyperfine splitting 6835 MHz, control coupling ratio -sqrt(3).
// Stored runs switch the control off at t = 0 with the pulse peak one FWHM earlier.

const char* fig2 = R"(
[experiment]
kind = stored_light
eit_only_overlay = true

[medium]
alpha0L = 52
gamma_mhz = 145
omega_mhz = 9.6
delta_mhz = 0

[pulse]
fwhm_us = 16
center_us = -16
trunc_end_us = 0
stokes_ratio = 1

[control]
t_off_us = 0
storage_time_us = 20

[grid]
nz = 128
dt_us = 0.02
tail_us = 50
)";

// spin decay 300 us -> gamma0 = 270 Hz
const char* fig3 = R"(
[experiment]
kind = decay_sweep
storage_times_us = 25, 50, 100, 200, 300, 400

[medium]
alpha0L = 52
gamma_mhz = 145
gamma0_mhz = 0.00027
omega_mhz = 9.6
delta_mhz = 0

[pulse]
fwhm_us = 16
center_us = -16
trunc_end_us = 0
stokes_ratio = 1

[control]
t_off_us = 0

[grid]
nz = 128
dt_us = 0.02
tail_us = 50
)";

// pulse bandwidth 0.1 Gamma_E gives an intensity FWHM near 6.6 us
const char* fig4 = R"(
[experiment]
kind = slow_light
solvers = time_domain, spectral, kernels
snapshot_time_us = 5

[medium]
alpha0L = 80
gamma_mhz = 150
omega_mhz = 10
delta_mhz = light_shift

[pulse]
bandwidth_ge = 0.1
center_us = 0
stokes_ratio = 1

[grid]
nz = 128
dt_us = 0.01
t_start_us = -15
t_end_us = 45
kernel_t_min_us = -10
kernel_t_max_us = 30
)";

const char* fig5 = R"(
[experiment]
kind = joint_mode_study
alpha0L_list = 10, 25, 50, 100
homogeneous_overlay = true

[medium]
gamma_mhz = 150
omega_mhz = 8
delta_mhz = light_shift

[pulse]
bandwidth_ge = 0.05
center_us = 0
stokes_ratio = 1

[grid]
dt_us = 0.02
joint_nz = 256
lead_us = 2
tail_us = 20
)";

// (alpha0L, control MHz, FWHM us) per panel, delta = 0
const char* fig6 = R"(
[experiment]
kind = od_sweep
od_points = 10:8.3:6; 41:7.1:6; 82:12.7:20; 110:7.8:20

[medium]
alpha0L = 52
gamma_mhz = 145
omega_mhz = 8.3
delta_mhz = 0

[pulse]
fwhm_us = 6
stokes_ratio = 1

[control]
t_off_us = 0
storage_time_us = 100

[grid]
nz = 128
dt_us = 0.02
tail_us = 60
)";

// seeded Stokes amplitude 1 vs -0.55 of the signal
const char* fig7 = R"(
[experiment]
kind = sensitivity_study
r_values = 1, -0.55
alpha0L_list = 10, 25, 52

[medium]
alpha0L = 52
gamma_mhz = 145
omega_mhz = 9.6
delta_mhz = light_shift

[pulse]
fwhm_us = 15
center_us = -15
trunc_end_us = 0

[control]
t_off_us = 0
storage_time_us = 20

[grid]
nz = 128
dt_us = 0.02
tail_us = 50
)";

const char* fig8 = R"(
[experiment]
kind = kernel_study
z = 1
h_form = expanded

[medium]
alpha0L = 80
gamma_mhz = 150
omega_mhz = 10
delta_mhz = light_shift

[grid]
dt_us = 0.01
kernel_t_min_us = -10
kernel_t_max_us = 30
)";

}  // namespace

const std::vector<Preset>& presets() {
    static const std::vector<Preset> list = {
        {"fig2", "stored light at alpha0L=52 with a 16 us pulse, EIT-only overlay", fig2},
        {"fig3", "retrieved energy vs storage time, exponential spin-decay fit", fig3},
        {"fig4", "slow light at alpha0L=80, 10 MHz control: time-domain, kernel and box-limit overlays", fig4},
        {"fig5", "joint mode F: full vs homogeneous propagation over alpha0L 10..100", fig5},
        {"fig6", "Stokes behaviour over four (alpha0L, control, FWHM) storage points", fig6},
        {"fig7", "retrieval insensitivity to the Stokes seed ratio (1 vs -0.55)", fig7},
        {"fig8", "the seven kernels at z=1: numeric, closed form, box limit", fig8},
    };
    return list;
}

const Preset* find_preset(const std::string& name) {
    for (const auto& p : presets())
        if (p.name == name) return &p;
    return nullptr;
}

}  // namespace eitfwm
