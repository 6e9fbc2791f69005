#pragma once

#include <vector>

#include "eitfwm/mb_solver.hpp"
#include "eitfwm/params.hpp"
#include "eitfwm/pulses.hpp"

namespace eitfwm {

enum class JointMode { full, homogeneous };

struct JointOptions {
    int nz = 256;
    double cfl = 0.2;   // v_g h / dz per substep
    int substeps = 0;   // 0 = from cfl
    bool keep_space_time = false;
    std::size_t record_stride = 1;
};

// F = eps - i (Gamma/dhf) eps'*, with both parts kept.
struct JointModeRecord {
    TimeGrid grid;
    cvec F_out;             // F(1, t)
    cvec signal_part_out;   // eps contribution at z = 1
    cvec stokes_part_out;   // -i (Gamma/dhf) eps'* contribution at z = 1
    cvec stokes_out;        // eps'*(1, t)
    SpaceTimeField F, S, eps_prime_conj;
    int substeps = 0;
};

// Joint field decomposition of given signal/Stokes traces at control omega_t.
JointModeRecord decompose_joint(const MediumParams& p, const TimeGrid& g, const cvec& eps, const cvec& eps_pc,
                                const Control& control);

// P ~ i (Omega/Gamma) S + i (kappa/Gamma) eps, pointwise.
cvec adiabatic_P(const MediumParams& p, const cvec& S, const cvec& eps, double omega_t);

JointModeRecord evolve_joint(const MediumParams& p, const BoundaryInputs& in, const Control& control, JointMode mode,
                             const JointOptions& opt = {});

// d/dt S = -(Gamma0 + Omega^2/Gamma) S - kappa (Omega/Gamma) F at every z node.
SpaceTimeField spinwave_from_joint(const MediumParams& p, const SpaceTimeField& F, const Control& control,
                                   const cvec& S_initial = {});

}  // namespace eitfwm
