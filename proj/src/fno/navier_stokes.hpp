#pragma once

#include "fno/field.hpp"

namespace fno {

/// 2-d incompressible Navier-Stokes in vorticity form on the unit torus,
/// integrated pseudo-spectrally in the stream-function formulation:
/// Crank-Nicolson for the diffusion, fully explicit advection, 2/3-rule
/// dealiasing of the nonlinear term (the state is kept on the dealiased band).
struct NsProblem {
    Field w0;                      // s x s initial vorticity
    double nu = 1e-3;
    Field forcing;                 // s x s; empty means zero forcing
    double t_final = 20.0;
    double dt = 1e-3;
    double record_interval = 1.0;  // <= 0 records only the final state
    double cfl_limit = 1.0;        // abort when dt * max|u| / dx exceeds this
    double blowup_factor = 1e6;
};

struct NsTrajectory {
    Field snapshots;               // s x s x n_recorded (time last)
    std::vector<double> times;
    int64_t steps = 0;
    double max_courant = 0.0;

    Field frame(int64_t index) const;
};

NsTrajectory solve_ns(const NsProblem& p);

/// The fixed dataset forcing 0.1 (sin(2 pi (x1+x2)) + cos(2 pi (x1+x2))).
Field ns_standard_forcing(int64_t s);

/// Velocity (u1, u2) recovered from vorticity through the streamfunction;
/// output shape s x s x 2. Divergence-free by construction.
Field ns_velocity(const Field& w);

} // namespace fno
