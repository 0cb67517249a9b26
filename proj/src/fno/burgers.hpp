#pragma once

#include "fno/field.hpp"

namespace fno {

/// 1-d periodic viscous Burgers problem: advance u0 to t_final with a split
/// step scheme (nonlinear substep pseudo-spectral forward Euler, diffusion
/// exact in Fourier space). The substep is chosen adaptively as
/// min(dt_max, cfl * dx / max|u|).
struct BurgersProblem {
    Field u0;               // 1-d field on the torus grid
    double nu = 0.1;
    double t_final = 1.0;
    double dt_max = 1e-4;
    double cfl = 0.5;
    double blowup_factor = 1e6;
};

Field solve_burgers(const BurgersProblem& p);

} // namespace fno
