#pragma once

#include "fno/field.hpp"

namespace fno {

/// Steady Darcy flow -div(a grad u) = f on (0,1)^2 with homogeneous Dirichlet
/// boundary, discretized by the 5-point variable-coefficient stencil on the
/// endpoint-inclusive grid x_j = j/(s-1). Face coefficients are arithmetic
/// averages of a at the adjacent nodes (harmonic averaging behind a flag).
struct DarcyProblem {
    Field a;   // s1 x s2, strictly positive, includes the boundary ring
    Field f;   // s1 x s2
    bool harmonic_faces = false;
    double cg_tol = 1e-8;     // relative residual target
    int64_t cg_max_iter = 0;  // 0 picks a resolution-scaled default
};

/// Conjugate-gradient solve (Jacobi preconditioned) of the SPD interior
/// system. Returns the full grid including the zero boundary.
Field solve_darcy(const DarcyProblem& p);

} // namespace fno
