#pragma once

#include <vector>

#include "entrain/control.hpp"
#include "entrain/periodic.hpp"
#include "entrain/system.hpp"

namespace entrain {

/// State response z(t) of the variational equation
///   z' = J(gamma(t), u(t)) z + (M(gamma(t)) + Df(u(t))) du(t),  z(0) = 0,
/// sampled on the solution grid.
struct DirectionalSensitivity {
    std::vector<Vector> z;      // z(t_i) on sol.trajectory.grid
    Vector dgamma0;             // -(Phi(T;0) - I)^{-1} z(T)
    const TimeGrid& grid() const { return *grid_ptr; }
    const TimeGrid* grid_ptr = nullptr;
};

/// Integrates the inhomogeneous variational equation along a periodic
/// solution and returns z on the grid, without the boundary solve.
std::vector<Vector> directional_state_sensitivity(const BilinearSystem& sys,
                                                  const PeriodicSolution& sol,
                                                  const PeriodicControl& du,
                                                  const SolverOptions& opts = {});

/// Directional derivative of the entrained-solution map at u:
/// the initial condition dGamma(u)du(0) = -(Phi(T;0)-I)^{-1} z(T),
/// together with z itself.
DirectionalSensitivity dgamma_apply(const BilinearSystem& sys,
                                    const PeriodicSolution& sol,
                                    const PeriodicControl& du,
                                    const SolverOptions& opts = {});

/// Same initial-condition derivative, specialised to a constant base input
/// (gamma == equilibrium e, u == vbar).  Evaluates the closed form
///   -(exp(H T) - I)^{-1} \int_0^T exp(H (T-s)) (M(e)+Df(vbar)) du(s) ds
/// with H = J(e, vbar), via matrix exponentials and composite Simpson.
Vector dgamma_constant(const BilinearSystem& sys, const Vector& equilibrium,
                       const Vector& vbar, const PeriodicControl& du,
                       int quad_samples = 1024);

}  // namespace entrain
