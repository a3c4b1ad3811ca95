#pragma once

#include <functional>

#include "entrain/types.hpp"

namespace entrain {

using Rhs = std::function<void(double t, const Vector& y, Vector& dydt)>;

struct OdeOptions {
    double rtol = 1e-10;
    double atol = 1e-12;
    /// Optional domain predicate checked after every accepted step.
    std::function<bool(const Vector&)> in_domain;
};

enum class FixedMethod { RK4, DP5 };

/// Adaptive Dormand-Prince 5(4) integration, sampled exactly at grid.nodes
/// via the method's 4th-order continuous extension.
Trajectory integrate(const Rhs& rhs, const Vector& x0, const TimeGrid& grid,
                     const OdeOptions& opts = {});

/// Fixed-step integration on a uniform grid (reproducibility runs and
/// convergence-order tests).
Trajectory integrate_fixed(const Rhs& rhs, const Vector& x0, double t0, double t1,
                           int steps, FixedMethod method = FixedMethod::RK4);

/// Transfer matrices Phi(t; t0) of the linear time-varying matrix ODE
/// dPhi/dt = jac(t) * Phi, Phi(t0; t0) = I, sampled at grid.nodes.
std::vector<Matrix> integrate_with_transfer(const std::function<Matrix(double)>& jac,
                                            int n, const TimeGrid& grid,
                                            const OdeOptions& opts = {});

}  // namespace entrain
