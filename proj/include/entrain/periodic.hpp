#pragma once

#include <complex>

#include "entrain/ode.hpp"
#include "entrain/system.hpp"

namespace entrain {

/// Monodromy data Phi(T;0) of the variational equation along one period.
struct MonodromyResult {
    Matrix phi_T;
    Eigen::VectorXcd eigenvalues;
    double min_distance_to_one = 0.0;
    double spectral_radius = 0.0;
    bool nondegenerate = false;
};

struct PeriodicSolution {
    PeriodicControl control;
    Vector gamma0;            // Gamma(u)
    Trajectory trajectory;    // over [0, T]
    std::vector<Matrix> phi;  // Phi(t_i; 0) at the trajectory nodes
    MonodromyResult monodromy;
    double residual = 0.0;    // |x(T) - x(0)|

    const Matrix& phi_T() const { return phi.back(); }
    double period() const { return control.period(); }
};

struct SolverOptions {
    double newton_tol = 1e-12;
    int max_iter = 60;
    double ode_rtol = 1e-10;
    double ode_atol = 1e-12;
    int grid_k = 256;  // trajectory/quadrature segments per period (even)
    double nondegeneracy_tol = 1e-8;
    double cond_threshold = 1e12;
};

/// Joint state + transfer-matrix integration over [0, T] from x0. Returns
/// the trajectory and Phi(t_i; 0) at every node.
std::pair<Trajectory, std::vector<Matrix>> integrate_with_monodromy(
    const BilinearSystem& sys, const PeriodicControl& u, const Vector& x0,
    const SolverOptions& opts = {});

MonodromyResult analyze_monodromy(const Matrix& phi_T, double nondegeneracy_tol = 1e-8);

/// Poincare-type map P(u, x0) = x(T; u, x0) - x0 plus the monodromy data
/// from the joint integration.
std::pair<Vector, MonodromyResult> poincare(const BilinearSystem& sys,
                                            const PeriodicControl& u, const Vector& x0,
                                            const SolverOptions& opts = {});

/// Newton iteration on P(u, .) with the monodromy-based Jacobian
/// Phi(T;0) - I; falls back to a Picard step x <- x(T;u,x) when the Newton
/// candidate leaves the state space.
PeriodicSolution solve_periodic(const BilinearSystem& sys, const PeriodicControl& u,
                                const Vector& x_init, const SolverOptions& opts = {});
PeriodicSolution solve_periodic(const BilinearSystem& sys, const PeriodicControl& u,
                                const SolverOptions& opts = {});

struct C3Report {
    bool nondegenerate = false;
    double min_distance_to_one = 0.0;
    double spectral_radius = 0.0;  // < 1 indicates local exponential stability
};

C3Report check_c3(const PeriodicSolution& sol, double tol = 1e-8);

}  // namespace entrain
