#include "entrain/sensitivity.hpp"

#include <Eigen/LU>
#include <unsupported/Eigen/MatrixFunctions>

#include "entrain/ode.hpp"
#include "entrain/quadrature.hpp"

namespace entrain {

std::vector<Vector> directional_state_sensitivity(const BilinearSystem& sys,
                                                  const PeriodicSolution& sol,
                                                  const PeriodicControl& du,
                                                  const SolverOptions& opts) {
    const int n = sys.n;
    const auto& u = sol.control;

    // Integrate (x, z) jointly so z sees the exact trajectory, not an
    // interpolant of it.
    Rhs rhs = [&](double t, const Vector& y, Vector& dy) {
        const Vector x = y.head(n);
        const Vector z = y.tail(n);
        const Vector ut = u.eval(t);
        const Vector dut = du.eval(t);
        dy.resize(2 * n);
        dy.head(n) = sys.rhs(ut, x);
        dy.tail(n) = sys.J(x, ut) * z + (sys.M(x) + sys.Df(ut)) * dut;
    };

    Vector y0 = Vector::Zero(2 * n);
    y0.head(n) = sol.gamma0;

    OdeOptions ode;
    ode.rtol = opts.ode_rtol;
    ode.atol = opts.ode_atol;
    Trajectory traj = integrate(rhs, y0, sol.trajectory.grid, ode);

    std::vector<Vector> z;
    z.reserve(traj.states.size());
    for (const auto& y : traj.states) z.push_back(y.tail(n));
    return z;
}

DirectionalSensitivity dgamma_apply(const BilinearSystem& sys,
                                    const PeriodicSolution& sol,
                                    const PeriodicControl& du,
                                    const SolverOptions& opts) {
    DirectionalSensitivity out;
    out.z = directional_state_sensitivity(sys, sol, du, opts);
    out.grid_ptr = &sol.trajectory.grid;

    const int n = sys.n;
    Matrix A = sol.phi_T() - Matrix::Identity(n, n);
    out.dgamma0 = A.partialPivLu().solve(-out.z.back());
    return out;
}

Vector dgamma_constant(const BilinearSystem& sys, const Vector& equilibrium,
                       const Vector& vbar, const PeriodicControl& du,
                       int quad_samples) {
    const int n = sys.n;
    const double T = du.period();
    if (quad_samples % 2 != 0) ++quad_samples;

    const Matrix H = sys.J(equilibrium, vbar);
    const Matrix B = sys.M(equilibrium) + sys.Df(vbar);

    // exp(H(T - s)) at the quadrature nodes, stepping by exp(-H h) from
    // exp(H T) so only two exponentials are formed.
    const double h = T / quad_samples;
    const Matrix step = (-H * h).exp();
    Matrix expfac = (H * T).exp();

    const auto w = simpson_weights(quad_samples + 1, h);
    Vector acc = Vector::Zero(n);
    for (int i = 0; i <= quad_samples; ++i) {
        const double s = i * h;
        acc += w[i] * (expfac * (B * du.eval(s)));
        if (i < quad_samples) expfac = expfac * step;
    }

    Matrix A = (H * T).exp() - Matrix::Identity(n, n);
    return A.partialPivLu().solve(-acc);
}

}  // namespace entrain
