#include "entrain/goe.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>
#include <cmath>

#include "entrain/ode.hpp"
#include "entrain/quadrature.hpp"

namespace entrain {

bool KernelSamples::finite() const {
    for (const auto& row : values)
        if (!row.allFinite()) return false;
    return true;
}

double average_output(const BilinearSystem& sys, const PeriodicSolution& sol) {
    const TimeGrid& g = sol.trajectory.grid;
    const double T = g.span();
    const double val = simpson(
        [&](int i) {
            return sys.h(sol.control.eval(g.nodes[i]), sol.trajectory.states[i]);
        },
        g.size(), g.spacing());
    return val / T;
}

double goe_first_order(const BilinearSystem& sys, const PeriodicSolution& sol,
                       const PeriodicControl& du, const SolverOptions& opts) {
    if (!sol.monodromy.nondegenerate) throw SingularMonodromy();
    const DirectionalSensitivity sens = dgamma_apply(sys, sol, du, opts);

    const TimeGrid& g = sol.trajectory.grid;
    const double T = g.span();
    const double val = simpson(
        [&](int i) {
            const double t = g.nodes[i];
            const Vector u = sol.control.eval(t);
            const Vector& x = sol.trajectory.states[i];
            const Vector dx = sol.phi[i] * sens.dgamma0 + sens.z[i];
            return sys.h_u(u, x).dot(du.eval(t)) + sys.h_x(u, x).dot(dx);
        },
        g.size(), g.spacing());
    return val / T;
}

GoeReport goe_exact(const BilinearSystem& sys, const PeriodicControl& u,
                    const PeriodicControl& du, const SolverOptions& opts) {
    const int k = std::max(u.grid_size(), du.grid_size());
    const PeriodicControl base = u.grid_size() == k ? u : u.resampled(k);
    const PeriodicControl pert = base.plus(du.grid_size() == k ? du : du.resampled(k));

    PeriodicSolution sol_base = solve_periodic(sys, base, opts);
    PeriodicSolution sol_pert = solve_periodic(sys, pert, sol_base.gamma0, opts);

    GoeReport rep;
    rep.ybar_base = average_output(sys, sol_base);
    rep.ybar_pert = average_output(sys, sol_pert);
    rep.goe = rep.ybar_pert - rep.ybar_base;
    rep.first_order_prediction = goe_first_order(sys, sol_base, du, opts);
    rep.residual = rep.goe - rep.first_order_prediction;
    rep.du_norm = du.norm();
    return rep;
}

namespace {

// Joint right-hand side for (x, vec(Phi), c) with c(t)^T, where
// c(t) = int_0^t h_x(u(s), x(s)) Phi(s; t0) ds is a row vector.
Rhs kernel_rhs(const BilinearSystem& sys, const PeriodicControl& u, int n) {
    return [&sys, &u, n](double t, const Vector& y, Vector& dy) {
        const Vector x = y.head(n);
        const Matrix Phi = Eigen::Map<const Matrix>(y.data() + n, n, n);
        const Vector ut = u.eval(t);
        const Matrix Jx = sys.J(x, ut);
        dy.resize(n + n * n + n);
        dy.head(n) = sys.rhs(ut, x);
        Eigen::Map<Matrix>(dy.data() + n, n, n) = Jx * Phi;
        dy.tail(n) = Phi.transpose() * sys.h_x(ut, x).transpose();
    };
}

}  // namespace

KernelSamples goe_kernel(const BilinearSystem& sys, const PeriodicSolution& sol,
                         const SolverOptions& opts) {
    if (!sol.monodromy.nondegenerate) throw SingularMonodromy();
    const int n = sys.n;
    const TimeGrid& g = sol.trajectory.grid;
    const double cond_limit = 1e10;

    OdeOptions ode;
    ode.rtol = opts.ode_rtol;
    ode.atol = opts.ode_atol;

    // One forward pass carrying x, Phi(t;0) and c(t) = int_0^t h_x Phi ds.
    Vector y0 = Vector::Zero(n + n * n + n);
    y0.head(n) = sol.gamma0;
    Eigen::Map<Matrix>(y0.data() + n, n, n) = Matrix::Identity(n, n);
    const Rhs rhs = kernel_rhs(sys, sol.control, n);
    Trajectory traj = integrate(rhs, y0, g, ode);

    const Matrix phi_T = Eigen::Map<const Matrix>(traj.back().data() + n, n, n);
    const RowVector cT = traj.back().tail(n).transpose();
    const Matrix A = phi_T - Matrix::Identity(n, n);
    // a_row = -c(T) (Phi_T - I)^{-1} Phi_T, the coefficient of Phi(T;t) in
    // the kernel; constant across nodes.
    const RowVector a_row =
        -(A.transpose().partialPivLu().solve(cT.transpose())).transpose() * phi_T;

    KernelSamples out;
    out.grid = g;
    out.values.reserve(g.size());

    for (int i = 0; i < g.size(); ++i) {
        const double t = g.nodes[i];
        const Vector ut = sol.control.eval(t);
        const Vector x = traj.states[i].head(n);
        const Matrix phi_t = Eigen::Map<const Matrix>(traj.states[i].data() + n, n, n);
        const RowVector ct = traj.states[i].tail(n).transpose();
        const Matrix B = sys.M(x) + sys.Df(ut);

        Eigen::JacobiSVD<Matrix> svd(phi_t);
        const double cond =
            svd.singularValues()(0) / svd.singularValues()(n - 1);

        RowVector w(n);
        if (std::isfinite(cond) && cond <= cond_limit) {
            // (a_row + c(T) - c(t)) Phi(t;0)^{-1}
            const RowVector r = a_row + cT - ct;
            w = phi_t.transpose().partialPivLu().solve(r.transpose()).transpose();
        } else {
            // Phi(t;0) not safely invertible: restart the transfer/quadrature
            // pass at t so Phi(T;t) and int_t^T h_x Phi(s;t) ds come out
            // directly.
            TimeGrid tail = TimeGrid::make_uniform(t, g.t1, std::max(2, g.size() - 1 - i));
            Vector y = Vector::Zero(n + n * n + n);
            y.head(n) = x;
            Eigen::Map<Matrix>(y.data() + n, n, n) = Matrix::Identity(n, n);
            Trajectory local = integrate(rhs, y, tail, ode);
            const Matrix phi_Tt = Eigen::Map<const Matrix>(local.back().data() + n, n, n);
            const RowVector c_tail = local.back().tail(n).transpose();
            w = -(A.transpose().partialPivLu().solve(cT.transpose())).transpose() * phi_Tt +
                c_tail;
        }
        out.values.push_back(sys.h_u(ut, x) + w * B);
    }
    return out;
}

PeriodicControl optimal_direction_sign(const KernelSamples& kernel) {
    const int k = kernel.grid.size() - 1;  // drop the duplicate endpoint
    const int m = static_cast<int>(kernel.values.front().size());
    Matrix samples(k, m);
    for (int i = 0; i < k; ++i)
        for (int j = 0; j < m; ++j)
            samples(i, j) = kernel.values[i](j) < 0.0 ? -1.0 : 1.0;
    return PeriodicControl(kernel.grid.span(), std::move(samples));
}

Vector optimal_constant_direction(const BilinearSystem& sys, const Vector& vbar,
                                  const Vector& equilibrium) {
    const Matrix H = sys.J(equilibrium, vbar);
    Eigen::FullPivLU<Matrix> lu(H);
    if (!lu.isInvertible()) throw SingularMatrix();
    const Matrix B = sys.M(equilibrium) + sys.Df(vbar);
    const RowVector w =
        sys.h_u(vbar, equilibrium) - sys.h_x(vbar, equilibrium) * lu.solve(B);
    return w.transpose();
}

PeriodicControl project_zero_mean(const PeriodicControl& du) { return du.zero_mean(); }

}  // namespace entrain
