#include "entrain/periodic.hpp"

#include <cmath>
#include <limits>

namespace entrain {

std::pair<Trajectory, std::vector<Matrix>> integrate_with_monodromy(
    const BilinearSystem& sys, const PeriodicControl& u, const Vector& x0,
    const SolverOptions& opts) {
    const int n = sys.n;
    const int nn = n * n;

    Rhs rhs = [&](double t, const Vector& y, Vector& dydt) {
        const Vector uc = u.eval(t);
        const Vector x = y.head(n);
        const Matrix phi = Eigen::Map<const Matrix>(y.data() + n, n, n);
        dydt.resize(n + nn);
        dydt.head(n) = sys.f(uc) + sys.M(x) * uc;
        Matrix dphi = sys.J(x, uc) * phi;
        dydt.tail(nn) = Eigen::Map<const Vector>(dphi.data(), nn);
    };

    Vector y0(n + nn);
    y0.head(n) = x0;
    y0.tail(nn) = Eigen::Map<const Vector>(Matrix::Identity(n, n).eval().data(), nn);

    OdeOptions oopt;
    oopt.rtol = opts.ode_rtol;
    oopt.atol = opts.ode_atol;
    if (sys.in_domain)
        oopt.in_domain = [&sys, n](const Vector& y) { return sys.in_domain(y.head(n)); };

    TimeGrid grid = TimeGrid::make_uniform(0.0, u.period(), opts.grid_k);
    Trajectory joint = integrate(rhs, y0, grid, oopt);

    Trajectory traj;
    traj.grid = grid;
    std::vector<Matrix> phis;
    traj.states.reserve(joint.states.size());
    phis.reserve(joint.states.size());
    for (const auto& s : joint.states) {
        traj.states.push_back(s.head(n));
        phis.push_back(Eigen::Map<const Matrix>(s.data() + n, n, n));
    }
    return {std::move(traj), std::move(phis)};
}

MonodromyResult analyze_monodromy(const Matrix& phi_T, double nondegeneracy_tol) {
    MonodromyResult r;
    r.phi_T = phi_T;
    Eigen::EigenSolver<Matrix> es(phi_T);
    r.eigenvalues = es.eigenvalues();
    r.min_distance_to_one = (r.eigenvalues.array() - std::complex<double>(1.0, 0.0))
                                .abs()
                                .minCoeff();
    r.spectral_radius = r.eigenvalues.array().abs().maxCoeff();
    r.nondegenerate = r.min_distance_to_one > nondegeneracy_tol;
    return r;
}

std::pair<Vector, MonodromyResult> poincare(const BilinearSystem& sys,
                                            const PeriodicControl& u, const Vector& x0,
                                            const SolverOptions& opts) {
    auto [traj, phis] = integrate_with_monodromy(sys, u, x0, opts);
    MonodromyResult mono = analyze_monodromy(phis.back(), opts.nondegeneracy_tol);
    return {traj.back() - x0, mono};
}

namespace {

double cond_estimate(const Matrix& a) {
    Eigen::JacobiSVD<Matrix> svd(a);
    const double smin = svd.singularValues().minCoeff();
    if (smin == 0.0) return std::numeric_limits<double>::infinity();
    return svd.singularValues().maxCoeff() / smin;
}

}  // namespace

PeriodicSolution solve_periodic(const BilinearSystem& sys, const PeriodicControl& u,
                                const Vector& x_init, const SolverOptions& opts) {
    sys.check_admissible(u);
    const int n = sys.n;
    Vector x = x_init;

    Trajectory traj;
    std::vector<Matrix> phis;
    Vector p(n);
    double pnorm = std::numeric_limits<double>::infinity();

    auto evaluate = [&](const Vector& x0) {
        auto [t, ph] = integrate_with_monodromy(sys, u, x0, opts);
        Vector resid = t.back() - x0;
        return std::make_tuple(std::move(t), std::move(ph), std::move(resid));
    };

    std::tie(traj, phis, p) = evaluate(x);
    pnorm = p.norm();

    int iter = 0;
    for (; iter < opts.max_iter && pnorm > opts.newton_tol; ++iter) {
        const Matrix shifted = phis.back() - Matrix::Identity(n, n);
        if (cond_estimate(shifted) > opts.cond_threshold) throw SingularMonodromy();

        Vector step = shifted.partialPivLu().solve(-p);
        Vector cand = x + step;
        bool picard = false;
        if (!sys.state_ok(cand)) {
            // Under entrainment the period map itself is a contraction.
            cand = traj.back();
            picard = true;
        }

        auto [tc, phc, pc] = evaluate(cand);
        double cnorm = pc.norm();
        if (!picard && cnorm > pnorm) {
            // Damped retry.
            for (int d = 0; d < 4 && cnorm > pnorm; ++d) {
                step *= 0.5;
                cand = x + step;
                if (!sys.state_ok(cand)) break;
                std::tie(tc, phc, pc) = evaluate(cand);
                cnorm = pc.norm();
            }
        }
        x = cand;
        traj = std::move(tc);
        phis = std::move(phc);
        p = std::move(pc);
        pnorm = cnorm;
    }
    if (pnorm > opts.newton_tol) throw NoConvergence(opts.max_iter);

    PeriodicSolution sol{u, x, std::move(traj), std::move(phis), {}, pnorm};
    sol.monodromy = analyze_monodromy(sol.phi.back(), opts.nondegeneracy_tol);
    return sol;
}

PeriodicSolution solve_periodic(const BilinearSystem& sys, const PeriodicControl& u,
                                const SolverOptions& opts) {
    Vector guess = sys.default_guess.size() ? sys.default_guess : Vector::Zero(sys.n);
    return solve_periodic(sys, u, guess, opts);
}

C3Report check_c3(const PeriodicSolution& sol, double tol) {
    C3Report r;
    r.min_distance_to_one = sol.monodromy.min_distance_to_one;
    r.spectral_radius = sol.monodromy.spectral_radius;
    r.nondegenerate = r.min_distance_to_one > tol;
    return r;
}

}  // namespace entrain
