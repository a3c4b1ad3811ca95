#include "entrain/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace entrain {

TimeGrid TimeGrid::make_uniform(double t0, double t1, int segments) {
    if (segments < 1 || !(t1 > t0)) throw std::invalid_argument("bad uniform grid");
    TimeGrid g;
    g.t0 = t0;
    g.t1 = t1;
    g.uniform = true;
    g.nodes.resize(segments + 1);
    const double h = (t1 - t0) / segments;
    for (int i = 0; i <= segments; ++i) g.nodes[i] = t0 + i * h;
    g.nodes.back() = t1;
    return g;
}

void TimeGrid::validate() const {
    if (nodes.size() < 2) throw std::invalid_argument("grid needs at least two nodes");
    if (nodes.front() != t0 || nodes.back() != t1)
        throw std::invalid_argument("grid endpoints do not match t0/t1");
    for (std::size_t i = 1; i < nodes.size(); ++i)
        if (!(nodes[i] > nodes[i - 1]))
            throw std::invalid_argument("grid nodes must be strictly increasing");
}

bool Trajectory::finite() const {
    for (const auto& s : states)
        if (!s.allFinite()) return false;
    return true;
}

namespace {

// Dormand-Prince 5(4) tableau.
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                 a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                 a64 = 49.0 / 176, a65 = -5103.0 / 18656;
constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                 a75 = -2187.0 / 6784, a76 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                 e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
// Dense-output coefficients (Hairer, Norsett, Wanner).
constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                 d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                 d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

struct DenseStep {
    double t, h;
    Vector r1, r2, r3, r4, r5;

    Vector eval(double ti) const {
        const double th = (ti - t) / h;
        const double th1 = 1.0 - th;
        return r1 + th * (r2 + th1 * (r3 + th * (r4 + th1 * r5)));
    }
};

class Dopri5 {
  public:
    Dopri5(const Rhs& rhs, const OdeOptions& opts, int dim)
        : rhs_(rhs), opts_(opts),
          k1_(dim), k2_(dim), k3_(dim), k4_(dim), k5_(dim), k6_(dim), k7_(dim),
          ytmp_(dim) {}

    double initial_step(double t, const Vector& y, double dir, double span) {
        rhs_(t, y, k1_);
        const double d0 = y.norm();
        const double d1n = k1_.norm();
        double h = (d1n > 1e-10) ? 0.01 * (d0 + 1.0) / d1n : 1e-6 * span;
        return std::min(h, 0.1 * span) * dir;
    }

    // Attempts steps from (t, y) until one is accepted; on return y holds the
    // new state, k1_ the derivative there, and dense describes the step.
    void step(double& t, Vector& y, double& h, double t_end, DenseStep& dense) {
        const double span = std::abs(t_end);
        const double hmin = 1e-14 * std::max(span, std::abs(t) + 1.0);
        for (;;) {
            if (std::abs(h) < hmin) throw StepSizeUnderflow();
            if (t + h > t_end) h = t_end - t;

            ytmp_ = y + h * a21 * k1_;
            rhs_(t + c2 * h, ytmp_, k2_);
            ytmp_ = y + h * (a31 * k1_ + a32 * k2_);
            rhs_(t + c3 * h, ytmp_, k3_);
            ytmp_ = y + h * (a41 * k1_ + a42 * k2_ + a43 * k3_);
            rhs_(t + c4 * h, ytmp_, k4_);
            ytmp_ = y + h * (a51 * k1_ + a52 * k2_ + a53 * k3_ + a54 * k4_);
            rhs_(t + c5 * h, ytmp_, k5_);
            ytmp_ = y + h * (a61 * k1_ + a62 * k2_ + a63 * k3_ + a64 * k4_ + a65 * k5_);
            rhs_(t + h, ytmp_, k6_);
            Vector ynew = y + h * (a71 * k1_ + a73 * k3_ + a74 * k4_ + a75 * k5_ + a76 * k6_);
            rhs_(t + h, ynew, k7_);

            Vector err = h * (e1 * k1_ + e3 * k3_ + e4 * k4_ + e5 * k5_ + e6 * k6_ + e7 * k7_);
            double norm = 0.0;
            for (int i = 0; i < y.size(); ++i) {
                const double sk =
                    opts_.atol + opts_.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
                const double r = err[i] / sk;
                norm += r * r;
            }
            norm = std::sqrt(norm / y.size());

            if (!std::isfinite(norm) || !ynew.allFinite()) {
                if (!ynew.allFinite() && std::abs(h) <= 4 * hmin) throw NonFiniteState();
                h *= 0.25;
                continue;
            }

            double fac = 0.9 * std::pow(std::max(norm, 1e-16), -0.2);
            fac = std::clamp(fac, 0.2, 10.0);

            if (norm <= 1.0) {
                dense.t = t;
                dense.h = h;
                dense.r1 = y;
                dense.r2 = ynew - y;
                dense.r3 = h * k1_ - dense.r2;
                dense.r4 = dense.r2 - h * k7_ - dense.r3;
                dense.r5 = h * (d1 * k1_ + d3 * k3_ + d4 * k4_ + d5 * k5_ + d6 * k6_ + d7 * k7_);
                t += h;
                y = ynew;
                k1_ = k7_;
                if (opts_.in_domain && !opts_.in_domain(y)) throw StateLeftDomain();
                h *= fac;
                return;
            }
            h *= fac;
        }
    }

  private:
    const Rhs& rhs_;
    const OdeOptions& opts_;
    Vector k1_, k2_, k3_, k4_, k5_, k6_, k7_, ytmp_;
};

}  // namespace

Trajectory integrate(const Rhs& rhs, const Vector& x0, const TimeGrid& grid,
                     const OdeOptions& opts) {
    grid.validate();
    if (!x0.allFinite()) throw NonFiniteState();

    Trajectory traj;
    traj.grid = grid;
    traj.states.reserve(grid.size());
    traj.states.push_back(x0);

    Dopri5 stepper(rhs, opts, static_cast<int>(x0.size()));
    double t = grid.t0;
    Vector y = x0;
    double h = stepper.initial_step(t, y, 1.0, grid.span());

    DenseStep dense;
    std::size_t next = 1;
    const double t_end = grid.t1;
    while (next < grid.nodes.size()) {
        stepper.step(t, y, h, t_end, dense);
        while (next < grid.nodes.size() && grid.nodes[next] <= t + 1e-14 * grid.span()) {
            if (next + 1 == grid.nodes.size() && std::abs(t - t_end) < 1e-13 * grid.span())
                traj.states.push_back(y);
            else
                traj.states.push_back(dense.eval(grid.nodes[next]));
            ++next;
        }
    }
    if (!traj.finite()) throw NonFiniteState();
    return traj;
}

namespace {

Vector rk4_step(const Rhs& rhs, double t, const Vector& y, double h) {
    Vector k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size());
    rhs(t, y, k1);
    rhs(t + h / 2, y + (h / 2) * k1, k2);
    rhs(t + h / 2, y + (h / 2) * k2, k3);
    rhs(t + h, y + h * k3, k4);
    return y + (h / 6) * (k1 + 2 * k2 + 2 * k3 + k4);
}

Vector dp5_step(const Rhs& rhs, double t, const Vector& y, double h) {
    Vector k1(y.size()), k2(y.size()), k3(y.size()), k4(y.size()), k5(y.size()), k6(y.size());
    rhs(t, y, k1);
    rhs(t + c2 * h, y + h * a21 * k1, k2);
    rhs(t + c3 * h, y + h * (a31 * k1 + a32 * k2), k3);
    rhs(t + c4 * h, y + h * (a41 * k1 + a42 * k2 + a43 * k3), k4);
    rhs(t + c5 * h, y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4), k5);
    rhs(t + h, y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5), k6);
    return y + h * (a71 * k1 + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
}

}  // namespace

Trajectory integrate_fixed(const Rhs& rhs, const Vector& x0, double t0, double t1,
                           int steps, FixedMethod method) {
    Trajectory traj;
    traj.grid = TimeGrid::make_uniform(t0, t1, steps);
    traj.states.reserve(steps + 1);
    traj.states.push_back(x0);
    const double h = (t1 - t0) / steps;
    Vector y = x0;
    for (int i = 0; i < steps; ++i) {
        const double t = t0 + i * h;
        y = (method == FixedMethod::RK4) ? rk4_step(rhs, t, y, h) : dp5_step(rhs, t, y, h);
        traj.states.push_back(y);
    }
    if (!traj.finite()) throw NonFiniteState();
    return traj;
}

std::vector<Matrix> integrate_with_transfer(const std::function<Matrix(double)>& jac,
                                            int n, const TimeGrid& grid,
                                            const OdeOptions& opts) {
    Rhs rhs = [&](double t, const Vector& y, Vector& dydt) {
        const Matrix phi = Eigen::Map<const Matrix>(y.data(), n, n);
        const Matrix dphi = jac(t) * phi;
        dydt = Eigen::Map<const Vector>(dphi.data(), n * n);
    };
    Vector phi0 = Eigen::Map<const Vector>(Matrix::Identity(n, n).eval().data(), n * n);
    Trajectory traj = integrate(rhs, phi0, grid, opts);
    std::vector<Matrix> out;
    out.reserve(traj.states.size());
    for (const auto& s : traj.states) out.push_back(Eigen::Map<const Matrix>(s.data(), n, n));
    return out;
}

}  // namespace entrain
