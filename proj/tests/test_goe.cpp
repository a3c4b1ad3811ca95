#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "entrain/goe.hpp"
#include "entrain/models.hpp"
#include "entrain/quadrature.hpp"

using namespace entrain;

namespace {

/// Random zero-mean trigonometric polynomial: smooth, so quadratures on the
/// control grid stay spectrally accurate.
PeriodicControl random_trig(double T, int m, int harmonics, int k, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Matrix s = Matrix::Zero(k, m);
    for (int c = 0; c < m; ++c)
        for (int j = 1; j <= harmonics; ++j) {
            const double a = dist(rng), b = dist(rng);
            for (int i = 0; i < k; ++i) {
                const double ang = 2.0 * M_PI * j * i / k;
                s(i, c) += a * std::sin(ang) + b * std::cos(ang);
            }
        }
    return PeriodicControl(T, std::move(s), ControlInterp::Trigonometric);
}

double kernel_pairing(const KernelSamples& ker, const PeriodicControl& du) {
    const auto& g = ker.grid;
    return simpson([&](int i) { return ker.values[i].dot(du.eval(g.nodes[i])); },
                   g.size(), g.spacing()) /
           g.span();
}

}  // namespace

TEST_CASE("average output at a constant control is the equilibrium output") {
    BilinearSystem sys = build_rfm({2, 1e-3});
    PeriodicControl u = PeriodicControl::constant(1.0, Vector::Ones(3), 64);
    PeriodicSolution sol = solve_periodic(sys, u);
    CHECK(average_output(sys, sol) ==
          doctest::Approx(sys.h(Vector::Ones(3), sol.gamma0)).epsilon(1e-12));
}

TEST_CASE("zero perturbation has zero gain") {
    BilinearSystem sys = build_rfm({2, 1e-3});
    PeriodicControl u = PeriodicControl::constant(1.0, Vector::Ones(3), 64);
    PeriodicControl du = PeriodicControl::constant(1.0, Vector::Zero(3), 64);
    GoeReport r = goe_exact(sys, u, du);
    CHECK(std::abs(r.goe) < 2e-12);
    CHECK(std::abs(r.first_order_prediction) < 1e-12);
}

TEST_CASE("linear system: no gain of entrainment") {
    Matrix A(1, 1);
    A << -1.0;
    Vector b(1), c(1);
    b << 1.0;
    c << 1.0;
    BilinearSystem sys = build_example_linear(A, b, c);
    const double omega = 1.0, T = 2.0 * M_PI;
    PeriodicControl u = PeriodicControl::constant(T, Vector::Ones(1), 256).with_prefix_channel();
    PeriodicControl du = PeriodicControl::harmonic(T, Vector::Zero(1), Vector::Ones(1), omega)
                             .with_prefix_channel(0.0);
    GoeReport r = goe_exact(sys, u, du);
    CHECK(r.ybar_base == doctest::Approx(1.0).epsilon(1e-9));  // G(0) vbar
    CHECK(std::abs(r.goe) < 1e-8);
}

TEST_CASE("pavlov: the textbook positive gain") {
    BilinearSystem sys = build_example_pavlov();
    const double a = 0.5, omega = 1.0, T = 2.0 * M_PI;
    PeriodicControl u = PeriodicControl::constant(T, Vector::Zero(1), 256).with_prefix_channel();
    PeriodicControl du =
        PeriodicControl::harmonic(T, Vector::Zero(1), Vector::Constant(1, a), omega)
            .with_prefix_channel(0.0);
    GoeReport r = goe_exact(sys, u, du);
    CHECK(r.goe == doctest::Approx(a * a / (2.0 * (1.0 + omega * omega))).epsilon(1e-6));
    CHECK(std::abs(r.first_order_prediction) < 1e-8);  // zero-mean du at rest
}

TEST_CASE("first-order term vanishes for zero-mean perturbations at constant base") {
    BilinearSystem sys = build_rfm({2, 1e-3});
    const double T = 2.0;
    PeriodicControl u = PeriodicControl::constant(T, Vector::Ones(3), 256);
    PeriodicSolution sol = solve_periodic(sys, u);
    std::mt19937_64 rng(11);
    for (int trial = 0; trial < 3; ++trial) {
        PeriodicControl du = project_zero_mean(random_trig(T, 3, 3, 256, rng));
        CHECK(std::abs(goe_first_order(sys, sol, du)) < 1e-8);
    }
}

TEST_CASE("kernel pairing reproduces the first-order functional") {
    BilinearSystem sys = build_rfm({2, 1e-3});
    const double T = 1.5;
    PeriodicControl u =
        PeriodicControl::harmonic(T, Vector::Ones(3), Vector::Constant(3, 0.25), 2.0 * M_PI / T);
    PeriodicSolution sol = solve_periodic(sys, u);
    KernelSamples ker = goe_kernel(sys, sol);
    CHECK(ker.finite());
    std::mt19937_64 rng(23);
    for (int trial = 0; trial < 4; ++trial) {
        PeriodicControl du = random_trig(T, 3, 4, 256, rng);
        CHECK(std::abs(kernel_pairing(ker, du) - goe_first_order(sys, sol, du)) < 1e-7);
    }
}

TEST_CASE("state-independent linear output collapses the kernel to h_u") {
    BilinearSystem sys = build_rfm({2, 1e-3});
    sys.h = [](const Vector& u, const Vector&) { return u(0); };
    sys.h_u = [](const Vector&, const Vector&) {
        RowVector r = RowVector::Zero(3);
        r(0) = 1.0;
        return r;
    };
    sys.h_x = [](const Vector&, const Vector&) { return RowVector::Zero(2); };
    PeriodicControl u = PeriodicControl::constant(1.0, Vector::Ones(3), 64);
    PeriodicSolution sol = solve_periodic(sys, u);
    KernelSamples ker = goe_kernel(sys, sol);
    for (const auto& row : ker.values) {
        CHECK(row(0) == doctest::Approx(1.0).epsilon(1e-10));
        CHECK(std::abs(row(1)) < 1e-10);
        CHECK(std::abs(row(2)) < 1e-10);
    }
}

TEST_CASE("sign direction: all-ones for a positive kernel, scale invariant, near-optimal") {
    BilinearSystem sys = build_rfm({2, 1e-3});
    const double T = 1.0;
    PeriodicControl u =
        PeriodicControl::harmonic(T, Vector::Ones(3), Vector::Constant(3, 0.2), 2.0 * M_PI);
    PeriodicSolution sol = solve_periodic(sys, u);
    KernelSamples ker = goe_kernel(sys, sol);

    KernelSamples positive = ker;
    for (auto& row : positive.values) row = row.cwiseAbs().array() + 0.1;
    PeriodicControl ones_dir = optimal_direction_sign(positive);
    CHECK((ones_dir.samples().array() == 1.0).all());

    KernelSamples scaled = ker;
    for (auto& row : scaled.values) row *= 7.5;
    CHECK(optimal_direction_sign(ker).samples() == optimal_direction_sign(scaled).samples());

    PeriodicControl best = optimal_direction_sign(ker);
    const double best_gain = goe_first_order(sys, sol, best);
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (int trial = 0; trial < 20; ++trial) {
        Matrix s(best.grid_size(), 3);
        for (int i = 0; i < s.rows(); ++i)
            for (int j = 0; j < 3; ++j) s(i, j) = dist(rng);
        s /= s.cwiseAbs().maxCoeff();  // unit sup norm
        CHECK(goe_first_order(sys, sol, PeriodicControl(T, s)) <= best_gain + 1e-9);
    }
}

TEST_CASE("constant optimal direction matches the steady-state sensitivity") {
    BilinearSystem sys = build_rfm({2, 1e-3});
    Vector vbar = Vector::Ones(3);
    SolverOptions opts;
    PeriodicSolution sol = solve_periodic(sys, PeriodicControl::constant(1.0, vbar, 64), opts);
    Vector dir = optimal_constant_direction(sys, vbar, sol.gamma0);

    // Oracle: central differences of vbar -> h(vbar, e(vbar)) through the
    // periodic solver.
    auto steady_output = [&](const Vector& v) {
        PeriodicSolution s = solve_periodic(sys, PeriodicControl::constant(1.0, v, 64), opts);
        return sys.h(v, s.gamma0);
    };
    const double eps = 1e-5;
    for (int j = 0; j < 3; ++j) {
        Vector vp = vbar, vm = vbar;
        vp(j) += eps;
        vm(j) -= eps;
        const double fd = (steady_output(vp) - steady_output(vm)) / (2 * eps);
        CHECK(dir(j) == doctest::Approx(fd).epsilon(1e-5));
    }
}
