#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "entrain/goe.hpp"
#include "entrain/models.hpp"
#include "entrain/ode.hpp"

using namespace entrain;

TEST_CASE("rfm n=2: the banded flow matrix") {
    BilinearSystem sys = build_rfm({2, 1e-3});
    Vector x(2);
    x << 0.3, 0.8;
    Matrix M = sys.M(x);
    CHECK(M(0, 0) == doctest::Approx(1.0 - 0.3));
    CHECK(M(0, 1) == doctest::Approx(-0.3 * (1.0 - 0.8)));
    CHECK(M(0, 2) == 0.0);
    CHECK(M(1, 0) == 0.0);
    CHECK(M(1, 1) == doctest::Approx(0.3 * (1.0 - 0.8)));
    CHECK(M(1, 2) == doctest::Approx(-0.8));
}

TEST_CASE("rfm steady states at unit rates") {
    SUBCASE("one site") {
        BilinearSystem sys = build_rfm({1, 1e-3});
        PeriodicControl u = PeriodicControl::constant(1.0, Vector::Ones(2), 32);
        PeriodicSolution sol = solve_periodic(sys, u);
        CHECK(sol.gamma0(0) == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(sys.h(Vector::Ones(2), sol.gamma0) == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("two sites") {
        BilinearSystem sys = build_rfm({2, 1e-3});
        PeriodicControl u = PeriodicControl::constant(1.0, Vector::Ones(3), 32);
        PeriodicSolution sol = solve_periodic(sys, u);
        CHECK(sol.gamma0(0) == doctest::Approx((std::sqrt(5.0) - 1.0) / 2.0).epsilon(1e-10));
        CHECK(sol.gamma0(1) == doctest::Approx((3.0 - std::sqrt(5.0)) / 2.0).epsilon(1e-10));
    }
}

TEST_CASE("rfm invariance: trajectories stay in the unit box") {
    BilinearSystem sys = build_rfm({3, 1e-3});
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> dist(0.05, 0.95);
    std::uniform_real_distribution<double> rate(0.5, 2.0);
    for (int trial = 0; trial < 20; ++trial) {
        Vector x0(3), off(4), amp(4);
        for (int i = 0; i < 3; ++i) x0(i) = dist(rng);
        for (int i = 0; i < 4; ++i) {
            off(i) = rate(rng);
            amp(i) = 0.4 * off(i) * (2.0 * dist(rng) - 1.0);
        }
        PeriodicControl u = PeriodicControl::harmonic(1.0, off, amp, 2.0 * M_PI);
        Rhs rhs = [&](double t, const Vector& x, Vector& dx) { dx = sys.rhs_at(u, t, x); };
        Trajectory traj = integrate(rhs, x0, TimeGrid::make_uniform(0.0, 3.0, 300));
        for (const auto& x : traj.states) {
            CHECK((x.array() >= -1e-9).all());
            CHECK((x.array() <= 1.0 + 1e-9).all());
        }
    }
}

TEST_CASE("master n=2: reduced dynamics match the full chain") {
    MasterSystem ms = build_master(MasterChainSpec::complete(2));
    Vector u(4);
    u << 0.0, 1.3, 0.4, 0.0;
    Vector z(2);
    z << 0.7, 0.3;
    // Full chain: z1' = -u01 z1 + u10 z2.
    Matrix A = ms.transition_matrix(u);
    CHECK(A(0, 0) == doctest::Approx(-1.3));
    CHECK(A(0, 1) == doctest::Approx(0.4));
    CHECK(A(1, 0) == doctest::Approx(1.3));
    CHECK(A(1, 1) == doctest::Approx(-0.4));

    Vector xi = ms.to_reduced(z);
    Vector xi_dot = ms.sys.rhs(u, xi);
    // Push back to full coordinates and compare with A z.
    Vector z_dot = ms.basis * xi_dot;
    CHECK((z_dot - A * z).norm() < 1e-12);
    CHECK((ms.to_probability(xi) - z).norm() < 1e-12);
}

TEST_CASE("master stationary distributions at constant rates") {
    MasterSystem ms = build_master(MasterChainSpec::complete(2));
    SUBCASE("symmetric rates") {
        Vector u(4);
        u << 0.0, 1.0, 1.0, 0.0;
        PeriodicSolution sol = solve_periodic(ms.sys, PeriodicControl::constant(1.0, u, 32));
        Vector z = ms.to_probability(sol.gamma0);
        CHECK(z(0) == doctest::Approx(0.5).epsilon(1e-10));
        CHECK(z(1) == doctest::Approx(0.5).epsilon(1e-10));
    }
    SUBCASE("asymmetric rates") {
        Vector u(4);
        u << 0.0, 2.0, 1.0, 0.0;  // balance: 2 z1 = z2
        PeriodicSolution sol = solve_periodic(ms.sys, PeriodicControl::constant(1.0, u, 32));
        Vector z = ms.to_probability(sol.gamma0);
        CHECK(z(0) == doctest::Approx(1.0 / 3.0).epsilon(1e-10));
        CHECK(z(1) == doctest::Approx(2.0 / 3.0).epsilon(1e-10));
    }
}

TEST_CASE("master: disconnected transition graphs are rejected") {
    MasterChainSpec spec;
    spec.n = 3;
    spec.transitions = {{0, 1}, {1, 0}};  // configuration 2 unreachable
    CHECK_THROWS_AS(build_master(spec), const NotIrreducible&);
}

TEST_CASE("master: simplex is conserved in full coordinates") {
    MasterSystem ms = build_master(MasterChainSpec::complete(3));
    Vector off = Vector::Zero(9), amp = Vector::Zero(9);
    for (const auto& [i, j] : MasterChainSpec::complete(3).transitions) {
        off(ms.channel(i, j)) = 1.0 + 0.1 * (i + j);
        amp(ms.channel(i, j)) = 0.3;
    }
    PeriodicControl u = PeriodicControl::harmonic(1.0, off, amp, 2.0 * M_PI);
    Vector z0(3);
    z0 << 0.2, 0.5, 0.3;
    Rhs rhs = [&](double t, const Vector& z, Vector& dz) {
        dz = ms.transition_matrix(u.eval(t)) * z;
    };
    Trajectory traj = integrate(rhs, z0, TimeGrid::make_uniform(0.0, 5.0, 200));
    for (const auto& z : traj.states) {
        CHECK(std::abs(z.sum() - 1.0) < 1e-10);
        CHECK((z.array() >= -1e-10).all());
    }
}

TEST_CASE("linear example demands a Hurwitz matrix") {
    Matrix A(1, 1);
    A << 1.0;
    CHECK_THROWS_AS(build_example_linear(A, Vector::Ones(1), Vector::Ones(1)),
                    const NotHurwitz&);
}

TEST_CASE("linear example: sinusoid gain follows the transfer function") {
    Matrix A(1, 1);
    A << -1.0;
    BilinearSystem sys = build_example_linear(A, Vector::Ones(1), Vector::Ones(1));
    const double omega = 2.0, T = 2.0 * M_PI / omega;
    PeriodicControl u =
        PeriodicControl::harmonic(T, Vector::Ones(1), Vector::Ones(1), omega).with_prefix_channel();
    PeriodicSolution sol = solve_periodic(sys, u);
    double amp = 0.0;
    for (int i = 0; i < sol.trajectory.grid.size(); ++i)
        amp = std::max(amp, std::abs(sol.trajectory.states[i](0) - 1.0));
    CHECK(amp == doctest::Approx(1.0 / std::sqrt(1.0 + omega * omega)).epsilon(1e-4));
}

TEST_CASE("pavlov: the closed-form periodic output") {
    BilinearSystem sys = build_example_pavlov();
    const double a = 0.5, omega = 1.0, T = 2.0 * M_PI / omega;
    PeriodicControl u =
        PeriodicControl::harmonic(T, Vector::Zero(1), Vector::Constant(1, a), omega)
            .with_prefix_channel();
    PeriodicSolution sol = solve_periodic(sys, u);
    const double denom = 2.0 * (4.0 * std::pow(omega, 4) + 5.0 * omega * omega + 1.0);
    for (int j = 0; j < 32; ++j) {
        const double t = T * j / 32.0;
        const double phase = 2.0 * omega * t - 2.0 * std::atan(omega);
        const double expect = (4.0 * a * a * omega * omega + a * a -
                               2.0 * a * a * omega * std::sin(phase) -
                               a * a * std::cos(phase)) /
                              denom;
        // Interpolate the stored grid; it contains j * k/32 exactly for k=256.
        const int idx = j * (sol.trajectory.grid.size() - 1) / 32;
        CHECK(std::abs(sol.trajectory.states[idx](0) - expect) < 1e-6);
    }
}

TEST_CASE("scalar example: explicit exponential solution and zero entrained orbit") {
    BilinearSystem sys = build_example_scalar();
    PeriodicControl u =
        PeriodicControl::harmonic(2.0 * M_PI, Vector::Ones(1), Vector::Constant(1, 0.5), 1.0);
    Rhs rhs = [&](double t, const Vector& x, Vector& dx) { dx = sys.rhs_at(u, t, x); };
    Trajectory traj = integrate(rhs, Vector::Constant(1, 2.0),
                                TimeGrid::make_uniform(0.0, 4.0, 64));
    for (int i = 0; i < traj.grid.size(); ++i) {
        const double t = traj.grid.nodes[i];
        const double w = t - 0.5 * std::cos(t) + 0.5;  // integral of 1 + 0.5 sin
        CHECK(traj.states[i](0) == doctest::Approx(2.0 * std::exp(-w)).epsilon(1e-9));
    }
    PeriodicSolution sol = solve_periodic(sys, u, Vector::Constant(1, 1.0));
    CHECK(std::abs(sol.gamma0(0)) < 1e-11);
}
