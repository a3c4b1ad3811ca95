#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <limits>

#include "entrain/models.hpp"
#include "entrain/system.hpp"

using namespace entrain;

namespace {

// dx/dt = b*u0 + M(x)(u0,u1) with M(x) = [[x0, -x1],[0, x0]].
BilinearSystem toy() {
    BilinearSystem s;
    s.n = 2;
    s.m = 2;
    s.f = [](const Vector& u) {
        Vector v(2);
        v << u(0), 0.0;
        return v;
    };
    s.Df = [](const Vector&) {
        Matrix D(2, 2);
        D << 1.0, 0.0, 0.0, 0.0;
        return D;
    };
    s.M = [](const Vector& x) {
        Matrix M(2, 2);
        M << x(0), -x(1), 0.0, x(0);
        return M;
    };
    s.J = [](const Vector&, const Vector& u) {
        Matrix J(2, 2);
        J << u(0), -u(1), u(1), 0.0;
        return J;
    };
    s.h = [](const Vector&, const Vector& x) { return x(0); };
    s.h_u = [](const Vector&, const Vector&) { return RowVector::Zero(2); };
    s.h_x = [](const Vector&, const Vector&) {
        RowVector r(2);
        r << 1.0, 0.0;
        return r;
    };
    s.lower = Vector::Constant(2, -1.0);
    s.upper = Vector::Constant(2, 1.0);
    s.default_guess = Vector::Zero(2);
    return s;
}

Matrix fd_jacobian(const BilinearSystem& s, const Vector& x, const Vector& u) {
    const double eps = 1e-7;
    Matrix J(s.n, s.n);
    for (int j = 0; j < s.n; ++j) {
        Vector xp = x, xm = x;
        xp(j) += eps;
        xm(j) -= eps;
        J.col(j) = (s.rhs(u, xp) - s.rhs(u, xm)) / (2 * eps);
    }
    return J;
}

}  // namespace

TEST_CASE("rhs composes drift and bilinear parts") {
    BilinearSystem s = toy();
    Vector x(2), u(2);
    x << 2.0, 3.0;
    u << 0.5, -0.25;
    Vector expected(2);
    expected << 0.5 + 2.0 * 0.5 - 3.0 * -0.25, 2.0 * -0.25;
    CHECK((s.rhs(u, x) - expected).norm() < 1e-14);
}

TEST_CASE("J matches a finite-difference jacobian of M(x)u") {
    BilinearSystem s = toy();
    Vector x(2), u(2);
    x << 0.3, -0.8;
    u << 0.6, 0.9;
    CHECK((s.J(x, u) - fd_jacobian(s, x, u)).norm() < 1e-6);
}

TEST_CASE("admissibility: strict interior passes, boundary and outside fail") {
    BilinearSystem s = toy();
    CHECK_NOTHROW(s.check_admissible(PeriodicControl::constant(1.0, Vector::Zero(2), 8)));
    Vector edge(2);
    edge << 1.0, 0.0;  // on the boundary: not strictly interior
    CHECK_THROWS_AS(s.check_admissible(PeriodicControl::constant(1.0, edge, 8)),
                    const InadmissibleControl&);
    Vector outside(2);
    outside << 2.0, 0.0;
    CHECK_THROWS_AS(s.check_admissible(PeriodicControl::constant(1.0, outside, 8)),
                    const InadmissibleControl&);
}

TEST_CASE("drift augmentation reproduces g(x) + f(u) + M(x)u") {
    BilinearSystem base = toy();
    auto g = [](const Vector& x) {
        Vector v(2);
        v << -x(0) + x(1) * x(1), -2.0 * x(1);
        return v;
    };
    auto Dg = [](const Vector& x) {
        Matrix D(2, 2);
        D << -1.0, 2.0 * x(1), 0.0, -2.0;
        return D;
    };
    BilinearSystem aug = augment_drift(g, Dg, base);
    CHECK(aug.m == 3);

    Vector x(2), u(2), uhat(3);
    x << 0.4, -0.6;
    u << 0.2, 0.1;
    uhat << 1.0, 0.2, 0.1;
    CHECK((aug.rhs(uhat, x) - (g(x) + base.rhs(u, x))).norm() < 1e-14);

    // Channel 0 pinned to 1: its bounds collapse and admissibility demands it.
    CHECK(aug.lower(0) == 1.0);
    CHECK(aug.upper(0) == 1.0);
    Vector bad(3);
    bad << 0.9, 0.0, 0.0;
    CHECK_THROWS_AS(aug.check_admissible(PeriodicControl::constant(1.0, bad, 8)),
                    const InadmissibleControl&);
    CHECK_NOTHROW(aug.check_admissible(PeriodicControl::constant(1.0, uhat, 8)));

    // Jacobian picks up u0 * Dg.
    CHECK((aug.J(x, uhat) - (Dg(x) + base.J(x, u))).norm() < 1e-14);

    // Output plumbing drops the pinned channel from h_u's perspective.
    CHECK(aug.h(uhat, x) == base.h(u, x));
    CHECK(aug.h_u(uhat, x).size() == 3);
}

TEST_CASE("pinned channels accept exact values only") {
    MasterSystem ms = build_master(MasterChainSpec::complete(2));
    // Channels (0,0) and (1,1) are pinned to zero.
    Vector ok(4);
    ok << 0.0, 1.0, 1.0, 0.0;
    CHECK_NOTHROW(ms.sys.check_admissible(PeriodicControl::constant(1.0, ok, 8)));
    Vector bad = ok;
    bad(0) = 1e-9;
    CHECK_THROWS_AS(ms.sys.check_admissible(PeriodicControl::constant(1.0, bad, 8)),
                    const InadmissibleControl&);
}
