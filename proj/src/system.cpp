#include "entrain/system.hpp"

#include <cmath>
#include <limits>

namespace entrain {

void BilinearSystem::check_admissible(const PeriodicControl& u) const {
    if (u.channels() != m)
        throw InadmissibleControl("control has " + std::to_string(u.channels()) +
                                  " channels, system expects " + std::to_string(m));
    const Matrix& s = u.samples();
    for (int j = 0; j < m; ++j) {
        const double lo = lower.size() ? lower[j] : -std::numeric_limits<double>::infinity();
        const double hi = upper.size() ? upper[j] : std::numeric_limits<double>::infinity();
        for (int i = 0; i < s.rows(); ++i) {
            const double v = s(i, j);
            if (lo == hi) {
                if (v != lo)
                    throw InadmissibleControl("pinned channel " + std::to_string(j) +
                                              " must equal " + std::to_string(lo));
            } else if (!(v > lo && v < hi)) {
                throw InadmissibleControl("control channel " + std::to_string(j) +
                                          " leaves the admissible box");
            }
        }
    }
}

BilinearSystem augment_drift(const std::function<Vector(const Vector&)>& g,
                             const std::function<Matrix(const Vector&)>& Dg,
                             const BilinearSystem& sys) {
    BilinearSystem out;
    out.n = sys.n;
    out.m = sys.m + 1;
    out.name = sys.name.empty() ? "augmented" : sys.name + "+drift";

    auto tail = [m = sys.m](const Vector& uhat) -> Vector { return uhat.tail(m); };

    out.f = [f = sys.f, tail](const Vector& uhat) { return f(tail(uhat)); };
    out.Df = [Df = sys.Df, tail, n = sys.n](const Vector& uhat) {
        Matrix d(n, uhat.size());
        d.col(0).setZero();
        d.rightCols(uhat.size() - 1) = Df(tail(uhat));
        return d;
    };
    out.M = [M = sys.M, g, n = sys.n](const Vector& x) {
        Matrix base = M(x);
        Matrix mm(n, base.cols() + 1);
        mm.col(0) = g(x);
        mm.rightCols(base.cols()) = base;
        return mm;
    };
    out.J = [J = sys.J, Dg, tail](const Vector& x, const Vector& uhat) -> Matrix {
        return uhat[0] * Dg(x) + J(x, tail(uhat));
    };
    out.h = [h = sys.h, tail](const Vector& uhat, const Vector& x) { return h(tail(uhat), x); };
    out.h_u = [h_u = sys.h_u, tail](const Vector& uhat, const Vector& x) {
        RowVector r = RowVector::Zero(uhat.size());
        r.tail(uhat.size() - 1) = h_u(tail(uhat), x);
        return r;
    };
    out.h_x = [h_x = sys.h_x, tail](const Vector& uhat, const Vector& x) {
        return h_x(tail(uhat), x);
    };

    out.lower = Vector(out.m);
    out.upper = Vector(out.m);
    out.lower[0] = out.upper[0] = 1.0;  // drift channel pinned
    if (sys.lower.size()) {
        out.lower.tail(sys.m) = sys.lower;
        out.upper.tail(sys.m) = sys.upper;
    } else {
        out.lower.tail(sys.m).setConstant(-std::numeric_limits<double>::infinity());
        out.upper.tail(sys.m).setConstant(std::numeric_limits<double>::infinity());
    }
    out.in_domain = sys.in_domain;
    out.default_guess = sys.default_guess;
    return out;
}

}  // namespace entrain
