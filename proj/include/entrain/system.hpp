#pragma once

#include <functional>
#include <string>

#include "entrain/control.hpp"
#include "entrain/types.hpp"

namespace entrain {

/// Bilinear control system  dx/dt = f(u) + M(x) u  with scalar output
/// y = h(u, x). J(x, u) is the state Jacobian of M(x)u and must be linear
/// in u.
struct BilinearSystem {
    int n = 0;  // state dimension
    int m = 0;  // control dimension

    std::function<Vector(const Vector& u)> f;
    std::function<Matrix(const Vector& u)> Df;   // n x m
    std::function<Matrix(const Vector& x)> M;    // n x m
    std::function<Matrix(const Vector& x, const Vector& u)> J;  // n x n

    std::function<double(const Vector& u, const Vector& x)> h;
    std::function<RowVector(const Vector& u, const Vector& x)> h_u;  // 1 x m
    std::function<RowVector(const Vector& u, const Vector& x)> h_x;  // 1 x n

    /// Per-channel admissibility box. Channels with lower == upper are pinned
    /// (e.g. the drift channel of an augmented system).
    Vector lower;  // m
    Vector upper;  // m

    /// Optional model-specific state-space membership test.
    std::function<bool(const Vector& x)> in_domain;

    /// Default initial guess for the periodic solver.
    Vector default_guess;

    std::string name;

    Vector rhs(const Vector& u, const Vector& x) const { return f(u) + M(x) * u; }
    Vector rhs_at(const PeriodicControl& u, double t, const Vector& x) const {
        return rhs(u.eval(t), x);
    }
    bool state_ok(const Vector& x) const { return !in_domain || in_domain(x); }

    /// Throws InadmissibleControl unless every sample lies strictly inside
    /// the box (pinned channels must match exactly). Controls are never
    /// clipped; that would corrupt perturbation scaling studies.
    void check_admissible(const PeriodicControl& u) const;
};

/// Rewrites dx/dt = g(x) + f(u) + M(x)u as a bilinear system with one extra
/// control channel pinned to 1:  Mhat = [g | M], fhat(uhat) = f(tail(uhat)).
BilinearSystem augment_drift(const std::function<Vector(const Vector&)>& g,
                             const std::function<Matrix(const Vector&)>& Dg,
                             const BilinearSystem& sys);

}  // namespace entrain
