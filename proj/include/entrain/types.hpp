#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <string>
#include <vector>

namespace entrain {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using RowVector = Eigen::RowVectorXd;

// ---------------------------------------------------------------------------
// Errors
// ---------------------------------------------------------------------------

struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct StepSizeUnderflow : SolverError {
    StepSizeUnderflow() : SolverError("integrator step size underflow") {}
};

struct NonFiniteState : SolverError {
    NonFiniteState() : SolverError("state became non-finite during integration") {}
};

struct StateLeftDomain : SolverError {
    StateLeftDomain() : SolverError("trajectory left the model state space") {}
};

struct NoConvergence : SolverError {
    explicit NoConvergence(int iters)
        : SolverError("periodic solver failed to converge after " +
                      std::to_string(iters) + " iterations") {}
};

struct SingularMonodromy : SolverError {
    SingularMonodromy() : SolverError("monodromy matrix minus identity is singular") {}
};

struct SingularMatrix : SolverError {
    SingularMatrix() : SolverError("matrix is singular to working precision") {}
};

struct IllConditionedTransfer : SolverError {
    IllConditionedTransfer()
        : SolverError("transfer matrix too ill-conditioned to invert") {}
};

struct NotIrreducible : SolverError {
    NotIrreducible() : SolverError("transition graph is not strongly connected") {}
};

struct NotHurwitz : SolverError {
    NotHurwitz() : SolverError("matrix is not Hurwitz") {}
};

struct InadmissibleControl : SolverError {
    using SolverError::SolverError;
};

// ---------------------------------------------------------------------------
// Time grid and trajectory
// ---------------------------------------------------------------------------

/// Ordered sample times on [t0, t1]. Most grids are uniform; the flag is kept
/// so quadratures can pick closed-form weights.
struct TimeGrid {
    double t0 = 0.0;
    double t1 = 1.0;
    std::vector<double> nodes;
    bool uniform = true;

    static TimeGrid make_uniform(double t0, double t1, int segments);

    int size() const { return static_cast<int>(nodes.size()); }
    double span() const { return t1 - t0; }
    double spacing() const { return (t1 - t0) / static_cast<double>(nodes.size() - 1); }
    void validate() const;
};

/// State samples of x(t) at the grid nodes.
struct Trajectory {
    TimeGrid grid;
    std::vector<Vector> states;

    const Vector& front() const { return states.front(); }
    const Vector& back() const { return states.back(); }
    bool finite() const;
};

}  // namespace entrain
