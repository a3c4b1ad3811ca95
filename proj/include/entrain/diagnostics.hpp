#pragma once

#include "entrain/periodic.hpp"
#include "entrain/system.hpp"

namespace entrain {

/// Matrix measures (logarithmic norms) with closed-form evaluation.
struct MeasureKind {
    enum Kind { L1, LInf, WeightedL1 } kind = L1;
    Vector weights;  // strictly positive, WeightedL1 only

    static MeasureKind l1() { return {L1, {}}; }
    static MeasureKind linf() { return {LInf, {}}; }
    static MeasureKind weighted_l1(Vector w) { return {WeightedL1, std::move(w)}; }
};

/// mu(A): l1 is the max over columns j of A_jj + sum_{i != j} |A_ij|; linf
/// the analogue over rows; weighted-l1 is the l1 measure of D A D^{-1} with
/// D = diag(weights).
double matrix_measure(const Matrix& A, const MeasureKind& kind);

/// Max over the solution grid of mu(J(gamma(t), u(t))). A negative value
/// certifies pointwise infinitesimal contraction along the orbit (not on the
/// whole state space).
double contraction_scan(const BilinearSystem& sys, const PeriodicSolution& sol,
                        const MeasureKind& kind);

}  // namespace entrain
