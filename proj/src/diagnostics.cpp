#include "entrain/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

namespace entrain {

namespace {

double measure_l1(const Matrix& A) {
    double mu = -std::numeric_limits<double>::infinity();
    for (int j = 0; j < A.cols(); ++j) {
        double col = A(j, j);
        for (int i = 0; i < A.rows(); ++i)
            if (i != j) col += std::abs(A(i, j));
        mu = std::max(mu, col);
    }
    return mu;
}

}  // namespace

double matrix_measure(const Matrix& A, const MeasureKind& kind) {
    if (A.rows() != A.cols()) throw std::invalid_argument("matrix measure needs a square matrix");
    switch (kind.kind) {
        case MeasureKind::L1:
            return measure_l1(A);
        case MeasureKind::LInf:
            return measure_l1(A.transpose());
        case MeasureKind::WeightedL1: {
            if (kind.weights.size() != A.rows() || (kind.weights.array() <= 0).any())
                throw std::invalid_argument("weighted-l1 measure needs positive weights");
            const auto& w = kind.weights;
            return measure_l1(w.asDiagonal() * A * w.cwiseInverse().asDiagonal());
        }
    }
    throw std::logic_error("unknown measure kind");
}

double contraction_scan(const BilinearSystem& sys, const PeriodicSolution& sol,
                        const MeasureKind& kind) {
    const TimeGrid& g = sol.trajectory.grid;
    double eta = -std::numeric_limits<double>::infinity();
    for (int i = 0; i < g.size(); ++i) {
        const Vector u = sol.control.eval(g.nodes[i]);
        eta = std::max(eta, matrix_measure(sys.J(sol.trajectory.states[i], u), kind));
    }
    return eta;
}

}  // namespace entrain
