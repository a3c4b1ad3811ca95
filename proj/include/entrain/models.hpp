#pragma once

#include <utility>
#include <vector>

#include "entrain/system.hpp"

namespace entrain {

// ---------------------------------------------------------------------------
// Ribosome flow model
// ---------------------------------------------------------------------------

/// n-site RFM with n+1 rate controls (u_0, ..., u_n), state space [0,1]^n,
/// output y = u_n x_n. Rates are admissible when bounded below by c > 0.
struct RfmSpec {
    int n = 2;
    double c = 1e-3;  // rate lower bound
};

BilinearSystem build_rfm(const RfmSpec& spec);

// ---------------------------------------------------------------------------
// Controlled master equation
// ---------------------------------------------------------------------------

/// Master equation z' = A(u) z on the probability simplex with n
/// configurations. transitions lists the ordered pairs (i, j), 0-based,
/// whose rates u_{i,j} may be positive; their digraph must be strongly
/// connected so A(u) is irreducible for admissible rates.
struct MasterChainSpec {
    int n = 2;
    std::vector<std::pair<int, int>> transitions;
    double c = 1e-3;  // rate lower bound on the listed transitions

    /// All off-diagonal pairs (complete chain graph).
    static MasterChainSpec complete(int n, double c = 1e-3);
};

/// Scalar reward p(u, z) on probability vectors, with its gradients.
struct MasterReward {
    std::function<double(const Vector& u, const Vector& z)> p;
    std::function<RowVector(const Vector& u, const Vector& z)> p_u;  // 1 x n^2
    std::function<RowVector(const Vector& u, const Vector& z)> p_z;  // 1 x n

    /// Occupancy of the last configuration, p = z_{n-1}.
    static MasterReward last_state(int n);
};

/// Reduced representation of the master equation. The simplex dynamics are
/// shifted by kappa(z) = z - 1/n and written in reduced coordinates
/// x = V^T (z - 1/n), where the columns of V are a fixed orthonormal basis
/// of the hyperplane 1^T w = 0 (Householder reflection). Monodromy
/// nondegeneracy is then a statement about the reduced space, where the
/// trivial eigenvalue 1 of the full transition semigroup is absent.
///
/// Control layout: u_{i,j} at index i*n + j (row-major). Diagonal channels
/// and pairs outside the transition set are pinned to 0.
struct MasterSystem {
    BilinearSystem sys;  // reduced, state dimension n-1, m = n^2 controls
    int configs = 0;     // n
    Matrix basis;        // V, n x (n-1)

    Vector to_reduced(const Vector& z) const;      // x = V^T (z - 1/n)
    Vector to_probability(const Vector& x) const;  // z = V x + 1/n
    Matrix transition_matrix(const Vector& u) const;  // A(u), n x n

    /// Index of channel u_{i,j} in the stacked control vector.
    int channel(int i, int j) const { return i * configs + j; }
};

MasterSystem build_master(const MasterChainSpec& spec);
MasterSystem build_master(const MasterChainSpec& spec, const MasterReward& reward);

// ---------------------------------------------------------------------------
// Worked examples
// ---------------------------------------------------------------------------

/// Linear SISO system x' = Ax + bu, y = c^T x, wrapped as a drift-augmented
/// bilinear system (control channel 0 pinned to 1, channel 1 carries u).
/// Throws NotHurwitz unless all eigenvalues of A have negative real part.
BilinearSystem build_example_linear(const Matrix& A, const Vector& b, const Vector& c);

/// Two-state nonlinear cascade x1' = -x1 + x2^2, x2' = -x2 + u, y = x1,
/// drift-augmented like the linear example.
BilinearSystem build_example_pavlov();

/// Scalar system x' = -u x with output y = u x (the output is an addition
/// of this library; the model itself defines none).
BilinearSystem build_example_scalar();

}  // namespace entrain
