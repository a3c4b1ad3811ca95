#include "entrain/models.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <limits>

namespace entrain {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kDomainSlack = 1e-6;
}  // namespace

// ---------------------------------------------------------------------------
// RFM
// ---------------------------------------------------------------------------

BilinearSystem build_rfm(const RfmSpec& spec) {
    if (spec.n < 1) throw std::invalid_argument("RFM needs at least one site");
    if (!(spec.c > 0)) throw std::invalid_argument("RFM rate lower bound must be positive");
    const int n = spec.n;
    const int m = n + 1;

    BilinearSystem s;
    s.n = n;
    s.m = m;
    s.name = "rfm";

    s.f = [n](const Vector&) { return Vector::Zero(n); };
    s.Df = [n, m](const Vector&) { return Matrix::Zero(n, m); };

    // Row i of M(x): inflow x_{i-1}(1 - x_i) at column i, outflow
    // -x_i(1 - x_{i+1}) at column i+1, with x_0 = 1 and x_{n+1} = 0.
    s.M = [n, m](const Vector& x) {
        Matrix M = Matrix::Zero(n, m);
        for (int i = 0; i < n; ++i) {
            const double x_prev = i == 0 ? 1.0 : x(i - 1);
            const double x_next = i == n - 1 ? 0.0 : x(i + 1);
            M(i, i) = x_prev * (1.0 - x(i));
            M(i, i + 1) = -x(i) * (1.0 - x_next);
        }
        return M;
    };

    s.J = [n](const Vector& x, const Vector& u) {
        Matrix J = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i) {
            const double x_prev = i == 0 ? 1.0 : x(i - 1);
            const double x_next = i == n - 1 ? 0.0 : x(i + 1);
            if (i > 0) J(i, i - 1) = u(i) * (1.0 - x(i));
            J(i, i) = -u(i) * x_prev - u(i + 1) * (1.0 - x_next);
            if (i < n - 1) J(i, i + 1) = u(i + 1) * x(i);
        }
        return J;
    };

    s.h = [n](const Vector& u, const Vector& x) { return u(n) * x(n - 1); };
    s.h_u = [n, m](const Vector&, const Vector& x) {
        RowVector r = RowVector::Zero(m);
        r(n) = x(n - 1);
        return r;
    };
    s.h_x = [n](const Vector& u, const Vector&) {
        RowVector r = RowVector::Zero(n);
        r(n - 1) = u(n);
        return r;
    };

    s.lower = Vector::Constant(m, spec.c);
    s.upper = Vector::Constant(m, kInf);
    s.in_domain = [n](const Vector& x) {
        return (x.array() >= -kDomainSlack).all() &&
               (x.array() <= 1.0 + kDomainSlack).all();
    };
    s.default_guess = Vector::Constant(n, 0.5);
    return s;
}

// ---------------------------------------------------------------------------
// Master equation
// ---------------------------------------------------------------------------

MasterChainSpec MasterChainSpec::complete(int n, double c) {
    MasterChainSpec spec;
    spec.n = n;
    spec.c = c;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j)
            if (i != j) spec.transitions.emplace_back(i, j);
    return spec;
}

MasterReward MasterReward::last_state(int n) {
    MasterReward r;
    r.p = [n](const Vector&, const Vector& z) { return z(n - 1); };
    r.p_u = [n](const Vector&, const Vector&) { return RowVector::Zero(n * n); };
    r.p_z = [n](const Vector&, const Vector&) {
        RowVector g = RowVector::Zero(n);
        g(n - 1) = 1.0;
        return g;
    };
    return r;
}

Vector MasterSystem::to_reduced(const Vector& z) const {
    return basis.transpose() * (z.array() - 1.0 / configs).matrix();
}

Vector MasterSystem::to_probability(const Vector& x) const {
    return (basis * x).array() + 1.0 / configs;
}

Matrix MasterSystem::transition_matrix(const Vector& u) const {
    const int n = configs;
    Matrix A = Matrix::Zero(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            if (i == j) continue;
            const double rate = u(channel(i, j));  // i -> j
            A(j, i) += rate;
            A(i, i) -= rate;
        }
    return A;
}

namespace {

bool strongly_connected(int n, const std::vector<std::pair<int, int>>& edges) {
    auto reachable_all = [n, &edges](bool reverse) {
        std::vector<std::vector<int>> adj(n);
        for (const auto& [i, j] : edges)
            reverse ? adj[j].push_back(i) : adj[i].push_back(j);
        std::vector<bool> seen(n, false);
        std::vector<int> stack{0};
        seen[0] = true;
        while (!stack.empty()) {
            const int v = stack.back();
            stack.pop_back();
            for (int w : adj[v])
                if (!seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
        }
        for (bool b : seen)
            if (!b) return false;
        return true;
    };
    return reachable_all(false) && reachable_all(true);
}

/// Orthonormal basis of the hyperplane 1^T w = 0: columns 2..n of the
/// Householder reflection that maps 1/sqrt(n) to e_1. Deterministic, so
/// reduced-space eigenvalues are reproducible across runs.
Matrix hyperplane_basis(int n) {
    Vector a = Vector::Constant(n, 1.0 / std::sqrt(static_cast<double>(n)));
    Vector v = a - Vector::Unit(n, 0);
    Matrix H = Matrix::Identity(n, n);
    const double vv = v.squaredNorm();
    if (vv > 0) H -= (2.0 / vv) * (v * v.transpose());
    return H.rightCols(n - 1);
}

}  // namespace

MasterSystem build_master(const MasterChainSpec& spec) {
    return build_master(spec, MasterReward::last_state(spec.n));
}

MasterSystem build_master(const MasterChainSpec& spec, const MasterReward& reward) {
    const int n = spec.n;
    if (n < 2) throw std::invalid_argument("master equation needs at least two configurations");
    if (!(spec.c > 0))
        throw std::invalid_argument("master rate lower bound must be positive");
    for (const auto& [i, j] : spec.transitions)
        if (i < 0 || j < 0 || i >= n || j >= n || i == j)
            throw std::invalid_argument("invalid transition pair");
    if (!strongly_connected(n, spec.transitions)) throw NotIrreducible();

    MasterSystem ms;
    ms.configs = n;
    ms.basis = hyperplane_basis(n);
    const Matrix V = ms.basis;  // captured by value in the closures below
    const int nr = n - 1;
    const int m = n * n;

    BilinearSystem s;
    s.n = nr;
    s.m = m;
    s.name = "master";

    // In shifted coordinates x = z - 1/n the dynamics are
    //   x' = A(u) x + A(u) 1/n,
    // and both terms stay in the hyperplane 1^T w = 0 (columns of A sum to
    // zero). Reduced coordinates xi = V^T x give
    //   xi' = V^T A(u) V xi + V^T A(u) 1 / n.
    // The channel u_{i,j} enters A(u) w as u_{i,j} w_i (e_j - e_i).
    auto delta = [n](int i, int j) {
        Vector d = Vector::Zero(n);
        d(j) = 1.0;
        d(i) = -1.0;
        return d;
    };

    s.f = [V, delta, n, nr](const Vector& u) {
        Vector acc = Vector::Zero(n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) acc += u(i * n + j) / n * delta(i, j);
        return Vector(V.transpose() * acc);
    };
    s.Df = [V, delta, n, nr, m](const Vector&) {
        Matrix D = Matrix::Zero(nr, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) D.col(i * n + j) = V.transpose() * delta(i, j) / n;
        return D;
    };
    s.M = [V, delta, n, nr, m](const Vector& xi) {
        const Vector x = V * xi;
        Matrix M = Matrix::Zero(nr, m);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) M.col(i * n + j) = x(i) * (V.transpose() * delta(i, j));
        return M;
    };
    s.J = [V, delta, n, nr](const Vector&, const Vector& u) {
        Matrix A = Matrix::Zero(n, n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) {
                if (i == j) continue;
                A(j, i) += u(i * n + j);
                A(i, i) -= u(i * n + j);
            }
        return Matrix(V.transpose() * A * V);
    };

    const double inv_n = 1.0 / n;
    s.h = [V, reward, inv_n](const Vector& u, const Vector& xi) {
        return reward.p(u, ((V * xi).array() + inv_n).matrix());
    };
    s.h_u = [V, reward, inv_n](const Vector& u, const Vector& xi) {
        return reward.p_u(u, ((V * xi).array() + inv_n).matrix());
    };
    s.h_x = [V, reward, inv_n](const Vector& u, const Vector& xi) {
        return RowVector(reward.p_z(u, ((V * xi).array() + inv_n).matrix()) * V);
    };

    // Pin channels outside the transition set (including diagonals) to 0.
    s.lower = Vector::Zero(m);
    s.upper = Vector::Zero(m);
    for (const auto& [i, j] : spec.transitions) {
        s.lower(i * n + j) = spec.c;
        s.upper(i * n + j) = kInf;
    }

    s.in_domain = [V, inv_n](const Vector& xi) {
        const Vector z = ((V * xi).array() + inv_n).matrix();
        return (z.array() >= -kDomainSlack).all() &&
               (z.array() <= 1.0 + kDomainSlack).all();
    };
    s.default_guess = Vector::Zero(nr);  // uniform distribution

    ms.sys = std::move(s);
    return ms;
}

// ---------------------------------------------------------------------------
// Worked examples
// ---------------------------------------------------------------------------

BilinearSystem build_example_linear(const Matrix& A, const Vector& b, const Vector& c) {
    const int n = static_cast<int>(A.rows());
    if (A.cols() != n || b.size() != n || c.size() != n)
        throw std::invalid_argument("dimension mismatch in linear model");
    Eigen::EigenSolver<Matrix> es(A);
    if ((es.eigenvalues().real().array() >= 0).any()) throw NotHurwitz();

    BilinearSystem base;
    base.n = n;
    base.m = 1;
    base.f = [b](const Vector& u) { return Vector(b * u(0)); };
    base.Df = [b](const Vector&) { return Matrix(b); };
    base.M = [n](const Vector&) { return Matrix::Zero(n, 1); };
    base.J = [n](const Vector&, const Vector&) { return Matrix::Zero(n, n); };
    base.h = [c](const Vector&, const Vector& x) { return c.dot(x); };
    base.h_u = [](const Vector&, const Vector&) { return RowVector::Zero(1); };
    base.h_x = [c](const Vector&, const Vector&) { return RowVector(c.transpose()); };
    base.lower = Vector::Constant(1, -kInf);
    base.upper = Vector::Constant(1, kInf);
    base.default_guess = Vector::Zero(n);
    base.name = "linear";

    auto g = [A](const Vector& x) { return Vector(A * x); };
    auto Dg = [A](const Vector&) { return A; };
    BilinearSystem s = augment_drift(g, Dg, base);
    s.name = "linear";
    return s;
}

BilinearSystem build_example_pavlov() {
    BilinearSystem base;
    base.n = 2;
    base.m = 1;
    base.f = [](const Vector& u) {
        Vector v(2);
        v << 0.0, u(0);
        return v;
    };
    base.Df = [](const Vector&) {
        Matrix D(2, 1);
        D << 0.0, 1.0;
        return D;
    };
    base.M = [](const Vector&) { return Matrix::Zero(2, 1); };
    base.J = [](const Vector&, const Vector&) { return Matrix::Zero(2, 2); };
    base.h = [](const Vector&, const Vector& x) { return x(0); };
    base.h_u = [](const Vector&, const Vector&) { return RowVector::Zero(1); };
    base.h_x = [](const Vector&, const Vector&) {
        RowVector r(2);
        r << 1.0, 0.0;
        return r;
    };
    base.lower = Vector::Constant(1, -kInf);
    base.upper = Vector::Constant(1, kInf);
    base.default_guess = Vector::Zero(2);
    base.name = "pavlov";

    auto g = [](const Vector& x) {
        Vector v(2);
        v << -x(0) + x(1) * x(1), -x(1);
        return v;
    };
    auto Dg = [](const Vector& x) {
        Matrix D(2, 2);
        D << -1.0, 2.0 * x(1), 0.0, -1.0;
        return D;
    };
    BilinearSystem s = augment_drift(g, Dg, base);
    s.name = "pavlov";
    return s;
}

BilinearSystem build_example_scalar() {
    BilinearSystem s;
    s.n = 1;
    s.m = 1;
    s.name = "scalar";
    s.f = [](const Vector&) { return Vector::Zero(1); };
    s.Df = [](const Vector&) { return Matrix::Zero(1, 1); };
    s.M = [](const Vector& x) { return Matrix(-x); };
    s.J = [](const Vector&, const Vector& u) { return Matrix(-u); };
    s.h = [](const Vector& u, const Vector& x) { return u(0) * x(0); };
    s.h_u = [](const Vector&, const Vector& x) { return RowVector(x.transpose()); };
    s.h_x = [](const Vector& u, const Vector&) { return RowVector(u.transpose()); };
    s.lower = Vector::Constant(1, -kInf);
    s.upper = Vector::Constant(1, kInf);
    s.default_guess = Vector::Zero(1);
    return s;
}

}  // namespace entrain
