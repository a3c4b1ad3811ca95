#pragma once

#include <vector>

#include "entrain/periodic.hpp"
#include "entrain/sensitivity.hpp"

namespace entrain {

/// Gain of entrainment: difference of the average outputs along the
/// entrained solutions at u + du and at u, plus its first-order prediction.
struct GoeReport {
    double ybar_base = 0.0;
    double ybar_pert = 0.0;
    double goe = 0.0;                    // ybar_pert - ybar_base
    double first_order_prediction = 0.0;
    double residual = 0.0;               // goe - first_order_prediction
    double du_norm = 0.0;
};

/// Kernel K(t), a 1 x m row per grid node, such that the first-order GOE of
/// a perturbation du equals (1/T) * integral of K(t) du(t) dt.
struct KernelSamples {
    TimeGrid grid;
    std::vector<RowVector> values;

    bool finite() const;
};

/// (1/T) * integral of h(u(t), gamma(t)) dt by composite Simpson on the
/// solution grid.
double average_output(const BilinearSystem& sys, const PeriodicSolution& sol);

/// Solves the periodic problem at u and at u + du and reports the output
/// difference together with the first-order prediction.
GoeReport goe_exact(const BilinearSystem& sys, const PeriodicControl& u,
                    const PeriodicControl& du, const SolverOptions& opts = {});

/// First-order GOE along sol in direction du:
///   (1/T) int h_u du dt + (1/T) int h_x (Phi(t;0) dGamma(u)du + z(t)) dt.
double goe_first_order(const BilinearSystem& sys, const PeriodicSolution& sol,
                       const PeriodicControl& du, const SolverOptions& opts = {});

/// Kernel of the first-order GOE functional, sampled on the solution grid.
/// Nodes where Phi(t;0) is too ill-conditioned to invert are recomputed by
/// re-integrating the transfer matrix from that node.
KernelSamples goe_kernel(const BilinearSystem& sys, const PeriodicSolution& sol,
                         const SolverOptions& opts = {});

/// Channelwise sign of the kernel (zero maps to +1): the first-order-optimal
/// perturbation direction on the sup-norm unit ball.
PeriodicControl optimal_direction_sign(const KernelSamples& kernel);

/// Steepest first-order direction among constant perturbations of a constant
/// base control vbar with equilibrium e:
///   (h_u(vbar, e) - h_x(vbar, e) H^{-1} (M(e) + Df(vbar)))^T,  H = J(e, vbar).
Vector optimal_constant_direction(const BilinearSystem& sys, const Vector& vbar,
                                  const Vector& equilibrium);

/// Subtracts the channelwise mean so the samples satisfy mean(du) = 0 exactly.
PeriodicControl project_zero_mean(const PeriodicControl& du);

}  // namespace entrain
