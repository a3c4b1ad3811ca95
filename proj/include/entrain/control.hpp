#pragma once

#include "entrain/types.hpp"

namespace entrain {

enum class ControlInterp { LinearPeriodic, Trigonometric };

/// T-periodic control sampled on a uniform grid over [0, T).
///
/// samples is k x m: row i holds the control value at t = i*T/k. Evaluation
/// wraps around periodically, so eval(t) == eval(t + T) exactly. Linear mode
/// interpolates piecewise-linearly with a wraparound segment; trigonometric
/// mode evaluates the interpolating trigonometric polynomial, which
/// reproduces sampled sinusoids exactly.
class PeriodicControl {
  public:
    PeriodicControl(double period, Matrix samples,
                    ControlInterp interp = ControlInterp::LinearPeriodic);

    static PeriodicControl constant(double period, const Vector& value, int k = 256);
    /// offset + sum_j amplitude_j * sin(omega*t + phase), one harmonic per channel.
    static PeriodicControl harmonic(double period, const Vector& offset,
                                    const Vector& amplitude, double omega,
                                    double phase = 0.0, int k = 256,
                                    ControlInterp interp = ControlInterp::Trigonometric);

    Vector eval(double t) const;
    Vector operator()(double t) const { return eval(t); }

    double period() const { return period_; }
    int channels() const { return static_cast<int>(samples_.cols()); }
    int grid_size() const { return static_cast<int>(samples_.rows()); }
    const Matrix& samples() const { return samples_; }
    ControlInterp interp() const { return interp_; }

    /// Grid approximation of the sup norm: max over channels of the max
    /// absolute sample value. Error is O(1/k) for Lipschitz controls.
    double norm() const;

    /// Per-channel sample means.
    Vector mean() const;

    /// Control with the per-channel sample mean removed.
    PeriodicControl zero_mean() const;

    /// Resample onto a k-point grid (via eval).
    PeriodicControl resampled(int k) const;

    /// Control with an extra leading channel pinned to `value` (drift channel
    /// of augmented systems).
    PeriodicControl with_prefix_channel(double value = 1.0) const;

    PeriodicControl scaled(double a) const;
    /// Requires matching period and grid size.
    PeriodicControl plus(const PeriodicControl& other, double weight = 1.0) const;

  private:
    double period_;
    Matrix samples_;  // k x m
    ControlInterp interp_;
    Matrix fourier_cos_, fourier_sin_;  // (k/2+1) x m, trig mode only
    void build_fourier();
};

/// Equivalent constant control \bar v.
struct ConstantControl {
    Vector value;
};

inline double control_norm(const PeriodicControl& u) { return u.norm(); }

}  // namespace entrain
