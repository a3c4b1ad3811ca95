#include "entrain/control.hpp"

#include <cmath>

namespace entrain {

PeriodicControl::PeriodicControl(double period, Matrix samples, ControlInterp interp)
    : period_(period), samples_(std::move(samples)), interp_(interp) {
    if (!(period_ > 0.0)) throw std::invalid_argument("control period must be positive");
    if (samples_.rows() < 4) throw std::invalid_argument("control grid needs k >= 4 samples");
    if (!samples_.allFinite()) throw std::invalid_argument("control samples must be finite");
    if (interp_ == ControlInterp::Trigonometric) build_fourier();
}

PeriodicControl PeriodicControl::constant(double period, const Vector& value, int k) {
    Matrix s(k, value.size());
    s.rowwise() = value.transpose();
    return PeriodicControl(period, std::move(s), ControlInterp::LinearPeriodic);
}

PeriodicControl PeriodicControl::harmonic(double period, const Vector& offset,
                                          const Vector& amplitude, double omega,
                                          double phase, int k, ControlInterp interp) {
    if (offset.size() != amplitude.size())
        throw std::invalid_argument("offset/amplitude size mismatch");
    Matrix s(k, offset.size());
    for (int i = 0; i < k; ++i) {
        const double t = period * i / k;
        s.row(i) = (offset + std::sin(omega * t + phase) * amplitude).transpose();
    }
    return PeriodicControl(period, std::move(s), interp);
}

void PeriodicControl::build_fourier() {
    const int k = grid_size();
    const int m = channels();
    const int nf = k / 2 + 1;
    fourier_cos_ = Matrix::Zero(nf, m);
    fourier_sin_ = Matrix::Zero(nf, m);
    for (int j = 0; j < nf; ++j) {
        double scale = (j == 0 || 2 * j == k) ? 1.0 / k : 2.0 / k;
        for (int i = 0; i < k; ++i) {
            const double ang = 2.0 * M_PI * j * i / k;
            fourier_cos_.row(j) += scale * std::cos(ang) * samples_.row(i);
            fourier_sin_.row(j) += scale * std::sin(ang) * samples_.row(i);
        }
    }
    if (k % 2 == 0) fourier_sin_.row(k / 2).setZero();
}

Vector PeriodicControl::eval(double t) const {
    if (!std::isfinite(t)) throw std::invalid_argument("control evaluated at non-finite time");
    const int k = grid_size();
    double tau = std::fmod(t, period_);
    if (tau < 0) tau += period_;

    if (interp_ == ControlInterp::Trigonometric) {
        const double w0 = 2.0 * M_PI / period_;
        Vector out = fourier_cos_.row(0).transpose();
        for (int j = 1; j < fourier_cos_.rows(); ++j) {
            const double ang = w0 * j * tau;
            out += std::cos(ang) * fourier_cos_.row(j).transpose() +
                   std::sin(ang) * fourier_sin_.row(j).transpose();
        }
        return out;
    }

    const double pos = tau * k / period_;
    int i0 = static_cast<int>(std::floor(pos));
    double frac = pos - i0;
    if (i0 >= k) {  // only via rounding at the seam
        i0 = 0;
        frac = 0.0;
    }
    const int i1 = (i0 + 1) % k;
    return ((1.0 - frac) * samples_.row(i0) + frac * samples_.row(i1)).transpose();
}

double PeriodicControl::norm() const { return samples_.cwiseAbs().maxCoeff(); }

Vector PeriodicControl::mean() const { return samples_.colwise().mean().transpose(); }

PeriodicControl PeriodicControl::zero_mean() const {
    Matrix s = samples_;
    s.rowwise() -= samples_.colwise().mean();
    return PeriodicControl(period_, std::move(s), interp_);
}

PeriodicControl PeriodicControl::resampled(int k) const {
    Matrix s(k, channels());
    for (int i = 0; i < k; ++i) s.row(i) = eval(period_ * i / k).transpose();
    return PeriodicControl(period_, std::move(s), interp_);
}

PeriodicControl PeriodicControl::with_prefix_channel(double value) const {
    Matrix s(grid_size(), channels() + 1);
    s.col(0).setConstant(value);
    s.rightCols(channels()) = samples_;
    return PeriodicControl(period_, std::move(s), interp_);
}

PeriodicControl PeriodicControl::scaled(double a) const {
    return PeriodicControl(period_, a * samples_, interp_);
}

PeriodicControl PeriodicControl::plus(const PeriodicControl& other, double weight) const {
    if (other.period_ != period_ || other.grid_size() != grid_size() ||
        other.channels() != channels())
        throw std::invalid_argument("control grids do not match");
    // Mixed modes arise when perturbing a sampled base by a pure harmonic;
    // trig interpolation reproduces constant samples exactly, so prefer it.
    ControlInterp interp =
        (interp_ == other.interp_) ? interp_ : ControlInterp::Trigonometric;
    return PeriodicControl(period_, samples_ + weight * other.samples_, interp);
}

}  // namespace entrain
