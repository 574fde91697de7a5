#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "gridest/errors.hpp"

namespace gridest {

/// First-order low-pass alpha/(p+alpha), discretized exactly under a
/// zero-order hold: y+ = e^(-alpha*dt)*y + (1 - e^(-alpha*dt))*u.
/// The initial condition is zero; the resulting exponentially decaying
/// transient is handled by warm-up gating downstream.
class LowPassFilter {
public:
    explicit LowPassFilter(double alpha) : alpha_(alpha) {
        if (!(alpha > 0.0)) throw ConfigError("LowPassFilter: alpha must be > 0");
    }

    double step(double u, double dt) {
        const double decay = std::exp(-alpha_ * dt);
        y_ = decay * y_ + (1.0 - decay) * u;
        primed_ = true;
        return y_;
    }

    double alpha() const { return alpha_; }
    double output() const { return y_; }
    bool primed() const { return primed_; }

    void reset() {
        y_ = 0.0;
        primed_ = false;
    }

private:
    double alpha_;
    double y_ = 0.0;
    bool primed_ = false;
};

/// Realizable derivative alpha*p/(p+alpha): the per-sample difference
/// quotient pushed through the exact-ZOH low-pass. Discretized this way the
/// derivative branch has the same effective gain as the alpha/(p+alpha)
/// branches of the regression, so a sampled ramp settles to its slope
/// exactly even when alpha*dt is O(1).
class DirtyDerivative {
public:
    explicit DirtyDerivative(double alpha) : lp_(alpha) {}

    double step(double u, double dt) {
        if (!primed_) {
            primed_ = true;
            u_prev_ = u;
        }
        const double rate = (u - u_prev_) / dt;
        u_prev_ = u;
        return lp_.step(rate, dt);
    }

    double alpha() const { return lp_.alpha(); }

    void reset() {
        lp_.reset();
        primed_ = false;
        u_prev_ = 0.0;
    }

private:
    LowPassFilter lp_;
    double u_prev_ = 0.0;
    bool primed_ = false;
};

/// Sample-aligned delay of d seconds on a uniformly sampled stream.
/// d must be an integer multiple of dt; the output is the input from exactly
/// d/dt samples ago, bit-identical, never interpolated. Before the line is
/// full the output is 0 (gated by estimator warm-up).
class DelayLine {
public:
    DelayLine(double d, double dt) {
        if (!(d > 0.0) || !(dt > 0.0)) throw ConfigError("DelayLine: d and dt must be > 0");
        const double ratio = d / dt;
        const double rounded = std::round(ratio);
        if (rounded < 1.0 || std::abs(ratio - rounded) > 1e-9 * ratio) {
            throw ConfigError("DelayLine: delay is not an integer multiple of dt");
        }
        buffer_.assign(static_cast<std::size_t>(rounded), 0.0);
    }

    double step(double u) {
        const double out = filled_ ? buffer_[head_] : 0.0;
        buffer_[head_] = u;
        head_ = (head_ + 1) % buffer_.size();
        if (head_ == 0) filled_ = true;
        return out;
    }

    std::size_t length() const { return buffer_.size(); }
    bool filled() const { return filled_; }

private:
    std::vector<double> buffer_;
    std::size_t head_ = 0;
    bool filled_ = false;
};

} // namespace gridest
