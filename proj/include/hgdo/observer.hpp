// High-gain disturbance observer.
//
// Auxiliary-variable form, per loop (x = x2 translational, x = x4 rotational):
//   gamma  = d_hat - x / eps
//   gamma' = -(1/eps) (gamma + x / eps) + (1/eps) * forcing
// with forcing = g - u1vec (translational) or -f2(x4) - u2vec (rotational).
// The estimate is reconstructed as d_hat = gamma + x / eps, so the observer
// never differentiates a measured state.
//
// The derivative-based ("naive") form integrates
//   d_hat' = (1/eps) (x_dot + forcing - d_hat)
// and needs an estimate of x_dot. It exists for comparison only.
#pragma once

#include "hgdo/types.hpp"

namespace hgdo::obs {

enum class Loop { Translational, Rotational };
enum class Variant { Auxiliary, Naive, None };

struct HgdoState {
    Vec3 gamma = Vec3::Zero();
    double epsilon = 0.01;
    Loop loop = Loop::Translational;
};

struct DisturbanceEstimate {
    Vec3 d1_hat = Vec3::Zero();
    Vec3 d2_hat = Vec3::Zero();
};

/// gamma(0) = d_hat0 - x(0)/eps. Throws NonPositiveEpsilon.
HgdoState hgdo_init(const Vec3& x, double epsilon, const Vec3& d_hat0 = Vec3::Zero(),
                    Loop loop = Loop::Translational);

/// d_hat = gamma + x / eps.
Vec3 reconstruct(const HgdoState& st, const Vec3& x);

/// Rate of the auxiliary variable for an arbitrary forcing term.
Vec3 gamma_rate(const Vec3& gamma, const Vec3& x, const Vec3& forcing, double epsilon);

/// Forcing of each loop.
inline Vec3 forcing_trans(const Vec3& u1vec, double g) { return Vec3(0.0, 0.0, g) - u1vec; }
inline Vec3 forcing_rot(const Vec3& f2val, const Vec3& u2vec) { return -f2val - u2vec; }

/// Rate of the derivative-based estimate.
Vec3 naive_rate(const Vec3& d_hat, const Vec3& x_dot, const Vec3& forcing, double epsilon);

/// Number of integration sub-steps needed so that each sub-step is <= eps/20.
int required_substeps(double dt, double epsilon);

/// One step of the translational observer with x2 and u1vec held over the
/// step. Sub-steps internally when dt > eps/20.
HgdoState hgdo_step_trans(const HgdoState& st, const Vec3& x2, const Vec3& u1vec, double g, double dt);

/// Rotational counterpart with forcing -f2(x4) - u2vec.
HgdoState hgdo_step_rot(const HgdoState& st, const Vec3& x4, const Vec3& f2val, const Vec3& u2vec, double dt);

/// One step of the derivative-based observer with x_dot and forcing held.
Vec3 naive_hgdo_step(const Vec3& d_hat, const Vec3& x_dot, const Vec3& forcing, double epsilon, double dt);

/// First-order filtered backward difference, used by the naive form when it
/// is fed sampled measurements instead of plant truth.
class DerivativeEstimator {
public:
    DerivativeEstimator() = default;
    DerivativeEstimator(double dt, double time_constant) : dt_(dt), alpha_(dt / (time_constant + dt)) {}

    /// Feeds one sample; returns the filtered derivative estimate.
    const Vec3& update(const Vec3& x);
    const Vec3& value() const { return rate_; }

private:
    double dt_ = 1.0;
    double alpha_ = 1.0;
    bool primed_ = false;
    Vec3 last_ = Vec3::Zero();
    Vec3 rate_ = Vec3::Zero();
};

}  // namespace hgdo::obs
