// Cascaded sliding-mode trajectory controller.
//
// Outer loop (position) produces the virtual acceleration u1vec; attitude
// extraction turns it into (phi_d, theta_d, u1); the inner loop (attitude)
// produces body torques. Both loops use the boundary-layer saturation in
// place of sgn and subtract the observer's disturbance estimate.
#pragma once

#include "hgdo/quad_model.hpp"
#include "hgdo/trajectory.hpp"
#include "hgdo/types.hpp"

#include <array>

namespace hgdo::ctrl {

struct SmcGains {
    Vec3 lambda1{0.3580, 0.5058, 0.3405};
    Vec3 lambda2{0.3580, 0.5058, 0.3405};
    Vec3 k1{5.2608, 5.0176, 5.4351};
    Vec3 k2{8.0568, 13.6547, 1.8914};
    Vec3 L1{2.6304, 2.5088, 2.7176};  // diagonal
    Vec3 L2{4.0284, 6.8274, 0.9457};  // diagonal
    double mu = 0.05;
    double u1_max = 0.0;         // N; <= 0 means 2 m g
    Vec3 tau_max = Vec3::Zero(); // N m; zero entries mean "from omega_max"
    double uz_min = 2.0;         // m/s^2

    void validate() const;
    /// Copy with u1_max and tau_max defaults filled in from the vehicle.
    SmcGains resolved(const model::VehicleParams& p) const;
};

struct AttitudeSetpoint {
    Vec3 angles = Vec3::Zero();  // (phi_d, theta_d, psi_d)
    Vec3 rate = Vec3::Zero();    // finite-difference estimate
    Vec3 accel = Vec3::Zero();   // finite-difference estimate
    double thrust = 0.0;         // u1, N
};

/// s = e_dot + lambda .* e
Vec3 sliding_surface(const Vec3& e, const Vec3& e_dot, const Vec3& lambda);

/// Componentwise clip(s / mu, -1, 1).
Vec3 sat(const Vec3& s, double mu);

struct OuterLoopOutput {
    Vec3 u1vec = Vec3::Zero();
    Vec3 e1 = Vec3::Zero();
    Vec3 s1 = Vec3::Zero();
    bool limited = false;  // thrust magnitude hit u1_max
};

/// u1vec = x1d'' + g - d1_hat + lambda1 .* e1' + k1 .* sat(s1) + L1 s1, then the
/// magnitude is limited so that m * |u1vec| <= u1_max. Expects resolved gains.
OuterLoopOutput outer_loop(const Vec3& x1, const Vec3& x2, const sim::PositionReference& ref, const Vec3& d1_hat,
                           const SmcGains& gains, const model::VehicleParams& p);

/// Rescales u so that |u| <= a_max, clipping u_z first and shrinking the
/// horizontal part. Returns true if anything changed.
bool limit_virtual_input(Vec3& u, double a_max);

/// theta_d = atan((ux cos psi + uy sin psi) / uz),
/// phi_d   = atan(cos theta_d (ux sin psi - uy cos psi) / uz),
/// u1      = m uz / (cos phi_d cos theta_d).
/// Throws ThrustSingularity when uz < uz_min.
AttitudeSetpoint extract_attitude(const Vec3& u, double psi_d, double mass, double uz_min);

struct InnerLoopOutput {
    Vec3 torque = Vec3::Zero();  // N m
    Vec3 e2 = Vec3::Zero();
    Vec3 s2 = Vec3::Zero();
    bool limited = false;
};

/// u2vec = x3d'' - f2(x4) - d2_hat + lambda2 .* e2' + k2 .* sat(s2) + L2 s2;
/// torque = J .* u2vec clipped to +-tau_max. Attitude errors are wrapped to (-pi, pi].
InnerLoopOutput inner_loop(const Vec3& x3, const Vec3& x4, const AttitudeSetpoint& sp, const Vec3& d2_hat,
                           const Vec3& f2val, const SmcGains& gains, const model::VehicleParams& p);

struct GainCheck {
    std::array<double, 3> threshold{};
    std::array<bool, 3> pass{};
    bool all() const { return pass[0] && pass[1] && pass[2]; }
};

/// k_j > eps (|d_tilde0_j| + delta_j) per channel.
GainCheck gain_check(const Vec3& k, double epsilon, const Vec3& d_tilde0, const Vec3& delta);

/// Stateful cascade: outer loop at a slower rate with zero-order hold of the
/// attitude setpoint, whose first and second derivatives are estimated by
/// low-passed backward differences.
class CascadeController {
public:
    CascadeController(const SmcGains& gains, const model::VehicleParams& p, double dt_outer);

    /// Runs the outer loop and attitude extraction; updates the held setpoint.
    void update_outer(const Vec3& x1, const Vec3& x2, const sim::PositionReference& ref, const Vec3& d1_hat);

    /// Runs the inner loop against the held setpoint.
    InnerLoopOutput update_inner(const Vec3& x3, const Vec3& x4, const Vec3& d2_hat) const;

    const AttitudeSetpoint& setpoint() const { return setpoint_; }
    const OuterLoopOutput& outer() const { return outer_; }
    const SmcGains& gains() const { return gains_; }
    bool thrust_singular() const { return thrust_singular_; }

private:
    SmcGains gains_;
    model::VehicleParams params_;
    double dt_outer_;
    double alpha_;
    bool primed_ = false;
    bool thrust_singular_ = false;
    OuterLoopOutput outer_;
    AttitudeSetpoint setpoint_;
};

}  // namespace hgdo::ctrl
