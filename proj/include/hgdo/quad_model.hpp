// Quadrotor rigid-body model: Euler-angle kinematics, rotor wrench, motor
// mixing and the second-order canonical form used by observer and controller.
#pragma once

#include "hgdo/types.hpp"

namespace hgdo::model {

/// Vehicle constants. Defaults are the 28 g nano-quadrotor used throughout
/// the shipped scenarios.
struct VehicleParams {
    double mass = 0.028;                       // kg
    Vec3 inertia{1.4e-5, 1.4e-5, 2.17e-5};     // kg m^2, diagonal of J
    double k_thrust = 2.88e-8;                 // N s^2
    double k_torque = 7.24e-10;                // N m s^2
    double arm_length = 0.092;                 // m
    double gravity = 9.81;                     // m/s^2
    double omega_max = 2500.0;                 // rad/s, per rotor
    double cos_theta_guard = 1e-6;             // |cos theta| below this is gimbal lock

    /// Throws ConfigError if any physical constant is non-positive or non-finite.
    void validate() const;

    Vec3 gravity_vector() const { return {0.0, 0.0, gravity}; }
};

/// Canonical state: x1 position, x2 velocity, x3 Euler angles (phi, theta, psi),
/// x4 Euler-angle rates. Also used to carry its own time derivative.
struct RigidState {
    Vec3 x1 = Vec3::Zero();
    Vec3 x2 = Vec3::Zero();
    Vec3 x3 = Vec3::Zero();
    Vec3 x4 = Vec3::Zero();

    bool finite() const { return x1.allFinite() && x2.allFinite() && x3.allFinite() && x4.allFinite(); }
    bool operator==(const RigidState&) const = default;
};

/// Rigid-body state for the full Newton-Euler plant; angular velocity is in the body frame.
struct BodyState {
    Vec3 position = Vec3::Zero();
    Vec3 velocity = Vec3::Zero();
    Vec3 attitude = Vec3::Zero();
    Vec3 body_rates = Vec3::Zero();
};

struct RotorSpeeds {
    Vec4 omega = Vec4::Zero();  // rad/s, magnitudes
};

/// Total thrust u1 (N) and body torques (u2, u3, u4) (N m).
struct WrenchCommand {
    double thrust = 0.0;
    Vec3 torque = Vec3::Zero();

    /// u1-vector = b(eta) * u1 / m, in m/s^2.
    Vec3 virtual_translational(const Vec3& eta, const VehicleParams& p) const;
    /// u2-vector = (u2/Jx, u3/Jy, u4/Jz), in rad/s^2.
    Vec3 virtual_rotational(const VehicleParams& p) const;
};

struct AllocationResult {
    RotorSpeeds speeds;
    bool saturated = false;  // some Omega_i^2 was negative or Omega_i exceeded omega_max
};

/// Body-to-inertial direction cosine matrix, ZYX (yaw-pitch-roll) sequence.
Mat3 rotation_matrix(const Vec3& eta);

/// Thrust direction b(eta): third column of the rotation matrix.
Vec3 thrust_direction(const Vec3& eta);

/// H(eta) with eta_dot = H * omega_body. Throws GimbalLock when |cos theta| <= guard.
Mat3 euler_rate_matrix(const Vec3& eta, double cos_theta_guard = 1e-6);

WrenchCommand rotor_wrench(const RotorSpeeds& omega, const VehicleParams& p);

/// Inverse of rotor_wrench. Negative squared speeds are clamped to zero and
/// speeds above omega_max are clamped; either case sets `saturated`.
AllocationResult allocate_rotors(const WrenchCommand& w, const VehicleParams& p);

/// Torque limits reachable with one rotor pair at omega_max and the other stopped.
Vec3 max_torque(const VehicleParams& p);

/// Gyroscopic coupling of the canonical rotational channel.
Vec3 f2(const Vec3& x4, const VehicleParams& p);

/// Canonical small-angle dynamics:
///   x1' = x2, x2' = -g + u1vec + d1, x3' = x4, x4' = f2(x4) + u2vec + d2.
RigidState canonical_deriv(const RigidState& s, const Vec3& u1vec, const Vec3& u2vec, const Vec3& d1,
                           const Vec3& d2, const VehicleParams& p);

/// Full Newton-Euler dynamics. `force_body` (N) and `torque_body` (N m) are the
/// disturbance force and torque expressed in the body frame.
/// Throws GimbalLock through euler_rate_matrix.
BodyState full_nonlinear_deriv(const BodyState& s, const WrenchCommand& w, const Vec3& force_body,
                               const Vec3& torque_body, const VehicleParams& p);

}  // namespace hgdo::model
