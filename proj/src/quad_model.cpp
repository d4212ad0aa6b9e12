#include "hgdo/quad_model.hpp"

#include "hgdo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hgdo::model {

void VehicleParams::validate() const {
    auto check = [](double v, const char* name) {
        if (!std::isfinite(v) || v <= 0.0)
            throw ConfigError(std::string("vehicle.") + name + " must be finite and > 0");
    };
    check(mass, "mass");
    check(inertia.x(), "inertia[0]");
    check(inertia.y(), "inertia[1]");
    check(inertia.z(), "inertia[2]");
    check(k_thrust, "k_thrust");
    check(k_torque, "k_torque");
    check(arm_length, "arm_length");
    check(gravity, "gravity");
    check(omega_max, "omega_max");
    check(cos_theta_guard, "cos_theta_guard");
}

Vec3 WrenchCommand::virtual_translational(const Vec3& eta, const VehicleParams& p) const {
    return thrust_direction(eta) * (thrust / p.mass);
}

Vec3 WrenchCommand::virtual_rotational(const VehicleParams& p) const {
    return torque.cwiseQuotient(p.inertia);
}

Mat3 rotation_matrix(const Vec3& eta) {
    const double cf = std::cos(eta[0]), sf = std::sin(eta[0]);
    const double ct = std::cos(eta[1]), st = std::sin(eta[1]);
    const double cp = std::cos(eta[2]), sp = std::sin(eta[2]);
    Mat3 r;
    r << ct * cp, sf * st * cp - cf * sp, cf * st * cp + sf * sp,
         ct * sp, sf * st * sp + cf * cp, cf * st * sp - sf * cp,
         -st,     sf * ct,                cf * ct;
    return r;
}

Vec3 thrust_direction(const Vec3& eta) {
    const double cf = std::cos(eta[0]), sf = std::sin(eta[0]);
    const double ct = std::cos(eta[1]), st = std::sin(eta[1]);
    const double cp = std::cos(eta[2]), sp = std::sin(eta[2]);
    return {cf * st * cp + sf * sp, cf * st * sp - sf * cp, cf * ct};
}

Mat3 euler_rate_matrix(const Vec3& eta, double cos_theta_guard) {
    const double ct = std::cos(eta[1]);
    if (!(std::abs(ct) > cos_theta_guard)) throw GimbalLock(eta[1]);
    const double cf = std::cos(eta[0]), sf = std::sin(eta[0]);
    const double tt = std::tan(eta[1]);
    Mat3 h;
    h << 1.0, sf * tt,  cf * tt,
         0.0, cf,       -sf,
         0.0, sf / ct,  cf / ct;
    return h;
}

WrenchCommand rotor_wrench(const RotorSpeeds& omega, const VehicleParams& p) {
    const Vec4 sq = omega.omega.cwiseAbs2();
    const double lkt = p.arm_length * p.k_thrust;
    const double lkq = p.arm_length * p.k_torque;
    WrenchCommand w;
    w.thrust = p.k_thrust * sq.sum();
    w.torque = Vec3(lkt * (sq[3] - sq[1]), lkt * (sq[2] - sq[0]), lkq * (sq[0] - sq[1] + sq[2] - sq[3]));
    return w;
}

AllocationResult allocate_rotors(const WrenchCommand& w, const VehicleParams& p) {
    // Exact inverse of rotor_wrench.
    const double a = w.thrust / (4.0 * p.k_thrust);
    const double b = 1.0 / (2.0 * p.arm_length * p.k_thrust);
    const double c = 1.0 / (4.0 * p.arm_length * p.k_torque);
    const Vec3& t = w.torque;
    Vec4 sq(a - b * t.y() + c * t.z(),
            a - b * t.x() - c * t.z(),
            a + b * t.y() + c * t.z(),
            a + b * t.x() - c * t.z());

    AllocationResult out;
    const double max_sq = p.omega_max * p.omega_max;
    for (int i = 0; i < 4; ++i) {
        if (sq[i] < 0.0) {
            sq[i] = 0.0;
            out.saturated = true;
        } else if (sq[i] > max_sq) {
            sq[i] = max_sq;
            out.saturated = true;
        }
        out.speeds.omega[i] = std::sqrt(sq[i]);
    }
    return out;
}

Vec3 max_torque(const VehicleParams& p) {
    const double sq = p.omega_max * p.omega_max;
    const double roll_pitch = p.arm_length * p.k_thrust * sq;
    return {roll_pitch, roll_pitch, 2.0 * p.arm_length * p.k_torque * sq};
}

Vec3 f2(const Vec3& x4, const VehicleParams& p) {
    const Vec3& j = p.inertia;
    return {(j.y() - j.z()) / j.x() * x4.y() * x4.z(),
            (j.z() - j.x()) / j.y() * x4.x() * x4.z(),
            (j.x() - j.y()) / j.z() * x4.x() * x4.y()};
}

RigidState canonical_deriv(const RigidState& s, const Vec3& u1vec, const Vec3& u2vec, const Vec3& d1,
                           const Vec3& d2, const VehicleParams& p) {
    RigidState ds;
    ds.x1 = s.x2;
    ds.x2 = -p.gravity_vector() + u1vec + d1;
    ds.x3 = s.x4;
    ds.x4 = f2(s.x4, p) + u2vec + d2;
    return ds;
}

BodyState full_nonlinear_deriv(const BodyState& s, const WrenchCommand& w, const Vec3& force_body,
                               const Vec3& torque_body, const VehicleParams& p) {
    const Mat3 h = euler_rate_matrix(s.attitude, p.cos_theta_guard);
    const Mat3 r = rotation_matrix(s.attitude);
    const Vec3 thrust_body(0.0, 0.0, w.thrust);
    const Vec3& om = s.body_rates;
    const Vec3 j_om = p.inertia.cwiseProduct(om);

    BodyState ds;
    ds.position = s.velocity;
    ds.velocity = -p.gravity_vector() + r * (thrust_body + force_body) / p.mass;
    ds.attitude = h * om;
    ds.body_rates = (-om.cross(j_om) + w.torque + torque_body).cwiseQuotient(p.inertia);
    return ds;
}

}  // namespace hgdo::model
