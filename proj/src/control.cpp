#include "hgdo/control.hpp"

#include "hgdo/errors.hpp"

#include <algorithm>
#include <cmath>

namespace hgdo::ctrl {

void SmcGains::validate() const {
    auto positive = [](const Vec3& v, const char* name) {
        if (!v.allFinite() || (v.array() <= 0.0).any())
            throw ConfigError(std::string("gains.") + name + " entries must be finite and > 0");
    };
    positive(lambda1, "lambda1");
    positive(lambda2, "lambda2");
    positive(L1, "L1");
    positive(L2, "L2");
    if (!k1.allFinite() || (k1.array() < 0.0).any()) throw ConfigError("gains.k1 entries must be >= 0");
    if (!k2.allFinite() || (k2.array() < 0.0).any()) throw ConfigError("gains.k2 entries must be >= 0");
    if (!(mu > 0.0)) throw ConfigError("gains.mu must be > 0");
    if (!(uz_min > 0.0)) throw ConfigError("gains.uz_min must be > 0");
    if (!std::isfinite(u1_max)) throw ConfigError("gains.u1_max must be finite");
    if (!tau_max.allFinite() || (tau_max.array() < 0.0).any()) throw ConfigError("gains.tau_max must be >= 0");
}

SmcGains SmcGains::resolved(const model::VehicleParams& p) const {
    SmcGains g = *this;
    if (g.u1_max <= 0.0) g.u1_max = 2.0 * p.mass * p.gravity;
    const Vec3 reach = model::max_torque(p);
    for (int i = 0; i < 3; ++i)
        if (g.tau_max[i] <= 0.0) g.tau_max[i] = reach[i];
    return g;
}

Vec3 sliding_surface(const Vec3& e, const Vec3& e_dot, const Vec3& lambda) { return e_dot + lambda.cwiseProduct(e); }

Vec3 sat(const Vec3& s, double mu) { return (s / mu).cwiseMax(-1.0).cwiseMin(1.0); }

bool limit_virtual_input(Vec3& u, double a_max) {
    if (u.norm() <= a_max) return false;
    u.z() = std::min(u.z(), a_max);
    const double h = std::hypot(u.x(), u.y());
    const double h_max = std::sqrt(std::max(a_max * a_max - u.z() * u.z(), 0.0));
    if (h > h_max) {
        const double scale = h > 0.0 ? h_max / h : 0.0;
        u.x() *= scale;
        u.y() *= scale;
    }
    return true;
}

OuterLoopOutput outer_loop(const Vec3& x1, const Vec3& x2, const sim::PositionReference& ref, const Vec3& d1_hat,
                           const SmcGains& gains, const model::VehicleParams& p) {
    OuterLoopOutput out;
    out.e1 = ref.pos - x1;
    const Vec3 e1_dot = ref.vel - x2;
    out.s1 = sliding_surface(out.e1, e1_dot, gains.lambda1);
    out.u1vec = ref.acc + p.gravity_vector() - d1_hat + gains.lambda1.cwiseProduct(e1_dot) +
                gains.k1.cwiseProduct(sat(out.s1, gains.mu)) + gains.L1.cwiseProduct(out.s1);
    out.limited = limit_virtual_input(out.u1vec, gains.u1_max / p.mass);
    return out;
}

AttitudeSetpoint extract_attitude(const Vec3& u, double psi_d, double mass, double uz_min) {
    if (!(u.z() >= uz_min)) throw ThrustSingularity(u.z());
    const double cp = std::cos(psi_d), sp = std::sin(psi_d);
    AttitudeSetpoint sp_out;
    const double theta = std::atan((u.x() * cp + u.y() * sp) / u.z());
    const double phi = std::atan(std::cos(theta) * (u.x() * sp - u.y() * cp) / u.z());
    sp_out.angles = {phi, theta, psi_d};
    sp_out.thrust = mass * u.z() / (std::cos(phi) * std::cos(theta));
    return sp_out;
}

InnerLoopOutput inner_loop(const Vec3& x3, const Vec3& x4, const AttitudeSetpoint& sp, const Vec3& d2_hat,
                           const Vec3& f2val, const SmcGains& gains, const model::VehicleParams& p) {
    InnerLoopOutput out;
    for (int i = 0; i < 3; ++i) out.e2[i] = wrap_pi(sp.angles[i] - x3[i]);
    const Vec3 e2_dot = sp.rate - x4;
    out.s2 = sliding_surface(out.e2, e2_dot, gains.lambda2);
    const Vec3 u2vec = sp.accel - f2val - d2_hat + gains.lambda2.cwiseProduct(e2_dot) +
                       gains.k2.cwiseProduct(sat(out.s2, gains.mu)) + gains.L2.cwiseProduct(out.s2);
    const Vec3 raw = p.inertia.cwiseProduct(u2vec);
    out.torque = raw.cwiseMax(-gains.tau_max).cwiseMin(gains.tau_max);
    out.limited = (out.torque - raw).cwiseAbs().maxCoeff() > 0.0;
    return out;
}

GainCheck gain_check(const Vec3& k, double epsilon, const Vec3& d_tilde0, const Vec3& delta) {
    GainCheck gc;
    for (int j = 0; j < 3; ++j) {
        gc.threshold[j] = epsilon * (std::abs(d_tilde0[j]) + delta[j]);
        gc.pass[j] = k[j] > gc.threshold[j];
    }
    return gc;
}

// ---------------------------------------------------------------------------

CascadeController::CascadeController(const SmcGains& gains, const model::VehicleParams& p, double dt_outer)
    : gains_(gains.resolved(p)), params_(p), dt_outer_(dt_outer), alpha_(dt_outer / (4.0 * dt_outer + dt_outer)) {
    gains_.validate();
}

void CascadeController::update_outer(const Vec3& x1, const Vec3& x2, const sim::PositionReference& ref,
                                     const Vec3& d1_hat) {
    outer_ = outer_loop(x1, x2, ref, d1_hat, gains_, params_);
    thrust_singular_ = false;
    if (outer_.u1vec.z() < gains_.uz_min) {
        thrust_singular_ = true;
        outer_.u1vec.z() = gains_.uz_min;
        limit_virtual_input(outer_.u1vec, gains_.u1_max / params_.mass);
    }
    AttitudeSetpoint next = extract_attitude(outer_.u1vec, ref.yaw, params_.mass, gains_.uz_min);

    if (!primed_) {
        next.rate.setZero();
        next.accel.setZero();
        primed_ = true;
    } else {
        Vec3 raw_rate;
        for (int i = 0; i < 3; ++i) raw_rate[i] = wrap_pi(next.angles[i] - setpoint_.angles[i]) / dt_outer_;
        next.rate = setpoint_.rate + alpha_ * (raw_rate - setpoint_.rate);
        const Vec3 raw_accel = (next.rate - setpoint_.rate) / dt_outer_;
        next.accel = setpoint_.accel + alpha_ * (raw_accel - setpoint_.accel);
    }
    setpoint_ = next;
}

InnerLoopOutput CascadeController::update_inner(const Vec3& x3, const Vec3& x4, const Vec3& d2_hat) const {
    return inner_loop(x3, x4, setpoint_, d2_hat, model::f2(x4, params_), gains_, params_);
}

}  // namespace hgdo::ctrl
