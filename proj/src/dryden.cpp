#include "hgdo/dryden.hpp"

#include "hgdo/errors.hpp"
#include "hgdo/types.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>

namespace hgdo::dist {

namespace {

constexpr double kFoot = 0.3048;
constexpr double kMinAltitudeFt = 10.0;

}  // namespace

DrydenScale dryden_scale(const DrydenParams& p, DrydenAxis axis) {
    const double h = std::max(p.altitude / kFoot, kMinAltitudeFt);
    const double base = 0.177 + 0.000823 * h;
    const double sigma_w = 0.1 * std::max(p.wind_speed, 0.0);
    if (axis == DrydenAxis::Vertical) return {sigma_w, h * kFoot};
    return {sigma_w / std::pow(base, 0.4), h / std::pow(base, 1.2) * kFoot};
}

DrydenCoefficients dryden_coefficients(const DrydenParams& p, DrydenAxis axis, double dt) {
    if (!(dt > 0.0)) throw ConfigError("dryden: dt must be > 0");
    DrydenCoefficients out;
    const DrydenScale sc = dryden_scale(p, axis);
    const double v = p.airspeed > 0.0 ? p.airspeed : p.wind_speed;
    if (sc.sigma <= 0.0 || v <= 0.0) return out;

    const double tau = sc.length / v;
    out.input_variance = kPi / dt;

    // Continuous realization, then exact ZOH discretization via the
    // exponential of the augmented [A B; 0 0] matrix.
    if (axis == DrydenAxis::Longitudinal) {
        const double k = sc.sigma * std::sqrt(2.0 * sc.length / (kPi * v));
        const double ad = std::exp(-dt / tau);
        out.order = 1;
        out.a(0, 0) = ad;
        out.b(0) = k * (1.0 - ad);  // (K/tau) * tau * (1 - e^{-dt/tau})
        out.c(0) = 1.0;
        return out;
    }

    const double k = sc.sigma * std::sqrt(sc.length / (kPi * v));
    Eigen::Matrix3d aug = Eigen::Matrix3d::Zero();
    aug(0, 1) = 1.0;
    aug(1, 0) = -1.0 / (tau * tau);
    aug(1, 1) = -2.0 / tau;
    aug(1, 2) = 1.0;
    const Eigen::Matrix3d e = (aug * dt).exp();
    out.order = 2;
    out.a = e.topLeftCorner<2, 2>();
    out.b = e.topRightCorner<2, 1>();
    out.c << k / (tau * tau), k * std::sqrt(3.0) / tau;
    return out;
}

DrydenFilter::DrydenFilter(const DrydenParams& p, DrydenAxis axis, double dt)
    : coeffs_(dryden_coefficients(p, axis, dt)) {}

double DrydenFilter::step(double unit_normal) {
    if (coeffs_.order == 0) return 0.0;
    const double w = unit_normal * std::sqrt(coeffs_.input_variance);
    state_ = coeffs_.a * state_ + coeffs_.b * w;
    output_ = coeffs_.c * state_;
    return output_;
}

}  // namespace hgdo::dist
