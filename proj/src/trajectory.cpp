#include "hgdo/trajectory.hpp"

#include "hgdo/errors.hpp"

#include <cmath>

namespace hgdo::sim {

PositionReference lemniscate_ref(double t, const Lemniscate& shape) {
    // Reduce to one period first so that ref(t) and ref(t + period) share
    // the same phase argument.
    const double tau = std::fmod(t, shape.period);
    const double w = 2.0 * kPi / shape.period;
    const double s = std::sin(w * tau), c = std::cos(w * tau);
    // y = ay sin cos = (ay/2) sin(2 w t)
    const double s2 = std::sin(2.0 * w * tau), c2 = std::cos(2.0 * w * tau);
    const double ax = shape.amplitude_x, ay = shape.amplitude_y;

    PositionReference r;
    r.pos = {ax * s, ay * s * c, shape.height};
    r.vel = {ax * w * c, ay * w * c2, 0.0};
    r.acc = {-ax * w * w * s, -2.0 * ay * w * w * s2, 0.0};
    return r;
}

PositionReference hover_ref(double t, const Hover& shape) {
    if (!(shape.ramp > 0.0)) throw ConfigError("hover: ramp must be > 0");
    PositionReference r;
    const Vec3 delta = shape.target - shape.start;
    if (t >= shape.ramp) {
        r.pos = shape.target;
        return r;
    }
    const double u = std::max(t, 0.0) / shape.ramp;
    const double u2 = u * u, u3 = u2 * u;
    const double p = u3 * (10.0 - 15.0 * u + 6.0 * u2);
    const double dp = 30.0 * u2 * (1.0 - u) * (1.0 - u) / shape.ramp;
    const double ddp = 60.0 * u * (1.0 - u) * (1.0 - 2.0 * u) / (shape.ramp * shape.ramp);
    r.pos = shape.start + p * delta;
    r.vel = dp * delta;
    r.acc = ddp * delta;
    return r;
}

PositionReference reference_at(const Trajectory& traj, double t) {
    if (const auto* l = std::get_if<Lemniscate>(&traj)) return lemniscate_ref(t, *l);
    return hover_ref(t, std::get<Hover>(traj));
}

}  // namespace hgdo::sim
