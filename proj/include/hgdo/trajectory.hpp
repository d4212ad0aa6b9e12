// Reference trajectories for the position loop.
#pragma once

#include "hgdo/types.hpp"

#include <variant>

namespace hgdo::sim {

struct PositionReference {
    Vec3 pos = Vec3::Zero();
    Vec3 vel = Vec3::Zero();
    Vec3 acc = Vec3::Zero();
    double yaw = 0.0;
};

/// x = ax sin(w t), y = ay sin(w t) cos(w t), z = height, w = 2 pi / period.
/// Defaults give the figure-eight flown in the shipped scenarios.
struct Lemniscate {
    double amplitude_x = 0.5;
    double amplitude_y = 1.0;
    double height = 0.5;
    double period = 40.0;
};

/// Quintic (C2) ramp from `start` to `target` over `ramp` seconds, then hold.
struct Hover {
    Vec3 start = Vec3::Zero();
    Vec3 target{0.5, 0.5, 0.5};
    double ramp = 5.0;
};

using Trajectory = std::variant<Lemniscate, Hover>;

PositionReference lemniscate_ref(double t, const Lemniscate& shape = {});
PositionReference hover_ref(double t, const Hover& shape);
PositionReference reference_at(const Trajectory& traj, double t);

}  // namespace hgdo::sim
