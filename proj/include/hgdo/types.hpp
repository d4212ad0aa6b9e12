#pragma once

#include <Eigen/Dense>

#include <array>
#include <cmath>
#include <optional>
#include <string_view>

namespace hgdo {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;
using Vec4 = Eigen::Vector4d;

inline constexpr double kPi = 3.14159265358979323846;

/// The six lumped-disturbance channels: translational (m/s^2) then rotational (rad/s^2).
enum class Channel { Dx = 0, Dy, Dz, Dphi, Dtheta, Dpsi };

inline constexpr std::array<Channel, 6> kAllChannels = {Channel::Dx,   Channel::Dy,     Channel::Dz,
                                                        Channel::Dphi, Channel::Dtheta, Channel::Dpsi};

constexpr std::string_view channel_name(Channel c) {
    constexpr std::array<std::string_view, 6> names = {"dx", "dy", "dz", "dphi", "dtheta", "dpsi"};
    return names[static_cast<int>(c)];
}

inline std::optional<Channel> channel_from_name(std::string_view s) {
    for (auto c : kAllChannels)
        if (channel_name(c) == s) return c;
    return std::nullopt;
}

// Wraps an angle to (-pi, pi].
inline double wrap_pi(double a) {
    double w = std::remainder(a, 2.0 * kPi);
    if (w <= -kPi) w += 2.0 * kPi;
    return w;
}

inline bool all_finite(const Vec3& v) { return v.allFinite(); }

}  // namespace hgdo
