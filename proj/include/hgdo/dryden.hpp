// Dryden wind turbulence, MIL-F-8785C low-altitude form.
//
// Each axis is an independent rational shaping filter driven by white noise:
//   longitudinal  H_u(s) = sigma_u sqrt(2 L_u / (pi V)) / (1 + (L_u/V) s)
//   lateral       H_v(s) = sigma_v sqrt(L_v / (pi V)) (1 + sqrt(3) (L_v/V) s) / (1 + (L_v/V) s)^2
//   vertical      same form as lateral with w quantities.
// The continuous filters are discretized exactly under a zero-order hold on
// the input. The input sample has variance pi/dt, so for dt much smaller than
// L/V the stationary output variance approaches sigma^2.
#pragma once

#include <Eigen/Dense>

#include <random>

namespace hgdo::dist {

enum class DrydenAxis { Longitudinal, Lateral, Vertical };

struct DrydenParams {
    double wind_speed = 1.11;  // m/s, wind speed at 20 ft (W20); 4 km/h default
    double altitude = 0.5;     // m above ground; clamped below to 10 ft
    double airspeed = 0.0;     // m/s; 0 means "use wind_speed"
};

/// Turbulence intensity and scale length (SI units) for one axis.
struct DrydenScale {
    double sigma = 0.0;   // m/s
    double length = 0.0;  // m
};

DrydenScale dryden_scale(const DrydenParams& p, DrydenAxis axis);

/// Discrete shaping filter: x' = A x + B w, y = C x, w ~ N(0, input_variance).
struct DrydenCoefficients {
    Eigen::Matrix2d a = Eigen::Matrix2d::Zero();
    Eigen::Vector2d b = Eigen::Vector2d::Zero();
    Eigen::RowVector2d c = Eigen::RowVector2d::Zero();
    double input_variance = 0.0;
    int order = 0;  // 0 when the filter is disabled (zero wind)
};

DrydenCoefficients dryden_coefficients(const DrydenParams& p, DrydenAxis axis, double dt);

class DrydenFilter {
public:
    DrydenFilter() = default;
    DrydenFilter(const DrydenParams& p, DrydenAxis axis, double dt);

    /// Advances one sample with a standard-normal draw and returns the gust velocity (m/s).
    double step(double unit_normal);

    template <class Rng>
    double step(Rng& rng) {
        if (coeffs_.order == 0) return 0.0;
        return step(normal_(rng));
    }

    double output() const { return output_; }
    const DrydenCoefficients& coefficients() const { return coeffs_; }

private:
    DrydenCoefficients coeffs_;
    Eigen::Vector2d state_ = Eigen::Vector2d::Zero();
    double output_ = 0.0;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace hgdo::dist
