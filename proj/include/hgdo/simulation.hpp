// Closed-loop simulation: plant, disturbances, measurement noise, observer
// and cascade controller integrated as one fixed-step system.
#pragma once

#include "hgdo/scenario_config.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace hgdo::sim {

/// Bits of SimSample::flags.
enum SampleFlag : std::uint32_t {
    kAllocationSaturated = 1u << 0,
    kThrustLimited = 1u << 1,
    kTorqueLimited = 1u << 2,
    kThrustSingular = 1u << 3,
    kThetaClamped = 1u << 4,
};

struct SimSample {
    double t = 0.0;
    model::RigidState state;     // true canonical state (x4 = H(eta) omega on the full plant)
    Vec3 x2_meas = Vec3::Zero();
    Vec3 x4_meas = Vec3::Zero();
    Vec3 ref_pos = Vec3::Zero();
    Vec3 att_ref = Vec3::Zero();  // held (phi_d, theta_d, psi_d)
    Vec3 e1 = Vec3::Zero();
    Vec3 e2 = Vec3::Zero();
    Vec3 s1 = Vec3::Zero();
    Vec3 s2 = Vec3::Zero();
    Vec3 u1vec = Vec3::Zero();   // commanded virtual translational input, m/s^2
    double u1 = 0.0;             // applied thrust, N
    Vec3 torque = Vec3::Zero();  // applied body torques, N m
    Vec4 omega = Vec4::Zero();   // rotor speeds when allocation is enabled
    std::uint32_t flags = 0;
    Vec3 d1 = Vec3::Zero();
    Vec3 d2 = Vec3::Zero();
    Vec3 d1_hat = Vec3::Zero();
    Vec3 d2_hat = Vec3::Zero();
    Vec3 d1_tilde = Vec3::Zero();
    Vec3 d2_tilde = Vec3::Zero();
    double V = 0.0;

    bool operator==(const SimSample&) const = default;
};

/// Uniformly sampled record, one sample per base step including t = 0 and t = T.
struct SimTrace {
    double dt = 0.0;
    std::vector<std::string> labels;
    std::vector<SimSample> samples;

    bool empty() const { return samples.empty(); }
    std::size_t size() const { return samples.size(); }
    bool operator==(const SimTrace&) const = default;
};

enum class RunStatus { Ok, Diverged };

struct SaturationCounts {
    long allocation = 0;
    long thrust = 0;
    long torque = 0;
    long thrust_singular = 0;
    long theta_clamp = 0;
};

/// Lyapunov-function monitor.
struct LyapunovReport {
    double kappa = 0.0;
    std::optional<double> rho;      // absent when delta is not computable (stochastic or gated)
    double v0 = 0.0;
    double peak_first_second = 0.0;
    double peak_after = 0.0;
    bool bounded = true;            // peak after 1 s below 10x peak over the first second
    long samples_outside_layer = 0; // consecutive pairs with |s_j| > mu on every channel
    long increases_outside_layer = 0;
};

struct SimResult {
    SimTrace trace;
    RunStatus status = RunStatus::Ok;
    std::string message;
    SaturationCounts saturation;
    LyapunovReport lyapunov;
    int substeps = 1;
    double runtime_seconds = 0.0;
};

/// V = 1/2 (s1.s1 + s2.s2 + d1~.d1~ + d2~.d2~).
double lyapunov_value(const Vec3& s1, const Vec3& s2, const Vec3& d1_tilde, const Vec3& d2_tilde);
inline double lyapunov_value(const SimSample& s) { return lyapunov_value(s.s1, s.s2, s.d1_tilde, s.d2_tilde); }

/// kappa = min(max L1, max L2, 1/eps1, 1/eps2).
double lyapunov_kappa(const ctrl::SmcGains& g, double eps1, double eps2);

/// Initial state used by run_scenario: the configured one, or on the reference at t = 0.
model::RigidState initial_state(const ScenarioConfig& cfg);

/// Runs one scenario. Never throws on divergence: the partial trace is returned
/// with status Diverged. Throws ConfigError for invalid configurations.
SimResult run_scenario(const ScenarioConfig& cfg);

}  // namespace hgdo::sim
