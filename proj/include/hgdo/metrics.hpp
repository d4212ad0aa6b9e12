// Run metrics: RMS tables, estimation-bound and gain checks, sweeps.
#pragma once

#include "hgdo/control.hpp"
#include "hgdo/simulation.hpp"

#include <json.hpp>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace hgdo::report {

inline constexpr const char* kMetricsSchema = "hgdo-metrics/1";

/// Tracking channels in table order.
inline constexpr std::array<std::string_view, 6> kTrackingChannels = {"x", "y", "z", "psi", "phi", "theta"};

using ChannelValues = std::array<double, 6>;

/// Tracking-error RMS over samples with t >= skip, order x, y, z, psi, phi, theta.
/// Throws EmptyTrace if no sample falls in the window.
ChannelValues rms_errors(const sim::SimTrace& trace, double skip = 0.0);

/// RMS of a plain series. Throws EmptyTrace on an empty series.
double rms(const std::vector<double>& values);

/// RMS of the estimation error per disturbance channel (dx .. dpsi) over t >= skip.
ChannelValues estimation_rms(const sim::SimTrace& trace, double skip = 0.0);

/// Sample variance of the disturbance estimate per channel (dx .. dpsi) over t >= skip.
ChannelValues estimate_variance(const sim::SimTrace& trace, double skip = 0.0);

/// Total variation of the applied thrust u1.
double total_variation_u1(const sim::SimTrace& trace);

struct BoundCheck {
    ChannelValues lhs{};       // trapezoid integral of |d~_j|
    ChannelValues rhs{};       // eps |d~_j(0)| + eps delta_j + slack
    ChannelValues delta{};
    ChannelValues d_tilde0{};
    std::array<bool, 6> pass{};
    double slack = 1e-3;
    bool all() const;
};

/// L1 bound on the estimation error against a precomputed delta per channel.
BoundCheck bound_check(const sim::SimTrace& trace, double eps1, double eps2, const ChannelValues& delta,
                       double slack = 1e-3);

/// Computes delta with the derivative oracle over the run horizon. Throws
/// StochasticDisturbance when the scenario has noise or stochastic disturbances,
/// NonDifferentiable when a source is gated or position-dependent.
BoundCheck bound_check(const sim::ScenarioConfig& cfg, const sim::SimTrace& trace, double slack = 1e-3);

struct GainReport {
    ctrl::GainCheck translational;
    ctrl::GainCheck rotational;
    bool all() const { return translational.all() && rotational.all(); }
};

/// Switching-gain condition per channel using d~(0) from the first sample.
GainReport gain_report(const sim::ScenarioConfig& cfg, const sim::SimTrace& trace, const ChannelValues& delta);

struct MetricsReport {
    std::string scenario;
    std::vector<std::string> labels;
    sim::RunStatus status = sim::RunStatus::Ok;
    std::string message;
    obs::Variant variant = obs::Variant::Auxiliary;
    double epsilon1 = 0.0;
    double epsilon2 = 0.0;
    double skip = 0.0;
    ChannelValues tracking_rms{};
    ChannelValues estimation_rms{};
    std::optional<BoundCheck> bounds;
    std::optional<GainReport> gains;
    sim::SaturationCounts saturation;
    double u1_total_variation = 0.0;
    sim::LyapunovReport lyapunov;
    double runtime_seconds = 0.0;
    long samples = 0;
    int substeps = 1;
};

/// Bound and gain checks are filled only when every disturbance is a
/// deterministic, ungated function of time and there is no noise.
MetricsReport build_report(const sim::ScenarioConfig& cfg, const sim::SimResult& result, double skip = 0.0);

nlohmann::json to_json(const MetricsReport& r);

struct SweepColumn {
    std::string label;
    obs::Variant variant = obs::Variant::Auxiliary;
    double epsilon = 0.0;
};

struct SweepReport {
    std::vector<SweepColumn> columns;
    std::vector<ChannelValues> tracking_rms;
    std::vector<ChannelValues> estimation_rms;
    std::vector<sim::RunStatus> status;
    /// True when every variant saw the same disturbance series; absent when
    /// the disturbance depends on the flown path.
    std::optional<bool> shared_disturbance;
};

/// Runs the base scenario once per epsilon (auxiliary observer, eps1 = eps2 = eps)
/// and optionally once without observer, all with the same seed.
SweepReport sweep(const sim::ScenarioConfig& base, const std::vector<double>& epsilons, bool smc_only,
                  double skip = 0.0, bool parallel = true);

/// Rows x, y, z, psi, phi, theta; one column per variant.
std::string format_sweep_table(const SweepReport& r);
nlohmann::json to_json(const SweepReport& r);

}  // namespace hgdo::report
