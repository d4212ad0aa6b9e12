// Scenario description and its JSON form ("hgdo-scenario/1").
#pragma once

#include "hgdo/control.hpp"
#include "hgdo/disturbance.hpp"
#include "hgdo/observer.hpp"
#include "hgdo/quad_model.hpp"
#include "hgdo/trajectory.hpp"

#include <json.hpp>

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace hgdo::sim {

inline constexpr const char* kScenarioSchema = "hgdo-scenario/1";

enum class PlantKind { Canonical, Full };

/// How the derivative-based observer obtains x_dot.
enum class DerivativeSource {
    Auto,      // plant truth when the run is noise-free, filtered difference otherwise
    Exact,     // always plant truth (noise-free derivative of the true state)
    Filtered,  // always the filtered backward difference of the measurement
};

struct ObserverConfig {
    obs::Variant variant = obs::Variant::Auxiliary;
    double epsilon1 = 0.01;
    double epsilon2 = 0.01;
    DerivativeSource derivative = DerivativeSource::Auto;
    double derivative_time_constant = 0.0;  // s; 0 means 5 * dt
};

/// Additive measurement noise powers (W) per component of x2 and x4.
struct NoiseConfig {
    Vec3 x2 = Vec3::Zero();
    Vec3 x4 = Vec3::Zero();
    bool any() const { return (x2.array() > 0.0).any() || (x4.array() > 0.0).any(); }
};

struct ScenarioConfig {
    std::string name = "scenario";
    std::vector<std::string> labels;  // free-form tags copied into every report

    model::VehicleParams vehicle;
    ctrl::SmcGains gains;
    ObserverConfig observer;
    std::vector<dist::DisturbanceSource> disturbances;
    NoiseConfig noise;
    Trajectory trajectory = Lemniscate{};

    double duration = 40.0;
    double dt = 0.002;
    int outer_divisor = 1;
    int substeps = 0;  // integration sub-steps per base step; 0 means automatic
    std::optional<std::uint64_t> seed;
    std::string rng = "mt19937_64";
    PlantKind plant = PlantKind::Canonical;
    bool allocation = false;
    std::optional<model::RigidState> initial_state;  // absent: start on the reference
    double divergence_bound = 100.0;

    /// Throws ConfigError on any inconsistency.
    void validate() const;

    /// True if any disturbance or noise draws randomness.
    bool stochastic() const;

    /// Number of base steps in the run.
    long steps() const;

    /// Integration sub-steps per base step after applying the eps/20 rule.
    int effective_substeps() const;
};

ScenarioConfig parse_scenario(const nlohmann::json& j);
ScenarioConfig load_scenario(const std::filesystem::path& path);
nlohmann::json to_json(const ScenarioConfig& cfg);

nlohmann::json signal_to_json(const dist::Signal& s);
dist::Signal signal_from_json(const nlohmann::json& j);

/// Parses HGDO_SEED if set. Throws ConfigError on a malformed value.
std::optional<std::uint64_t> seed_from_env();

/// Precedence: explicit override, then HGDO_SEED, then the config value.
void apply_seed_override(ScenarioConfig& cfg, std::optional<std::uint64_t> cli_seed);

std::string_view variant_name(obs::Variant v);

}  // namespace hgdo::sim
