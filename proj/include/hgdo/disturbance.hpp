// Disturbance and noise signals.
//
// A Signal is an immutable expression tree over scalar time signals. A
// DisturbanceSource maps one Signal onto one or more of the six lumped
// disturbance channels. At run time a DisturbanceField instantiates the
// stochastic leaves (Dryden filters, white noise), each with its own RNG
// stream keyed by the source name, and holds their samples constant over one
// base step.
#pragma once

#include "hgdo/dryden.hpp"
#include "hgdo/types.hpp"

#include <cstdint>
#include <memory>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace hgdo::dist {

/// The composite multi-sine test disturbance (max frequency 4 Hz).
double composite_sinusoid(double t);
double composite_sinusoid_rate(double t);

/// Upper bound of |composite_sinusoid| from the triangle inequality.
inline constexpr double kCompositeBound = 0.625;

/// Zero-mean Gaussian sample with variance power/dt. power == 0 returns 0
/// without consuming randomness.
double white_noise(double power, double dt, std::mt19937_64& rng);

class Signal;

namespace node {
struct Zero {};
struct Constant {
    double value = 0.0;
};
/// amplitude * sin(2 pi frequency t + phase) + offset
struct Sine {
    double amplitude = 1.0;
    double frequency = 1.0;
    double phase = 0.0;
    double offset = 0.0;
};
struct CompositeSinusoid {};
struct WhiteNoise {
    double power = 0.0;
};
struct Dryden {
    DrydenParams params;
    DrydenAxis axis = DrydenAxis::Longitudinal;
};
/// Altitude-dependent ground-effect proxy: c_g * clamp(1 - z / z0, 0, 1). Synthetic.
struct GroundEffect {
    double c_g = 0.3;
    double z0 = 0.3;
};
struct Scaled {
    double gain = 1.0;
    std::shared_ptr<const Signal> inner;
};
struct Sum {
    std::vector<Signal> terms;
};
}  // namespace node

class Signal {
public:
    using Node = std::variant<node::Zero, node::Constant, node::Sine, node::CompositeSinusoid, node::WhiteNoise,
                              node::Dryden, node::GroundEffect, node::Scaled, node::Sum>;

    Signal() = default;
    Signal(Node n) : node_(std::move(n)) {}

    static Signal zero() { return Signal(node::Zero{}); }
    static Signal constant(double c) { return Signal(node::Constant{c}); }
    static Signal sine(double amplitude, double frequency, double phase = 0.0, double offset = 0.0) {
        return Signal(node::Sine{amplitude, frequency, phase, offset});
    }
    static Signal composite() { return Signal(node::CompositeSinusoid{}); }
    static Signal white(double power) { return Signal(node::WhiteNoise{power}); }
    static Signal dryden(const DrydenParams& p, DrydenAxis axis) { return Signal(node::Dryden{p, axis}); }
    static Signal ground_effect(double c_g, double z0) { return Signal(node::GroundEffect{c_g, z0}); }
    static Signal scaled(Signal s, double gain) {
        return Signal(node::Scaled{gain, std::make_shared<const Signal>(std::move(s))});
    }
    static Signal sum(std::vector<Signal> terms) { return Signal(node::Sum{std::move(terms)}); }

    const Node& node() const { return node_; }

    /// True if any leaf draws randomness.
    bool stochastic() const;
    /// True if any leaf reads the vehicle position.
    bool state_dependent() const;
    /// Deterministic, position-independent signals are pure functions of t.
    bool time_only() const { return !stochastic() && !state_dependent(); }

    /// Evaluates a time-only signal. Throws NonDifferentiable otherwise.
    double eval(double t) const;

    /// Validates parameters (non-negative power, wind speed, etc.). Throws ConfigError.
    void validate() const;

private:
    Node node_ = node::Zero{};
};

/// Axis-aligned box for position gating: the source is active only inside.
struct GateBox {
    Vec3 lo = Vec3::Constant(-1e9);
    Vec3 hi = Vec3::Constant(1e9);
    bool contains(const Vec3& p) const { return (p.array() >= lo.array()).all() && (p.array() <= hi.array()).all(); }
};

struct DisturbanceSource {
    std::string name;
    Signal signal;
    std::vector<Channel> channels;
    std::optional<GateBox> gate;
};

struct DisturbanceSample {
    Vec3 d1 = Vec3::Zero();  // m/s^2
    Vec3 d2 = Vec3::Zero();  // rad/s^2
    double t = 0.0;
};

/// Seed for an independent stream keyed by a name.
std::uint64_t stream_seed(std::uint64_t base_seed, std::string_view name);

/// Runtime instance of a set of disturbance sources.
class DisturbanceField {
public:
    DisturbanceField() = default;
    DisturbanceField(const std::vector<DisturbanceSource>& sources, std::uint64_t seed, double dt);

    /// Draws the next held sample of every stochastic leaf. Call once per base step.
    void advance();

    /// Disturbance at time t for a vehicle at `position`. Deterministic leaves
    /// are evaluated at t; stochastic leaves return their held sample.
    DisturbanceSample sample(double t, const Vec3& position) const;

    bool stochastic() const;

private:
    struct Leaf {
        std::mt19937_64 rng;
        std::variant<DrydenFilter, double> process;  // Dryden filter or white-noise power
        double dt = 0.0;
        double held = 0.0;
        void draw();
    };
    struct Compiled {
        Signal signal;
        std::vector<Channel> channels;
        std::optional<GateBox> gate;
        std::vector<std::size_t> leaves;  // indices into leaves_, in tree order
    };

    double value(const Signal& s, double t, const Vec3& pos, const std::vector<std::size_t>& leaves,
                 std::size_t& cursor) const;
    void collect(const Signal& s, const std::string& source, std::uint64_t seed, double dt,
                 std::vector<std::size_t>& out);

    std::vector<Compiled> sources_;
    std::vector<Leaf> leaves_;
};

/// Total variation of a time-only signal over [0, horizon]: integral of |d'(t)|,
/// central differences on a grid of step dt and the trapezoid rule.
/// Throws NonDifferentiable for stochastic or position-dependent signals.
double derivative_l1(const Signal& s, double horizon, double dt);

/// Single-threaded reference of derivative_l1 (identical grid, sequential sum).
double derivative_l1_serial(const Signal& s, double horizon, double dt);

/// Per-channel total variation of the summed time-only sources. Gated sources
/// are rejected because their effective value depends on the trajectory.
std::array<double, 6> channel_derivative_l1(const std::vector<DisturbanceSource>& sources, double horizon,
                                            double dt);

/// Sum of all sources acting on channel c, as a single Signal.
Signal channel_signal(const std::vector<DisturbanceSource>& sources, Channel c);

}  // namespace hgdo::dist
