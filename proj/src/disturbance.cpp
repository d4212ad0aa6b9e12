#include "hgdo/disturbance.hpp"

#include "hgdo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace hgdo::dist {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9E3779B97F4A7C15ULL;
    x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
    x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
    return x ^ (x >> 31);
}

std::uint64_t fnv1a64(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

// Step used for the central difference, capped by the integration grid.
double difference_step(double dt) { return std::min(dt, 1e-5); }

double rate(const Signal& s, double t, double h) { return (s.eval(t + h) - s.eval(t - h)) / (2.0 * h); }

void require_time_only(const Signal& s) {
    if (s.stochastic())
        throw NonDifferentiable("derivative_l1: stochastic signals have no derivative bound");
    if (s.state_dependent())
        throw NonDifferentiable("derivative_l1: signal depends on vehicle position, not on time alone");
}

}  // namespace

double composite_sinusoid(double t) {
    return 0.05 * (std::sin(8.0 * kPi * t) + std::sin(2.5 * kPi * (t - 3.0)) + 1.5 * std::sin(2.0 * kPi * (t + 7.0)) +
                   2.0 * std::sin(0.4 * kPi * (t - 9.0)) + std::sin(0.2 * kPi * t) +
                   0.5 * std::sin(0.08 * kPi * (t + 1.0)) + std::sin(0.07 * kPi * (t + 1.5)) +
                   0.5 * std::sin(0.05 * kPi * (t + 2.0)) + 4.0);
}

double composite_sinusoid_rate(double t) {
    return 0.05 * kPi *
           (8.0 * std::cos(8.0 * kPi * t) + 2.5 * std::cos(2.5 * kPi * (t - 3.0)) +
            1.5 * 2.0 * std::cos(2.0 * kPi * (t + 7.0)) + 2.0 * 0.4 * std::cos(0.4 * kPi * (t - 9.0)) +
            0.2 * std::cos(0.2 * kPi * t) + 0.5 * 0.08 * std::cos(0.08 * kPi * (t + 1.0)) +
            0.07 * std::cos(0.07 * kPi * (t + 1.5)) + 0.5 * 0.05 * std::cos(0.05 * kPi * (t + 2.0)));
}

double white_noise(double power, double dt, std::mt19937_64& rng) {
    if (power == 0.0) return 0.0;
    std::normal_distribution<double> n(0.0, std::sqrt(power / dt));
    return n(rng);
}

bool Signal::stochastic() const {
    return std::visit(overloaded{
                          [](const node::WhiteNoise&) { return true; },
                          [](const node::Dryden&) { return true; },
                          [](const node::Scaled& s) { return s.inner->stochastic(); },
                          [](const node::Sum& s) {
                              return std::any_of(s.terms.begin(), s.terms.end(),
                                                 [](const Signal& x) { return x.stochastic(); });
                          },
                          [](const auto&) { return false; },
                      },
                      node_);
}

bool Signal::state_dependent() const {
    return std::visit(overloaded{
                          [](const node::GroundEffect&) { return true; },
                          [](const node::Scaled& s) { return s.inner->state_dependent(); },
                          [](const node::Sum& s) {
                              return std::any_of(s.terms.begin(), s.terms.end(),
                                                 [](const Signal& x) { return x.state_dependent(); });
                          },
                          [](const auto&) { return false; },
                      },
                      node_);
}

double Signal::eval(double t) const {
    return std::visit(
        overloaded{
            [](const node::Zero&) { return 0.0; },
            [](const node::Constant& c) { return c.value; },
            [t](const node::Sine& s) { return s.amplitude * std::sin(2.0 * kPi * s.frequency * t + s.phase) + s.offset; },
            [t](const node::CompositeSinusoid&) { return composite_sinusoid(t); },
            [t](const node::Scaled& s) { return s.gain * s.inner->eval(t); },
            [t](const node::Sum& s) {
                double acc = 0.0;
                for (const auto& x : s.terms) acc += x.eval(t);
                return acc;
            },
            [](const auto&) -> double {
                throw NonDifferentiable("Signal::eval: signal is not a pure function of time");
            },
        },
        node_);
}

void Signal::validate() const {
    std::visit(overloaded{
                   [](const node::WhiteNoise& w) {
                       if (!(w.power >= 0.0)) throw ConfigError("white_noise: power must be >= 0");
                   },
                   [](const node::Dryden& d) {
                       if (!(d.params.wind_speed >= 0.0)) throw ConfigError("dryden: wind_speed must be >= 0");
                       if (!(d.params.altitude >= 0.0)) throw ConfigError("dryden: altitude must be >= 0");
                       if (!(d.params.airspeed >= 0.0)) throw ConfigError("dryden: airspeed must be >= 0");
                   },
                   [](const node::GroundEffect& g) {
                       if (!(g.z0 > 0.0)) throw ConfigError("ground_effect: z0 must be > 0");
                   },
                   [](const node::Scaled& s) {
                       if (!std::isfinite(s.gain)) throw ConfigError("scaled: gain must be finite");
                       s.inner->validate();
                   },
                   [](const node::Sum& s) {
                       for (const auto& x : s.terms) x.validate();
                   },
                   [](const auto&) {},
               },
               node_);
}

std::uint64_t stream_seed(std::uint64_t base_seed, std::string_view name) {
    return splitmix64(base_seed ^ splitmix64(fnv1a64(name)));
}

// ---------------------------------------------------------------------------

void DisturbanceField::Leaf::draw() {
    if (auto* f = std::get_if<DrydenFilter>(&process))
        held = f->step(rng);
    else
        held = white_noise(std::get<double>(process), dt, rng);
}

DisturbanceField::DisturbanceField(const std::vector<DisturbanceSource>& sources, std::uint64_t seed, double dt) {
    for (const auto& src : sources) {
        Compiled c{src.signal, src.channels, src.gate, {}};
        collect(src.signal, src.name, seed, dt, c.leaves);
        sources_.push_back(std::move(c));
    }
}

void DisturbanceField::collect(const Signal& s, const std::string& source, std::uint64_t seed, double dt,
                               std::vector<std::size_t>& out) {
    std::visit(overloaded{
                   [&](const node::WhiteNoise& w) {
                       Leaf leaf;
                       leaf.rng.seed(stream_seed(seed, source + "#" + std::to_string(out.size())));
                       leaf.process = w.power;
                       leaf.dt = dt;
                       out.push_back(leaves_.size());
                       leaves_.push_back(std::move(leaf));
                   },
                   [&](const node::Dryden& d) {
                       Leaf leaf;
                       leaf.rng.seed(stream_seed(seed, source + "#" + std::to_string(out.size())));
                       leaf.process = DrydenFilter(d.params, d.axis, dt);
                       leaf.dt = dt;
                       out.push_back(leaves_.size());
                       leaves_.push_back(std::move(leaf));
                   },
                   [&](const node::Scaled& sc) { collect(*sc.inner, source, seed, dt, out); },
                   [&](const node::Sum& sm) {
                       for (const auto& x : sm.terms) collect(x, source, seed, dt, out);
                   },
                   [](const auto&) {},
               },
               s.node());
}

void DisturbanceField::advance() {
    for (auto& leaf : leaves_) leaf.draw();
}

bool DisturbanceField::stochastic() const { return !leaves_.empty(); }

double DisturbanceField::value(const Signal& s, double t, const Vec3& pos, const std::vector<std::size_t>& leaves,
                               std::size_t& cursor) const {
    return std::visit(overloaded{
                          [&](const node::WhiteNoise&) { return leaves_[leaves[cursor++]].held; },
                          [&](const node::Dryden&) { return leaves_[leaves[cursor++]].held; },
                          [&](const node::GroundEffect& g) {
                              return g.c_g * std::clamp(1.0 - pos.z() / g.z0, 0.0, 1.0);
                          },
                          [&](const node::Scaled& sc) { return sc.gain * value(*sc.inner, t, pos, leaves, cursor); },
                          [&](const node::Sum& sm) {
                              double acc = 0.0;
                              for (const auto& x : sm.terms) acc += value(x, t, pos, leaves, cursor);
                              return acc;
                          },
                          [&](const auto&) { return s.eval(t); },
                      },
                      s.node());
}

DisturbanceSample DisturbanceField::sample(double t, const Vec3& position) const {
    DisturbanceSample out;
    out.t = t;
    for (const auto& src : sources_) {
        if (src.gate && !src.gate->contains(position)) continue;
        std::size_t cursor = 0;
        const double v = value(src.signal, t, position, src.leaves, cursor);
        for (Channel c : src.channels) {
            const int i = static_cast<int>(c);
            if (i < 3)
                out.d1[i] += v;
            else
                out.d2[i - 3] += v;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

double derivative_l1(const Signal& s, double horizon, double dt) {
    require_time_only(s);
    if (!(dt > 0.0) || !(horizon >= 0.0)) throw ConfigError("derivative_l1: need dt > 0 and horizon >= 0");
    const long n = std::max(1L, std::lround(horizon / dt));
    const double step = horizon / static_cast<double>(n);
    const double h = difference_step(step);
    double acc = 0.0;
#pragma omp parallel for reduction(+ : acc) schedule(static)
    for (long i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * std::abs(rate(s, static_cast<double>(i) * step, h));
    }
    return acc * step;
}

double derivative_l1_serial(const Signal& s, double horizon, double dt) {
    require_time_only(s);
    if (!(dt > 0.0) || !(horizon >= 0.0)) throw ConfigError("derivative_l1: need dt > 0 and horizon >= 0");
    const long n = std::max(1L, std::lround(horizon / dt));
    const double step = horizon / static_cast<double>(n);
    const double h = difference_step(step);
    double acc = 0.0;
    for (long i = 0; i <= n; ++i) {
        const double w = (i == 0 || i == n) ? 0.5 : 1.0;
        acc += w * std::abs(rate(s, static_cast<double>(i) * step, h));
    }
    return acc * step;
}

Signal channel_signal(const std::vector<DisturbanceSource>& sources, Channel c) {
    std::vector<Signal> terms;
    for (const auto& src : sources)
        if (std::find(src.channels.begin(), src.channels.end(), c) != src.channels.end()) terms.push_back(src.signal);
    if (terms.empty()) return Signal::zero();
    if (terms.size() == 1) return terms.front();
    return Signal::sum(std::move(terms));
}

std::array<double, 6> channel_derivative_l1(const std::vector<DisturbanceSource>& sources, double horizon,
                                            double dt) {
    std::array<double, 6> out{};
    for (Channel c : kAllChannels) {
        for (const auto& src : sources)
            if (src.gate && std::find(src.channels.begin(), src.channels.end(), c) != src.channels.end())
                throw NonDifferentiable("derivative_l1: position-gated source '" + src.name + "' on channel " +
                                        std::string(channel_name(c)));
        out[static_cast<int>(c)] = derivative_l1(channel_signal(sources, c), horizon, dt);
    }
    return out;
}

}  // namespace hgdo::dist
