#include "hgdo/scenario_config.hpp"

#include "hgdo/errors.hpp"

#include <charconv>
#include <cstdlib>
#include <fstream>
#include <initializer_list>
#include <set>

namespace hgdo::sim {

using nlohmann::json;

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void check_keys(const json& j, std::initializer_list<const char*> allowed, const std::string& where) {
    if (!j.is_object()) throw ConfigError(where + ": expected an object");
    for (const auto& [key, _] : j.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

double number(const json& j, const std::string& where) {
    if (!j.is_number()) throw ConfigError(where + ": expected a number");
    return j.get<double>();
}

Vec3 vec3(const json& j, const std::string& where) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(where + ": expected an array of 3 numbers");
    return {number(j[0], where), number(j[1], where), number(j[2], where)};
}

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

template <class T>
void read(const json& j, const char* key, T& out, const std::string& where) {
    if (!j.contains(key)) return;
    const std::string ctx = where + "." + key;
    if constexpr (std::is_same_v<T, double>) {
        out = number(j.at(key), ctx);
    } else if constexpr (std::is_same_v<T, Vec3>) {
        out = vec3(j.at(key), ctx);
    } else if constexpr (std::is_same_v<T, bool>) {
        if (!j.at(key).is_boolean()) throw ConfigError(ctx + ": expected a boolean");
        out = j.at(key).get<bool>();
    } else if constexpr (std::is_same_v<T, int>) {
        if (!j.at(key).is_number_integer()) throw ConfigError(ctx + ": expected an integer");
        out = j.at(key).get<int>();
    } else if constexpr (std::is_same_v<T, std::string>) {
        if (!j.at(key).is_string()) throw ConfigError(ctx + ": expected a string");
        out = j.at(key).get<std::string>();
    }
}

std::string_view axis_name(dist::DrydenAxis a) {
    switch (a) {
        case dist::DrydenAxis::Longitudinal: return "longitudinal";
        case dist::DrydenAxis::Lateral: return "lateral";
        case dist::DrydenAxis::Vertical: return "vertical";
    }
    return "longitudinal";
}

dist::DrydenAxis axis_from(const std::string& s, const std::string& where) {
    if (s == "longitudinal") return dist::DrydenAxis::Longitudinal;
    if (s == "lateral") return dist::DrydenAxis::Lateral;
    if (s == "vertical") return dist::DrydenAxis::Vertical;
    throw ConfigError(where + ": unknown Dryden axis '" + s + "'");
}

dist::Signal signal_from(const json& j, const std::string& where) {
    if (!j.is_object() || !j.contains("kind") || !j.at("kind").is_string())
        throw ConfigError(where + ": signal needs a string 'kind'");
    const std::string kind = j.at("kind").get<std::string>();
    if (kind == "zero") {
        check_keys(j, {"kind"}, where);
        return dist::Signal::zero();
    }
    if (kind == "constant") {
        check_keys(j, {"kind", "value"}, where);
        double v = 0.0;
        read(j, "value", v, where);
        return dist::Signal::constant(v);
    }
    if (kind == "sine") {
        check_keys(j, {"kind", "amplitude", "frequency", "phase", "offset"}, where);
        dist::node::Sine s;
        read(j, "amplitude", s.amplitude, where);
        read(j, "frequency", s.frequency, where);
        read(j, "phase", s.phase, where);
        read(j, "offset", s.offset, where);
        return dist::Signal(s);
    }
    if (kind == "composite_sinusoid") {
        check_keys(j, {"kind"}, where);
        return dist::Signal::composite();
    }
    if (kind == "white_noise") {
        check_keys(j, {"kind", "power"}, where);
        double p = 0.0;
        read(j, "power", p, where);
        return dist::Signal::white(p);
    }
    if (kind == "dryden") {
        check_keys(j, {"kind", "axis", "wind_speed", "altitude", "airspeed", "gain"}, where);
        dist::DrydenParams p;
        std::string axis = "longitudinal";
        double gain = 0.5;
        read(j, "axis", axis, where);
        read(j, "wind_speed", p.wind_speed, where);
        read(j, "altitude", p.altitude, where);
        read(j, "airspeed", p.airspeed, where);
        read(j, "gain", gain, where);
        auto s = dist::Signal::dryden(p, axis_from(axis, where + ".axis"));
        return gain == 1.0 ? s : dist::Signal::scaled(std::move(s), gain);
    }
    if (kind == "ground_effect") {
        check_keys(j, {"kind", "c_g", "z0"}, where);
        dist::node::GroundEffect g;
        read(j, "c_g", g.c_g, where);
        read(j, "z0", g.z0, where);
        return dist::Signal(g);
    }
    if (kind == "scaled") {
        check_keys(j, {"kind", "gain", "signal"}, where);
        double gain = 1.0;
        read(j, "gain", gain, where);
        if (!j.contains("signal")) throw ConfigError(where + ": scaled needs 'signal'");
        return dist::Signal::scaled(signal_from(j.at("signal"), where + ".signal"), gain);
    }
    if (kind == "sum") {
        check_keys(j, {"kind", "signals"}, where);
        if (!j.contains("signals") || !j.at("signals").is_array())
            throw ConfigError(where + ": sum needs a 'signals' array");
        std::vector<dist::Signal> terms;
        for (std::size_t i = 0; i < j.at("signals").size(); ++i)
            terms.push_back(signal_from(j.at("signals")[i], where + ".signals[" + std::to_string(i) + "]"));
        return dist::Signal::sum(std::move(terms));
    }
    throw ConfigError(where + ": unknown signal kind '" + kind + "'");
}

dist::DisturbanceSource source_from(const json& j, const std::string& where) {
    check_keys(j, {"name", "signal", "channels", "gate"}, where);
    dist::DisturbanceSource src;
    read(j, "name", src.name, where);
    if (!j.contains("signal")) throw ConfigError(where + ": missing 'signal'");
    src.signal = signal_from(j.at("signal"), where + ".signal");
    if (!j.contains("channels") || !j.at("channels").is_array())
        throw ConfigError(where + ": missing 'channels' array");
    for (const auto& c : j.at("channels")) {
        if (!c.is_string()) throw ConfigError(where + ".channels: expected strings");
        auto ch = channel_from_name(c.get<std::string>());
        if (!ch) throw ConfigError(where + ".channels: unknown channel '" + c.get<std::string>() + "'");
        src.channels.push_back(*ch);
    }
    if (j.contains("gate")) {
        const json& g = j.at("gate");
        check_keys(g, {"lo", "hi"}, where + ".gate");
        dist::GateBox box;
        read(g, "lo", box.lo, where + ".gate");
        read(g, "hi", box.hi, where + ".gate");
        src.gate = box;
    }
    return src;
}

obs::Variant variant_from(const std::string& s) {
    if (s == "auxiliary") return obs::Variant::Auxiliary;
    if (s == "naive") return obs::Variant::Naive;
    if (s == "none") return obs::Variant::None;
    throw ConfigError("observer.variant: unknown value '" + s + "'");
}

std::string_view derivative_name(DerivativeSource d) {
    switch (d) {
        case DerivativeSource::Auto: return "auto";
        case DerivativeSource::Exact: return "exact";
        case DerivativeSource::Filtered: return "filtered";
    }
    return "auto";
}

DerivativeSource derivative_from(const std::string& s) {
    if (s == "auto") return DerivativeSource::Auto;
    if (s == "exact") return DerivativeSource::Exact;
    if (s == "filtered") return DerivativeSource::Filtered;
    throw ConfigError("observer.derivative: unknown value '" + s + "'");
}

std::optional<std::uint64_t> parse_u64(std::string_view s) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || s.empty()) return std::nullopt;
    return v;
}

}  // namespace

std::string_view variant_name(obs::Variant v) {
    switch (v) {
        case obs::Variant::Auxiliary: return "auxiliary";
        case obs::Variant::Naive: return "naive";
        case obs::Variant::None: return "none";
    }
    return "auxiliary";
}

dist::Signal signal_from_json(const json& j) { return signal_from(j, "signal"); }

json signal_to_json(const dist::Signal& s) {
    return std::visit(
        overloaded{
            [](const dist::node::Zero&) { return json{{"kind", "zero"}}; },
            [](const dist::node::Constant& c) { return json{{"kind", "constant"}, {"value", c.value}}; },
            [](const dist::node::Sine& c) {
                return json{{"kind", "sine"},
                            {"amplitude", c.amplitude},
                            {"frequency", c.frequency},
                            {"phase", c.phase},
                            {"offset", c.offset}};
            },
            [](const dist::node::CompositeSinusoid&) { return json{{"kind", "composite_sinusoid"}}; },
            [](const dist::node::WhiteNoise& w) { return json{{"kind", "white_noise"}, {"power", w.power}}; },
            [](const dist::node::Dryden& d) {
                return json{{"kind", "dryden"},
                            {"axis", std::string(axis_name(d.axis))},
                            {"wind_speed", d.params.wind_speed},
                            {"altitude", d.params.altitude},
                            {"airspeed", d.params.airspeed},
                            {"gain", 1.0}};
            },
            [](const dist::node::GroundEffect& g) {
                return json{{"kind", "ground_effect"}, {"c_g", g.c_g}, {"z0", g.z0}};
            },
            [](const dist::node::Scaled& sc) {
                return json{{"kind", "scaled"}, {"gain", sc.gain}, {"signal", signal_to_json(*sc.inner)}};
            },
            [](const dist::node::Sum& sm) {
                json arr = json::array();
                for (const auto& t : sm.terms) arr.push_back(signal_to_json(t));
                return json{{"kind", "sum"}, {"signals", arr}};
            },
        },
        s.node());
}

ScenarioConfig parse_scenario(const json& j) {
    check_keys(j, {"schema", "name", "labels", "vehicle", "gains", "observer", "disturbances", "noise",
                   "trajectory", "run", "initial_state"},
               "scenario");
    if (!j.contains("schema") || j.at("schema") != kScenarioSchema)
        throw ConfigError(std::string("scenario: 'schema' must be \"") + kScenarioSchema + "\"");

    ScenarioConfig cfg;
    read(j, "name", cfg.name, "scenario");
    if (j.contains("labels")) {
        if (!j.at("labels").is_array()) throw ConfigError("scenario.labels: expected an array");
        for (const auto& l : j.at("labels")) {
            if (!l.is_string()) throw ConfigError("scenario.labels: expected strings");
            cfg.labels.push_back(l.get<std::string>());
        }
    }

    if (j.contains("vehicle")) {
        const json& v = j.at("vehicle");
        check_keys(v, {"mass", "inertia", "k_thrust", "k_torque", "arm_length", "gravity", "omega_max",
                       "cos_theta_guard"},
                   "vehicle");
        auto& p = cfg.vehicle;
        read(v, "mass", p.mass, "vehicle");
        read(v, "inertia", p.inertia, "vehicle");
        read(v, "k_thrust", p.k_thrust, "vehicle");
        read(v, "k_torque", p.k_torque, "vehicle");
        read(v, "arm_length", p.arm_length, "vehicle");
        read(v, "gravity", p.gravity, "vehicle");
        read(v, "omega_max", p.omega_max, "vehicle");
        read(v, "cos_theta_guard", p.cos_theta_guard, "vehicle");
    }

    if (j.contains("gains")) {
        const json& g = j.at("gains");
        check_keys(g, {"lambda1", "lambda2", "k1", "k2", "L1", "L2", "mu", "u1_max", "tau_max", "uz_min"}, "gains");
        auto& k = cfg.gains;
        read(g, "lambda1", k.lambda1, "gains");
        read(g, "lambda2", k.lambda2, "gains");
        read(g, "k1", k.k1, "gains");
        read(g, "k2", k.k2, "gains");
        read(g, "L1", k.L1, "gains");
        read(g, "L2", k.L2, "gains");
        read(g, "mu", k.mu, "gains");
        read(g, "u1_max", k.u1_max, "gains");
        read(g, "tau_max", k.tau_max, "gains");
        read(g, "uz_min", k.uz_min, "gains");
    }

    if (j.contains("observer")) {
        const json& o = j.at("observer");
        check_keys(o, {"variant", "epsilon1", "epsilon2", "derivative", "derivative_time_constant"}, "observer");
        std::string variant = "auxiliary", derivative = "auto";
        read(o, "variant", variant, "observer");
        read(o, "derivative", derivative, "observer");
        cfg.observer.variant = variant_from(variant);
        cfg.observer.derivative = derivative_from(derivative);
        read(o, "epsilon1", cfg.observer.epsilon1, "observer");
        read(o, "epsilon2", cfg.observer.epsilon2, "observer");
        read(o, "derivative_time_constant", cfg.observer.derivative_time_constant, "observer");
    }

    if (j.contains("disturbances")) {
        if (!j.at("disturbances").is_array()) throw ConfigError("disturbances: expected an array");
        const json& arr = j.at("disturbances");
        for (std::size_t i = 0; i < arr.size(); ++i)
            cfg.disturbances.push_back(source_from(arr[i], "disturbances[" + std::to_string(i) + "]"));
    }

    if (j.contains("noise")) {
        check_keys(j.at("noise"), {"x2", "x4"}, "noise");
        read(j.at("noise"), "x2", cfg.noise.x2, "noise");
        read(j.at("noise"), "x4", cfg.noise.x4, "noise");
    }

    if (j.contains("trajectory")) {
        const json& t = j.at("trajectory");
        std::string kind = "lemniscate";
        if (t.is_object()) read(t, "kind", kind, "trajectory");
        if (kind == "lemniscate") {
            check_keys(t, {"kind", "amplitude_x", "amplitude_y", "height", "period"}, "trajectory");
            Lemniscate l;
            read(t, "amplitude_x", l.amplitude_x, "trajectory");
            read(t, "amplitude_y", l.amplitude_y, "trajectory");
            read(t, "height", l.height, "trajectory");
            read(t, "period", l.period, "trajectory");
            cfg.trajectory = l;
        } else if (kind == "hover") {
            check_keys(t, {"kind", "start", "target", "ramp"}, "trajectory");
            Hover h;
            read(t, "start", h.start, "trajectory");
            read(t, "target", h.target, "trajectory");
            read(t, "ramp", h.ramp, "trajectory");
            cfg.trajectory = h;
        } else {
            throw ConfigError("trajectory.kind: unknown value '" + kind + "'");
        }
    }

    if (j.contains("run")) {
        const json& r = j.at("run");
        check_keys(r, {"duration", "dt", "outer_divisor", "substeps", "seed", "rng", "plant", "allocation",
                       "divergence_bound"},
                   "run");
        read(r, "duration", cfg.duration, "run");
        read(r, "dt", cfg.dt, "run");
        read(r, "outer_divisor", cfg.outer_divisor, "run");
        read(r, "substeps", cfg.substeps, "run");
        read(r, "rng", cfg.rng, "run");
        read(r, "allocation", cfg.allocation, "run");
        read(r, "divergence_bound", cfg.divergence_bound, "run");
        if (r.contains("seed")) {
            const json& s = r.at("seed");
            if (!s.is_number_unsigned() && !(s.is_number_integer() && s.get<long long>() >= 0))
                throw ConfigError("run.seed: expected a non-negative integer");
            cfg.seed = s.get<std::uint64_t>();
        }
        std::string plant = "canonical";
        read(r, "plant", plant, "run");
        if (plant == "canonical")
            cfg.plant = PlantKind::Canonical;
        else if (plant == "full")
            cfg.plant = PlantKind::Full;
        else
            throw ConfigError("run.plant: unknown value '" + plant + "'");
    }

    if (j.contains("initial_state")) {
        const json& s = j.at("initial_state");
        check_keys(s, {"x1", "x2", "x3", "x4"}, "initial_state");
        model::RigidState st;
        read(s, "x1", st.x1, "initial_state");
        read(s, "x2", st.x2, "initial_state");
        read(s, "x3", st.x3, "initial_state");
        read(s, "x4", st.x4, "initial_state");
        cfg.initial_state = st;
    }

    cfg.validate();
    return cfg;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError(path.string(), "cannot open scenario file");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
    try {
        return parse_scenario(j);
    } catch (const ConfigError& e) {
        throw ConfigError(path.string() + ": " + e.what());
    }
}

json to_json(const ScenarioConfig& cfg) {
    json j;
    j["schema"] = kScenarioSchema;
    j["name"] = cfg.name;
    j["labels"] = cfg.labels;

    const auto& p = cfg.vehicle;
    j["vehicle"] = {{"mass", p.mass},
                    {"inertia", vec3_json(p.inertia)},
                    {"k_thrust", p.k_thrust},
                    {"k_torque", p.k_torque},
                    {"arm_length", p.arm_length},
                    {"gravity", p.gravity},
                    {"omega_max", p.omega_max},
                    {"cos_theta_guard", p.cos_theta_guard}};

    const auto& g = cfg.gains;
    j["gains"] = {{"lambda1", vec3_json(g.lambda1)}, {"lambda2", vec3_json(g.lambda2)}, {"k1", vec3_json(g.k1)},
                  {"k2", vec3_json(g.k2)},           {"L1", vec3_json(g.L1)},           {"L2", vec3_json(g.L2)},
                  {"mu", g.mu},                      {"u1_max", g.u1_max},              {"tau_max", vec3_json(g.tau_max)},
                  {"uz_min", g.uz_min}};

    j["observer"] = {{"variant", std::string(variant_name(cfg.observer.variant))},
                     {"epsilon1", cfg.observer.epsilon1},
                     {"epsilon2", cfg.observer.epsilon2},
                     {"derivative", std::string(derivative_name(cfg.observer.derivative))},
                     {"derivative_time_constant", cfg.observer.derivative_time_constant}};

    json dist_arr = json::array();
    for (const auto& src : cfg.disturbances) {
        json s{{"name", src.name}, {"signal", signal_to_json(src.signal)}};
        json ch = json::array();
        for (auto c : src.channels) ch.push_back(std::string(channel_name(c)));
        s["channels"] = ch;
        if (src.gate) s["gate"] = {{"lo", vec3_json(src.gate->lo)}, {"hi", vec3_json(src.gate->hi)}};
        dist_arr.push_back(s);
    }
    j["disturbances"] = dist_arr;
    j["noise"] = {{"x2", vec3_json(cfg.noise.x2)}, {"x4", vec3_json(cfg.noise.x4)}};

    if (const auto* l = std::get_if<Lemniscate>(&cfg.trajectory)) {
        j["trajectory"] = {{"kind", "lemniscate"},
                           {"amplitude_x", l->amplitude_x},
                           {"amplitude_y", l->amplitude_y},
                           {"height", l->height},
                           {"period", l->period}};
    } else {
        const auto& h = std::get<Hover>(cfg.trajectory);
        j["trajectory"] = {
            {"kind", "hover"}, {"start", vec3_json(h.start)}, {"target", vec3_json(h.target)}, {"ramp", h.ramp}};
    }

    json run{{"duration", cfg.duration},
             {"dt", cfg.dt},
             {"outer_divisor", cfg.outer_divisor},
             {"substeps", cfg.substeps},
             {"rng", cfg.rng},
             {"plant", cfg.plant == PlantKind::Canonical ? "canonical" : "full"},
             {"allocation", cfg.allocation},
             {"divergence_bound", cfg.divergence_bound}};
    if (cfg.seed) run["seed"] = *cfg.seed;
    j["run"] = run;

    if (cfg.initial_state) {
        const auto& s = *cfg.initial_state;
        j["initial_state"] = {
            {"x1", vec3_json(s.x1)}, {"x2", vec3_json(s.x2)}, {"x3", vec3_json(s.x3)}, {"x4", vec3_json(s.x4)}};
    }
    return j;
}

void ScenarioConfig::validate() const {
    vehicle.validate();
    gains.validate();
    if (!(observer.epsilon1 > 0.0) || !std::isfinite(observer.epsilon1)) throw NonPositiveEpsilon(observer.epsilon1);
    if (!(observer.epsilon2 > 0.0) || !std::isfinite(observer.epsilon2)) throw NonPositiveEpsilon(observer.epsilon2);
    if (!(observer.derivative_time_constant >= 0.0))
        throw ConfigError("observer.derivative_time_constant must be >= 0");
    if (!(duration > 0.0) || !std::isfinite(duration)) throw ConfigError("run.duration must be > 0");
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("run.dt must be > 0");
    if (dt > duration) throw ConfigError("run.dt must not exceed run.duration");
    if (outer_divisor < 1) throw ConfigError("run.outer_divisor must be >= 1");
    if (substeps < 0) throw ConfigError("run.substeps must be >= 0");
    if (!(divergence_bound > 0.0)) throw ConfigError("run.divergence_bound must be > 0");
    if (rng != "mt19937_64") throw ConfigError("run.rng: only \"mt19937_64\" is supported");
    if (!noise.x2.allFinite() || !noise.x4.allFinite() || (noise.x2.array() < 0.0).any() ||
        (noise.x4.array() < 0.0).any())
        throw ConfigError("noise powers must be finite and >= 0");

    std::set<std::string> names;
    for (const auto& src : disturbances) {
        if (src.name.empty()) throw ConfigError("disturbance sources need a non-empty name");
        if (!names.insert(src.name).second) throw ConfigError("duplicate disturbance name '" + src.name + "'");
        if (src.channels.empty()) throw ConfigError("disturbance '" + src.name + "' drives no channel");
        src.signal.validate();
        if (src.gate && ((src.gate->lo.array() > src.gate->hi.array()).any() || !src.gate->lo.allFinite() ||
                         !src.gate->hi.allFinite()))
            throw ConfigError("disturbance '" + src.name + "': gate lo must be <= hi");
    }

    if (const auto* l = std::get_if<Lemniscate>(&trajectory)) {
        if (!(l->period > 0.0)) throw ConfigError("trajectory.period must be > 0");
    } else if (!(std::get<Hover>(trajectory).ramp > 0.0)) {
        throw ConfigError("trajectory.ramp must be > 0");
    }

    if (initial_state && !initial_state->finite()) throw ConfigError("initial_state must be finite");
    if (stochastic() && !seed) throw ConfigError("run.seed is required when the scenario has stochastic elements");
}

bool ScenarioConfig::stochastic() const {
    if (noise.any()) return true;
    for (const auto& s : disturbances)
        if (s.signal.stochastic()) return true;
    return false;
}

long ScenarioConfig::steps() const { return std::lround(duration / dt); }

int ScenarioConfig::effective_substeps() const {
    int n = std::max(substeps, 1);
    if (observer.variant != obs::Variant::None) {
        const double eps = std::min(observer.epsilon1, observer.epsilon2);
        n = std::max(n, obs::required_substeps(dt, eps));
    }
    return n;
}

std::optional<std::uint64_t> seed_from_env() {
    const char* v = std::getenv("HGDO_SEED");
    if (!v || !*v) return std::nullopt;
    auto parsed = parse_u64(v);
    if (!parsed) throw ConfigError(std::string("HGDO_SEED: not a non-negative integer: '") + v + "'");
    return parsed;
}

void apply_seed_override(ScenarioConfig& cfg, std::optional<std::uint64_t> cli_seed) {
    if (cli_seed) {
        cfg.seed = cli_seed;
        return;
    }
    if (auto env = seed_from_env()) cfg.seed = env;
}

}  // namespace hgdo::sim
