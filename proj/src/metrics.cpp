#include "hgdo/metrics.hpp"

#include "hgdo/batch.hpp"
#include "hgdo/errors.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>

namespace hgdo::report {

using nlohmann::json;

namespace {

double tracking_component(const sim::SimSample& s, int c) {
    switch (c) {
        case 0: return s.e1.x();
        case 1: return s.e1.y();
        case 2: return s.e1.z();
        case 3: return s.e2.z();  // psi
        case 4: return s.e2.x();  // phi
        default: return s.e2.y(); // theta
    }
}

double tilde_component(const sim::SimSample& s, int c) { return c < 3 ? s.d1_tilde[c] : s.d2_tilde[c - 3]; }
double hat_component(const sim::SimSample& s, int c) { return c < 3 ? s.d1_hat[c] : s.d2_hat[c - 3]; }

template <class F>
ChannelValues window_rms(const sim::SimTrace& trace, double skip, F&& get) {
    ChannelValues acc{};
    long n = 0;
    for (const auto& s : trace.samples) {
        if (s.t < skip) continue;
        for (int c = 0; c < 6; ++c) acc[c] += get(s, c) * get(s, c);
        ++n;
    }
    if (n == 0) throw EmptyTrace();
    for (auto& a : acc) a = std::sqrt(a / static_cast<double>(n));
    return acc;
}

bool bound_applicable(const sim::ScenarioConfig& cfg) {
    if (cfg.stochastic()) return false;
    for (const auto& s : cfg.disturbances)
        if (!s.signal.time_only() || s.gate) return false;
    return true;
}

ChannelValues delta_for(const sim::ScenarioConfig& cfg) {
    if (cfg.stochastic())
        throw StochasticDisturbance("bound check needs deterministic disturbances and noise-free measurements");
    return dist::channel_derivative_l1(cfg.disturbances, cfg.duration, cfg.dt);
}

json channels_json(const ChannelValues& v, const std::array<std::string_view, 6>& names) {
    json j = json::object();
    for (int c = 0; c < 6; ++c) j[std::string(names[c])] = v[c];
    return j;
}

constexpr std::array<std::string_view, 6> kDisturbanceNames = {"dx", "dy", "dz", "dphi", "dtheta", "dpsi"};

std::string status_name(sim::RunStatus s) { return s == sim::RunStatus::Ok ? "ok" : "diverged"; }

}  // namespace

ChannelValues rms_errors(const sim::SimTrace& trace, double skip) {
    return window_rms(trace, skip, tracking_component);
}

double rms(const std::vector<double>& values) {
    if (values.empty()) throw EmptyTrace();
    double acc = 0.0;
    for (double v : values) acc += v * v;
    return std::sqrt(acc / static_cast<double>(values.size()));
}

ChannelValues estimation_rms(const sim::SimTrace& trace, double skip) {
    return window_rms(trace, skip, tilde_component);
}

ChannelValues estimate_variance(const sim::SimTrace& trace, double skip) {
    ChannelValues mean{}, m2{};
    long n = 0;
    // Welford update per channel.
    for (const auto& s : trace.samples) {
        if (s.t < skip) continue;
        ++n;
        for (int c = 0; c < 6; ++c) {
            const double x = hat_component(s, c);
            const double d = x - mean[c];
            mean[c] += d / static_cast<double>(n);
            m2[c] += d * (x - mean[c]);
        }
    }
    if (n < 2) throw EmptyTrace();
    for (auto& v : m2) v /= static_cast<double>(n - 1);
    return m2;
}

double total_variation_u1(const sim::SimTrace& trace) {
    double tv = 0.0;
    for (std::size_t k = 1; k < trace.samples.size(); ++k)
        tv += std::abs(trace.samples[k].u1 - trace.samples[k - 1].u1);
    return tv;
}

bool BoundCheck::all() const {
    for (bool p : pass)
        if (!p) return false;
    return true;
}

BoundCheck bound_check(const sim::SimTrace& trace, double eps1, double eps2, const ChannelValues& delta,
                       double slack) {
    if (trace.empty()) throw EmptyTrace();
    BoundCheck bc;
    bc.slack = slack;
    bc.delta = delta;
    const auto& smp = trace.samples;
    for (int c = 0; c < 6; ++c) {
        double integral = 0.0;
        for (std::size_t k = 1; k < smp.size(); ++k)
            integral += 0.5 * (smp[k].t - smp[k - 1].t) *
                        (std::abs(tilde_component(smp[k], c)) + std::abs(tilde_component(smp[k - 1], c)));
        const double eps = c < 3 ? eps1 : eps2;
        bc.d_tilde0[c] = tilde_component(smp.front(), c);
        bc.lhs[c] = integral;
        bc.rhs[c] = eps * std::abs(bc.d_tilde0[c]) + eps * delta[c] + slack;
        bc.pass[c] = bc.lhs[c] <= bc.rhs[c];
    }
    return bc;
}

BoundCheck bound_check(const sim::ScenarioConfig& cfg, const sim::SimTrace& trace, double slack) {
    return bound_check(trace, cfg.observer.epsilon1, cfg.observer.epsilon2, delta_for(cfg), slack);
}

GainReport gain_report(const sim::ScenarioConfig& cfg, const sim::SimTrace& trace, const ChannelValues& delta) {
    if (trace.empty()) throw EmptyTrace();
    const auto& s0 = trace.samples.front();
    const ctrl::SmcGains g = cfg.gains.resolved(cfg.vehicle);
    GainReport r;
    r.translational =
        ctrl::gain_check(g.k1, cfg.observer.epsilon1, s0.d1_tilde, Vec3(delta[0], delta[1], delta[2]));
    r.rotational = ctrl::gain_check(g.k2, cfg.observer.epsilon2, s0.d2_tilde, Vec3(delta[3], delta[4], delta[5]));
    return r;
}

MetricsReport build_report(const sim::ScenarioConfig& cfg, const sim::SimResult& result, double skip) {
    MetricsReport r;
    r.scenario = cfg.name;
    r.labels = cfg.labels;
    r.status = result.status;
    r.message = result.message;
    r.variant = cfg.observer.variant;
    r.epsilon1 = cfg.observer.epsilon1;
    r.epsilon2 = cfg.observer.epsilon2;
    r.skip = skip;
    r.tracking_rms = rms_errors(result.trace, skip);
    r.estimation_rms = estimation_rms(result.trace, skip);
    if (bound_applicable(cfg) && cfg.observer.variant != obs::Variant::None) {
        const ChannelValues delta = delta_for(cfg);
        r.bounds = bound_check(result.trace, cfg.observer.epsilon1, cfg.observer.epsilon2, delta);
        r.gains = gain_report(cfg, result.trace, delta);
    }
    r.saturation = result.saturation;
    r.u1_total_variation = total_variation_u1(result.trace);
    r.lyapunov = result.lyapunov;
    r.runtime_seconds = result.runtime_seconds;
    r.samples = static_cast<long>(result.trace.size());
    r.substeps = result.substeps;
    return r;
}

json to_json(const MetricsReport& r) {
    json j;
    j["schema"] = kMetricsSchema;
    j["scenario"] = r.scenario;
    j["labels"] = r.labels;
    j["status"] = status_name(r.status);
    j["message"] = r.message;
    j["observer"] = {{"variant", std::string(sim::variant_name(r.variant))},
                     {"epsilon1", r.epsilon1},
                     {"epsilon2", r.epsilon2}};
    j["window"] = {{"skip", r.skip}};
    j["tracking_rms"] = channels_json(r.tracking_rms, kTrackingChannels);
    j["estimation_rms"] = channels_json(r.estimation_rms, kDisturbanceNames);

    if (r.bounds) {
        json ch = json::object();
        for (int c = 0; c < 6; ++c)
            ch[std::string(kDisturbanceNames[c])] = {{"lhs", r.bounds->lhs[c]},
                                                     {"rhs", r.bounds->rhs[c]},
                                                     {"delta", r.bounds->delta[c]},
                                                     {"d_tilde0", r.bounds->d_tilde0[c]},
                                                     {"pass", r.bounds->pass[c]}};
        j["bound_check"] = {{"slack", r.bounds->slack}, {"pass", r.bounds->all()}, {"channels", ch}};
    } else {
        j["bound_check"] = nullptr;
    }

    if (r.gains) {
        json ch = json::object();
        for (int c = 0; c < 6; ++c) {
            const auto& g = c < 3 ? r.gains->translational : r.gains->rotational;
            ch[std::string(kDisturbanceNames[c])] = {{"threshold", g.threshold[c % 3]}, {"pass", g.pass[c % 3]}};
        }
        j["gain_check"] = {{"pass", r.gains->all()}, {"channels", ch}};
    } else {
        j["gain_check"] = nullptr;
    }

    j["saturation_events"] = {{"allocation", r.saturation.allocation},
                              {"thrust", r.saturation.thrust},
                              {"torque", r.saturation.torque},
                              {"thrust_singular", r.saturation.thrust_singular},
                              {"theta_clamp", r.saturation.theta_clamp}};
    j["u1_total_variation"] = r.u1_total_variation;

    const auto& ly = r.lyapunov;
    j["lyapunov"] = {{"kappa", ly.kappa},
                     {"rho", ly.rho ? json(*ly.rho) : json(nullptr)},
                     {"v0", ly.v0},
                     {"peak_first_second", ly.peak_first_second},
                     {"peak_after", ly.peak_after},
                     {"bounded", ly.bounded},
                     {"samples_outside_layer", ly.samples_outside_layer},
                     {"increases_outside_layer", ly.increases_outside_layer}};
    j["runtime"] = {{"seconds", r.runtime_seconds}, {"samples", r.samples}, {"substeps", r.substeps}};
    return j;
}

SweepReport sweep(const sim::ScenarioConfig& base, const std::vector<double>& epsilons, bool smc_only, double skip,
                  bool parallel) {
    SweepReport rep;
    std::vector<sim::ScenarioConfig> cfgs;
    for (double eps : epsilons) {
        sim::ScenarioConfig c = base;
        c.observer.variant = obs::Variant::Auxiliary;
        c.observer.epsilon1 = c.observer.epsilon2 = eps;
        char label[64];
        std::snprintf(label, sizeof label, "eps=%g", eps);
        rep.columns.push_back({label, obs::Variant::Auxiliary, eps});
        cfgs.push_back(std::move(c));
    }
    if (smc_only) {
        sim::ScenarioConfig c = base;
        c.observer.variant = obs::Variant::None;
        rep.columns.push_back({"SMC-only", obs::Variant::None, 0.0});
        cfgs.push_back(std::move(c));
    }

    const auto results = parallel ? sim::run_batch(cfgs) : sim::run_batch_serial(cfgs);
    for (const auto& res : results) {
        rep.tracking_rms.push_back(rms_errors(res.trace, skip));
        rep.estimation_rms.push_back(estimation_rms(res.trace, skip));
        rep.status.push_back(res.status);
    }

    bool path_dependent = false;
    for (const auto& s : base.disturbances) path_dependent = path_dependent || s.signal.state_dependent() || s.gate;
    if (!path_dependent && !results.empty()) {
        bool same = true;
        const auto& ref = results.front().trace.samples;
        for (const auto& res : results) {
            const auto& smp = res.trace.samples;
            const std::size_t n = std::min(ref.size(), smp.size());
            for (std::size_t k = 0; k < n && same; ++k) same = smp[k].d1 == ref[k].d1 && smp[k].d2 == ref[k].d2;
        }
        rep.shared_disturbance = same;
    }
    return rep;
}

std::string format_sweep_table(const SweepReport& r) {
    static constexpr std::array<const char*, 6> rows = {"x", "y", "z", "psi", "phi", "theta"};
    std::ostringstream os;
    char buf[64];
    std::snprintf(buf, sizeof buf, "%-8s", "channel");
    os << buf;
    for (const auto& c : r.columns) {
        std::snprintf(buf, sizeof buf, " %12s", c.label.c_str());
        os << buf;
    }
    os << '\n';
    for (int row = 0; row < 6; ++row) {
        std::snprintf(buf, sizeof buf, "%-8s", rows[row]);
        os << buf;
        for (std::size_t c = 0; c < r.columns.size(); ++c) {
            std::snprintf(buf, sizeof buf, " %12.6f", r.tracking_rms[c][row]);
            os << buf;
        }
        os << '\n';
    }
    return os.str();
}

json to_json(const SweepReport& r) {
    json cols = json::array();
    for (std::size_t c = 0; c < r.columns.size(); ++c) {
        cols.push_back({{"label", r.columns[c].label},
                        {"variant", std::string(sim::variant_name(r.columns[c].variant))},
                        {"epsilon", r.columns[c].epsilon},
                        {"status", status_name(r.status[c])},
                        {"tracking_rms", channels_json(r.tracking_rms[c], kTrackingChannels)},
                        {"estimation_rms", channels_json(r.estimation_rms[c], kDisturbanceNames)}});
    }
    json j{{"schema", "hgdo-sweep/1"}, {"columns", cols}};
    j["shared_disturbance"] = r.shared_disturbance ? json(*r.shared_disturbance) : json(nullptr);
    return j;
}

}  // namespace hgdo::report
