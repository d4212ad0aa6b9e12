// Acceptance suite: prints one PASS/FAIL line per criterion and exits
// non-zero if any selected criterion fails.

#include "hgdo/batch.hpp"
#include "hgdo/control.hpp"
#include "hgdo/integrator.hpp"
#include "hgdo/metrics.hpp"
#include "hgdo/quad_model.hpp"
#include "hgdo/scenario_config.hpp"
#include "hgdo/simulation.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace hgdo;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

class Stopwatch {
public:
    double seconds() const {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    }

private:
    std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string config_path(const std::string& name) { return std::string(HGDO_SOURCE_DIR) + "/configs/" + name; }

sim::ScenarioConfig with_eps(sim::ScenarioConfig cfg, double eps) {
    cfg.observer.epsilon1 = cfg.observer.epsilon2 = eps;
    return cfg;
}

std::string fmt(const char* f, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

Outcome filter_analytics() {
    Stopwatch sw;
    sim::ScenarioConfig cfg;
    sim::Hover h;
    h.start = h.target = Vec3(0, 0, 0.5);
    cfg.trajectory = h;
    const double eps = 0.01;
    cfg.observer.epsilon1 = cfg.observer.epsilon2 = eps;
    cfg.dt = eps / 20;
    cfg.duration = 6 * eps;
    const Vec3 d(0.3, -0.2, 0.5);
    for (int i = 0; i < 3; ++i)
        cfg.disturbances.push_back(
            {"step" + std::to_string(i), dist::Signal::constant(d[i]), {static_cast<Channel>(i)}, std::nullopt});
    const sim::SimResult r = sim::run_scenario(cfg);

    double worst_63 = 0.0, worst_decay = 0.0;
    for (const auto& s : r.trace.samples) {
        for (int i = 0; i < 3; ++i) {
            const double ratio = s.d1_tilde[i] / d[i];
            const double expect = std::exp(-s.t / eps);
            if (s.t <= 5 * eps + 1e-12) worst_decay = std::max(worst_decay, std::abs(ratio - expect) / expect);
            if (std::abs(s.t - eps) < 1e-12)
                worst_63 = std::max(worst_63, std::abs(s.d1_hat[i] / d[i] - 0.63212) / 0.63212);
        }
    }
    const double t = sw.seconds();
    return {worst_63 <= 0.01 && worst_decay <= 0.02 && t < 1.0 && r.status == sim::RunStatus::Ok,
            fmt("63.2%% point rel err %.2e (<= 1e-2), decay rel err %.2e (<= 2e-2), %.3f s", worst_63, worst_decay, t)};
}

Outcome l1_bound() {
    const sim::ScenarioConfig base = sim::load_scenario(config_path("lemniscate_composite.json"));
    bool ok = true;
    std::ostringstream os;
    for (double eps : {0.01, 0.04, 0.08}) {
        Stopwatch sw;
        const sim::ScenarioConfig cfg = with_eps(base, eps);
        const sim::SimResult r = sim::run_scenario(cfg);
        const report::BoundCheck b = report::bound_check(cfg, r.trace);
        const double t = sw.seconds();
        double worst = 0.0;
        for (int c = 0; c < 6; ++c) worst = std::max(worst, b.lhs[c] / b.rhs[c]);
        ok = ok && b.all() && t < 10.0 && r.status == sim::RunStatus::Ok;
        os << fmt("eps=%.2f max lhs/rhs %.3f (%.2f s); ", eps, worst, t);
    }
    return {ok, os.str()};
}

Outcome estimation_ordering() {
    const sim::ScenarioConfig base = sim::load_scenario(config_path("lemniscate_composite.json"));
    std::vector<sim::ScenarioConfig> cfgs;
    for (double eps : {0.01, 0.04, 0.08}) cfgs.push_back(with_eps(base, eps));
    const auto res = sim::run_batch(cfgs);
    std::vector<report::ChannelValues> e;
    for (const auto& r : res) e.push_back(report::estimation_rms(r.trace, 1.0));
    bool ok = true;
    for (int c = 0; c < 6; ++c) ok = ok && e[0][c] < e[1][c] && e[1][c] < e[2][c];
    return {ok, fmt("dx RMS %.4f < %.4f < %.4f; dphi RMS %.4f < %.4f < %.4f", e[0][0], e[1][0], e[2][0], e[0][3],
                    e[1][3], e[2][3])};
}

Outcome tracking_ordering() {
    Stopwatch sw;
    const sim::ScenarioConfig base = sim::load_scenario(config_path("lemniscate_composite.json"));
    const report::SweepReport rep = report::sweep(base, {0.01, 0.04, 0.08}, true);
    const double t = sw.seconds();
    const auto& r = rep.tracking_rms;
    bool ok = t < 30.0;
    for (auto s : rep.status) ok = ok && s == sim::RunStatus::Ok;
    for (int c = 0; c < 3; ++c) ok = ok && r[0][c] <= r[1][c] && r[1][c] <= r[2][c] && r[2][c] <= r[3][c];
    ok = ok && r[0][0] <= 0.5 * r[3][0] && r[0][1] <= 0.5 * r[3][1];
    std::ostringstream os;
    static constexpr const char* axes[] = {"x", "y", "z"};
    for (int c = 0; c < 3; ++c)
        os << fmt("%s %.2e/%.2e/%.2e/%.2e; ", axes[c], r[0][c], r[1][c], r[2][c], r[3][c]);
    os << fmt("%.2f s", t);
    // Informational only: the same ordering without the first 5 s.
    const report::SweepReport late = report::sweep(base, {0.01, 0.04, 0.08}, true, 5.0);
    os << fmt(" [t>=5 s: x %.2e/%.2e/%.2e/%.2e]", late.tracking_rms[0][0], late.tracking_rms[1][0],
              late.tracking_rms[2][0], late.tracking_rms[3][0]);
    return {ok, os.str()};
}

Outcome dryden_ordering() {
    const sim::ScenarioConfig base = sim::load_scenario(config_path("lemniscate_dryden.json"));
    std::vector<sim::ScenarioConfig> cfgs;
    for (std::uint64_t seed = 1; seed <= 10; ++seed)
        for (double eps : {0.01, 0.08}) {
            sim::ScenarioConfig c = with_eps(base, eps);
            c.seed = seed;
            cfgs.push_back(c);
        }
    const auto res = sim::run_batch(cfgs);
    int wins = 0;
    for (std::size_t i = 0; i < res.size(); i += 2) {
        const auto a = report::estimation_rms(res[i].trace), b = report::estimation_rms(res[i + 1].trace);
        const double ma = (a[0] + a[1] + a[2]) / 3, mb = (b[0] + b[1] + b[2]) / 3;
        if (res[i].status == sim::RunStatus::Ok && res[i + 1].status == sim::RunStatus::Ok && ma < mb) ++wins;
    }
    return {wins >= 9, fmt("eps=0.01 beats eps=0.08 in %d of 10 seeds", wins)};
}

Outcome noise_robustness() {
    const sim::ScenarioConfig base = sim::load_scenario(config_path("lemniscate_composite.json"));
    std::vector<sim::ScenarioConfig> cfgs;
    const std::vector<double> powers = {0.001, 0.01, 0.1};
    for (double w : powers)
        for (auto v : {obs::Variant::Auxiliary, obs::Variant::Naive}) {
            sim::ScenarioConfig c = base;
            c.noise.x2 = c.noise.x4 = Vec3::Constant(w);
            c.seed = 7;
            c.observer.variant = v;
            cfgs.push_back(c);
        }
    const auto res = sim::run_batch(cfgs);
    bool ok = true;
    std::ostringstream os;
    for (std::size_t i = 0; i < powers.size(); ++i) {
        const auto& aux = res[2 * i];
        const auto& nai = res[2 * i + 1];
        const bool complete = aux.status == sim::RunStatus::Ok && nai.status == sim::RunStatus::Ok;
        const auto va = report::estimate_variance(aux.trace), vn = report::estimate_variance(nai.trace);
        bool lower = true;
        for (int c = 0; c < 6; ++c) lower = lower && va[c] < vn[c];
        ok = ok && complete && lower;
        os << fmt("W=%g aux %s (t=%.2f) naive %s (t=%.2f) var dx %.3g vs %.3g; ", powers[i],
                  aux.status == sim::RunStatus::Ok ? "ok" : "diverged", aux.trace.samples.back().t,
                  nai.status == sim::RunStatus::Ok ? "ok" : "diverged", nai.trace.samples.back().t, va[0], vn[0]);
    }
    return {ok, os.str()};
}

Outcome algebraic_identities() {
    const model::VehicleParams p;
    std::mt19937_64 rng(2718);
    std::uniform_real_distribution<double> om(200.0, 2400.0), ang(-10.0, 10.0), h(-20.0, 20.0), v(2.0, 30.0),
        yaw(-kPi, kPi);
    double alloc = 0.0, extract = 0.0, ortho = 0.0;
    for (int i = 0; i < 10000; ++i) {
        model::RotorSpeeds w;
        for (int j = 0; j < 4; ++j) w.omega[j] = om(rng);
        const model::WrenchCommand c = model::rotor_wrench(w, p);
        const model::WrenchCommand back = model::rotor_wrench(model::allocate_rotors(c, p).speeds, p);
        Vec4 a(c.thrust, c.torque.x(), c.torque.y(), c.torque.z()), b(back.thrust, back.torque.x(),
                                                                      back.torque.y(), back.torque.z());
        alloc = std::max(alloc, (a - b).norm() / a.norm());

        const Vec3 u(h(rng), h(rng), v(rng));
        const double psi = yaw(rng);
        const auto sp = ctrl::extract_attitude(u, psi, p.mass, 2.0);
        const Vec3 ub = model::thrust_direction(Vec3(sp.angles.x(), sp.angles.y(), psi)) * sp.thrust / p.mass;
        extract = std::max(extract, (ub - u).norm() / u.norm());

        const Mat3 r = model::rotation_matrix(Vec3(ang(rng), ang(rng), ang(rng)));
        ortho = std::max(ortho, (r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff());
        ortho = std::max(ortho, std::abs(r.determinant() - 1.0));
    }
    return {alloc <= 1e-9 && extract <= 1e-9 && ortho <= 1e-12,
            fmt("allocation %.1e, extraction %.1e, orthonormality %.1e", alloc, extract, ortho)};
}

Outcome chattering() {
    const sim::ScenarioConfig smooth = sim::load_scenario(config_path("lemniscate_composite.json"));
    sim::ScenarioConfig sign = smooth;
    sign.gains.mu = 1e-9;
    const auto res = sim::run_batch({smooth, sign});
    const double a = report::total_variation_u1(res[0].trace), b = report::total_variation_u1(res[1].trace);
    return {a < b && res[0].status == sim::RunStatus::Ok,
            fmt("TV(u1) sat %.4f N vs sign limit %.4f N (%s)", a, b,
                res[1].status == sim::RunStatus::Ok ? "ok" : "diverged")};
}

double rk4_error(int steps) {
    using V2 = Eigen::Vector2d;
    const double T = 2.0, dt = T / steps;
    V2 x(1.0, 0.0);
    auto f = [](double, const V2& s) { return V2(s[1], -s[0]); };
    for (int k = 0; k < steps; ++k) x = sim::rk4_step(f, x, k * dt, dt);
    return (x - V2(std::cos(T), -std::sin(T))).norm();
}

Outcome reproducibility() {
    const sim::ScenarioConfig cfg = sim::load_scenario(config_path("lemniscate_dryden.json"));
    const sim::SimResult a = sim::run_scenario(cfg);
    const sim::SimResult b = sim::run_scenario(cfg);
    const bool same = a.trace == b.trace;
    const double order = std::log2(rk4_error(100) / rk4_error(200));
    const sim::ScenarioConfig lem = sim::load_scenario(config_path("lemniscate_composite.json"));
    Stopwatch sw;
    const sim::SimResult c = sim::run_scenario(lem);
    const double t = sw.seconds();
    return {same && order >= 3.8 && t < 5.0 && c.status == sim::RunStatus::Ok,
            fmt("bit-identical %s, RK4 order %.3f, 40 s lemniscate in %.3f s", same ? "yes" : "no", order, t)};
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Acceptance criteria"};
    std::vector<int> only;
    app.add_option("--only", only, "Run only these criteria (1-9)")->check(CLI::Range(1, 9));
    CLI11_PARSE(app, argc, argv);

    const std::vector<std::pair<const char*, std::function<Outcome()>>> criteria = {
        {"observer step response", filter_analytics},
        {"L1 estimation-error bound", l1_bound},
        {"estimation RMS ordering in eps", estimation_ordering},
        {"tracking RMS ordering vs SMC-only", tracking_ordering},
        {"Dryden estimation ordering", dryden_ordering},
        {"measurement-noise robustness", noise_robustness},
        {"algebraic identities", algebraic_identities},
        {"chattering reduction", chattering},
        {"reproducibility and numerics", reproducibility},
    };

    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const int id = static_cast<int>(i) + 1;
        if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        if (!o.pass) ++failures;
        std::printf("%s %d %s: %s\n", o.pass ? "PASS" : "FAIL", id, criteria[i].first, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}
