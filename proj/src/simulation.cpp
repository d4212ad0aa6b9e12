#include "hgdo/simulation.hpp"

#include "hgdo/errors.hpp"
#include "hgdo/integrator.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <random>

namespace hgdo::sim {

namespace {

using State = Eigen::Matrix<double, 18, 1>;

// Inputs held constant over one base step.
struct Held {
    double thrust = 0.0;
    Vec3 torque = Vec3::Zero();
    Vec3 n2 = Vec3::Zero();
    Vec3 n4 = Vec3::Zero();
    Vec3 xdot2 = Vec3::Zero();
    Vec3 xdot4 = Vec3::Zero();
};

class ClosedLoop {
public:
    ClosedLoop(const ScenarioConfig& cfg, const dist::DisturbanceField& field, bool exact_derivative)
        : cfg_(cfg), p_(cfg.vehicle), field_(field), exact_(exact_derivative) {}

    Held held;

    // Canonical view (x1, x2, x3, x4) of the packed plant state.
    model::RigidState canonical(const State& X) const {
        model::RigidState s{X.segment<3>(0), X.segment<3>(3), X.segment<3>(6), X.segment<3>(9)};
        if (cfg_.plant == PlantKind::Full) s.x4 = model::euler_rate_matrix(s.x3, p_.cos_theta_guard) * s.x4;
        return s;
    }

    State deriv(double t, const State& X) const {
        State out;
        const Vec3 x1 = X.segment<3>(0), x2 = X.segment<3>(3), x3 = X.segment<3>(6);
        const Vec3 u1vec = model::thrust_direction(x3) * (held.thrust / p_.mass);
        const Vec3 u2vec = held.torque.cwiseQuotient(p_.inertia);
        const dist::DisturbanceSample d = field_.sample(t, x1);

        Vec3 x4c, x2dot, x4dot = Vec3::Zero();
        if (cfg_.plant == PlantKind::Canonical) {
            x4c = X.segment<3>(9);
            const model::RigidState dr =
                model::canonical_deriv({x1, x2, x3, x4c}, u1vec, u2vec, d.d1, d.d2, p_);
            out.segment<3>(0) = dr.x1;
            out.segment<3>(3) = dr.x2;
            out.segment<3>(6) = dr.x3;
            out.segment<3>(9) = dr.x4;
            x2dot = dr.x2;
            x4dot = dr.x4;
        } else {
            const Vec3 w = X.segment<3>(9);
            x4c = model::euler_rate_matrix(x3, p_.cos_theta_guard) * w;
            const Vec3 force_body = p_.mass * (model::rotation_matrix(x3).transpose() * d.d1);
            const Vec3 torque_body = p_.inertia.cwiseProduct(d.d2);
            const model::BodyState db =
                model::full_nonlinear_deriv({x1, x2, x3, w}, {held.thrust, held.torque}, force_body, torque_body, p_);
            out.segment<3>(0) = db.position;
            out.segment<3>(3) = db.velocity;
            out.segment<3>(6) = db.attitude;
            out.segment<3>(9) = db.body_rates;
            x2dot = db.velocity;
        }

        const Vec3 x2m = x2 + held.n2, x4m = x4c + held.n4;
        const Vec3 fz1 = obs::forcing_trans(u1vec, p_.gravity);
        const Vec3 fz2 = obs::forcing_rot(model::f2(x4m, p_), u2vec);
        const double e1 = cfg_.observer.epsilon1, e2 = cfg_.observer.epsilon2;
        const Vec3 o1 = X.segment<3>(12), o2 = X.segment<3>(15);
        switch (cfg_.observer.variant) {
            case obs::Variant::Auxiliary:
                out.segment<3>(12) = obs::gamma_rate(o1, x2m, fz1, e1);
                out.segment<3>(15) = obs::gamma_rate(o2, x4m, fz2, e2);
                break;
            case obs::Variant::Naive:
                out.segment<3>(12) = obs::naive_rate(o1, exact_ ? x2dot : held.xdot2, fz1, e1);
                out.segment<3>(15) = obs::naive_rate(o2, exact_ ? x4dot : held.xdot4, fz2, e2);
                break;
            case obs::Variant::None:
                out.segment<3>(12).setZero();
                out.segment<3>(15).setZero();
                break;
        }
        return out;
    }

    obs::DisturbanceEstimate estimate(const State& X, const Vec3& x2m, const Vec3& x4m) const {
        obs::DisturbanceEstimate e;
        switch (cfg_.observer.variant) {
            case obs::Variant::Auxiliary:
                e.d1_hat = X.segment<3>(12) + x2m / cfg_.observer.epsilon1;
                e.d2_hat = X.segment<3>(15) + x4m / cfg_.observer.epsilon2;
                break;
            case obs::Variant::Naive:
                e.d1_hat = X.segment<3>(12);
                e.d2_hat = X.segment<3>(15);
                break;
            case obs::Variant::None:
                break;
        }
        return e;
    }

private:
    const ScenarioConfig& cfg_;
    const model::VehicleParams& p_;
    const dist::DisturbanceField& field_;
    bool exact_;
};

bool outside_layer(const SimSample& s, double mu) {
    return (s.s1.array().abs() > mu).all() && (s.s2.array().abs() > mu).all();
}

void fill_lyapunov(SimResult& res, const ScenarioConfig& cfg) {
    auto& ly = res.lyapunov;
    const auto& samples = res.trace.samples;
    ly.kappa = lyapunov_kappa(cfg.gains, cfg.observer.epsilon1, cfg.observer.epsilon2);
    if (samples.empty()) return;
    ly.v0 = samples.front().V;

    bool computable = true;
    for (const auto& src : cfg.disturbances) computable = computable && src.signal.time_only() && !src.gate;
    if (computable) {
        const auto delta = dist::channel_derivative_l1(cfg.disturbances, cfg.duration, cfg.dt);
        const Vec3 delta1(delta[0], delta[1], delta[2]), delta2(delta[3], delta[4], delta[5]);
        const auto& s0 = samples.front();
        const double rho1 = cfg.observer.epsilon1 * (s0.d1_tilde.norm() + delta1.norm()) * delta1.norm();
        const double rho2 = cfg.observer.epsilon2 * (s0.d2_tilde.norm() + delta2.norm()) * delta2.norm();
        ly.rho = rho1 + rho2;
    }

    for (const auto& s : samples) {
        if (s.t <= 1.0)
            ly.peak_first_second = std::max(ly.peak_first_second, s.V);
        else
            ly.peak_after = std::max(ly.peak_after, s.V);
    }
    ly.bounded = ly.peak_after <= 10.0 * ly.peak_first_second;

    const double mu = cfg.gains.mu;
    for (std::size_t k = 0; k + 1 < samples.size(); ++k) {
        if (!outside_layer(samples[k], mu)) continue;
        ++ly.samples_outside_layer;
        const double slack = ly.rho.value_or(0.0) * res.trace.dt + 1e-12 * std::max(1.0, samples[k].V);
        if (ly.rho && samples[k + 1].V - samples[k].V > slack) ++ly.increases_outside_layer;
    }
}

}  // namespace

double lyapunov_value(const Vec3& s1, const Vec3& s2, const Vec3& d1_tilde, const Vec3& d2_tilde) {
    return 0.5 * (s1.squaredNorm() + s2.squaredNorm() + d1_tilde.squaredNorm() + d2_tilde.squaredNorm());
}

double lyapunov_kappa(const ctrl::SmcGains& g, double eps1, double eps2) {
    return std::min({g.L1.maxCoeff(), g.L2.maxCoeff(), 1.0 / eps1, 1.0 / eps2});
}

model::RigidState initial_state(const ScenarioConfig& cfg) {
    if (cfg.initial_state) return *cfg.initial_state;
    const PositionReference r = reference_at(cfg.trajectory, 0.0);
    model::RigidState s;
    s.x1 = r.pos;
    s.x2 = r.vel;
    s.x3 = Vec3(0.0, 0.0, r.yaw);
    return s;
}

SimResult run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    const auto start = std::chrono::steady_clock::now();

    SimResult res;
    res.trace.dt = cfg.dt;
    res.trace.labels = cfg.labels;
    res.substeps = cfg.effective_substeps();

    const auto& p = cfg.vehicle;
    const double dt = cfg.dt;
    const long n_steps = cfg.steps();
    const double h = dt / res.substeps;
    const std::uint64_t seed = cfg.seed.value_or(0);

    bool exact = false;
    if (cfg.observer.variant == obs::Variant::Naive) {
        switch (cfg.observer.derivative) {
            case DerivativeSource::Exact: exact = true; break;
            case DerivativeSource::Filtered: exact = false; break;
            case DerivativeSource::Auto: exact = !cfg.noise.any() && cfg.plant == PlantKind::Canonical; break;
        }
        if (exact && cfg.plant == PlantKind::Full)
            throw ConfigError("observer.derivative 'exact' is only available on the canonical plant");
    }

    dist::DisturbanceField field(cfg.disturbances, seed, dt);
    ClosedLoop loop(cfg, field, exact);
    ctrl::CascadeController controller(cfg.gains, p, dt * cfg.outer_divisor);
    const ctrl::SmcGains& gains = controller.gains();

    std::array<std::mt19937_64, 6> noise_rng;
    for (int i = 0; i < 6; ++i)
        noise_rng[i].seed(dist::stream_seed(seed, (i < 3 ? "noise.x2#" : "noise.x4#") + std::to_string(i % 3)));

    const double tau_d =
        cfg.observer.derivative_time_constant > 0.0 ? cfg.observer.derivative_time_constant : 5.0 * dt;
    obs::DerivativeEstimator est2(dt, tau_d), est4(dt, tau_d);

    const model::RigidState x0 = initial_state(cfg);
    State X = State::Zero();
    X.segment<3>(0) = x0.x1;
    X.segment<3>(3) = x0.x2;
    X.segment<3>(6) = x0.x3;
    X.segment<3>(9) = cfg.plant == PlantKind::Full
                          ? Vec3(model::euler_rate_matrix(x0.x3, p.cos_theta_guard).inverse() * x0.x4)
                          : x0.x4;

    res.trace.samples.reserve(static_cast<std::size_t>(n_steps) + 1);
    std::uint32_t pending_flags = 0;

    try {
        for (long k = 0; k <= n_steps; ++k) {
            const double t = static_cast<double>(k) * dt;
            field.advance();
            for (int i = 0; i < 3; ++i) {
                loop.held.n2[i] = dist::white_noise(cfg.noise.x2[i], dt, noise_rng[i]);
                loop.held.n4[i] = dist::white_noise(cfg.noise.x4[i], dt, noise_rng[3 + i]);
            }

            const model::RigidState xs = loop.canonical(X);
            const Vec3 x2m = xs.x2 + loop.held.n2;
            const Vec3 x4m = xs.x4 + loop.held.n4;
            if (cfg.observer.variant == obs::Variant::Naive && !exact) {
                loop.held.xdot2 = est2.update(x2m);
                loop.held.xdot4 = est4.update(x4m);
            }
            if (k == 0 && cfg.observer.variant == obs::Variant::Auxiliary) {
                X.segment<3>(12) = obs::hgdo_init(x2m, cfg.observer.epsilon1).gamma;
                X.segment<3>(15) = obs::hgdo_init(x4m, cfg.observer.epsilon2).gamma;
            }
            const obs::DisturbanceEstimate est = loop.estimate(X, x2m, x4m);

            const PositionReference ref = reference_at(cfg.trajectory, t);
            if (k % cfg.outer_divisor == 0) controller.update_outer(xs.x1, x2m, ref, est.d1_hat);
            const ctrl::InnerLoopOutput inner = controller.update_inner(xs.x3, x4m, est.d2_hat);

            SimSample smp;
            smp.flags = pending_flags;
            pending_flags = 0;
            if (controller.outer().limited) smp.flags |= kThrustLimited;
            if (controller.thrust_singular()) smp.flags |= kThrustSingular;
            if (inner.limited) smp.flags |= kTorqueLimited;

            model::WrenchCommand wrench{controller.setpoint().thrust, inner.torque};
            if (cfg.allocation) {
                const model::AllocationResult ar = model::allocate_rotors(wrench, p);
                wrench = model::rotor_wrench(ar.speeds, p);
                smp.omega = ar.speeds.omega;
                if (ar.saturated) smp.flags |= kAllocationSaturated;
            }
            loop.held.thrust = wrench.thrust;
            loop.held.torque = wrench.torque;

            const dist::DisturbanceSample d = field.sample(t, xs.x1);
            smp.t = t;
            smp.state = xs;
            smp.x2_meas = x2m;
            smp.x4_meas = x4m;
            smp.ref_pos = ref.pos;
            smp.att_ref = controller.setpoint().angles;
            smp.e1 = ref.pos - xs.x1;
            smp.s1 = ctrl::sliding_surface(smp.e1, ref.vel - x2m, gains.lambda1);
            smp.e2 = inner.e2;
            smp.s2 = inner.s2;
            smp.u1vec = controller.outer().u1vec;
            smp.u1 = wrench.thrust;
            smp.torque = wrench.torque;
            smp.d1 = d.d1;
            smp.d2 = d.d2;
            smp.d1_hat = est.d1_hat;
            smp.d2_hat = est.d2_hat;
            smp.d1_tilde = d.d1 - est.d1_hat;
            smp.d2_tilde = d.d2 - est.d2_hat;
            smp.V = lyapunov_value(smp);
            res.trace.samples.push_back(smp);

            if (k == n_steps) break;

            auto f = [&loop](double tt, const State& s) { return loop.deriv(tt, s); };
            for (int i = 0; i < res.substeps; ++i) X = rk4_step(f, X, t + i * h, h);

            X[6] = wrap_pi(X[6]);
            X[8] = wrap_pi(X[8]);
            if (cfg.plant == PlantKind::Canonical && std::abs(X[7]) > kPi / 2.0) {
                X[7] = std::clamp(X[7], -kPi / 2.0, kPi / 2.0);
                pending_flags |= kThetaClamped;
            }
            if (!X.allFinite()) throw NonFinite("state became non-finite at t = " + std::to_string(t + dt));
            const double excursion = X.segment<3>(0).cwiseAbs().maxCoeff();
            if (excursion > cfg.divergence_bound) {
                res.status = RunStatus::Diverged;
                res.message = "position left the +-" + std::to_string(cfg.divergence_bound) + " m box at t = " +
                              std::to_string(t + dt);
                break;
            }
        }
    } catch (const NonFinite& e) {
        res.status = RunStatus::Diverged;
        res.message = e.what();
    } catch (const GimbalLock& e) {
        res.status = RunStatus::Diverged;
        res.message = e.what();
    }

    for (const auto& s : res.trace.samples) {
        res.saturation.allocation += (s.flags & kAllocationSaturated) != 0;
        res.saturation.thrust += (s.flags & kThrustLimited) != 0;
        res.saturation.torque += (s.flags & kTorqueLimited) != 0;
        res.saturation.thrust_singular += (s.flags & kThrustSingular) != 0;
        res.saturation.theta_clamp += (s.flags & kThetaClamped) != 0;
    }
    fill_lyapunov(res, cfg);
    res.runtime_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return res;
}

}  // namespace hgdo::sim
