#include "hgdo/control.hpp"
#include "hgdo/errors.hpp"
#include "hgdo/metrics.hpp"
#include "hgdo/simulation.hpp"
#include "test_util.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace hgdo;
using namespace hgdo::ctrl;

namespace {

const model::VehicleParams kVehicle;

SmcGains resolved() { return SmcGains{}.resolved(kVehicle); }

sim::PositionReference hover_at(const Vec3& p) {
    sim::PositionReference r;
    r.pos = p;
    return r;
}

}  // namespace

TEST(SlidingSurface, Examples) {
    const SmcGains g;
    EXPECT_EQ(sliding_surface(Vec3::Zero(), Vec3::Zero(), g.lambda1), Vec3::Zero());
    const Vec3 s = sliding_surface(Vec3(0.1, 0, 0), Vec3::Zero(), g.lambda1);
    EXPECT_NEAR(s.x(), 0.0358, 1e-15);
    EXPECT_EQ(s.y(), 0.0);
    EXPECT_EQ(s.z(), 0.0);
}

TEST(Sat, Examples) {
    const double mu = 0.05;
    EXPECT_EQ(sat(Vec3::Zero(), mu), Vec3::Zero());
    const Vec3 v = sat(Vec3(2 * mu, -2 * mu, mu / 2), mu);
    EXPECT_EQ(v, Vec3(1, -1, 0.5));
}

TEST(Sat, ApproachesSignAsMuShrinks) {
    const Vec3 s(0.3, -1e-4, 2.0);
    const Vec3 v = sat(s, 1e-9);
    EXPECT_EQ(v, Vec3(1, -1, 1));
}

TEST(OuterLoop, PerfectHover) {
    const SmcGains g = resolved();
    const Vec3 p(0.2, 0.3, 0.5);
    const OuterLoopOutput o = outer_loop(p, Vec3::Zero(), hover_at(p), Vec3::Zero(), g, kVehicle);
    EXPECT_EQ(o.u1vec, Vec3(0, 0, kVehicle.gravity));
    EXPECT_FALSE(o.limited);
}

TEST(OuterLoop, CancelsEstimatedDisturbance) {
    const SmcGains g = resolved();
    const Vec3 p(0.0, 0.0, 0.5);
    const OuterLoopOutput o = outer_loop(p, Vec3::Zero(), hover_at(p), Vec3(0, 0, -0.2), g, kVehicle);
    EXPECT_NEAR(o.u1vec.z(), kVehicle.gravity + 0.2, 1e-15);
    EXPECT_EQ(o.u1vec.x(), 0.0);
}

TEST(OuterLoop, FeedforwardCancellationIsExact) {
    const SmcGains g = resolved();
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    for (int i = 0; i < 1000; ++i) {
        sim::PositionReference ref;
        ref.pos = Vec3(u(rng), u(rng), 0.5 + u(rng));
        ref.vel = Vec3(u(rng), u(rng), u(rng));
        ref.acc = Vec3(u(rng), u(rng), u(rng));
        const Vec3 d(u(rng), u(rng), u(rng));
        const OuterLoopOutput o = outer_loop(ref.pos, ref.vel, ref, d, g, kVehicle);
        model::RigidState s{ref.pos, ref.vel, Vec3::Zero(), Vec3::Zero()};
        const auto ds = model::canonical_deriv(s, o.u1vec, Vec3::Zero(), d, Vec3::Zero(), kVehicle);
        ASSERT_LE((ds.x2 - ref.acc).cwiseAbs().maxCoeff(), 1e-14);
    }
}

TEST(OuterLoop, OutputRespectsThrustLimit) {
    const SmcGains g = resolved();
    const OuterLoopOutput o = outer_loop(Vec3(0, 0, -50), Vec3::Zero(), hover_at(Vec3(0, 0, 50)), Vec3::Zero(), g,
                                         kVehicle);
    EXPECT_TRUE(o.limited);
    EXPECT_LE(kVehicle.mass * o.u1vec.norm(), g.u1_max * (1 + 1e-12));
}

TEST(LimitVirtualInput, ClipsVerticalFirst) {
    Vec3 u(3.0, 4.0, 30.0);
    EXPECT_TRUE(limit_virtual_input(u, 20.0));
    EXPECT_NEAR(u.norm(), 20.0, 1e-12);
    Vec3 small(0.1, 0.2, 9.0);
    EXPECT_FALSE(limit_virtual_input(small, 20.0));
    EXPECT_EQ(small, Vec3(0.1, 0.2, 9.0));
}

TEST(ExtractAttitude, LevelFlight) {
    const AttitudeSetpoint sp = extract_attitude(Vec3(0, 0, 9.81), 0.0, kVehicle.mass, 2.0);
    EXPECT_EQ(sp.angles.x(), 0.0);
    EXPECT_EQ(sp.angles.y(), 0.0);
    EXPECT_NEAR(sp.thrust, 0.27468, 1e-12);
}

TEST(ExtractAttitude, FortyFiveDegreePitch) {
    const double a = 5.0;
    const AttitudeSetpoint sp = extract_attitude(Vec3(a, 0, a), 0.0, kVehicle.mass, 2.0);
    EXPECT_NEAR(sp.angles.y(), kPi / 4, 1e-15);
    EXPECT_NEAR(sp.angles.x(), 0.0, 1e-15);
    EXPECT_NEAR(sp.thrust, std::sqrt(2.0) * kVehicle.mass * a, 1e-15);
}

TEST(ExtractAttitude, SingularBelowGuard) {
    EXPECT_THROW(extract_attitude(Vec3(1, 0, 1.0), 0.0, kVehicle.mass, 2.0), ThrustSingularity);
}

TEST(ExtractAttitude, ThrustDirectionRoundTrip) {
    std::mt19937_64 rng(21);
    std::uniform_real_distribution<double> h(-20.0, 20.0), v(2.0, 30.0), yaw(-kPi, kPi);
    for (int i = 0; i < 10000; ++i) {
        const Vec3 u(h(rng), h(rng), v(rng));
        const double psi = yaw(rng);
        const AttitudeSetpoint sp = extract_attitude(u, psi, kVehicle.mass, 2.0);
        ASSERT_LT(std::abs(sp.angles.x()), kPi / 2);
        ASSERT_LT(std::abs(sp.angles.y()), kPi / 2);
        const Vec3 back = model::thrust_direction(Vec3(sp.angles.x(), sp.angles.y(), psi)) * sp.thrust / kVehicle.mass;
        ASSERT_LE((back - u).norm(), 1e-9 * u.norm()) << u.transpose() << " psi=" << psi;
    }
}

TEST(InnerLoop, PerfectTrackingGivesZeroTorque) {
    const SmcGains g = resolved();
    const InnerLoopOutput o = inner_loop(Vec3(0.1, 0.2, 0.3), Vec3::Zero(), AttitudeSetpoint{Vec3(0.1, 0.2, 0.3), Vec3::Zero(), Vec3::Zero(), 0.3},
                                         Vec3::Zero(), Vec3::Zero(), g, kVehicle);
    EXPECT_EQ(o.torque, Vec3::Zero());
}

TEST(InnerLoop, CancelsEstimatedDisturbance) {
    const SmcGains g = resolved();
    const double c = 3.0;
    const Vec3 x4(0, 1, 1);
    const Vec3 f2v = model::f2(x4, kVehicle);
    AttitudeSetpoint sp;
    sp.rate = x4;
    const InnerLoopOutput o = inner_loop(Vec3::Zero(), x4, sp, Vec3(c, 0, 0), f2v, g, kVehicle);
    const Vec3 expected = kVehicle.inertia.cwiseProduct(Vec3(-f2v.x() - c, -f2v.y(), -f2v.z()));
    EXPECT_LE((o.torque - expected).cwiseAbs().maxCoeff(), 1e-18);
}

TEST(InnerLoop, YawErrorIsWrapped) {
    const SmcGains g = resolved();
    AttitudeSetpoint sp;
    sp.angles = Vec3(0, 0, kPi - 0.01);
    const InnerLoopOutput o = inner_loop(Vec3(0, 0, -kPi + 0.01), Vec3::Zero(), sp, Vec3::Zero(), Vec3::Zero(), g,
                                         kVehicle);
    EXPECT_NEAR(o.e2.z(), -0.02, 1e-12);
}

TEST(InnerLoop, TorqueWithinLimits) {
    const SmcGains g = resolved();
    AttitudeSetpoint sp;
    sp.angles = Vec3(1.2, -1.2, 3.0);
    const InnerLoopOutput o = inner_loop(Vec3::Zero(), Vec3(1000, -1000, 1000), sp, Vec3::Zero(), Vec3::Zero(), g, kVehicle);
    EXPECT_TRUE(o.limited);
    EXPECT_TRUE((o.torque.cwiseAbs().array() <= g.tau_max.array()).all());
}

TEST(GainCheck, Examples) {
    const GainCheck a = gain_check(Vec3::Constant(0.2), 0.01, Vec3::Zero(), Vec3::Constant(10.0));
    EXPECT_NEAR(a.threshold[0], 0.1, 1e-15);
    EXPECT_TRUE(a.all());
    const GainCheck b = gain_check(Vec3::Constant(1e-6), 0.01, Vec3::Zero(), Vec3::Zero());
    EXPECT_TRUE(b.all());
    const GainCheck c = gain_check(Vec3::Constant(0.05), 0.01, Vec3::Zero(), Vec3::Constant(10.0));
    EXPECT_FALSE(c.all());
}

TEST(SmcGains, ValidationAndDefaults) {
    SmcGains g;
    EXPECT_NO_THROW(g.validate());
    g.mu = 0.0;
    EXPECT_THROW(g.validate(), ConfigError);
    g = SmcGains{};
    g.L2[1] = -1.0;
    EXPECT_THROW(g.validate(), ConfigError);
    const SmcGains r = resolved();
    EXPECT_NEAR(r.u1_max, 2 * kVehicle.mass * kVehicle.gravity, 1e-15);
    EXPECT_EQ(r.tau_max, model::max_torque(kVehicle));
}

TEST(CascadeController, FirstUpdateHasZeroDerivatives) {
    CascadeController c(SmcGains{}, kVehicle, 0.002);
    c.update_outer(Vec3(0.1, 0, 0.5), Vec3::Zero(), hover_at(Vec3(0, 0, 0.5)), Vec3::Zero());
    EXPECT_EQ(c.setpoint().rate, Vec3::Zero());
    EXPECT_EQ(c.setpoint().accel, Vec3::Zero());
    c.update_outer(Vec3(0.1, 0, 0.5), Vec3(-0.1, 0, 0), hover_at(Vec3(0, 0, 0.5)), Vec3::Zero());
    EXPECT_NE(c.setpoint().rate, Vec3::Zero());
}

TEST(CascadeController, ClampsLowVerticalInput) {
    CascadeController c(SmcGains{}, kVehicle, 0.002);
    c.update_outer(Vec3(0, 0, 0.5), Vec3::Zero(), hover_at(Vec3(0, 0, 0.5)), Vec3(0, 0, 9.0));
    EXPECT_TRUE(c.thrust_singular());
    EXPECT_NEAR(c.setpoint().thrust, kVehicle.mass * 2.0, 1e-15);
}

TEST(ClosedLoopControl, OutputsStayWithinBounds) {
    for (const char* name : {"lemniscate_composite.json", "hover_constant.json", "hover_fan.json"}) {
        const sim::ScenarioConfig cfg = test::shipped(name);
        const auto r = sim::run_scenario(cfg);
        const SmcGains g = cfg.gains.resolved(cfg.vehicle);
        for (const auto& s : r.trace.samples) {
            ASSERT_GE(s.u1, 0.0);
            ASSERT_LE(s.u1, g.u1_max * (1 + 1e-12));
            ASSERT_TRUE((s.torque.cwiseAbs().array() <= g.tau_max.array() * (1 + 1e-12)).all()) << name;
            ASSERT_LT(std::abs(s.att_ref.x()), kPi / 2);
            ASSERT_LT(std::abs(s.att_ref.y()), kPi / 2);
        }
    }
}

TEST(ClosedLoopControl, SaturationReducesChattering) {
    sim::ScenarioConfig smooth = test::shipped("lemniscate_composite.json");
    smooth.duration = 10.0;
    sim::ScenarioConfig sign = smooth;
    sign.gains.mu = 1e-9;
    const double tv_smooth = report::total_variation_u1(sim::run_scenario(smooth).trace);
    const double tv_sign = report::total_variation_u1(sim::run_scenario(sign).trace);
    EXPECT_LT(tv_smooth, tv_sign);
}
