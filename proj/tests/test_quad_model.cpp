#include "hgdo/errors.hpp"
#include "hgdo/quad_model.hpp"

#include <gtest/gtest.h>

#include <Eigen/Geometry>

#include <cmath>
#include <random>

using namespace hgdo;
using namespace hgdo::model;

namespace {

// ZYX direction-cosine matrix written out entry by entry in long double.
Mat3 dcm_oracle(const Vec3& eta) {
    const long double ph = eta[0], th = eta[1], ps = eta[2];
    const long double cf = std::cos(ph), sf = std::sin(ph), ct = std::cos(th), st = std::sin(th), cp = std::cos(ps),
                      sp = std::sin(ps);
    Mat3 r;
    r << double(cp * ct), double(cp * st * sf - sp * cf), double(cp * st * cf + sp * sf),  //
        double(sp * ct), double(sp * st * sf + cp * cf), double(sp * st * cf - cp * sf),   //
        double(-st), double(ct * sf), double(ct * cf);
    return r;
}

}  // namespace

TEST(RotationMatrix, ZeroAnglesGiveIdentity) {
    EXPECT_EQ(rotation_matrix(Vec3::Zero()), Mat3::Identity());
}

TEST(RotationMatrix, PureYawQuarterTurn) {
    const Mat3 r = rotation_matrix(Vec3(0, 0, kPi / 2));
    EXPECT_NEAR(r(0, 0), 0.0, 1e-15);
    EXPECT_NEAR(r(1, 0), 1.0, 1e-15);
    EXPECT_NEAR(r(2, 0), 0.0, 1e-15);
}

TEST(RotationMatrix, MatchesEntrywiseOracle) {
    const Vec3 eta(0.1, 0.2, 0.3);
    const Mat3 r = rotation_matrix(eta);
    EXPECT_LE((r - dcm_oracle(eta)).cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_LE((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_NEAR(r.determinant(), 1.0, 1e-12);
    const Mat3 aa = (Eigen::AngleAxisd(0.3, Vec3::UnitZ()) * Eigen::AngleAxisd(0.2, Vec3::UnitY()) *
                     Eigen::AngleAxisd(0.1, Vec3::UnitX()))
                        .toRotationMatrix();
    EXPECT_LE((r - aa).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(RotationMatrix, OrthonormalOnRandomAngles) {
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int i = 0; i < 10000; ++i) {
        const Vec3 eta(u(rng), u(rng), u(rng));
        const Mat3 r = rotation_matrix(eta);
        ASSERT_LE((r.transpose() * r - Mat3::Identity()).cwiseAbs().maxCoeff(), 1e-12) << eta.transpose();
        ASSERT_NEAR(r.determinant(), 1.0, 1e-12);
    }
}

TEST(RotationMatrix, ThrustDirectionIsThirdColumn) {
    const Vec3 eta(0.3, -0.2, 1.1);
    EXPECT_EQ(thrust_direction(eta), rotation_matrix(eta).col(2));
}

TEST(EulerRateMatrix, IdentityAtZero) {
    EXPECT_EQ(euler_rate_matrix(Vec3::Zero()), Mat3::Identity());
}

TEST(EulerRateMatrix, RollQuarterPi) {
    const Mat3 h = euler_rate_matrix(Vec3(kPi / 4, 0, 0));
    const double c = std::cos(kPi / 4), s = std::sin(kPi / 4);
    Mat3 expected;
    expected << 1, 0, 0, 0, c, -s, 0, s, c;
    EXPECT_LE((h - expected).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(EulerRateMatrix, GimbalLockThrows) {
    EXPECT_THROW(euler_rate_matrix(Vec3(0, kPi / 2, 0)), GimbalLock);
}

TEST(EulerRateMatrix, InvertibleAwayFromLock) {
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> a(-kPi, kPi), th(-1.5, 1.5);
    for (int i = 0; i < 1000; ++i) {
        const Mat3 h = euler_rate_matrix(Vec3(a(rng), th(rng), a(rng)));
        EXPECT_GT(std::abs(h.determinant()), 1e-3);
    }
}

TEST(RotorWrench, SymmetricHover) {
    const VehicleParams p;
    RotorSpeeds w;
    w.omega.setConstant(1500.0);
    const WrenchCommand c = rotor_wrench(w, p);
    EXPECT_NEAR(c.thrust, 4 * p.k_thrust * 1500.0 * 1500.0, 1e-15);
    EXPECT_LE(c.torque.cwiseAbs().maxCoeff(), 1e-15);
}

TEST(RotorWrench, ZeroSpeeds) {
    const WrenchCommand c = rotor_wrench(RotorSpeeds{}, VehicleParams{});
    EXPECT_EQ(c.thrust, 0.0);
    EXPECT_EQ(c.torque, Vec3::Zero());
}

TEST(RotorWrench, HoverThrustOfNanoQuad) {
    RotorSpeeds w;
    w.omega.setConstant(std::sqrt(2.38437e6));
    EXPECT_NEAR(rotor_wrench(w, VehicleParams{}).thrust, 0.27468, 1e-5);
}

TEST(AllocateRotors, HoverThrust) {
    const VehicleParams p;
    const AllocationResult a = allocate_rotors({0.27468, Vec3::Zero()}, p);
    EXPECT_FALSE(a.saturated);
    for (int i = 0; i < 4; ++i) {
        EXPECT_NEAR(a.speeds.omega[i] * a.speeds.omega[i], 0.27468 / (4 * p.k_thrust), 1e-3);
        EXPECT_NEAR(a.speeds.omega[i], 1544.1, 0.05);
    }
}

TEST(AllocateRotors, ZeroWrench) {
    const AllocationResult a = allocate_rotors({0.0, Vec3::Zero()}, VehicleParams{});
    EXPECT_EQ(a.speeds.omega, Vec4::Zero());
}

TEST(AllocateRotors, RoundTripOnFeasibleSet) {
    const VehicleParams p;
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(200.0, 2400.0);
    for (int i = 0; i < 10000; ++i) {
        RotorSpeeds w;
        for (int j = 0; j < 4; ++j) w.omega[j] = u(rng);
        const WrenchCommand c = rotor_wrench(w, p);
        const AllocationResult a = allocate_rotors(c, p);
        ASSERT_FALSE(a.saturated);
        const WrenchCommand back = rotor_wrench(a.speeds, p);
        ASSERT_NEAR(back.thrust, c.thrust, 1e-9 * std::abs(c.thrust));
        const double scale = std::max(c.torque.norm(), 1e-12);
        ASSERT_LE((back.torque - c.torque).norm(), 1e-9 * std::max(scale, max_torque(p).norm() * 1e-3));
        ASSERT_LE((a.speeds.omega - w.omega).cwiseAbs().maxCoeff(), 1e-9 * 2400.0);
    }
}

TEST(AllocateRotors, NegativeSquaresSaturate) {
    const VehicleParams p;
    const AllocationResult a = allocate_rotors({0.01, Vec3(1e-3, 0, 0)}, p);
    EXPECT_TRUE(a.saturated);
    EXPECT_TRUE((a.speeds.omega.array() >= 0.0).all());
    EXPECT_TRUE((a.speeds.omega.array() <= p.omega_max).all());
}

TEST(F2, Examples) {
    const VehicleParams p;
    EXPECT_EQ(f2(Vec3::Zero(), p), Vec3::Zero());
    const Vec3 a = f2(Vec3(0, 1, 1), p);
    EXPECT_NEAR(a[0], -0.55, 1e-12);
    EXPECT_NEAR(a[1], 0.0, 1e-15);
    EXPECT_NEAR(a[2], 0.0, 1e-15);
    EXPECT_LE(f2(Vec3(1, 1, 0), p).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CanonicalDeriv, HoverEquilibrium) {
    const VehicleParams p;
    RigidState s;
    s.x1 = Vec3(1, 2, 3);
    const RigidState d = canonical_deriv(s, Vec3(0, 0, p.gravity), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), p);
    EXPECT_EQ(d.x1, Vec3::Zero());
    EXPECT_EQ(d.x2, Vec3::Zero());
    EXPECT_EQ(d.x3, Vec3::Zero());
    EXPECT_EQ(d.x4, Vec3::Zero());
}

TEST(CanonicalDeriv, FreeFall) {
    const VehicleParams p;
    const RigidState d = canonical_deriv(RigidState{}, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), p);
    EXPECT_EQ(d.x2, Vec3(0, 0, -9.81));
}

TEST(CanonicalDeriv, GyroscopicTerm) {
    const VehicleParams p;
    RigidState s;
    s.x4 = Vec3(0, 1, 1);
    const RigidState d = canonical_deriv(s, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), p);
    EXPECT_NEAR(d.x4[0], -0.55, 1e-12);
    EXPECT_EQ(d.x3, s.x4);
}

TEST(CanonicalDeriv, SuperpositionInInputs) {
    const VehicleParams p;
    std::mt19937_64 rng(5);
    std::normal_distribution<double> n;
    auto rv = [&] { return Vec3(n(rng), n(rng), n(rng)); };
    for (int i = 0; i < 1000; ++i) {
        RigidState s{rv(), rv(), rv(), rv()};
        const Vec3 a1 = rv(), a2 = rv(), b1 = rv(), b2 = rv(), c1 = rv(), c2 = rv(), e1 = rv(), e2 = rv();
        const RigidState d0 = canonical_deriv(s, Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), Vec3::Zero(), p);
        const RigidState da = canonical_deriv(s, a1, b1, c1, e1, p);
        const RigidState db = canonical_deriv(s, a2, b2, c2, e2, p);
        const RigidState dab = canonical_deriv(s, a1 + a2, b1 + b2, c1 + c2, e1 + e2, p);
        // Affine in the inputs: d(a+b) - d(0) = (d(a) - d(0)) + (d(b) - d(0)).
        ASSERT_LE(((dab.x2 - d0.x2) - (da.x2 - d0.x2) - (db.x2 - d0.x2)).cwiseAbs().maxCoeff(), 1e-12);
        ASSERT_LE(((dab.x4 - d0.x4) - (da.x4 - d0.x4) - (db.x4 - d0.x4)).cwiseAbs().maxCoeff(), 1e-12);
        ASSERT_EQ(dab.x1, da.x1);
        ASSERT_EQ(dab.x3, da.x3);
    }
}

TEST(FullNonlinear, Hover) {
    const VehicleParams p;
    const BodyState d =
        full_nonlinear_deriv(BodyState{}, {p.mass * p.gravity, Vec3::Zero()}, Vec3::Zero(), Vec3::Zero(), p);
    EXPECT_LE(d.velocity.cwiseAbs().maxCoeff(), 1e-15);
    EXPECT_EQ(d.body_rates, Vec3::Zero());
    EXPECT_EQ(d.attitude, Vec3::Zero());
}

TEST(FullNonlinear, FreeFall) {
    const VehicleParams p;
    const BodyState d = full_nonlinear_deriv(BodyState{}, {}, Vec3::Zero(), Vec3::Zero(), p);
    EXPECT_EQ(d.velocity, Vec3(0, 0, -p.gravity));
    EXPECT_EQ(d.body_rates, Vec3::Zero());
}

TEST(FullNonlinear, AgreesWithCanonicalAtZeroAttitude) {
    const VehicleParams p;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> n;
    for (int i = 0; i < 100; ++i) {
        BodyState s;
        s.position = Vec3(n(rng), n(rng), n(rng));
        s.velocity = Vec3(n(rng), n(rng), n(rng));
        const WrenchCommand w{std::abs(n(rng)) * 0.3, Vec3(n(rng), n(rng), n(rng)) * 1e-4};
        const Vec3 d1(n(rng), n(rng), n(rng)), d2(n(rng), n(rng), n(rng));
        const BodyState full = full_nonlinear_deriv(s, w, p.mass * d1, p.inertia.cwiseProduct(d2), p);
        RigidState c{s.position, s.velocity, Vec3::Zero(), Vec3::Zero()};
        const RigidState can = canonical_deriv(c, w.virtual_translational(Vec3::Zero(), p), w.virtual_rotational(p), d1,
                                               d2, p);
        ASSERT_LE((full.velocity - can.x2).cwiseAbs().maxCoeff(), 1e-14 * (1 + can.x2.norm()));
        ASSERT_LE((full.body_rates - can.x4).cwiseAbs().maxCoeff(), 1e-14 * (1 + can.x4.norm()));
        ASSERT_EQ(full.position, can.x1);
        ASSERT_EQ(full.attitude, can.x3);
    }
}

TEST(VehicleParams, RejectsNonPositive) {
    VehicleParams p;
    p.mass = 0.0;
    EXPECT_THROW(p.validate(), ConfigError);
    p = VehicleParams{};
    p.inertia[1] = -1.0;
    EXPECT_THROW(p.validate(), ConfigError);
    EXPECT_NO_THROW(VehicleParams{}.validate());
}
