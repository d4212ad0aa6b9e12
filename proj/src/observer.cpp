#include "hgdo/observer.hpp"

#include "hgdo/errors.hpp"
#include "hgdo/integrator.hpp"

#include <cmath>

namespace hgdo::obs {

namespace {

void require_positive(double eps) {
    if (!(eps > 0.0)) throw NonPositiveEpsilon(eps);
}

HgdoState step_with_forcing(const HgdoState& st, const Vec3& x, const Vec3& forcing, double dt) {
    require_positive(st.epsilon);
    const int n = required_substeps(dt, st.epsilon);
    const double h = dt / n;
    const double eps = st.epsilon;
    auto f = [&](double, const Vec3& g) -> Vec3 { return gamma_rate(g, x, forcing, eps); };
    HgdoState out = st;
    for (int i = 0; i < n; ++i) out.gamma = sim::rk4_step(f, out.gamma, 0.0, h);
    return out;
}

}  // namespace

HgdoState hgdo_init(const Vec3& x, double epsilon, const Vec3& d_hat0, Loop loop) {
    require_positive(epsilon);
    return {d_hat0 - x / epsilon, epsilon, loop};
}

Vec3 reconstruct(const HgdoState& st, const Vec3& x) { return st.gamma + x / st.epsilon; }

Vec3 gamma_rate(const Vec3& gamma, const Vec3& x, const Vec3& forcing, double epsilon) {
    return (-(gamma + x / epsilon) + forcing) / epsilon;
}

Vec3 naive_rate(const Vec3& d_hat, const Vec3& x_dot, const Vec3& forcing, double epsilon) {
    return (x_dot + forcing - d_hat) / epsilon;
}

int required_substeps(double dt, double epsilon) {
    require_positive(epsilon);
    const double limit = epsilon / 20.0;
    if (dt <= limit) return 1;
    return static_cast<int>(std::ceil(dt / limit - 1e-9));
}

HgdoState hgdo_step_trans(const HgdoState& st, const Vec3& x2, const Vec3& u1vec, double g, double dt) {
    return step_with_forcing(st, x2, forcing_trans(u1vec, g), dt);
}

HgdoState hgdo_step_rot(const HgdoState& st, const Vec3& x4, const Vec3& f2val, const Vec3& u2vec, double dt) {
    return step_with_forcing(st, x4, forcing_rot(f2val, u2vec), dt);
}

Vec3 naive_hgdo_step(const Vec3& d_hat, const Vec3& x_dot, const Vec3& forcing, double epsilon, double dt) {
    require_positive(epsilon);
    const int n = required_substeps(dt, epsilon);
    const double h = dt / n;
    auto f = [&](double, const Vec3& d) -> Vec3 { return naive_rate(d, x_dot, forcing, epsilon); };
    Vec3 out = d_hat;
    for (int i = 0; i < n; ++i) out = sim::rk4_step(f, out, 0.0, h);
    return out;
}

const Vec3& DerivativeEstimator::update(const Vec3& x) {
    if (primed_) {
        const Vec3 raw = (x - last_) / dt_;
        rate_ += alpha_ * (raw - rate_);
    }
    last_ = x;
    primed_ = true;
    return rate_;
}

}  // namespace hgdo::obs
