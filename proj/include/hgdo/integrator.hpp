// Fixed-step classical Runge-Kutta.
#pragma once

#include "hgdo/errors.hpp"

#include <Eigen/Dense>

#include <string>

namespace hgdo::sim {

/// One classical RK4 step of x' = f(t, x). Throws NonFinite if any stage
/// derivative contains NaN or Inf.
template <class Derived, class F>
typename Derived::PlainObject rk4_step(F&& f, const Eigen::MatrixBase<Derived>& x, double t, double dt) {
    using State = typename Derived::PlainObject;
    auto checked = [&](double ts, const State& xs) {
        State k = f(ts, xs);
        if (!k.allFinite()) throw NonFinite("rk4_step: derivative is not finite at t = " + std::to_string(ts));
        return k;
    };
    const State x0 = x;
    const State k1 = checked(t, x0);
    const State k2 = checked(t + 0.5 * dt, x0 + 0.5 * dt * k1);
    const State k3 = checked(t + 0.5 * dt, x0 + 0.5 * dt * k2);
    const State k4 = checked(t + dt, x0 + dt * k3);
    return x0 + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace hgdo::sim
