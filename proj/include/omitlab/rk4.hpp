#pragma once

namespace omitlab {

// Classical fixed-step fourth-order Runge-Kutta step for y' = f(t, y).
// State needs y + y, double * y.
template <typename State, typename Rhs>
State rk4_step(Rhs&& f, double t, const State& y, double h) {
    const State k1 = f(t, y);
    const State k2 = f(t + 0.5 * h, y + (0.5 * h) * k1);
    const State k3 = f(t + 0.5 * h, y + (0.5 * h) * k2);
    const State k4 = f(t + h, y + h * k3);
    return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

} // namespace omitlab
