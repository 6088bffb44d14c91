#include "omitlab/steady_state.hpp"

#include "omitlab/errors.hpp"

#include <algorithm>
#include <iterator>
#include <cmath>
#include <limits>

namespace omitlab {

namespace {

constexpr double kResidualFloor = 1e-30;

// Root of a cubic that is monotone on [lo, hi] with a sign change there.
// Newton steps, falling back to bisection whenever Newton leaves the bracket.
double bracketed_root(const SteadyStateCubic& f, double lo, double hi) {
    double flo = f(lo);
    if (flo == 0.0) {
        return lo;
    }
    if (f(hi) == 0.0) {
        return hi;
    }
    double x = 0.5 * (lo + hi);
    for (int iter = 0; iter < 400; ++iter) {
        const double fx = f(x);
        if (fx == 0.0) {
            return x;
        }
        if ((fx < 0.0) == (flo < 0.0)) {
            lo = x;
            flo = fx;
        } else {
            hi = x;
        }
        const double d = f.derivative(x);
        double next = d != 0.0 ? x - fx / d : 0.5 * (lo + hi);
        if (!(next > lo && next < hi)) {
            next = 0.5 * (lo + hi);
        }
        if (next == x || hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi))) {
            return next;
        }
        x = next;
    }
    return x;
}

// Expands from `from` in direction `dir` until f changes sign relative to f(from).
double expand_bracket(const SteadyStateCubic& f, double from, double dir) {
    const bool neg = f(from) < 0.0;
    double step = std::max(1.0, std::abs(from));
    for (int i = 0; i < 2100; ++i) {
        const double x = from + dir * step;
        if ((f(x) < 0.0) != neg) {
            return x;
        }
        step *= 2.0;
    }
    return from + dir * step;
}

} // namespace

double fixed_point_gain(const SystemConfig& cfg) {
    const double g = cfg.g();
    return kHbar * g * g / (cfg.m * cfg.omega_m * cfg.omega_m);
}

cplx pumped_amplitude(const SystemConfig& cfg, double eps_L, double beta) {
    const cplx i{0.0, 1.0};
    const cplx mu = i * cfg.Delta_L + cfg.gamma2 + cfg.gamma_tip;
    const cplx nu = i * (cfg.Delta_L - beta) + cfg.gamma1;
    return eps_L * mu / (nu * mu + cfg.J * cfg.J);
}

SteadyStateCubic steady_state_cubic(const SystemConfig& cfg, double eps_L) {
    // beta |p u + q|^2 = gain eps_L^2 |mu|^2 with u = Delta_L - beta,
    // p = i mu and q = gamma1 mu + J^2.
    const cplx i{0.0, 1.0};
    const cplx mu = i * cfg.Delta_L + cfg.gamma2 + cfg.gamma_tip;
    const cplx p = i * mu;
    const cplx q = cfg.gamma1 * mu + cfg.J * cfg.J;
    const double pp = std::norm(p);
    const double r = (p * std::conj(q)).real();
    const double d = cfg.Delta_L;
    SteadyStateCubic cubic;
    cubic.c[3] = pp;
    cubic.c[2] = -2.0 * (d * pp + r);
    cubic.c[1] = std::norm(p * d + q);
    cubic.c[0] = -fixed_point_gain(cfg) * eps_L * eps_L * std::norm(mu);
    return cubic;
}

std::vector<double> real_roots(const SteadyStateCubic& f) {
    if (!(f.c[3] > 0.0)) {
        throw NoPhysicalRoot("steady-state cubic must have a positive leading coefficient");
    }
    const double a = 3.0 * f.c[3];
    const double b = 2.0 * f.c[2];
    const double c = f.c[1];
    const double disc = b * b - 4.0 * a * c;

    std::vector<double> roots;
    if (disc <= 0.0) {
        // Monotone increasing: a single real root.
        const double f0 = f(0.0);
        if (f0 == 0.0) {
            return {0.0};
        }
        const double dir = f0 < 0.0 ? 1.0 : -1.0;
        const double far = expand_bracket(f, 0.0, dir);
        roots.push_back(bracketed_root(f, std::min(0.0, far), std::max(0.0, far)));
        return roots;
    }

    // Critical points split the line into monotone pieces: rising, falling, rising.
    const double s = -0.5 * (b + std::copysign(std::sqrt(disc), b));
    double r1 = s / a;
    double r2 = s != 0.0 ? c / s : -r1;
    if (r1 > r2) {
        std::swap(r1, r2);
    }
    const double f1 = f(r1);
    const double f2 = f(r2);
    if (f1 > 0.0) {
        roots.push_back(bracketed_root(f, expand_bracket(f, r1, -1.0), r1));
    } else if (f1 == 0.0) {
        roots.push_back(r1);
    }
    if ((f1 > 0.0 && f2 < 0.0) || (f1 < 0.0 && f2 > 0.0)) {
        roots.push_back(bracketed_root(f, r1, r2));
    }
    if (f2 < 0.0) {
        roots.push_back(bracketed_root(f, r2, expand_bracket(f, r2, 1.0)));
    } else if (f2 == 0.0 && f1 != 0.0) {
        roots.push_back(r2);
    }
    std::sort(roots.begin(), roots.end());
    return roots;
}

SteadyState solve_steady_state(const SystemConfig& cfg) {
    return solve_steady_state(cfg, drive_amplitudes(cfg).eps_L);
}

SteadyState solve_steady_state(const SystemConfig& cfg, double eps_L) {
    const double gain = fixed_point_gain(cfg);
    SteadyState ss;
    ss.eps_L = eps_L;

    double beta = 0.0;
    if (gain != 0.0 && eps_L != 0.0) {
        const auto roots = real_roots(steady_state_cubic(cfg, eps_L));
        std::vector<double> physical;
        std::copy_if(roots.begin(), roots.end(), std::back_inserter(physical), [](double r) { return r >= 0.0; });
        if (physical.empty()) {
            throw NoPhysicalRoot("no non-negative real root of the steady-state cubic");
        }
        beta = physical.front();
        ss.bistable = physical.size() >= 3;
    }

    ss.beta = beta;
    ss.a1_s = pumped_amplitude(cfg, eps_L, beta);
    const cplx mu = cplx{cfg.gamma2 + cfg.gamma_tip, cfg.Delta_L};
    ss.a2_s = cplx{0.0, cfg.J} * ss.a1_s / mu;
    const double g = cfg.g();
    ss.x_s = g != 0.0 ? beta / g : 0.0;
    ss.residual = std::abs(beta - gain * std::norm(ss.a1_s)) / std::max(beta, kResidualFloor);
    return ss;
}

} // namespace omitlab
