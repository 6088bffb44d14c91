#include "omitlab/td_oracle.hpp"

#include "omitlab/errors.hpp"
#include "omitlab/rk4.hpp"
#include "omitlab/steady_state.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>
#include <string>

namespace omitlab {

namespace {

struct OracleState {
    double x = 0.0;
    double v = 0.0;
    cplx a1{};
    cplx a2{};

    friend OracleState operator+(const OracleState& a, const OracleState& b) {
        return {a.x + b.x, a.v + b.v, a.a1 + b.a1, a.a2 + b.a2};
    }
    friend OracleState operator*(double s, const OracleState& a) { return {s * a.x, s * a.v, s * a.a1, s * a.a2}; }
};

// Per-window averages used for transient and convergence detection.
struct WindowStats {
    double mean_x = 0.0;
    cplx mean_a1{};
    cplx first{};
    cplx second{};
};

bool close(cplx a, cplx b, double tol, double floor) {
    return std::abs(a - b) <= tol * std::max(std::abs(b), floor);
}

bool windows_agree(const WindowStats& prev, const WindowStats& cur, double tol) {
    const double scale = std::max({std::abs(cur.mean_a1), std::abs(cur.first), std::abs(cur.second)});
    const double floor = std::max(1e-10 * scale, 1e-300);
    const double x_floor = std::max(1e-10 * std::abs(cur.mean_x), 1e-300);
    return std::abs(cur.mean_x - prev.mean_x) <= tol * std::max(std::abs(cur.mean_x), x_floor) &&
           close(prev.mean_a1, cur.mean_a1, tol, floor) && close(prev.first, cur.first, tol, floor) &&
           close(prev.second, cur.second, tol, floor);
}

struct Window {
    std::size_t start = 0;
    std::size_t count = 0;
};

Window demod_window(const TdTrace& trace, double epsilon) {
    const std::size_t n = trace.size();
    std::size_t k0 = 0;
    if (trace.transient_end > trace.t0) {
        k0 = static_cast<std::size_t>(std::ceil((trace.transient_end - trace.t0) / trace.dt - 1e-9));
    }
    if (k0 >= n) {
        throw WindowTooShort("no samples after the transient");
    }
    if (epsilon == 0.0) {
        return {k0, n - k0};
    }
    const double period = kTwoPi / std::abs(epsilon);
    const double available = static_cast<double>(n - k0) * trace.dt;
    const double periods = std::floor(available / period * (1.0 + 1e-12));
    if (periods < 10.0) {
        throw WindowTooShort("demodulation window holds " + std::to_string(static_cast<int>(periods)) +
                             " probe periods, need at least 10");
    }
    auto count = static_cast<std::size_t>(std::llround(periods * period / trace.dt));
    count = std::min(count, n - k0);
    return {n - count, count};
}

} // namespace

double max_oracle_step(const SystemConfig& cfg, double epsilon) {
    const double fastest = std::max({std::abs(cfg.Delta_L), cfg.omega_m, std::abs(epsilon) + std::abs(cfg.Delta_L)});
    return 0.05 / fastest;
}

TdTrace integrate(const SystemConfig& cfg, double epsilon, const TdOptions& opts) {
    const auto drive = drive_amplitudes(cfg);
    const double bound = max_oracle_step(cfg, epsilon);
    if (opts.dt > bound) {
        throw StepTooLarge("dt = " + std::to_string(opts.dt) + " exceeds 0.05 / fastest rate = " + std::to_string(bound));
    }
    const double base_rate = epsilon != 0.0 ? std::abs(epsilon) : cfg.omega_m;
    const double period = kTwoPi / base_rate;
    const auto steps_per_period = static_cast<std::size_t>(std::ceil(period / (opts.dt > 0.0 ? opts.dt : bound)));
    const double dt = period / static_cast<double>(steps_per_period);

    const double damping_time = 1.0 / cfg.Gamma_m;
    const double t_final = opts.t_final > 0.0 ? opts.t_final : 60.0 * damping_time;
    if (t_final < 50.0 * damping_time * (1.0 - 1e-12)) {
        throw InvalidSpec("t_final must cover at least 50 mechanical damping times");
    }
    const double window_time = opts.window_time > 0.0 ? opts.window_time : std::max(10.0 * period, damping_time);
    const auto periods_per_window = static_cast<std::size_t>(std::max(1.0, std::ceil(window_time / period - 1e-9)));
    const std::size_t steps_per_window = periods_per_window * steps_per_period;
    const double window_span = static_cast<double>(steps_per_window) * dt;
    const auto n_windows = static_cast<std::size_t>(std::ceil(t_final / window_span - 1e-9));
    const std::size_t record_windows =
        std::clamp<std::size_t>(static_cast<std::size_t>(std::max(opts.record_windows, 2)), 2, n_windows);

    // e^{+i eps t} on one period; exact periodicity keeps windows orthogonal.
    std::vector<cplx> phasor(steps_per_period, cplx{1.0, 0.0});
    if (epsilon != 0.0) {
        const double sign = epsilon > 0.0 ? 1.0 : -1.0;
        for (std::size_t k = 0; k < steps_per_period; ++k) {
            phasor[k] = std::polar(1.0, sign * kTwoPi * static_cast<double>(k) / static_cast<double>(steps_per_period));
        }
    }

    const double g = cfg.g();
    const double force = kHbar * g / cfg.m;
    const double w2 = cfg.omega_m * cfg.omega_m;
    const cplx i{0.0, 1.0};
    const cplx left_rot{-cfg.gamma1, -cfg.Delta_L};
    const cplx right_rot{-(cfg.gamma2 + cfg.gamma_tip), -cfg.Delta_L};
    const cplx hop = i * cfg.J;
    auto rhs = [&](double t, const OracleState& s) {
        OracleState d;
        d.x = s.v;
        d.v = -cfg.Gamma_m * s.v - w2 * s.x + force * std::norm(s.a1);
        d.a1 = (left_rot + i * (g * s.x)) * s.a1 + hop * s.a2 + drive.eps_L +
               drive.eps_P * std::polar(1.0, -epsilon * t);
        d.a2 = right_rot * s.a2 + hop * s.a1;
        return d;
    };

    // Divergence scales from the steady state plus a probe-sized allowance.
    const auto ss = solve_steady_state(cfg, drive.eps_L);
    const double loss = std::min(cfg.gamma1, cfg.gamma2 + cfg.gamma_tip);
    const double a_scale = std::abs(ss.a1_s) + std::abs(ss.a2_s) + (drive.eps_L + drive.eps_P) / loss + 1e-300;
    const double x_scale = std::abs(ss.x_s) + force * a_scale * a_scale / w2 + 1e-300;

    TdTrace trace;
    trace.dt = dt;
    const std::size_t record_start = (n_windows - record_windows) * steps_per_window;
    trace.t0 = static_cast<double>(record_start) * dt;
    const std::size_t record_len = record_windows * steps_per_window;
    trace.x.reserve(record_len);
    trace.a1.reserve(record_len);
    trace.a2.reserve(record_len);

    std::vector<WindowStats> windows;
    windows.reserve(n_windows);
    OracleState y;
    std::size_t k = 0;
    const double inv = 1.0 / static_cast<double>(steps_per_window);
    for (std::size_t w = 0; w < n_windows; ++w) {
        WindowStats stats;
        for (std::size_t s = 0; s < steps_per_window; ++s, ++k) {
            const cplx p = phasor[k % steps_per_period];
            stats.mean_x += y.x;
            stats.mean_a1 += y.a1;
            stats.first += y.a1 * p;
            stats.second += y.a1 * p * p;
            if (k >= record_start) {
                trace.x.push_back(y.x);
                trace.a1.push_back(y.a1);
                trace.a2.push_back(y.a2);
            }
            y = rk4_step(rhs, static_cast<double>(k) * dt, y, dt);
        }
        stats.mean_x *= inv;
        stats.mean_a1 *= inv;
        stats.first *= inv;
        stats.second *= inv;
        windows.push_back(stats);
        const bool finite = std::isfinite(y.x) && std::isfinite(y.v) && std::isfinite(std::abs(y.a1)) &&
                            std::isfinite(std::abs(y.a2));
        if (!finite || std::abs(y.x) > 1e12 * x_scale || std::abs(y.a1) > 1e12 * a_scale ||
            std::abs(y.a2) > 1e12 * a_scale) {
            throw Diverged("trajectory diverged at t = " + std::to_string(static_cast<double>(k) * dt));
        }
    }

    // Earliest window from which every successive pair agrees.
    std::size_t settled = windows.size() - 1;
    while (settled > 0 && windows_agree(windows[settled - 1], windows[settled], opts.agreement)) {
        --settled;
    }
    trace.converged = windows.size() >= 2 && windows_agree(windows[windows.size() - 2], windows.back(), opts.agreement);
    trace.transient_end = std::max(static_cast<double>(settled * steps_per_window) * dt, 10.0 * damping_time);
    return trace;
}

cplx demodulate(const TdTrace& trace, double epsilon, int harmonic) {
    if (!trace.converged) {
        throw NonConverged("trace has not settled; successive windows disagree");
    }
    if (harmonic < 0) {
        throw InvalidSpec("harmonic must be >= 0");
    }
    if (epsilon == 0.0 && harmonic != 0) {
        throw InvalidSpec("demodulation needs a nonzero probe offset");
    }
    const auto win = demod_window(trace, epsilon);
    cplx sum{};
    const double rate = harmonic * epsilon;
    for (std::size_t k = win.start; k < win.start + win.count; ++k) {
        sum += trace.a1[k] * std::polar(1.0, rate * trace.time(k));
    }
    return sum / static_cast<double>(win.count);
}

double mean_displacement(const TdTrace& trace, double epsilon) {
    const auto win = demod_window(trace, epsilon);
    double sum = 0.0;
    for (std::size_t k = win.start; k < win.start + win.count; ++k) {
        sum += trace.x[k];
    }
    return sum / static_cast<double>(win.count);
}

OracleObservables oracle_observables(const SystemConfig& cfg, double Delta_P, const TdOptions& opts) {
    const double eps_P = drive_amplitudes(cfg).eps_P;
    if (!(eps_P > 0.0)) {
        throw InvalidSpec("oracle observables need a probe (eps_P > 0)");
    }
    const double epsilon = ProbeSetting::from_detuning(Delta_P, cfg.Delta_L).epsilon();
    const auto trace = integrate(cfg, epsilon, opts);
    OracleObservables out;
    out.first = demodulate(trace, epsilon, 1);
    out.second = demodulate(trace, epsilon, 2);
    out.T_P = std::norm(1.0 - 2.0 * cfg.gamma1 * out.first / eps_P);
    out.eta = std::abs(2.0 * cfg.gamma1 * out.second / eps_P);
    return out;
}

void write_trace_csv(std::ostream& out, const TdTrace& trace) {
    out << "t,x,re_a1,im_a1,re_a2,im_a2\n";
    char buf[256];
    for (std::size_t k = 0; k < trace.size(); ++k) {
        std::snprintf(buf, sizeof buf, "%.15g,%.15g,%.15g,%.15g,%.15g,%.15g\n", trace.time(k), trace.x[k],
                      trace.a1[k].real(), trace.a1[k].imag(), trace.a2[k].real(), trace.a2[k].imag());
        out << buf;
    }
}

} // namespace omitlab
