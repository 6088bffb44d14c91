#pragma once

#include "omitlab/model_params.hpp"

#include <complex>
#include <iosfwd>
#include <vector>

namespace omitlab {

using cplx = std::complex<double>;

// Tail of a time-domain trajectory of the full nonlinear mean-field
// equations, sampled on a uniform grid.
struct TdTrace {
    double t0 = 0.0; // time of sample 0 [s]
    double dt = 0.0; // uniform spacing [s]
    std::vector<double> x;
    std::vector<cplx> a1;
    std::vector<cplx> a2;
    bool converged = false;
    double transient_end = 0.0; // [s]

    std::size_t size() const { return x.size(); }
    double time(std::size_t k) const { return t0 + static_cast<double>(k) * dt; }
};

struct TdOptions {
    double t_final = 0.0;     // 0: 60 / Gamma_m. Must cover >= 50 / Gamma_m.
    double dt = 0.0;          // 0: largest admissible step
    double window_time = 0.0; // 0: max(10 periods, 1 / Gamma_m)
    int record_windows = 4;   // windows kept in the returned trace
    double agreement = 1e-4;  // successive-window tolerance
};

// Largest admissible step for the given probe offset.
double max_oracle_step(const SystemConfig& cfg, double epsilon);

// Integrates x, dx/dt, a1, a2 from rest with fixed-step RK4. The step is
// shrunk so that one probe period is an integer number of steps. Throws
// StepTooLarge, InvalidSpec (t_final too short) or Diverged.
TdTrace integrate(const SystemConfig& cfg, double epsilon, const TdOptions& opts = {});

// Coefficient of e^{-i n eps t} in a1(t): the mean of a1 e^{+i n eps t}
// over an integer number of probe periods after transient_end. Throws
// NonConverged for an unconverged trace and WindowTooShort below 10 periods.
cplx demodulate(const TdTrace& trace, double epsilon, int harmonic);

// Mean of x(t) over the same window.
double mean_displacement(const TdTrace& trace, double epsilon);

struct OracleObservables {
    double T_P = 0.0;
    double eta = 0.0;
    cplx first{};  // demodulated e^{-i eps t} amplitude of a1
    cplx second{}; // demodulated e^{-2i eps t} amplitude of a1
};

// Integrates at eps = Delta_P + Delta_L and normalises the demodulated
// sidebands like the analytic transmission and efficiency.
OracleObservables oracle_observables(const SystemConfig& cfg, double Delta_P, const TdOptions& opts = {});

// Columns: t, x, Re a1, Im a1, Re a2, Im a2.
void write_trace_csv(std::ostream& out, const TdTrace& trace);

} // namespace omitlab
