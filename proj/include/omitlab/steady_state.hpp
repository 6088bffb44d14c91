#pragma once

#include "omitlab/model_params.hpp"

#include <array>
#include <complex>
#include <vector>

namespace omitlab {

using cplx = std::complex<double>;

// Self-consistent operating point of the pumped system.
struct SteadyState {
    double x_s = 0.0;      // mechanical displacement [m]
    cplx a1_s{};           // intracavity amplitudes [sqrt(photons)]
    cplx a2_s{};
    double beta = 0.0;     // g * x_s [s^-1]
    double residual = 0.0; // relative fixed-point error
    double eps_L = 0.0;    // pump amplitude the state was solved for
    bool bistable = false; // three non-negative roots; lowest branch returned

    double photon_number() const { return std::norm(a1_s); }
};

// Coefficients c[0] + c[1] b + c[2] b^2 + c[3] b^3 whose real roots are the
// self-consistent values of beta = g x_s.
struct SteadyStateCubic {
    std::array<double, 4> c{};

    double operator()(double beta) const { return ((c[3] * beta + c[2]) * beta + c[1]) * beta + c[0]; }
    double derivative(double beta) const { return (3.0 * c[3] * beta + 2.0 * c[2]) * beta + c[1]; }
};

// hbar g^2 / (m omega_m^2): beta = gain * |a1_s|^2.
double fixed_point_gain(const SystemConfig& cfg);

// a1_s for a given optomechanical frequency shift beta.
cplx pumped_amplitude(const SystemConfig& cfg, double eps_L, double beta);

SteadyStateCubic steady_state_cubic(const SystemConfig& cfg, double eps_L);

// All real roots, ascending, each polished to full precision.
std::vector<double> real_roots(const SteadyStateCubic& cubic);

// Picks the smallest non-negative root (the branch connected to beta = 0 at
// vanishing pump). Throws NoPhysicalRoot when none exists.
SteadyState solve_steady_state(const SystemConfig& cfg);

// Same, with the pump amplitude given directly.
SteadyState solve_steady_state(const SystemConfig& cfg, double eps_L);

} // namespace omitlab
