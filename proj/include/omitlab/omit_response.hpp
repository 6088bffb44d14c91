#pragma once

#include "omitlab/model_params.hpp"
#include "omitlab/steady_state.hpp"

#include <complex>

namespace omitlab {

// Sideband coefficients of the linearised problem at probe offset epsilon.
struct FirstOrderCoeffs {
    cplx mu_plus{};  // i Delta_L + gamma2 + gamma_tip + i eps
    cplx mu_minus{}; // i Delta_L + gamma2 + gamma_tip - i eps
    cplx nu_plus{};  // i Delta_L + gamma1 - i g x_s + i eps
    cplx nu_minus{}; // i Delta_L + gamma1 - i g x_s - i eps
    cplx A1{};       // conj(mu_plus) conj(nu_plus) + J^2
    cplx A2{};       // mu_minus nu_minus + J^2
    cplx K{};        // m (omega_m^2 - eps^2 - i eps Gamma_m)
};

FirstOrderCoeffs first_order_coeffs(const SystemConfig& cfg, const SteadyState& ss, double epsilon);

// First-order (e^{-i eps t}) response to the probe.
struct LinearResponse {
    double epsilon = 0.0;
    double eps_P = 0.0;
    cplx dx_plus{};  // [m]
    cplx da1_plus{}; // [sqrt(photons)]
    cplx da2_plus{};
    cplx t_P{};      // 1 - 2 gamma1 da1_plus / eps_P
    double T_P = 0.0;
};

// Uses eps_P from drive_amplitudes(cfg). t_P is formed from the response per
// unit probe, so it stays defined (and identical) for eps_P = 0.
// Throws SingularDenominator when the common denominator vanishes relative
// to its natural scale.
LinearResponse linear_response(const SystemConfig& cfg, const SteadyState& ss, double epsilon);
LinearResponse linear_response(const SystemConfig& cfg, const SteadyState& ss, double epsilon, double eps_P);

// Solves the steady state and evaluates the response at eps = Delta_P + Delta_L.
LinearResponse probe_transmission(const SystemConfig& cfg, double Delta_P);

inline constexpr double kDefaultGroupDelayStep = 1e3; // s^-1

// d arg(t_P) / d Delta_P [s] by central differences at `step` and `step/2`
// combined by Richardson extrapolation. Throws NonConverged when the two
// levels disagree by more than 1e-3 relative.
double group_delay(const SystemConfig& cfg, double Delta_P, double step = kDefaultGroupDelayStep);
double group_delay(const SystemConfig& cfg, const SteadyState& ss, double Delta_P,
                   double step = kDefaultGroupDelayStep);

} // namespace omitlab
