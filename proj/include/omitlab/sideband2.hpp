#pragma once

#include "omitlab/model_params.hpp"
#include "omitlab/omit_response.hpp"
#include "omitlab/steady_state.hpp"

#include <span>
#include <vector>

namespace omitlab {

// Coefficients of the e^{-2i eps t} problem.
struct SecondOrderCoeffs {
    cplx mu2_plus{};  // i Delta_L + gamma2 + gamma_tip + 2i eps
    cplx mu2_minus{};
    cplx nu2_plus{};  // i Delta_L + gamma1 - i g x_s + 2i eps
    cplx nu2_minus{};
    cplx A1_2{};      // conj(mu2_plus) conj(nu2_plus) + J^2
    cplx A2_2{};      // mu2_minus nu2_minus + J^2
    cplx K2{};        // m (omega_m^2 - 4 eps^2 - 2i eps Gamma_m)
    cplx lambda{};    // weight of the dx * da1 source term
};

SecondOrderCoeffs second_order_coeffs(const SystemConfig& cfg, const SteadyState& ss, double epsilon);

struct SecondOrderResponse {
    cplx da1_plus_2{};
    cplx da2_plus_2{}; // i J da1_plus_2 / mu2_minus
    double eta = 0.0;  // |2 gamma1 da1_plus_2 / eps_P|
    double eps_P = 0.0;
};

// Closed form for the second-order upper sideband, evaluated as a single
// fraction. `lr` must be the first-order response at the same epsilon.
SecondOrderResponse second_order_amplitude(const SystemConfig& cfg, const SteadyState& ss, const LinearResponse& lr,
                                           double epsilon);

// Same quantity from solving the second-order mechanical and optical balance
// directly (no lambda). Used as a consistency check on the closed form.
cplx second_order_amplitude_direct(const SystemConfig& cfg, const SteadyState& ss, const LinearResponse& lr,
                                   double epsilon);

struct SidebandPoint {
    double Delta_P = 0.0;
    double eta = 0.0;
};

// eta over a probe-detuning grid, in grid order.
std::vector<SidebandPoint> sideband_spectrum(const SystemConfig& cfg, std::span<const double> Delta_P_grid);

} // namespace omitlab
