#pragma once

#include "omitlab/model_params.hpp"

#include <complex>
#include <span>
#include <vector>

namespace omitlab {

using cplx = std::complex<double>;

// Transmission of the purely optical coupled pair (COM coupling ignored).
// Delta_i = omega_P - omega_i.
struct OpticalTransmission {
    cplx t{};      // a1_out / a1_in
    double T = 0.0; // |t|^2
};

OpticalTransmission optical_transmission(const SystemConfig& cfg, double Delta1, double Delta2);

// Tip loss at which T(gamma_tip) turns from falling to rising.
struct TurningPoint {
    cplx gamma_tp_complex{};
    double gamma_tp = 0.0;    // real part, reported as the physical value
    bool physical = true;     // false when gamma_tp < 0: T is monotonic in gamma_tip
    bool approximate = false; // |Im| / gamma1 > 1e-2: off-resonance estimate, use numeric_tp_scan
};

TurningPoint turning_point(const SystemConfig& cfg, double Delta1, double Delta2);

// Complex supermode eigenfrequencies of the coupled pair.
struct ModeSpectrum {
    cplx omega_plus{};
    cplx omega_minus{};
    double splitting = 0.0; // |omega_plus - omega_minus|
};

// Principal square-root branch. omega1/omega2 are the bare resonances; pass
// 0 for both to get frequencies relative to omega_c.
ModeSpectrum supermode_frequencies(const SystemConfig& cfg, double omega1, double omega2);

// Reorders a sequence of spectra (e.g. along a gamma_tip sweep) so that each
// branch continues the one before it, matching by nearest neighbour against
// a linear prediction from the previous two points.
std::vector<ModeSpectrum> track_supermodes(std::span<const ModeSpectrum> spectra);

// gamma1 - gamma2 + 2J, valid for identical bare resonances.
double exceptional_point(const SystemConfig& cfg);

// Throws DetunedModes when omega1 != omega2; the closed form does not apply.
double exceptional_point(const SystemConfig& cfg, double omega1, double omega2);

struct TpScanResult {
    double gamma_at_min = 0.0;
    double T_min = 0.0;
};

// Grid scan of T over gamma_tip in [gamma_lo, gamma_hi] followed by
// golden-section refinement of the bracketed minimum. Throws
// NoInteriorMinimum when the grid minimum sits on the range boundary.
TpScanResult numeric_tp_scan(const SystemConfig& cfg, double Delta1, double Delta2, double gamma_lo,
                             double gamma_hi, int n_points, double rel_tol = 1e-9);

} // namespace omitlab
