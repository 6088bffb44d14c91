#include "omitlab/optical_response.hpp"

#include "omitlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace omitlab {

OpticalTransmission optical_transmission(const SystemConfig& cfg, double Delta1, double Delta2) {
    const cplx right{cfg.gamma2 + cfg.gamma_tip, Delta2};
    const cplx left{cfg.gamma1, Delta1};
    const cplx t = 1.0 - 2.0 * cfg.gamma1 * right / (left * right + cfg.J * cfg.J);
    return {t, std::norm(t)};
}

TurningPoint turning_point(const SystemConfig& cfg, double Delta1, double Delta2) {
    const cplx left{cfg.gamma1, Delta1};
    const double J2 = cfg.J * cfg.J;
    const cplx tp = -cplx{cfg.gamma2, Delta2} + left * J2 / (Delta1 * Delta1 + cfg.gamma1 * cfg.gamma1);
    TurningPoint out;
    out.gamma_tp_complex = tp;
    out.gamma_tp = tp.real();
    out.physical = tp.real() >= 0.0;
    out.approximate = std::abs(tp.imag()) / cfg.gamma1 > 1e-2;
    return out;
}

ModeSpectrum supermode_frequencies(const SystemConfig& cfg, double omega1, double omega2) {
    const double dw = omega1 - omega2;
    const double d = (cfg.gamma2 - cfg.gamma1) + cfg.gamma_tip;
    const double twoJ = 2.0 * cfg.J;
    // (dw + i d)^2 + 4J^2, factored so the EP cancellation stays exact.
    const cplx radicand{dw * dw - (d - twoJ) * (d + twoJ), 2.0 * dw * d};
    const cplx root = std::sqrt(radicand);
    const cplx centre{0.5 * (omega1 + omega2), -0.5 * (cfg.gamma1 + cfg.gamma2 + cfg.gamma_tip)};
    ModeSpectrum s;
    s.omega_plus = centre + 0.5 * root;
    s.omega_minus = centre - 0.5 * root;
    s.splitting = std::abs(root);
    return s;
}

std::vector<ModeSpectrum> track_supermodes(std::span<const ModeSpectrum> spectra) {
    std::vector<ModeSpectrum> out(spectra.begin(), spectra.end());
    for (std::size_t k = 1; k < out.size(); ++k) {
        cplx pred_plus = out[k - 1].omega_plus;
        cplx pred_minus = out[k - 1].omega_minus;
        if (k >= 2) {
            pred_plus = 2.0 * pred_plus - out[k - 2].omega_plus;
            pred_minus = 2.0 * pred_minus - out[k - 2].omega_minus;
        }
        auto& cur = out[k];
        const double keep = std::abs(cur.omega_plus - pred_plus) + std::abs(cur.omega_minus - pred_minus);
        const double swap = std::abs(cur.omega_minus - pred_plus) + std::abs(cur.omega_plus - pred_minus);
        if (swap < keep) {
            std::swap(cur.omega_plus, cur.omega_minus);
        }
    }
    return out;
}

double exceptional_point(const SystemConfig& cfg) {
    return cfg.gamma1 - cfg.gamma2 + 2.0 * cfg.J;
}

double exceptional_point(const SystemConfig& cfg, double omega1, double omega2) {
    if (omega1 != omega2) {
        throw DetunedModes("closed-form EP needs identical bare resonances; scan the splitting minimum instead");
    }
    return exceptional_point(cfg);
}

TpScanResult numeric_tp_scan(const SystemConfig& cfg, double Delta1, double Delta2, double gamma_lo,
                             double gamma_hi, int n_points, double rel_tol) {
    if (n_points < 3) {
        throw InvalidSpec("numeric_tp_scan needs at least 3 grid points");
    }
    if (!(gamma_lo >= 0.0) || !(gamma_hi > gamma_lo)) {
        throw InvalidSpec("numeric_tp_scan needs 0 <= gamma_lo < gamma_hi");
    }
    auto T_at = [&](double gamma_tip) {
        SystemConfig c = cfg;
        c.gamma_tip = gamma_tip;
        return optical_transmission(c, Delta1, Delta2).T;
    };
    const double step = (gamma_hi - gamma_lo) / (n_points - 1);
    auto node = [&](int k) { return k == n_points - 1 ? gamma_hi : gamma_lo + k * step; };

    int best = 0;
    double best_T = T_at(node(0));
    for (int k = 1; k < n_points; ++k) {
        const double T = T_at(node(k));
        if (T < best_T) {
            best_T = T;
            best = k;
        }
    }
    if (best == 0 || best == n_points - 1) {
        throw NoInteriorMinimum("transmission is monotonic over gamma_tip in [" + std::to_string(gamma_lo) + ", " +
                                std::to_string(gamma_hi) + "]");
    }

    constexpr double kInvPhi = 0.61803398874989484820;
    double a = node(best - 1);
    double b = node(best + 1);
    double x1 = b - kInvPhi * (b - a);
    double x2 = a + kInvPhi * (b - a);
    double f1 = T_at(x1);
    double f2 = T_at(x2);
    for (int iter = 0; iter < 300 && b - a > rel_tol * std::max(std::abs(a), std::abs(b)); ++iter) {
        if (f1 < f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - kInvPhi * (b - a);
            f1 = T_at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + kInvPhi * (b - a);
            f2 = T_at(x2);
        }
    }
    const double x = f1 < f2 ? x1 : x2;
    return {x, std::min(f1, f2)};
}

} // namespace omitlab
