#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace omitlab {

inline constexpr double kHbar = 1.0545718e-34; // J s
inline constexpr double kTwoPi = 6.283185307179586476925286766559;

// How the nominal "193 THz" optical carrier is turned into an angular
// frequency when omega_c is not given explicitly.
//   face_value: omega_c = 193e12 s^-1 (same rule as every other rate)
//   two_pi:     omega_c = 2 pi x 193e12 s^-1
enum class CarrierConvention { face_value, two_pi };

std::string_view to_string(CarrierConvention c);
CarrierConvention carrier_from_string(std::string_view s);

// Physical constants and rates of the compound system. Every rate is an
// angular frequency in s^-1; m in kg, R in m, powers in W.
struct SystemConfig {
    double gamma1 = 6.43e6;
    double gamma2 = 6.43e6;
    double gamma_tip = 0.0;
    double J = 12.86e6;
    double omega_c = 193e12;
    double omega_m = kTwoPi * 23.4e6;
    double m = 5e-11;
    double Gamma_m = 0.24e6;
    double R = 34.5e-6;
    std::optional<double> g_explicit; // unset: g = omega_c / R
    double P_L = 1e-3;
    std::optional<double> P_in;       // unset: P_in = probe_ratio^2 * P_L
    double probe_ratio = 0.05;        // eps_P / eps_L when P_in is unset
    double Delta_L = kTwoPi * 23.4e6; // omega_c - omega_L
    CarrierConvention carrier = CarrierConvention::face_value;

    double g() const { return g_explicit ? *g_explicit : omega_c / R; }
    double probe_power() const { return P_in ? *P_in : probe_ratio * probe_ratio * P_L; }

    // Throws ConfigError naming the offending field and bound.
    void validate() const;

    bool operator==(const SystemConfig&) const = default;
};

// Fig. 3 operating point of the compound system (pump red-detuned by omega_m).
SystemConfig default_config(CarrierConvention carrier = CarrierConvention::face_value);

// Parses a flat `key = value` document. Unknown keys, malformed values and
// constraint violations raise ConfigError. Missing keys keep the defaults.
//
// Rate keys (gamma1, gamma2, gamma_tip, J, omega_c, omega_m, Gamma_m,
// Delta_L) are read in units of `rate_unit` (default 1e6 s^-1) and may carry
// a `* 2pi` (or `2pi *`) marker. `g` is in s^-1 m^-1, other keys in SI.
SystemConfig load_config(std::string_view text);

// Same, but overrides are applied on top of `base` instead of the defaults.
SystemConfig load_config(std::string_view text, const SystemConfig& base);

// Applies `key=value` assignments (CLI --set) in order.
SystemConfig apply_overrides(SystemConfig cfg, const std::vector<std::string>& assignments);

// Writes a document that load_config reads back to a field-identical value.
std::string serialize_config(const SystemConfig& cfg);

// Numeric field access by name, in SI units. Used by the sweep engine.
bool is_config_field(std::string_view name);
double get_field(const SystemConfig& cfg, std::string_view name);
void set_field(SystemConfig& cfg, std::string_view name, double value);
const std::vector<std::string>& config_field_names();

struct DriveAmplitudes {
    double eps_L = 0.0; // sqrt(photons / s)
    double eps_P = 0.0;
};

// Pump and probe amplitudes with gamma_c = gamma1 and omega_L ~ omega_P ~ omega_c.
DriveAmplitudes drive_amplitudes(const SystemConfig& cfg);

// A probe tone, keeping Delta_P = epsilon - Delta_L by construction.
class ProbeSetting {
public:
    static ProbeSetting from_epsilon(double epsilon, double Delta_L) { return {epsilon, epsilon - Delta_L}; }
    static ProbeSetting from_detuning(double Delta_P, double Delta_L) { return {Delta_P + Delta_L, Delta_P}; }

    double epsilon() const { return epsilon_; } // omega_P - omega_L
    double Delta_P() const { return Delta_P_; } // omega_P - omega_c

private:
    ProbeSetting(double epsilon, double Delta_P) : epsilon_(epsilon), Delta_P_(Delta_P) {}
    double epsilon_;
    double Delta_P_;
};

} // namespace omitlab
