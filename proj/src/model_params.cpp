#include "omitlab/model_params.hpp"

#include "omitlab/errors.hpp"

#include <algorithm>
#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <map>
#include <sstream>

namespace omitlab {

namespace {

constexpr double kNominalCarrier = 193e12;
constexpr double kDefaultRateUnit = 1e6;

const std::vector<std::string> kRateKeys = {"gamma1", "gamma2", "gamma_tip", "J",
                                            "omega_c", "omega_m", "Gamma_m", "Delta_L"};

bool is_rate_key(std::string_view key) {
    return std::find(kRateKeys.begin(), kRateKeys.end(), key) != kRateKeys.end();
}

std::string trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return std::string(s.substr(first, last - first + 1));
}

double parse_number(const std::string& key, const std::string& raw) {
    if (raw.empty()) {
        throw ConfigError(key, "missing value");
    }
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(raw.c_str(), &end);
    if (end != raw.c_str() + raw.size() || errno == ERANGE || !std::isfinite(v)) {
        throw ConfigError(key, "cannot parse '" + raw + "' as a number");
    }
    return v;
}

// "23.4", "23.4 * 2pi", "2pi*23.4" (also with the Greek letter).
double parse_value(const std::string& key, const std::string& raw) {
    std::string s;
    for (char c : raw) {
        if (c != ' ' && c != '\t') {
            s.push_back(c);
        }
    }
    double factor = 1.0;
    for (const std::string marker : {"*2pi", "*2\xCF\x80"}) {
        if (s.size() > marker.size() && s.compare(s.size() - marker.size(), marker.size(), marker) == 0) {
            s.erase(s.size() - marker.size());
            factor = kTwoPi;
            break;
        }
    }
    if (factor == 1.0) {
        for (const std::string marker : {"2pi*", "2\xCF\x80*"}) {
            if (s.rfind(marker, 0) == 0) {
                s.erase(0, marker.size());
                factor = kTwoPi;
                break;
            }
        }
    }
    return parse_number(key, s) * factor;
}

std::string format_exact(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct Field {
    const char* name;
    double SystemConfig::*member;
};

constexpr Field kPlainFields[] = {
    {"gamma1", &SystemConfig::gamma1},   {"gamma2", &SystemConfig::gamma2},
    {"gamma_tip", &SystemConfig::gamma_tip}, {"J", &SystemConfig::J},
    {"omega_c", &SystemConfig::omega_c}, {"omega_m", &SystemConfig::omega_m},
    {"m", &SystemConfig::m},             {"Gamma_m", &SystemConfig::Gamma_m},
    {"R", &SystemConfig::R},             {"P_L", &SystemConfig::P_L},
    {"probe_ratio", &SystemConfig::probe_ratio}, {"Delta_L", &SystemConfig::Delta_L},
};

} // namespace

std::string_view to_string(CarrierConvention c) {
    return c == CarrierConvention::face_value ? "face_value" : "two_pi";
}

CarrierConvention carrier_from_string(std::string_view s) {
    if (s == "face_value") {
        return CarrierConvention::face_value;
    }
    if (s == "two_pi") {
        return CarrierConvention::two_pi;
    }
    throw ConfigError("carrier", "expected face_value or two_pi, got '" + std::string(s) + "'");
}

void SystemConfig::validate() const {
    auto positive = [](const char* name, double v) {
        if (!(v > 0.0) || !std::isfinite(v)) {
            throw ConfigError(name, "must be > 0 (got " + format_exact(v) + ")");
        }
    };
    auto non_negative = [](const char* name, double v) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError(name, "must be >= 0 (got " + format_exact(v) + ")");
        }
    };
    positive("gamma1", gamma1);
    positive("gamma2", gamma2);
    non_negative("gamma_tip", gamma_tip);
    positive("J", J);
    positive("omega_c", omega_c);
    positive("omega_m", omega_m);
    positive("m", m);
    positive("Gamma_m", Gamma_m);
    if (g_explicit) {
        non_negative("g", *g_explicit);
    } else {
        positive("R", R);
    }
    non_negative("P_L", P_L);
    if (P_in) {
        non_negative("P_in", *P_in);
    }
    non_negative("probe_ratio", probe_ratio);
    if (!std::isfinite(Delta_L)) {
        throw ConfigError("Delta_L", "must be finite");
    }
}

SystemConfig default_config(CarrierConvention carrier) {
    SystemConfig cfg;
    cfg.carrier = carrier;
    cfg.omega_c = carrier == CarrierConvention::two_pi ? kTwoPi * kNominalCarrier : kNominalCarrier;
    return cfg;
}

SystemConfig load_config(std::string_view text) {
    return load_config(text, default_config());
}

SystemConfig load_config(std::string_view text, const SystemConfig& base) {
    std::map<std::string, std::string> raw;
    std::istringstream in{std::string(text)};
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        if (const auto hash = line.find('#'); hash != std::string::npos) {
            line.erase(hash);
        }
        const std::string t = trim(line);
        if (t.empty()) {
            continue;
        }
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ConfigError("", "line " + std::to_string(lineno) + ": expected key = value");
        }
        std::string key = trim(std::string_view(t).substr(0, eq));
        std::string value = trim(std::string_view(t).substr(eq + 1));
        if (key.empty()) {
            throw ConfigError("", "line " + std::to_string(lineno) + ": empty key");
        }
        if (!is_config_field(key) && key != "rate_unit" && key != "carrier") {
            throw ConfigError(key, "unknown key");
        }
        if (!raw.emplace(key, value).second) {
            throw ConfigError(key, "duplicate key");
        }
    }

    SystemConfig cfg = base;
    double rate_unit = kDefaultRateUnit;
    if (auto it = raw.find("rate_unit"); it != raw.end()) {
        rate_unit = parse_number("rate_unit", it->second);
        if (!(rate_unit > 0.0)) {
            throw ConfigError("rate_unit", "must be > 0");
        }
    }
    if (auto it = raw.find("carrier"); it != raw.end()) {
        cfg.carrier = carrier_from_string(it->second);
        if (!raw.contains("omega_c")) {
            cfg.omega_c = default_config(cfg.carrier).omega_c;
        }
    }
    const bool delta_follows_omega_m = !raw.contains("Delta_L") && base.Delta_L == base.omega_m;

    for (const auto& [key, value] : raw) {
        if (key == "rate_unit" || key == "carrier") {
            continue;
        }
        double v = parse_value(key, value);
        if (is_rate_key(key)) {
            v *= rate_unit;
        }
        set_field(cfg, key, v);
    }
    if (delta_follows_omega_m) {
        cfg.Delta_L = cfg.omega_m;
    }
    cfg.validate();
    return cfg;
}

SystemConfig apply_overrides(SystemConfig cfg, const std::vector<std::string>& assignments) {
    for (const auto& a : assignments) {
        cfg = load_config(a, cfg);
    }
    return cfg;
}

std::string serialize_config(const SystemConfig& cfg) {
    std::ostringstream out;
    out << "rate_unit = 1\n";
    out << "carrier = " << to_string(cfg.carrier) << "\n";
    for (const auto& f : kPlainFields) {
        out << f.name << " = " << format_exact(cfg.*(f.member)) << "\n";
    }
    if (cfg.g_explicit) {
        out << "g = " << format_exact(*cfg.g_explicit) << "\n";
    }
    if (cfg.P_in) {
        out << "P_in = " << format_exact(*cfg.P_in) << "\n";
    }
    return out.str();
}

const std::vector<std::string>& config_field_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> n;
        for (const auto& f : kPlainFields) {
            n.emplace_back(f.name);
        }
        n.emplace_back("g");
        n.emplace_back("P_in");
        return n;
    }();
    return names;
}

bool is_config_field(std::string_view name) {
    const auto& names = config_field_names();
    return std::find(names.begin(), names.end(), name) != names.end();
}

double get_field(const SystemConfig& cfg, std::string_view name) {
    for (const auto& f : kPlainFields) {
        if (name == f.name) {
            return cfg.*(f.member);
        }
    }
    if (name == "g") {
        return cfg.g();
    }
    if (name == "P_in") {
        return cfg.probe_power();
    }
    throw ConfigError(std::string(name), "unknown field");
}

void set_field(SystemConfig& cfg, std::string_view name, double value) {
    for (const auto& f : kPlainFields) {
        if (name == f.name) {
            cfg.*(f.member) = value;
            return;
        }
    }
    if (name == "g") {
        cfg.g_explicit = value;
        return;
    }
    if (name == "P_in") {
        cfg.P_in = value;
        return;
    }
    throw ConfigError(std::string(name), "unknown field");
}

DriveAmplitudes drive_amplitudes(const SystemConfig& cfg) {
    const double scale = 2.0 * cfg.gamma1 / (kHbar * cfg.omega_c);
    return {std::sqrt(scale * cfg.P_L), std::sqrt(scale * cfg.probe_power())};
}

} // namespace omitlab
