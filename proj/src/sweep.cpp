#include "omitlab/sweep.hpp"

#include "omitlab/effective_params.hpp"
#include "omitlab/errors.hpp"
#include "omitlab/omit_response.hpp"
#include "omitlab/optical_response.hpp"
#include "omitlab/sideband2.hpp"
#include "omitlab/steady_state.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <ctime>
#include <limits>
#include <sstream>
#include <thread>

#ifndef OMITLAB_VERSION_STRING
#define OMITLAB_VERSION_STRING "unknown"
#endif

namespace omitlab {

using nlohmann::json;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

constexpr std::pair<Observable, std::string_view> kObservableNames[] = {
    {Observable::optical_T, "optical_T"}, {Observable::T_P, "T_P"},
    {Observable::tau_g, "tau_g"},         {Observable::eta, "eta"},
    {Observable::eig_real, "eig_real"},   {Observable::eig_imag, "eig_imag"},
    {Observable::shift, "shift"},
};

bool is_eigen(Observable o) { return o == Observable::eig_real || o == Observable::eig_imag; }

bool valid_parameter(std::string_view p) { return p == "Delta_P" || is_config_field(p); }

void validate_axis(const SweepAxis& axis, const char* which) {
    const std::string where = std::string(which) + ": ";
    if (!valid_parameter(axis.parameter)) {
        throw InvalidSpec(where + "unknown parameter '" + axis.parameter + "'");
    }
    if (!axis.explicit_values.empty()) {
        if (axis.explicit_values.size() < 2) {
            throw InvalidSpec(where + "needs at least 2 values");
        }
        for (std::size_t k = 0; k < axis.explicit_values.size(); ++k) {
            if (!std::isfinite(axis.explicit_values[k])) {
                throw InvalidSpec(where + "values must be finite");
            }
            if (k > 0 && !(axis.explicit_values[k] > axis.explicit_values[k - 1])) {
                throw InvalidSpec(where + "values must be strictly increasing");
            }
        }
        return;
    }
    if (axis.count < 2) {
        throw InvalidSpec(where + "count must be >= 2");
    }
    if (!std::isfinite(axis.start) || !std::isfinite(axis.stop)) {
        throw InvalidSpec(where + "start and stop must be finite");
    }
    if (!(axis.start < axis.stop)) {
        throw InvalidSpec(where + "start must be < stop");
    }
}

std::string iso_timestamp() {
    const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

json number_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

double number_from(const json& j) { return j.is_null() ? kNaN : j.get<double>(); }

json axis_to_json(const SweepAxis& a) {
    json j{{"parameter", a.parameter}};
    if (!a.explicit_values.empty()) {
        j["values"] = a.explicit_values;
    } else {
        j["start"] = a.start;
        j["stop"] = a.stop;
        j["count"] = a.count;
    }
    return j;
}

SweepAxis axis_from_json(const json& j, const char* which) {
    if (!j.is_object()) {
        throw InvalidSpec(std::string(which) + " must be an object");
    }
    SweepAxis a;
    try {
        a.parameter = j.at("parameter").get<std::string>();
        if (j.contains("values")) {
            a.explicit_values = j.at("values").get<std::vector<double>>();
            if (a.explicit_values.empty()) {
                throw InvalidSpec(std::string(which) + ": values must not be empty");
            }
        } else {
            a.start = j.at("start").get<double>();
            a.stop = j.at("stop").get<double>();
            a.count = j.at("count").get<int>();
        }
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string(which) + ": " + e.what());
    }
    return a;
}

void append_csv_field(std::string& out, std::string_view s) {
    if (s.find_first_of(",\"\n") == std::string_view::npos) {
        out += s;
        return;
    }
    out += '"';
    for (char c : s) {
        if (c == '"') {
            out += '"';
        }
        out += c;
    }
    out += '"';
}

struct CellSetting {
    SystemConfig cfg;
    double Delta_P = 0.0;
};

CellSetting cell_config(const SweepSpec& spec, double axis1_value, std::optional<double> axis2_value) {
    CellSetting c{spec.base, spec.Delta_P};
    auto assign = [&](const std::string& param, double v) {
        if (param == "Delta_P") {
            c.Delta_P = v;
        } else {
            set_field(c.cfg, param, v);
        }
    };
    assign(spec.axis1.parameter, axis1_value);
    if (spec.axis2 && axis2_value) {
        assign(spec.axis2->parameter, *axis2_value);
    }
    c.cfg.validate();
    return c;
}

} // namespace

std::string_view to_string(Observable o) {
    for (const auto& [obs, name] : kObservableNames) {
        if (obs == o) {
            return name;
        }
    }
    return "unknown";
}

Observable observable_from_string(std::string_view s) {
    for (const auto& [obs, name] : kObservableNames) {
        if (name == s) {
            return obs;
        }
    }
    throw InvalidSpec("unknown observable '" + std::string(s) + "'");
}

std::vector<double> SweepAxis::values() const {
    if (!explicit_values.empty()) {
        return explicit_values;
    }
    std::vector<double> v(static_cast<std::size_t>(std::max(count, 0)));
    for (int k = 0; k < count; ++k) {
        v[static_cast<std::size_t>(k)] = start + (stop - start) * static_cast<double>(k) / static_cast<double>(count - 1);
    }
    if (count > 1) {
        v.back() = stop;
    }
    return v;
}

void SweepSpec::validate() const {
    validate_axis(axis1, "axis1");
    if (axis2) {
        validate_axis(*axis2, "axis2");
        if (axis2->parameter == axis1.parameter) {
            throw InvalidSpec("axis1 and axis2 sweep the same parameter");
        }
    }
    if (!std::isfinite(Delta_P)) {
        throw InvalidSpec("Delta_P must be finite");
    }
    if (!(group_delay_step > 0.0)) {
        throw InvalidSpec("group_delay_step must be > 0");
    }
    try {
        base.validate();
    } catch (const ConfigError& e) {
        throw InvalidSpec(std::string("config: ") + e.what());
    }
}

std::vector<double> evaluate_cell(const SweepSpec& spec, double axis1_value, std::optional<double> axis2_value) {
    const auto [cfg, Delta_P] = cell_config(spec, axis1_value, axis2_value);
    switch (spec.observable) {
    case Observable::optical_T:
        return {optical_transmission(cfg, Delta_P, Delta_P).T};
    case Observable::T_P:
        return {probe_transmission(cfg, Delta_P).T_P};
    case Observable::tau_g:
        return {group_delay(cfg, Delta_P, spec.group_delay_step)};
    case Observable::eta: {
        const auto ss = solve_steady_state(cfg);
        const double eps = ProbeSetting::from_detuning(Delta_P, cfg.Delta_L).epsilon();
        const auto lr = linear_response(cfg, ss, eps);
        return {second_order_amplitude(cfg, ss, lr, eps).eta};
    }
    case Observable::eig_real: {
        const auto s = supermode_frequencies(cfg, 0.0, 0.0);
        return {s.omega_plus.real(), s.omega_minus.real()};
    }
    case Observable::eig_imag: {
        const auto s = supermode_frequencies(cfg, 0.0, 0.0);
        return {s.omega_plus.imag(), s.omega_minus.imag()};
    }
    case Observable::shift:
        return {lit_shift_report(cfg).shift};
    }
    throw InvalidSpec("unhandled observable");
}

SweepResult run_sweep(const SweepSpec& spec, unsigned threads) {
    spec.validate();
    SweepResult r;
    r.spec = spec;
    r.axis1_values = spec.axis1.values();
    if (spec.axis2) {
        r.axis2_values = spec.axis2->values();
    }
    const bool eigen = is_eigen(spec.observable);
    r.grid_names = eigen ? std::vector<std::string>{"plus", "minus"} : std::vector<std::string>{"value"};
    const std::size_t n1 = r.axis1_values.size();
    const std::size_t n2 = r.count2();
    const std::size_t cells = n1 * n2;
    r.grids.assign(r.grid_names.size(), std::vector<double>(cells, kNaN));

    // Eigen sweeps keep the complex pair so branches can be tracked.
    std::vector<ModeSpectrum> spectra(eigen ? cells : 0);
    std::vector<std::string> messages(cells);

    auto work = [&](std::size_t idx) {
        const std::size_t i1 = idx / n2;
        const std::size_t i2 = idx % n2;
        const std::optional<double> v2 = r.axis2_values.empty() ? std::nullopt : std::optional(r.axis2_values[i2]);
        try {
            if (eigen) {
                spectra[idx] = supermode_frequencies(cell_config(spec, r.axis1_values[i1], v2).cfg, 0.0, 0.0);
            } else {
                r.grids[0][idx] = evaluate_cell(spec, r.axis1_values[i1], v2)[0];
            }
        } catch (const std::exception& e) {
            messages[idx] = e.what();
            if (messages[idx].empty()) {
                messages[idx] = "evaluation failed";
            }
        }
    };

    const unsigned n_threads = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(std::max<std::size_t>(cells, 1))));
    if (n_threads == 1) {
        for (std::size_t idx = 0; idx < cells; ++idx) {
            work(idx);
        }
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        pool.reserve(n_threads);
        for (unsigned t = 0; t < n_threads; ++t) {
            pool.emplace_back([&] {
                for (std::size_t idx = next.fetch_add(1); idx < cells; idx = next.fetch_add(1)) {
                    work(idx);
                }
            });
        }
    }

    if (eigen) {
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
            std::vector<ModeSpectrum> column;
            std::vector<std::size_t> where;
            for (std::size_t i1 = 0; i1 < n1; ++i1) {
                const std::size_t idx = i1 * n2 + i2;
                if (messages[idx].empty()) {
                    column.push_back(spectra[idx]);
                    where.push_back(idx);
                }
            }
            const auto tracked = track_supermodes(column);
            const bool real = spec.observable == Observable::eig_real;
            for (std::size_t k = 0; k < tracked.size(); ++k) {
                r.grids[0][where[k]] = real ? tracked[k].omega_plus.real() : tracked[k].omega_plus.imag();
                r.grids[1][where[k]] = real ? tracked[k].omega_minus.real() : tracked[k].omega_minus.imag();
            }
        }
    }

    for (std::size_t idx = 0; idx < cells; ++idx) {
        if (!messages[idx].empty()) {
            r.errors.push_back({idx / n2, idx % n2, messages[idx]});
        }
    }
    r.provenance.config_hash = config_hash(spec.base);
    r.provenance.code_version = OMITLAB_VERSION_STRING;
    r.provenance.timestamp = iso_timestamp();
    return r;
}

OutputFormat format_from_string(std::string_view s) {
    if (s == "csv") {
        return OutputFormat::csv;
    }
    if (s == "json") {
        return OutputFormat::json;
    }
    throw InvalidSpec("unknown output format '" + std::string(s) + "' (expected csv or json)");
}

std::string format_number(double v) {
    if (std::isnan(v)) {
        return "nan";
    }
    if (std::isinf(v)) {
        return v > 0 ? "inf" : "-inf";
    }
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.15g", v);
    return buf;
}

std::string emit(const SweepResult& result, OutputFormat format) {
    return format == OutputFormat::csv ? emit_csv(result) : emit_json(result);
}

std::string emit_csv(const SweepResult& r) {
    const bool two_d = !r.axis2_values.empty();
    std::string out = two_d ? "axis1,axis2" : "axis1";
    if (r.grids.size() == 1) {
        out += ",value";
    } else {
        for (const auto& name : r.grid_names) {
            out += ",value_" + name;
        }
    }
    out += '\n';
    const std::size_t n2 = r.count2();
    for (std::size_t i1 = 0; i1 < r.axis1_values.size(); ++i1) {
        for (std::size_t i2 = 0; i2 < n2; ++i2) {
            out += format_number(r.axis1_values[i1]);
            if (two_d) {
                out += ',' + format_number(r.axis2_values[i2]);
            }
            for (const auto& grid : r.grids) {
                out += ',' + format_number(grid[i1 * n2 + i2]);
            }
            out += '\n';
        }
    }
    return out;
}

std::string emit_error_table(const SweepResult& r) {
    const bool two_d = !r.axis2_values.empty();
    std::string out = "i1,i2,axis1,axis2,message\n";
    for (const auto& e : r.errors) {
        out += std::to_string(e.i1) + ',' + std::to_string(e.i2) + ',' + format_number(r.axis1_values[e.i1]) + ',';
        out += two_d ? format_number(r.axis2_values[e.i2]) : std::string();
        out += ',';
        append_csv_field(out, e.message);
        out += '\n';
    }
    return out;
}

std::string emit_json(const SweepResult& r) {
    json j;
    j["spec"] = spec_to_json(r.spec);
    j["axis1"] = r.axis1_values;
    if (!r.axis2_values.empty()) {
        j["axis2"] = r.axis2_values;
    }
    json grids = json::array();
    for (std::size_t g = 0; g < r.grids.size(); ++g) {
        json values = json::array();
        for (double v : r.grids[g]) {
            values.push_back(number_or_null(v));
        }
        grids.push_back({{"name", r.grid_names[g]}, {"values", std::move(values)}});
    }
    j["grids"] = std::move(grids);
    json errors = json::array();
    for (const auto& e : r.errors) {
        errors.push_back({{"i1", e.i1}, {"i2", e.i2}, {"message", e.message}});
    }
    j["errors"] = std::move(errors);
    j["provenance"] = {{"config_hash", r.provenance.config_hash},
                       {"code_version", r.provenance.code_version},
                       {"timestamp", r.provenance.timestamp}};
    return j.dump(2) + "\n";
}

SweepResult parse_result_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("result JSON: ") + e.what());
    }
    SweepResult r;
    try {
        r.spec = spec_from_json(j.at("spec"));
        r.axis1_values = j.at("axis1").get<std::vector<double>>();
        if (j.contains("axis2")) {
            r.axis2_values = j.at("axis2").get<std::vector<double>>();
        }
        for (const auto& g : j.at("grids")) {
            r.grid_names.push_back(g.at("name").get<std::string>());
            std::vector<double> values;
            for (const auto& v : g.at("values")) {
                values.push_back(number_from(v));
            }
            if (values.size() != r.axis1_values.size() * r.count2()) {
                throw InvalidSpec("result JSON: grid '" + r.grid_names.back() + "' has the wrong size");
            }
            r.grids.push_back(std::move(values));
        }
        for (const auto& e : j.at("errors")) {
            r.errors.push_back(
                {e.at("i1").get<std::size_t>(), e.at("i2").get<std::size_t>(), e.at("message").get<std::string>()});
        }
        const auto& p = j.at("provenance");
        r.provenance = {p.at("config_hash").get<std::string>(), p.at("code_version").get<std::string>(),
                        p.at("timestamp").get<std::string>()};
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("result JSON: ") + e.what());
    }
    return r;
}

json config_to_json(const SystemConfig& cfg) {
    json j;
    j["carrier"] = std::string(to_string(cfg.carrier));
    for (const auto& name : config_field_names()) {
        if (name == "g" && !cfg.g_explicit) {
            continue;
        }
        if (name == "P_in" && !cfg.P_in) {
            continue;
        }
        j[name] = get_field(cfg, name);
    }
    return j;
}

SystemConfig config_from_json(const json& j, const SystemConfig& base) {
    if (!j.is_object()) {
        throw ConfigError("", "config must be a JSON object");
    }
    // Routed through the text loader so both paths share the same rules.
    std::string doc = "rate_unit = 1\n";
    char buf[64];
    for (const auto& [key, value] : j.items()) {
        if (key == "carrier") {
            if (!value.is_string()) {
                throw ConfigError(key, "expected a string");
            }
            doc += "carrier = " + value.get<std::string>() + "\n";
            continue;
        }
        if (!value.is_number()) {
            throw ConfigError(key, "expected a number");
        }
        std::snprintf(buf, sizeof buf, "%.17g", value.get<double>());
        doc += key + " = " + buf + "\n";
    }
    return load_config(doc, base);
}

json spec_to_json(const SweepSpec& s) {
    json j;
    if (!s.name.empty()) {
        j["name"] = s.name;
    }
    j["observable"] = std::string(to_string(s.observable));
    j["axis1"] = axis_to_json(s.axis1);
    if (s.axis2) {
        j["axis2"] = axis_to_json(*s.axis2);
    }
    j["config"] = config_to_json(s.base);
    j["Delta_P"] = s.Delta_P;
    j["group_delay_step"] = s.group_delay_step;
    return j;
}

SweepSpec spec_from_json(const json& j) {
    if (!j.is_object()) {
        throw InvalidSpec("sweep spec must be a JSON object");
    }
    static const std::vector<std::string> known = {"name",   "observable", "axis1", "axis2",
                                                    "config", "Delta_P",    "group_delay_step"};
    for (const auto& [key, _] : j.items()) {
        if (std::find(known.begin(), known.end(), key) == known.end()) {
            throw InvalidSpec("unknown sweep spec key '" + key + "'");
        }
    }
    SweepSpec s;
    try {
        s.name = j.value("name", std::string{});
        s.observable = observable_from_string(j.at("observable").get<std::string>());
        s.axis1 = axis_from_json(j.at("axis1"), "axis1");
        if (j.contains("axis2")) {
            s.axis2 = axis_from_json(j.at("axis2"), "axis2");
        }
        s.Delta_P = j.value("Delta_P", 0.0);
        s.group_delay_step = j.value("group_delay_step", 1e3);
    } catch (const json::exception& e) {
        throw InvalidSpec(std::string("sweep spec: ") + e.what());
    }
    try {
        s.base = j.contains("config") ? config_from_json(j.at("config")) : default_config();
    } catch (const ConfigError& e) {
        throw InvalidSpec(std::string("config: ") + e.what());
    }
    s.validate();
    return s;
}

std::string config_hash(const SystemConfig& cfg) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : serialize_config(cfg)) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

bool identical(const SweepResult& a, const SweepResult& b) {
    auto same = [](const std::vector<double>& x, const std::vector<double>& y) {
        if (x.size() != y.size()) {
            return false;
        }
        for (std::size_t k = 0; k < x.size(); ++k) {
            if (std::bit_cast<std::uint64_t>(x[k]) != std::bit_cast<std::uint64_t>(y[k])) {
                return false;
            }
        }
        return true;
    };
    if (spec_to_json(a.spec) != spec_to_json(b.spec) || !same(a.axis1_values, b.axis1_values) ||
        !same(a.axis2_values, b.axis2_values) || a.grid_names != b.grid_names || a.grids.size() != b.grids.size()) {
        return false;
    }
    for (std::size_t g = 0; g < a.grids.size(); ++g) {
        if (!same(a.grids[g], b.grids[g])) {
            return false;
        }
    }
    if (a.errors.size() != b.errors.size()) {
        return false;
    }
    for (std::size_t k = 0; k < a.errors.size(); ++k) {
        if (a.errors[k].i1 != b.errors[k].i1 || a.errors[k].i2 != b.errors[k].i2 ||
            a.errors[k].message != b.errors[k].message) {
            return false;
        }
    }
    return a.provenance.config_hash == b.provenance.config_hash &&
           a.provenance.code_version == b.provenance.code_version && a.provenance.timestamp == b.provenance.timestamp;
}

} // namespace omitlab
