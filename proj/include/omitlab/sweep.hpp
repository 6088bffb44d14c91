#pragma once

#include "omitlab/model_params.hpp"

#include <json.hpp>

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace omitlab {

enum class Observable { optical_T, T_P, tau_g, eta, eig_real, eig_imag, shift };

std::string_view to_string(Observable o);
Observable observable_from_string(std::string_view s);

// One swept parameter: a config field name or "Delta_P". Either a linear
// grid (start, stop, count) or an explicit increasing list of values.
struct SweepAxis {
    std::string parameter;
    double start = 0.0;
    double stop = 0.0;
    int count = 0;
    std::vector<double> explicit_values;

    std::vector<double> values() const;
    std::size_t size() const { return explicit_values.empty() ? static_cast<std::size_t>(count) : explicit_values.size(); }
};

struct SweepSpec {
    std::string name;
    Observable observable = Observable::T_P;
    SweepAxis axis1;
    std::optional<SweepAxis> axis2;
    SystemConfig base;
    double Delta_P = 0.0;          // probe detuning when no axis sweeps it
    double group_delay_step = 1e3; // for tau_g

    // Throws InvalidSpec.
    void validate() const;
};

struct CellError {
    std::size_t i1 = 0;
    std::size_t i2 = 0;
    std::string message;
};

struct Provenance {
    std::string config_hash;
    std::string code_version;
    std::string timestamp;
};

// Row-major grids (axis1 outer). Scalar observables have one grid named
// "value"; eig_real / eig_imag carry "plus" and "minus" grids tracked
// continuously along axis1. Failed cells hold quiet NaN and an entry in
// `errors`.
struct SweepResult {
    SweepSpec spec;
    std::vector<double> axis1_values;
    std::vector<double> axis2_values; // empty for 1-D
    std::vector<std::string> grid_names;
    std::vector<std::vector<double>> grids;
    std::vector<CellError> errors;
    Provenance provenance;

    std::size_t count2() const { return axis2_values.empty() ? 1 : axis2_values.size(); }
    double at(std::size_t grid, std::size_t i1, std::size_t i2 = 0) const { return grids[grid][i1 * count2() + i2]; }
};

// Evaluates every cell. Per-cell failures are recorded, never thrown; the
// grid does not depend on `threads`. Throws InvalidSpec for a bad spec.
SweepResult run_sweep(const SweepSpec& spec, unsigned threads = 1);

// Single-cell evaluation used by run_sweep (one value per grid).
std::vector<double> evaluate_cell(const SweepSpec& spec, double axis1_value, std::optional<double> axis2_value);

enum class OutputFormat { csv, json };
OutputFormat format_from_string(std::string_view s);

std::string emit(const SweepResult& result, OutputFormat format);
std::string emit_csv(const SweepResult& result);
std::string emit_json(const SweepResult& result);
std::string emit_error_table(const SweepResult& result);

SweepResult parse_result_json(std::string_view text);

nlohmann::json spec_to_json(const SweepSpec& spec);
SweepSpec spec_from_json(const nlohmann::json& j);

nlohmann::json config_to_json(const SystemConfig& cfg);
// Keys absent from `j` keep the values of `base`.
SystemConfig config_from_json(const nlohmann::json& j, const SystemConfig& base = default_config());

// FNV-1a of the serialised configuration, 16 hex digits.
std::string config_hash(const SystemConfig& cfg);

std::string format_number(double v);

// Bitwise-equal grids (NaN == NaN), axes, errors, spec and provenance.
bool identical(const SweepResult& a, const SweepResult& b);

} // namespace omitlab
