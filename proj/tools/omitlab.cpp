#include "omitlab/effective_params.hpp"
#include "omitlab/errors.hpp"
#include "omitlab/figures.hpp"
#include "omitlab/model_params.hpp"
#include "omitlab/omit_response.hpp"
#include "omitlab/optical_response.hpp"
#include "omitlab/sideband2.hpp"
#include "omitlab/steady_state.hpp"
#include "omitlab/sweep.hpp"
#include "omitlab/td_oracle.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <fstream>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <utility>
#include <vector>

using namespace omitlab;
using nlohmann::json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInvalid = 1;
constexpr int kExitCellErrors = 2;

struct Common {
    std::string config_file;
    std::vector<std::string> sets;
    std::string out;
    std::string format = "csv";
    unsigned threads = std::max(1u, std::thread::hardware_concurrency());
};

struct Range {
    std::optional<double> from;
    std::optional<double> to;
    int count = 0;
};

void add_common(CLI::App* sub, Common& c) {
    sub->add_option("--config", c.config_file, "Configuration file (key = value)");
    sub->add_option("--set", c.sets, "Override, e.g. --set gamma_tip=19.29 (repeatable)")->take_all();
    sub->add_option("--out", c.out, "Output file (default: stdout)");
    sub->add_option("--format", c.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
    sub->add_option("--threads", c.threads, "Worker threads for sweeps")->check(CLI::PositiveNumber);
}

void add_range(CLI::App* sub, Range& r, const std::string& what, int default_count) {
    r.count = default_count;
    sub->add_option("--from", r.from, "First " + what + " value (s^-1)");
    sub->add_option("--to", r.to, "Last " + what + " value (s^-1)");
    sub->add_option("--count", r.count, "Number of points")->check(CLI::Range(2, 10000000));
}

std::string read_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InvalidSpec("cannot open " + path);
    }
    std::stringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

SystemConfig load(const Common& c) {
    SystemConfig cfg = c.config_file.empty() ? default_config() : load_config(read_file(c.config_file));
    return apply_overrides(cfg, c.sets);
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw InvalidSpec("cannot write " + path);
    }
    out << text;
}

std::string num(double v) { return format_number(v); }

// Flat name/value report, CSV as two columns or a JSON object.
class Report {
public:
    void add(const std::string& key, double v) { rows_.emplace_back(key, json(v)); }
    void add(const std::string& key, bool v) { rows_.emplace_back(key, json(v)); }
    void add(const std::string& key, const std::string& v) { rows_.emplace_back(key, json(v)); }

    std::string render(OutputFormat f) const {
        if (f == OutputFormat::json) {
            json j = json::object();
            for (const auto& [k, v] : rows_) {
                j[k] = v.is_number() && !std::isfinite(v.get<double>()) ? json(nullptr) : v;
            }
            return j.dump(2) + "\n";
        }
        std::string out = "key,value\n";
        for (const auto& [k, v] : rows_) {
            out += k + ",";
            if (v.is_number()) {
                out += num(v.get<double>());
            } else if (v.is_boolean()) {
                out += v.get<bool>() ? "true" : "false";
            } else {
                out += v.get<std::string>();
            }
            out += "\n";
        }
        return out;
    }

private:
    std::vector<std::pair<std::string, json>> rows_;
};

// Column table, CSV or JSON array of row objects.
struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<double>> rows;

    std::string render(OutputFormat f) const {
        if (f == OutputFormat::json) {
            json j = json::array();
            for (const auto& row : rows) {
                json o = json::object();
                for (std::size_t k = 0; k < columns.size(); ++k) {
                    o[columns[k]] = std::isfinite(row[k]) ? json(row[k]) : json(nullptr);
                }
                j.push_back(std::move(o));
            }
            return j.dump(2) + "\n";
        }
        std::string out;
        for (std::size_t k = 0; k < columns.size(); ++k) {
            out += (k ? "," : "") + columns[k];
        }
        out += "\n";
        for (const auto& row : rows) {
            for (std::size_t k = 0; k < row.size(); ++k) {
                out += (k ? "," : "") + num(row[k]);
            }
            out += "\n";
        }
        return out;
    }
};

std::string with_suffix(const std::string& path, const std::string& name) {
    const auto dot = path.find_last_of('.');
    const auto slash = path.find_last_of('/');
    if (dot == std::string::npos || (slash != std::string::npos && dot < slash)) {
        return path + "." + name;
    }
    return path.substr(0, dot) + "." + name + path.substr(dot);
}

int emit_results(const std::vector<SweepResult>& results, const Common& c) {
    const auto fmt = format_from_string(c.format);
    bool any_errors = false;
    for (const auto& r : results) {
        const std::string path = results.size() == 1 || c.out.empty() ? c.out : with_suffix(c.out, r.spec.name);
        if (results.size() > 1 && c.out.empty()) {
            std::cout << "# " << r.spec.name << "\n";
        }
        write_text(path, emit(r, fmt));
        if (results.size() > 1 && c.out.empty()) {
            std::cout << "\n";
        }
        if (!r.errors.empty()) {
            any_errors = true;
            if (path.empty()) {
                std::cerr << r.errors.size() << " cell error(s) in " << (r.spec.name.empty() ? "sweep" : r.spec.name)
                          << ":\n"
                          << emit_error_table(r);
            } else {
                write_text(path + ".errors.csv", emit_error_table(r));
                std::cerr << r.errors.size() << " cell error(s); see " << path << ".errors.csv\n";
            }
        }
    }
    return any_errors ? kExitCellErrors : kExitOk;
}

int run_specs(const std::vector<SweepSpec>& specs, const Common& c) {
    std::vector<SweepResult> results;
    results.reserve(specs.size());
    for (const auto& s : specs) {
        results.push_back(run_sweep(s, c.threads));
    }
    return emit_results(results, c);
}

SweepSpec detuning_sweep(const SystemConfig& cfg, Observable obs, const Range& r, double lo, double hi) {
    SweepSpec s;
    s.name = std::string(to_string(obs));
    s.observable = obs;
    s.base = cfg;
    s.axis1 = {"Delta_P", r.from.value_or(lo), r.to.value_or(hi), r.count, {}};
    return s;
}

int cmd_steady_state(const Common& c) {
    const auto cfg = load(c);
    const auto drive = drive_amplitudes(cfg);
    const auto ss = solve_steady_state(cfg);
    Report rep;
    rep.add("x_s", ss.x_s);
    rep.add("beta", ss.beta);
    rep.add("a1_re", ss.a1_s.real());
    rep.add("a1_im", ss.a1_s.imag());
    rep.add("a2_re", ss.a2_s.real());
    rep.add("a2_im", ss.a2_s.imag());
    rep.add("photon_number", ss.photon_number());
    rep.add("residual", ss.residual);
    rep.add("bistable", ss.bistable);
    rep.add("eps_L", drive.eps_L);
    rep.add("eps_P", drive.eps_P);
    rep.add("g", cfg.g());
    write_text(c.out, rep.render(format_from_string(c.format)));
    return kExitOk;
}

int cmd_eigenmodes(const Common& c, const Range& r) {
    const auto cfg = load(c);
    const double lo = r.from.value_or(0.0);
    const double hi = r.to.value_or(8.0 * cfg.gamma1);
    if (!(lo < hi) || lo < 0.0) {
        throw InvalidSpec("eigenmodes: need 0 <= --from < --to");
    }
    std::vector<double> tips(static_cast<std::size_t>(r.count));
    std::vector<ModeSpectrum> spectra;
    for (std::size_t k = 0; k < tips.size(); ++k) {
        tips[k] = lo + (hi - lo) * static_cast<double>(k) / static_cast<double>(r.count - 1);
        SystemConfig local = cfg;
        local.gamma_tip = tips[k];
        spectra.push_back(supermode_frequencies(local, 0.0, 0.0));
    }
    const auto tracked = track_supermodes(spectra);
    Table t{{"gamma_tip", "re_plus", "re_minus", "im_plus", "im_minus", "splitting"}, {}};
    for (std::size_t k = 0; k < tips.size(); ++k) {
        const auto& s = tracked[k];
        t.rows.push_back({tips[k], s.omega_plus.real(), s.omega_minus.real(), s.omega_plus.imag(),
                          s.omega_minus.imag(), s.splitting});
    }
    write_text(c.out, t.render(format_from_string(c.format)));
    std::cerr << "exceptional point: gamma_tip = " << num(exceptional_point(cfg)) << " s^-1\n";
    return kExitOk;
}

int cmd_lit_scan(const Common& c, const Range& r, double delta) {
    const auto cfg = load(c);
    const auto tp = turning_point(cfg, delta, delta);
    Report rep;
    rep.add("Delta", delta);
    rep.add("gamma_tp", tp.gamma_tp);
    rep.add("gamma_tp_imag", tp.gamma_tp_complex.imag());
    rep.add("physical", tp.physical);
    rep.add("approximate", tp.approximate);
    rep.add("gamma_ep", exceptional_point(cfg));
    int code = kExitOk;
    try {
        const auto scan = numeric_tp_scan(cfg, delta, delta, r.from.value_or(0.0), r.to.value_or(8.0 * cfg.gamma1), r.count);
        rep.add("scan_gamma_at_min", scan.gamma_at_min);
        rep.add("scan_T_min", scan.T_min);
    } catch (const Error& e) {
        rep.add("scan_error", std::string(e.what()));
        std::cerr << "numeric scan: " << e.what() << "\n";
        code = kExitCellErrors;
    }
    write_text(c.out, rep.render(format_from_string(c.format)));
    return code;
}

int cmd_shift_report(const Common& c) {
    const auto cfg = load(c);
    const auto s = lit_shift_report(cfg);
    Report rep;
    rep.add("shift", s.shift);
    rep.add("shift2", s.shift2);
    rep.add("lit_detuning", s.lit_detuning);
    rep.add("shift_Delta_L", s.shift_Delta_L);
    rep.add("shift_epsilon", s.shift_epsilon);
    rep.add("shift2_Delta_L", s.shift2_Delta_L);
    rep.add("shift2_epsilon", s.shift2_epsilon);
    rep.add("C1_re", s.first.C1.real());
    rep.add("C1_im", s.first.C1.imag());
    rep.add("Delta_prime", s.first.Delta_prime);
    rep.add("gamma1_prime", s.first.gamma1_prime);
    rep.add("C2_re", s.second.C2.real());
    rep.add("C2_im", s.second.C2.imag());
    rep.add("Delta_dprime", s.second.Delta_dprime);
    rep.add("gamma1_dprime", s.second.gamma1_dprime);
    rep.add("B_re", s.second.B.real());
    rep.add("B_im", s.second.B.imag());
    write_text(c.out, rep.render(format_from_string(c.format)));
    return kExitOk;
}

int cmd_oracle_check(const Common& c, const Range& r, double probe_ratio, const std::string& trace_path,
                     double trace_at) {
    SystemConfig cfg = load(c);
    cfg.P_in.reset();
    cfg.probe_ratio = probe_ratio;
    cfg.validate();
    const double lo = r.from.value_or(-15e6);
    const double hi = r.to.value_or(15e6);
    const auto ss = solve_steady_state(cfg);
    const double eps_P = drive_amplitudes(cfg).eps_P;

    Table t{{"Delta_P", "T_P", "T_P_oracle", "T_P_rel_err", "eta", "eta_oracle", "eta_rel_err"}, {}};
    const double nan = std::numeric_limits<double>::quiet_NaN();
    int code = kExitOk;
    double worst_T = 0.0;
    double worst_eta = 0.0;
    for (int k = 0; k < r.count; ++k) {
        const double dp = lo + (hi - lo) * k / static_cast<double>(r.count - 1);
        const double eps = ProbeSetting::from_detuning(dp, cfg.Delta_L).epsilon();
        const auto lr = linear_response(cfg, ss, eps, eps_P);
        const double eta = second_order_amplitude(cfg, ss, lr, eps).eta;
        try {
            const auto o = oracle_observables(cfg, dp);
            const double eT = std::abs(o.T_P - lr.T_P) / std::abs(lr.T_P);
            const double eEta = std::abs(o.eta - eta) / std::abs(eta);
            worst_T = std::max(worst_T, eT);
            worst_eta = std::max(worst_eta, eEta);
            t.rows.push_back({dp, lr.T_P, o.T_P, eT, eta, o.eta, eEta});
        } catch (const Error& e) {
            std::cerr << "Delta_P = " << num(dp) << ": " << e.what() << "\n";
            t.rows.push_back({dp, lr.T_P, nan, nan, eta, nan, nan});
            code = kExitCellErrors;
        }
    }
    write_text(c.out, t.render(format_from_string(c.format)));
    std::cerr << "max relative error: T_P " << num(worst_T) << ", eta " << num(worst_eta) << "\n";

    if (!trace_path.empty()) {
        const double eps = ProbeSetting::from_detuning(trace_at, cfg.Delta_L).epsilon();
        const auto trace = integrate(cfg, eps);
        std::ofstream out(trace_path);
        if (!out) {
            throw InvalidSpec("cannot write " + trace_path);
        }
        write_trace_csv(out, trace);
    }
    return code;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optomechanically induced transparency in a lossy compound resonator"};
    app.set_version_flag("--version", std::string(OMITLAB_VERSION_STRING));
    app.require_subcommand(1);

    Common common;
    Range range;
    double delta = 0.0;
    double step = kDefaultGroupDelayStep;
    double probe_ratio = 1e-3;
    std::string trace_path;
    double trace_at = -3e6;
    std::string spec_path;
    std::string figure_id;
    std::string figures_dir = default_figures_dir().string();
    bool list_figures = false;

    auto* steady = app.add_subcommand("steady-state", "Steady-state displacement and intracavity fields");
    add_common(steady, common);

    auto* optical = app.add_subcommand("optical-spectrum", "Purely optical transmission T versus Delta_P");
    add_common(optical, common);
    add_range(optical, range, "Delta_P", 601);

    auto* eigen = app.add_subcommand("eigenmodes", "Supermode frequencies versus gamma_tip");
    add_common(eigen, common);
    add_range(eigen, range, "gamma_tip", 161);

    auto* lit = app.add_subcommand("lit-scan", "Turning point of T versus gamma_tip, closed form and numeric");
    add_common(lit, common);
    add_range(lit, range, "gamma_tip", 161);
    lit->add_option("--delta", delta, "Probe detuning Delta1 = Delta2 (s^-1)");

    auto* omit = app.add_subcommand("omit-spectrum", "Probe transmission T_P versus Delta_P");
    add_common(omit, common);
    add_range(omit, range, "Delta_P", 601);

    auto* delay = app.add_subcommand("group-delay", "Probe group delay versus Delta_P");
    add_common(delay, common);
    add_range(delay, range, "Delta_P", 601);
    delay->add_option("--step", step, "Finite-difference step (s^-1)")->check(CLI::PositiveNumber);

    auto* side = app.add_subcommand("sideband2", "Second-order sideband efficiency versus Delta_P");
    add_common(side, common);
    add_range(side, range, "Delta_P", 601);

    auto* shift = app.add_subcommand("shift-report", "Effective detuning shifts at first and second order");
    add_common(shift, common);

    auto* oracle = app.add_subcommand("oracle-check", "Compare analytic T_P and eta with time-domain integration");
    add_common(oracle, common);
    add_range(oracle, range, "Delta_P", 5);
    oracle->add_option("--probe-ratio", probe_ratio, "eps_P / eps_L used for the check")
        ->check(CLI::PositiveNumber);
    oracle->add_option("--trace", trace_path, "Write the integrated trace to this CSV file");
    oracle->add_option("--trace-at", trace_at, "Delta_P of the written trace (s^-1)");

    auto* sweep = app.add_subcommand("sweep", "Run a sweep or recipe file");
    add_common(sweep, common);
    sweep->add_option("--spec", spec_path, "Sweep spec or recipe (JSON)")->required();

    auto* figure = app.add_subcommand("reproduce-figure", "Regenerate a bundled figure dataset");
    add_common(figure, common);
    figure->add_option("id", figure_id, "Figure id, e.g. fig3f");
    figure->add_option("--figures-dir", figures_dir, "Directory holding the recipes");
    figure->add_flag("--list", list_figures, "List available figure ids");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kExitOk : kExitInvalid;
    }

    try {
        if (*steady) {
            return cmd_steady_state(common);
        }
        if (*optical) {
            return run_specs({detuning_sweep(load(common), Observable::optical_T, range, -30e6, 30e6)}, common);
        }
        if (*eigen) {
            return cmd_eigenmodes(common, range);
        }
        if (*lit) {
            return cmd_lit_scan(common, range, delta);
        }
        if (*omit) {
            return run_specs({detuning_sweep(load(common), Observable::T_P, range, -20e6, 20e6)}, common);
        }
        if (*delay) {
            auto s = detuning_sweep(load(common), Observable::tau_g, range, -20e6, 20e6);
            s.group_delay_step = step;
            return run_specs({s}, common);
        }
        if (*side) {
            return run_specs({detuning_sweep(load(common), Observable::eta, range, -20e6, 20e6)}, common);
        }
        if (*shift) {
            return cmd_shift_report(common);
        }
        if (*oracle) {
            return cmd_oracle_check(common, range, probe_ratio, trace_path, trace_at);
        }
        if (*sweep) {
            auto recipe = load_recipe(spec_path);
            if (!common.config_file.empty() || !common.sets.empty()) {
                for (auto& s : recipe.sweeps) {
                    s.base = apply_overrides(common.config_file.empty() ? s.base : load(common), common.sets);
                }
            }
            return run_specs(recipe.sweeps, common);
        }
        if (*figure) {
            if (list_figures) {
                for (const auto& id : list_recipes(figures_dir)) {
                    std::cout << id << "\n";
                }
                return kExitOk;
            }
            if (figure_id.empty()) {
                throw InvalidSpec("reproduce-figure needs a figure id (see --list)");
            }
            auto recipe = find_recipe(figures_dir, figure_id);
            if (!common.config_file.empty() || !common.sets.empty()) {
                for (auto& s : recipe.sweeps) {
                    s.base = apply_overrides(common.config_file.empty() ? s.base : load(common), common.sets);
                }
            }
            return run_specs(recipe.sweeps, common);
        }
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    return kExitInvalid;
}
