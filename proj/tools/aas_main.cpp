// aas: command-line front end for the Aubry-Andre-Stark localization lab.
//
// Subcommands: sweep, collapse, fit, fidelity-map, qfi, wavefunction.
// Every run is driven by a single JSON config; --seed/--samples/--threads
// override the config, AAS_OUT_DIR and AAS_THREADS come from the environment.
// Exit codes: 0 success, 2 config error, 3 numerical failure, 4 I/O failure.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <set>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "aas/ensemble.hpp"
#include "aas/errors.hpp"
#include "aas/io.hpp"
#include "aas/parallel.hpp"
#include "aas/pipeline.hpp"
#include "aas/scaling.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::optional<std::uint64_t> seed;
    std::optional<long> samples;
    std::optional<int> threads;
    bool figure_faithful = false;
};

void add_common_options(CLI::App* cmd, CommonOpts& opts, bool out_required) {
    cmd->add_option("--config", opts.config_path, "JSON run configuration")
        ->required()
        ->check(CLI::ExistingFile);
    auto* out = cmd->add_option("--out", opts.out_path, "output path");
    if (out_required) out->required();
    cmd->add_option("--seed", opts.seed, "master seed override");
    auto* samples = cmd->add_option("--samples", opts.samples, "phi-sample count override");
    cmd->add_option("--threads", opts.threads, "worker thread count");
    cmd->add_flag("--figure-faithful", opts.figure_faithful,
                  "use the publication-scale sample counts")
        ->excludes(samples);
}

int resolve_threads(const CommonOpts& opts) {
    if (opts.threads) {
        if (*opts.threads < 1) throw aas::ConfigError("--threads must be >= 1");
        return *opts.threads;
    }
    if (const char* env = std::getenv("AAS_THREADS")) {
        const int n = std::atoi(env);
        if (n < 1) throw aas::ConfigError("AAS_THREADS must be a positive integer");
        return n;
    }
    return aas::default_thread_count();
}

fs::path resolve_out(const std::string& out) {
    fs::path p(out);
    if (p.is_relative()) {
        if (const char* env = std::getenv("AAS_OUT_DIR")) p = fs::path(env) / p;
    }
    return p;
}

// --- config helpers ---------------------------------------------------------

void check_keys(const json& obj, const std::string& ctx,
                const std::set<std::string>& required,
                const std::set<std::string>& optional) {
    if (!obj.is_object()) throw aas::ConfigError(ctx + ": expected a JSON object");
    for (const auto& item : obj.items()) {
        if (!required.count(item.key()) && !optional.count(item.key()))
            throw aas::ConfigError(ctx + ": unknown key '" + item.key() + "'");
    }
    for (const auto& key : required)
        if (!obj.contains(key))
            throw aas::ConfigError(ctx + ": missing required key '" + key + "'");
}

template <typename T>
T get_as(const json& obj, const std::string& ctx, const std::string& key) {
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw aas::ConfigError(ctx + ": bad value for '" + key + "'");
    }
}

template <typename T>
T get_or(const json& obj, const std::string& ctx, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    return get_as<T>(obj, ctx, key);
}

aas::HGrid parse_h_grid(const json& j, const std::string& ctx) {
    check_keys(j, ctx, {"log10_min", "log10_max", "points_per_decade"}, {});
    aas::HGrid grid;
    grid.log10_min = get_as<double>(j, ctx, "log10_min");
    grid.log10_max = get_as<double>(j, ctx, "log10_max");
    grid.points_per_decade = get_as<int>(j, ctx, "points_per_decade");
    return grid;
}

aas::SweepGrid parse_sweep_config(const json& cfg) {
    const std::string ctx = "sweep config";
    check_keys(cfg, ctx, {"sizes", "h_grid"},
               {"deltas", "delta_rule", "n_samples", "master_seed", "with_qfi", "J",
                "golden_ratio_omega"});
    aas::SweepGrid grid;
    grid.sizes = get_as<std::vector<long>>(cfg, ctx, "sizes");
    grid.h_grid = parse_h_grid(cfg.at("h_grid"), ctx + ".h_grid");
    if (cfg.contains("deltas"))
        grid.deltas = get_as<std::vector<double>>(cfg, ctx, "deltas");
    if (cfg.contains("delta_rule")) {
        const json& rule = cfg.at("delta_rule");
        check_keys(rule, ctx + ".delta_rule", {"c", "nu_delta"}, {});
        grid.delta_rule = aas::DeltaRule{get_as<double>(rule, ctx, "c"),
                                         get_as<double>(rule, ctx, "nu_delta")};
    }
    grid.n_samples = get_or<long>(cfg, ctx, "n_samples", 500);
    grid.master_seed = get_or<std::uint64_t>(cfg, ctx, "master_seed", 0);
    grid.with_qfi = get_or<bool>(cfg, ctx, "with_qfi", false);
    grid.J = get_or<double>(cfg, ctx, "J", 1.0);
    grid.golden_omega = get_or<bool>(cfg, ctx, "golden_ratio_omega", false);
    return grid;
}

json effective_sweep_config(const aas::SweepGrid& grid) {
    json cfg;
    cfg["sizes"] = grid.sizes;
    if (grid.delta_rule)
        cfg["delta_rule"] = {{"c", grid.delta_rule->c}, {"nu_delta", grid.delta_rule->nu_delta}};
    else
        cfg["deltas"] = grid.deltas;
    cfg["h_grid"] = {{"log10_min", grid.h_grid.log10_min},
                     {"log10_max", grid.h_grid.log10_max},
                     {"points_per_decade", grid.h_grid.points_per_decade}};
    cfg["n_samples"] = grid.n_samples;
    cfg["master_seed"] = grid.master_seed;
    cfg["with_qfi"] = grid.with_qfi;
    cfg["J"] = grid.J;
    cfg["golden_ratio_omega"] = grid.golden_omega;
    return cfg;
}

aas::ObservableColumn parse_column(const std::string& name, const std::string& ctx) {
    if (name == "zeta") return aas::ObservableColumn::Zeta;
    if (name == "ipr") return aas::ObservableColumn::Ipr;
    if (name == "gap") return aas::ObservableColumn::Gap;
    if (name == "qfi") return aas::ObservableColumn::Qfi;
    throw aas::ConfigError(ctx + ": unknown observable '" + name +
                           "' (expected zeta|ipr|gap|qfi)");
}

aas::AnsatzKind parse_ansatz_kind(const std::string& name, const std::string& ctx) {
    if (name == "zeta") return aas::AnsatzKind::Zeta;
    if (name == "ipr") return aas::AnsatzKind::Ipr;
    if (name == "gap") return aas::AnsatzKind::Gap;
    if (name == "zeta_2param") return aas::AnsatzKind::Zeta2;
    if (name == "ipr_2param") return aas::AnsatzKind::Ipr2;
    if (name == "gap_2param") return aas::AnsatzKind::Gap2;
    if (name == "kappa") return aas::AnsatzKind::Kappa;
    throw aas::ConfigError(ctx + ": unknown ansatz '" + name + "'");
}

std::string default_observable(aas::AnsatzKind kind) {
    switch (kind) {
        case aas::AnsatzKind::Ipr:
        case aas::AnsatzKind::Ipr2: return "ipr";
        case aas::AnsatzKind::Gap:
        case aas::AnsatzKind::Gap2: return "gap";
        default: return "zeta";
    }
}

void emit_report(const json& report, const CommonOpts& opts) {
    if (opts.out_path.empty())
        std::cout << report.dump(2) << std::endl;
    else
        aas::write_json(resolve_out(opts.out_path), report);
}

// --- subcommands -------------------------------------------------------------

int cmd_sweep(const CommonOpts& opts) {
    aas::SweepGrid grid = parse_sweep_config(aas::read_json(opts.config_path));
    if (opts.seed) grid.master_seed = *opts.seed;
    if (opts.samples) grid.n_samples = *opts.samples;
    if (opts.figure_faithful) grid.n_samples = 5000;
    grid.validate();

    const aas::SweepResult result = aas::run_sweep(grid, resolve_threads(opts));
    const fs::path out = resolve_out(opts.out_path);
    aas::write_sweep_csv(out, result.records, grid.with_qfi);
    aas::write_sidecar(out, "sweep", effective_sweep_config(grid), grid.master_seed);

    if (!result.failures.empty()) {
        for (const auto& f : result.failures) std::cerr << "FAILED " << f.message << "\n";
        std::cerr << result.failures.size() << " sample(s) failed; partial CSV written to "
                  << out << "\n";
        return 3;
    }
    return 0;
}

int cmd_collapse(const CommonOpts& opts) {
    const json cfg = aas::read_json(opts.config_path);
    const std::string ctx = "collapse config";
    check_keys(cfg, ctx, {"input", "ansatz"},
               {"observable", "fixed", "grid", "flat_tol", "h_min", "h_max", "delta"});

    aas::CollapseSpec spec;
    spec.ansatz.kind = parse_ansatz_kind(get_as<std::string>(cfg, ctx, "ansatz"), ctx);
    if (cfg.contains("fixed")) {
        const json& fixed = cfg.at("fixed");
        check_keys(fixed, ctx + ".fixed", {}, {"nu", "nu_c", "nu_delta"});
        if (fixed.contains("nu")) spec.ansatz.fixed_nu = get_as<double>(fixed, ctx, "nu");
        if (fixed.contains("nu_c")) spec.ansatz.fixed_nu_c = get_as<double>(fixed, ctx, "nu_c");
        if (fixed.contains("nu_delta"))
            spec.ansatz.fixed_nu_delta = get_as<double>(fixed, ctx, "nu_delta");
    }
    if (cfg.contains("grid")) {
        const json& g = cfg.at("grid");
        check_keys(g, ctx + ".grid", {"lo", "hi"}, {"step"});
        spec.grid = aas::ExponentGrid{get_as<double>(g, ctx, "lo"), get_as<double>(g, ctx, "hi"),
                                      get_or<double>(g, ctx, "step", 0.001)};
    }
    spec.flat_tol = get_or<double>(cfg, ctx, "flat_tol", 0.01);

    const std::string obs_name =
        get_or<std::string>(cfg, ctx, "observable", default_observable(spec.ansatz.kind));
    const aas::ObservableColumn column = parse_column(obs_name, ctx);

    auto records = aas::read_sweep_csv(get_as<std::string>(cfg, ctx, "input"));
    if (cfg.contains("delta")) {
        const double want = get_as<double>(cfg, ctx, "delta");
        std::erase_if(records, [&](const aas::ObservableRecord& r) { return r.point.delta != want; });
        if (records.empty()) throw aas::ConfigError(ctx + ": no rows at the requested delta");
    }
    std::optional<double> h_min, h_max;
    if (cfg.contains("h_min")) h_min = get_as<double>(cfg, ctx, "h_min");
    if (cfg.contains("h_max")) h_max = get_as<double>(cfg, ctx, "h_max");
    const auto data = aas::to_curve_points(records, column, h_min, h_max);

    // Plain one-parameter kinds expect a single delta; the 2param kinds pool
    // one delta per size by construction of the rule sweep.
    if (spec.ansatz.kind == aas::AnsatzKind::Zeta || spec.ansatz.kind == aas::AnsatzKind::Ipr ||
        spec.ansatz.kind == aas::AnsatzKind::Gap) {
        std::set<double> deltas;
        for (const auto& pt : data) deltas.insert(pt.delta);
        if (deltas.size() > 1)
            throw aas::ConfigError(ctx +
                                   ": data spans several deltas; pass 'delta' to filter, or use a "
                                   "*_2param/kappa ansatz");
    }

    const aas::CollapseResult res = aas::run_collapse(data, spec, resolve_threads(opts));

    json report;
    report["command"] = "collapse";
    report["artifact_version"] = aas::kArtifactVersion;
    report["config"] = cfg;
    report["observable"] = obs_name;
    report["best_exponent"] = res.best_exponent;
    report["min_cost"] = res.min_cost;
    report["flat_window"] = {res.window_lo, res.window_hi};
    report["reported"] = res.reported;
    report["uncertainty"] = res.uncertainty;
    json curve = json::array();
    for (const auto& [e, c] : res.curve) curve.push_back({e, c});
    report["curve"] = curve;
    emit_report(report, opts);
    return 0;
}

int cmd_fit(const CommonOpts& opts) {
    const json cfg = aas::read_json(opts.config_path);
    const std::string ctx = "fit config";
    check_keys(cfg, ctx, {"input", "observable"}, {"L", "delta", "h_min", "h_max"});

    aas::FitSpec spec;
    spec.column = parse_column(get_as<std::string>(cfg, ctx, "observable"), ctx);
    if (cfg.contains("L")) spec.L = get_as<long>(cfg, ctx, "L");
    if (cfg.contains("delta")) spec.delta = get_as<double>(cfg, ctx, "delta");
    if (cfg.contains("h_min")) spec.h_min = get_as<double>(cfg, ctx, "h_min");
    if (cfg.contains("h_max")) spec.h_max = get_as<double>(cfg, ctx, "h_max");

    const auto records = aas::read_sweep_csv(get_as<std::string>(cfg, ctx, "input"));
    const aas::FitResult fit = aas::fit_records(records, spec);

    json report;
    report["command"] = "fit";
    report["artifact_version"] = aas::kArtifactVersion;
    report["config"] = cfg;
    report["exponent"] = fit.exponent;
    report["std_error"] = fit.std_error;
    report["r_squared"] = fit.r_squared;
    report["window_h"] = {fit.window_lo, fit.window_hi};
    report["n_points"] = fit.n_points;
    emit_report(report, opts);
    return 0;
}

int cmd_fidelity_map(const CommonOpts& opts) {
    const json cfg = aas::read_json(opts.config_path);
    const std::string ctx = "fidelity-map config";
    check_keys(cfg, ctx, {"L", "h_grid"},
               {"deltas", "delta_range", "n_samples", "master_seed", "delta_ref", "J"});

    aas::FidelityMapSpec spec;
    spec.L = get_as<long>(cfg, ctx, "L");
    spec.h_grid = parse_h_grid(cfg.at("h_grid"), ctx + ".h_grid");
    spec.J = get_or<double>(cfg, ctx, "J", 1.0);
    spec.delta_ref = get_or<double>(cfg, ctx, "delta_ref", -2.0 * spec.J);
    spec.n_samples = get_or<long>(cfg, ctx, "n_samples", 100);
    spec.master_seed = get_or<std::uint64_t>(cfg, ctx, "master_seed", 0);

    if (cfg.contains("deltas") == cfg.contains("delta_range"))
        throw aas::ConfigError(ctx + ": exactly one of 'deltas' or 'delta_range' is required");
    if (cfg.contains("deltas")) {
        spec.deltas = get_as<std::vector<double>>(cfg, ctx, "deltas");
    } else {
        const json& r = cfg.at("delta_range");
        check_keys(r, ctx + ".delta_range", {"min", "max", "count"}, {});
        const double lo = get_as<double>(r, ctx, "min");
        const double hi = get_as<double>(r, ctx, "max");
        const long count = get_as<long>(r, ctx, "count");
        if (count < 2 || !(hi > lo))
            throw aas::ConfigError(ctx + ".delta_range: need max > min and count >= 2");
        for (long i = 0; i < count; ++i)
            spec.deltas.push_back(lo + (hi - lo) * static_cast<double>(i) /
                                           static_cast<double>(count - 1));
    }

    if (opts.seed) spec.master_seed = *opts.seed;
    if (opts.samples) spec.n_samples = *opts.samples;
    if (opts.figure_faithful) spec.n_samples = 100;  // Fig. 6 sample count

    const auto records = aas::run_fidelity_map(spec, resolve_threads(opts));
    const fs::path out = resolve_out(opts.out_path);
    aas::write_fidelity_csv(out, records);

    json effective = cfg;
    effective["n_samples"] = spec.n_samples;
    effective["master_seed"] = spec.master_seed;
    effective["delta_ref"] = spec.delta_ref;
    aas::write_sidecar(out, "fidelity-map", effective, spec.master_seed);
    return 0;
}

int cmd_qfi(const CommonOpts& opts) {
    const json cfg = aas::read_json(opts.config_path);
    const std::string ctx = "qfi config";
    check_keys(cfg, ctx, {"sizes", "h", "delta"},
               {"n_samples", "master_seed", "nu_for_prediction", "J", "golden_ratio_omega"});

    aas::QfiRunSpec spec;
    spec.sizes = get_as<std::vector<long>>(cfg, ctx, "sizes");
    spec.h = get_as<double>(cfg, ctx, "h");
    spec.delta = get_as<double>(cfg, ctx, "delta");
    spec.n_samples = get_or<long>(cfg, ctx, "n_samples", 500);
    spec.master_seed = get_or<std::uint64_t>(cfg, ctx, "master_seed", 0);
    spec.J = get_or<double>(cfg, ctx, "J", 1.0);
    spec.golden_omega = get_or<bool>(cfg, ctx, "golden_ratio_omega", false);
    if (opts.seed) spec.master_seed = *opts.seed;
    if (opts.samples) spec.n_samples = *opts.samples;
    if (opts.figure_faithful) spec.n_samples = 8000;  // Fig. 9 sample count

    const auto records = aas::run_qfi_sizes(spec, resolve_threads(opts));
    if (records.size() < 3)
        throw aas::ConfigError(ctx + ": the beta fit needs at least 3 system sizes");

    const fs::path out = resolve_out(opts.out_path);
    aas::write_qfi_csv(out, records);

    std::vector<double> sizes, means;
    for (const auto& r : records) {
        sizes.push_back(static_cast<double>(r.point.L));
        means.push_back(r.qfi->mean);
    }
    std::optional<double> nu;
    if (cfg.contains("nu_for_prediction")) nu = get_as<double>(cfg, ctx, "nu_for_prediction");
    const aas::QfiScalingResult scaling = aas::qfi_scaling(sizes, means, nu);

    json effective = cfg;
    effective["n_samples"] = spec.n_samples;
    effective["master_seed"] = spec.master_seed;
    aas::write_sidecar(out, "qfi", effective, spec.master_seed);

    json fit_report;
    fit_report["command"] = "qfi";
    fit_report["artifact_version"] = aas::kArtifactVersion;
    fit_report["config"] = effective;
    fit_report["beta"] = scaling.beta.exponent;
    fit_report["std_error"] = scaling.beta.std_error;
    fit_report["r_squared"] = scaling.beta.r_squared;
    fit_report["n_points"] = scaling.beta.n_points;
    if (scaling.predicted_beta) fit_report["predicted_beta_2_over_nu"] = *scaling.predicted_beta;
    fs::path fit_path = out;
    fit_path += ".fit.json";
    aas::write_json(fit_path, fit_report);
    return 0;
}

int cmd_wavefunction(const CommonOpts& opts) {
    const json cfg = aas::read_json(opts.config_path);
    const std::string ctx = "wavefunction config";
    check_keys(cfg, ctx, {"L", "delta", "h"}, {"phi", "J", "golden_ratio_omega"});

    const long L = get_as<long>(cfg, ctx, "L");
    const double delta = get_as<double>(cfg, ctx, "delta");
    const double h = get_as<double>(cfg, ctx, "h");
    const double phi = get_or<double>(cfg, ctx, "phi", 0.0);
    const double J = get_or<double>(cfg, ctx, "J", 1.0);
    const bool golden = get_or<bool>(cfg, ctx, "golden_ratio_omega", false);

    const aas::ModelParams params = aas::ModelParams::make(L, delta, h, phi, J, golden);
    const auto amplitude = aas::ground_state_amplitude(params);

    const fs::path out = resolve_out(opts.out_path);
    aas::write_wavefunction_csv(out, amplitude);
    aas::write_sidecar(out, "wavefunction", cfg, 0);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Aubry-Andre-Stark localization laboratory"};
    app.require_subcommand(1);

    CommonOpts sweep_opts, collapse_opts, fit_opts, fidelity_opts, qfi_opts, wf_opts;
    auto* sweep =
        app.add_subcommand("sweep", "phase-averaged observables over an (L, delta, h) grid");
    add_common_options(sweep, sweep_opts, true);
    auto* collapse =
        app.add_subcommand("collapse", "cost-function data collapse of swept curves");
    add_common_options(collapse, collapse_opts, false);
    auto* fit = app.add_subcommand("fit", "power-law fit of the size-independent tail");
    add_common_options(fit, fit_opts, false);
    auto* fidelity = app.add_subcommand(
        "fidelity-map", "ground-state fidelity against the Stark reference over (delta, h)");
    add_common_options(fidelity, fidelity_opts, true);
    auto* qfi = app.add_subcommand("qfi", "quantum Fisher information scaling with system size");
    add_common_options(qfi, qfi_opts, true);
    auto* wavefunction =
        app.add_subcommand("wavefunction", "ground-state profile of a single realization");
    add_common_options(wavefunction, wf_opts, true);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForVersion& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (sweep->parsed()) return cmd_sweep(sweep_opts);
        if (collapse->parsed()) return cmd_collapse(collapse_opts);
        if (fit->parsed()) return cmd_fit(fit_opts);
        if (fidelity->parsed()) return cmd_fidelity_map(fidelity_opts);
        if (qfi->parsed()) return cmd_qfi(qfi_opts);
        if (wavefunction->parsed()) return cmd_wavefunction(wf_opts);
    } catch (const aas::ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const std::invalid_argument& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return 2;
    } catch (const aas::NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << "\n";
        return 3;
    } catch (const aas::IoError& e) {
        std::cerr << "io error: " << e.what() << "\n";
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
