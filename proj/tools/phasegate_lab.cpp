// phasegate-lab: presets, gate runs, budgets, fusion plans and sweeps.
//
// Exit codes: 0 ok, 1 usage error, 2 physics-validity failure (regime,
// leakage, integration, verdict mismatch), 3 inconclusive orbit search.

#include "phasegate/lab.hpp"

#include "CLI11.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

namespace fs = std::filesystem;
using namespace phasegate;

namespace {

enum Exit { kOk = 0, kUsage = 1, kPhysics = 2, kInconclusive = 3 };

struct PhysicsFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct Common {
    std::string preset = "squid";
    std::optional<std::string> config;
    int n_atoms = 2;
    std::string out_dir;
    std::string format = "json";
};

struct Run {
    std::string model = "full";
    std::string solver = "rk4";
    int n_max = 4;
    double step_fraction = kDefaultStepFraction;

    GateOptions options() const {
        GateOptions o;
        o.n_max = n_max;
        o.step_fraction = step_fraction;
        o.solver = parse_solver(solver);
        return o;
    }
};

void write_file(const Common& c, const std::string& name, const std::string& content) {
    if (c.out_dir.empty()) return;
    fs::create_directories(c.out_dir);
    const auto path = fs::path(c.out_dir) / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << content;
    std::cerr << "wrote " << path.string() << "\n";
}

void add_common(CLI::App* app, Common& c) {
    app->add_option("--preset", c.preset, "squid, ion or custom")->capture_default_str();
    app->add_option("--config", c.config, "key-value parameter file (custom preset)");
    app->add_option("--n-atoms", c.n_atoms, "number of atoms")->capture_default_str()->check(CLI::Range(1, 8));
    app->add_option("--out-dir", c.out_dir, "directory for report files");
    app->add_option("--format", c.format, "stdout format")->check(CLI::IsMember({"json", "text"}))->capture_default_str();
}

void add_run(CLI::App* app, Run& r) {
    app->add_option("--model", r.model, "full, eff_cavity or eff_diag")->capture_default_str();
    app->add_option("--solver", r.solver, "rk4 or rotating_frame (full model only)")->capture_default_str();
    app->add_option("--n-max", r.n_max, "Fock truncation")->capture_default_str()->check(CLI::Range(0, 40));
    app->add_option("--step-fraction", r.step_fraction, "RK4 step times the largest frequency")
        ->capture_default_str()
        ->check(CLI::PositiveNumber);
}

int cmd_regime(const Common& c, double min_ratio) {
    const auto preset = load_preset(c.preset, c.config, c.n_atoms);
    const auto report = regime_check(preset.params, min_ratio);
    const auto json = render(regime_json(preset, report));
    write_file(c, "regime.json", json);
    std::cout << (c.format == "text" ? regime_text(preset, report) : json);
    return report.pass ? kOk : kPhysics;
}

int cmd_cz(const Common& c, const Run& r, int samples, std::optional<double> t) {
    const auto preset = load_preset(c.preset, c.config, c.n_atoms);
    const auto model = parse_model_kind(r.model);
    const auto options = r.options();
    if (model == ModelKind::full) {
        const auto regime = regime_check(preset.params);
        if (!regime.pass) std::cerr << "warning: parameters are outside the dispersive regime\n";
    }
    const auto run = run_cz(preset.params, model, samples, options, t);
    const auto json = render(cz_json(preset, run, options));
    write_file(c, "cz.json", json);
    write_file(c, "cz_timeseries.tsv", time_series_tsv(run.series, preset.g_physical));
    if (c.format == "text") {
        const auto gt = gate_time(preset);
        std::cout << "preset " << preset.name << ", model " << to_string(model) << ", " << c.n_atoms << " atoms\n"
                  << "  t = " << format12(run.gate.t) << " /g = " << format12(to_seconds(run.gate.t, preset.g_physical))
                  << " s (gate time " << format12(gt.seconds) << " s";
        if (gt.seconds_cyclic) std::cout << ", cyclic reading " << format12(*gt.seconds_cyclic) << " s";
        std::cout << ")\n  phi " << format12(run.gate.phi) << ", xi_I " << format12(run.gate.xi_I) << "\n  fidelity "
                  << format12(run.gate.fidelity) << ", max leakage " << format12(run.gate.max_leakage) << "\n";
    } else {
        std::cout << json;
    }
    return kOk;
}

int cmd_budget(const Common& c, const Run& r, bool nominal_only) {
    const auto preset = load_preset(c.preset, c.config, c.n_atoms);
    const auto report = budget(preset, !nominal_only, r.options());
    const auto json = render(budget_json(report));
    write_file(c, "budget.json", json);
    std::cout << (c.format == "text" ? budget_text(report) : json);
    return kOk;
}

int cmd_fuse(const Common& c, const std::string& recipe, const std::string& plan_path, bool list, std::size_t cap) {
    if (list) {
        for (const auto& p : recipes())
            std::cout << p.name << "\t" << p.n_qubits << " qubits" << (p.reconstructed ? "\treconstructed" : "") << "\t"
                      << p.description << "\n";
        return kOk;
    }
    FusionPlan plan;
    if (!plan_path.empty()) {
        std::ifstream in(plan_path);
        if (!in) throw ConfigError("cannot open plan file " + plan_path);
        std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
        plan = plan_from_text(text);
    } else {
        try {
            plan = find_recipe(recipe);
        } catch (const std::out_of_range&) {
            throw ConfigError("unknown recipe `" + recipe + "` (see --list)");
        }
    }
    const auto outcome = run_plan(plan, cap);
    const auto json = render(plan_json(plan, outcome));
    write_file(c, plan.name + ".json", json);
    write_file(c, plan.name + "_final.dot", to_dot(outcome.final_graph, plan.name + "_final"));
    write_file(c, plan.name + "_target.dot", to_dot(plan.target, plan.name + "_target"));
    if (c.format == "text") {
        std::cout << "plan " << plan.name << (plan.reconstructed ? " (reconstructed)" : "") << ": "
                  << to_string(outcome.search.status);
        if (outcome.search.status == LcStatus::equivalent) {
            std::cout << ", witness [";
            for (std::size_t i = 0; i < outcome.search.witness.size(); ++i)
                std::cout << (i ? ", " : "") << outcome.search.witness[i];
            std::cout << "]";
        }
        std::cout << ", explored " << outcome.search.explored << "\n  final: " << format_edges(outcome.final_graph)
                  << "\n  target: " << format_edges(plan.target) << "\n  statevector: "
                  << (outcome.statevector_checked ? (outcome.statevector_verified ? "verified" : "MISMATCH")
                                                  : "not checked")
                  << "\n";
        for (const auto& n : outcome.notes) std::cout << "  note: " << n << "\n";
    } else {
        std::cout << json;
    }
    if (outcome.statevector_checked && !outcome.statevector_verified) return kPhysics;
    switch (outcome.search.status) {
        case LcStatus::equivalent: return kOk;
        case LcStatus::cap_reached: return kInconclusive;
        case LcStatus::not_in_orbit: return plan.reconstructed ? kOk : kPhysics;
    }
    return kOk;
}

int cmd_sweep(const Common& c, const Run& r, const std::string& param, const std::string& range,
              const std::string& metric) {
    const auto preset = load_preset(c.preset, c.config, c.n_atoms);
    const auto values = parse_range(range);
    const auto result = run_sweep(preset.params, parse_model_kind(r.model), parse_sweep_param(param), values,
                                  parse_sweep_metric(metric), r.options());
    const auto tsv = sweep_tsv(result);
    const auto json = render(sweep_json(preset, result));
    write_file(c, "sweep.tsv", tsv);
    write_file(c, "sweep.json", json);
    std::cout << (c.format == "text" ? tsv : json);
    return kOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"phasegate-lab: dispersive multi-atom phase gate and graph-state fusion"};
    app.require_subcommand(1);

    Common common;
    Run run;

    auto* regime = app.add_subcommand("regime", "dispersive-regime ratios for a preset");
    add_common(regime, common);
    double min_ratio = kDefaultRegimeThreshold;
    regime->add_option("--min-ratio", min_ratio, "minimum ratio")->capture_default_str();

    auto* cz = app.add_subcommand("cz", "simulate the controlled-Z gate");
    add_common(cz, common);
    add_run(cz, run);
    int samples = 16;
    std::optional<double> t;
    cz->add_option("--samples", samples, "time-series samples")->capture_default_str()->check(CLI::PositiveNumber);
    cz->add_option("--t", t, "final time in units of 1/g (default pi/lambda')")->check(CLI::PositiveNumber);

    auto* bud = app.add_subcommand("budget", "decoherence budget");
    add_common(bud, common);
    add_run(bud, run);
    bool nominal_only = false;
    bud->add_flag("--nominal-only", nominal_only, "skip the full-model measurement");

    auto* fuse = app.add_subcommand("fuse", "run a graph-state fusion plan");
    add_common(fuse, common);
    std::string recipe, plan_path;
    bool list = false;
    std::size_t cap = kDefaultOrbitCap;
    auto* recipe_opt = fuse->add_option("--recipe", recipe, "built-in recipe name");
    auto* plan_opt = fuse->add_option("--plan", plan_path, "plan file")->check(CLI::ExistingFile);
    recipe_opt->excludes(plan_opt);
    fuse->add_flag("--list", list, "list built-in recipes");
    fuse->add_option("--cap", cap, "orbit search cap")->capture_default_str()->check(CLI::PositiveNumber);

    auto* sweep = app.add_subcommand("sweep", "metric against one parameter");
    add_common(sweep, common);
    add_run(sweep, run);
    std::string param, range, metric = "fidelity";
    sweep->add_option("--param", param, "delta-scale, omega, n-max or t (fraction of the gate time)")->required();
    sweep->add_option("--range", range, "a,b,c or start:stop:count")->required();
    sweep->add_option("--metric", metric, "fidelity, leakage, phase-deviation or phase")->capture_default_str();

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kUsage;
    }

    try {
        if (*regime) return cmd_regime(common, min_ratio);
        if (*cz) return cmd_cz(common, run, samples, t);
        if (*bud) return cmd_budget(common, run, nominal_only);
        if (*fuse) {
            if (!list && recipe.empty() && plan_path.empty()) throw ConfigError("fuse needs --recipe, --plan or --list");
            return cmd_fuse(common, recipe, plan_path, list, cap);
        }
        if (*sweep) return cmd_sweep(common, run, param, range, metric);
    } catch (const ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kUsage;
    } catch (const ExcessiveLeakage& e) {
        std::cerr << "leakage: " << e.what() << "\n";
        return kPhysics;
    } catch (const IntegrationError& e) {
        std::cerr << "integration: " << e.what() << "\n";
        return kPhysics;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kPhysics;
    }
    return kUsage;
}
