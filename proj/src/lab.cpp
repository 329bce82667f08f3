#include "phasegate/lab.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <numbers>
#include <sstream>

namespace phasegate {

namespace {

constexpr double kSquidOmega = 1.05;
constexpr double kSquidDelta1 = 20.0;
constexpr double kSquidDelta2 = 21.0;
constexpr double kSquidG = 1.8e8;
constexpr double kSquidLifetime = 7.6e-7;
constexpr double kIonLambdaPrime = 1e4;
constexpr double kIonTd = 1e-2;

}  // namespace

Preset squid_preset(int n_atoms) {
    Preset p{"squid", DriveParams::uniform(n_atoms, 1.0, kSquidOmega, kSquidDelta1, kSquidDelta2), kSquidG,
             kSquidLifetime, kSquidLifetime, std::nullopt, std::nullopt, {}};
    return p;
}

Preset ion_preset(int n_atoms) {
    auto params = DriveParams::uniform(n_atoms, 1.0, kSquidOmega, kSquidDelta1, kSquidDelta2);
    const double lp = *derive(params).lambda_prime;
    Preset p{"ion", params, kIonLambdaPrime / lp, std::nullopt, std::nullopt, kIonTd, kIonLambdaPrime, {}};
    p.notes.push_back("couplings reuse the squid ratios; g_physical is fixed by lambda' = 1e4 Hz");
    return p;
}

Preset custom_preset(const KeyValueConfig& cfg) {
    Preset p{cfg.get("name").value_or("custom"), drive_params_from_key_value(cfg.to_string()),
             cfg.require_double("g_physical"), std::nullopt, std::nullopt, std::nullopt, std::nullopt, {}};
    if (!(p.g_physical > 0.0)) throw ConfigError("`g_physical` must be > 0");
    auto optional_positive = [&](const char* key) -> std::optional<double> {
        if (!cfg.contains(key)) return std::nullopt;
        const double v = cfg.require_double(key);
        if (!(v > 0.0)) throw ConfigError(std::string("`") + key + "` must be > 0");
        return v;
    };
    p.t_c = optional_positive("t_c");
    p.t_r = optional_positive("t_r");
    p.t_d = optional_positive("t_d");
    return p;
}

Preset load_preset(const std::string& name, const std::optional<std::string>& config_path, int n_atoms) {
    if (name == "squid") return squid_preset(n_atoms);
    if (name == "ion") return ion_preset(n_atoms);
    if (name == "custom") {
        if (!config_path) throw ConfigError("preset `custom` needs --config");
        auto cfg = KeyValueConfig::load(*config_path);
        if (!cfg.contains("n_atoms")) cfg.add("n_atoms", std::to_string(n_atoms));
        return custom_preset(cfg);
    }
    throw ConfigError("unknown preset `" + name + "` (squid, ion, custom)");
}

double to_seconds(double t, double g_physical) { return t / g_physical; }
double to_dimensionless(double seconds, double g_physical) { return seconds * g_physical; }

GateTime gate_time(const Preset& preset) {
    GateTime g;
    g.dimensionless = cz_gate_time(preset.params);
    g.seconds = to_seconds(g.dimensionless, preset.g_physical);
    if (preset.lambda_prime_physical)
        g.seconds_cyclic = std::numbers::pi / (2.0 * std::numbers::pi * *preset.lambda_prime_physical);
    return g;
}

BudgetColumn budget_column(std::string label, double p_r, double p_c, double t_r, double t_c, double t_gate) {
    if (!(p_r > 0.0) || !(p_c > 0.0)) throw std::domain_error("budget: occupation probabilities must be > 0");
    BudgetColumn c{std::move(label), p_r, p_c, t_r / p_r, t_c / p_c, 0.0};
    c.headroom = std::min(c.t_r_eff, c.t_c_eff) / t_gate;
    return c;
}

BudgetReport budget(const Preset& preset, bool measure, const GateOptions& options) {
    BudgetReport r;
    r.preset = preset.name;
    r.gate = gate_time(preset);
    if (preset.t_r && preset.t_c) {
        r.columns.push_back(
            budget_column("nominal", kNominalOccupation, kNominalOccupation, *preset.t_r, *preset.t_c, r.gate.seconds));
        if (measure) {
            const double times[] = {r.gate.dimensionless};
            const auto dyn = simulate_qubit_dynamics(preset.params, ModelKind::full, times, options, true);
            r.columns.push_back(
                budget_column("measured", dyn.max_excited, dyn.max_photon, *preset.t_r, *preset.t_c, r.gate.seconds));
        }
        const auto d = derive(preset.params);
        const double omega = std::abs(preset.params.omega().front());
        const double lambda = std::abs(d.lambda_j.front());
        std::ostringstream os;
        os << "quoted estimates Omega^2/delta^2 = " << format12(omega * omega / (d.delta * d.delta))
           << " and lambda^2/delta^2 = " << format12(lambda * lambda / (d.delta * d.delta))
           << " do not reproduce P ~ 0.01; measured maxima are shown next to the nominal value";
        r.notes.push_back(os.str());
    }
    if (preset.t_d) {
        r.t_d = preset.t_d;
        r.motional_headroom = *preset.t_d / r.gate.seconds;
        if (r.gate.seconds_cyclic) {
            r.motional_headroom_cyclic = *preset.t_d / *r.gate.seconds_cyclic;
            r.notes.push_back("pi/lambda' with lambda' = 1e4 rad/s gives " + format12(r.gate.seconds) +
                              " s; reading lambda' in cycles/s gives " + format12(*r.gate.seconds_cyclic) +
                              " s; the quoted value is ~1e-4 s");
        }
    }
    return r;
}

// ---------------------------------------------------------------------------

namespace {

std::string normalized(std::string_view text) {
    std::string s(text);
    std::replace(s.begin(), s.end(), '-', '_');
    return s;
}

}  // namespace

SweepParam parse_sweep_param(std::string_view text) {
    const auto s = normalized(text);
    if (s == "delta_scale") return SweepParam::delta_scale;
    if (s == "omega") return SweepParam::omega;
    if (s == "n_max") return SweepParam::n_max;
    if (s == "t") return SweepParam::t;
    throw std::invalid_argument("unknown sweep parameter `" + std::string(text) + "` (delta-scale, omega, n-max, t)");
}

SweepMetric parse_sweep_metric(std::string_view text) {
    const auto s = normalized(text);
    if (s == "fidelity") return SweepMetric::fidelity;
    if (s == "leakage") return SweepMetric::leakage;
    if (s == "phase_deviation") return SweepMetric::phase_deviation;
    if (s == "phase") return SweepMetric::phase;
    throw std::invalid_argument("unknown metric `" + std::string(text) + "` (fidelity, leakage, phase-deviation, phase)");
}

std::string_view to_string(SweepParam p) {
    switch (p) {
        case SweepParam::delta_scale: return "delta_scale";
        case SweepParam::omega: return "omega";
        case SweepParam::n_max: return "n_max";
        case SweepParam::t: return "t";
    }
    return "?";
}

std::string_view to_string(SweepMetric m) {
    switch (m) {
        case SweepMetric::fidelity: return "fidelity";
        case SweepMetric::leakage: return "leakage";
        case SweepMetric::phase_deviation: return "phase_deviation";
        case SweepMetric::phase: return "phase";
    }
    return "?";
}

std::vector<double> parse_range(std::string_view text) {
    std::vector<double> out;
    if (text.find(':') != std::string_view::npos) {
        const auto parts = split_list(text, ':');
        if (parts.size() != 3) throw ConfigError("range must be start:stop:count");
        const double a = parse_double(parts[0]);
        const double b = parse_double(parts[1]);
        const int n = parse_int(parts[2]);
        if (n < 1) throw ConfigError("range count must be >= 1");
        if (n == 1) return {a};
        for (int k = 0; k < n; ++k) out.push_back(a + (b - a) * k / (n - 1));
        return out;
    }
    for (const auto& item : split_list(text)) out.push_back(parse_double(item));
    if (out.empty()) throw ConfigError("empty range");
    return out;
}

double least_squares_slope(std::span<const double> x, std::span<const double> y) {
    if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("least_squares_slope: need >= 2 points");
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxy += (x[i] - mx) * (y[i] - my);
        sxx += (x[i] - mx) * (x[i] - mx);
    }
    if (sxx == 0.0) throw std::invalid_argument("least_squares_slope: x values are all equal");
    return sxy / sxx;
}

namespace {

struct PointMetrics {
    double fidelity = 0.0;
    double leakage = 0.0;
    double phase = 0.0;
    double deviation = 0.0;
};

PointMetrics evaluate_at_gate(const DriveParams& p, ModelKind model, SweepMetric metric, const GateOptions& options) {
    PointMetrics m;
    if (metric == SweepMetric::phase_deviation) {
        const auto dev = phase_deviation(p, model, 16, options);
        m.deviation = dev.max_relative;
        m.phase = dev.phi.back();
        m.leakage = dev.leakage_at_gate;
        return m;
    }
    const auto g = end_to_end_cz(p, model, options);
    m.fidelity = g.fidelity;
    m.leakage = g.max_leakage;
    m.phase = g.phi;
    return m;
}

double pick(const PointMetrics& m, SweepMetric metric) {
    switch (metric) {
        case SweepMetric::fidelity: return m.fidelity;
        case SweepMetric::leakage: return m.leakage;
        case SweepMetric::phase_deviation: return m.deviation;
        case SweepMetric::phase: return m.phase;
    }
    return 0.0;
}

}  // namespace

SweepResult run_sweep(const DriveParams& base, ModelKind model, SweepParam param, std::span<const double> values,
                      SweepMetric metric, const GateOptions& options) {
    if (values.empty()) throw std::invalid_argument("sweep: empty grid");
    SweepResult r;
    r.param = param;
    r.metric = metric;
    r.model = model;

    if (param == SweepParam::t) {
        const auto d = derive(base);
        if (!d.lambda_prime) throw std::invalid_argument("sweep: requires uniform parameters");
        const double gate = cz_gate_time(base);
        std::vector<double> times;
        for (double v : values) {
            if (!(v >= 0.0)) throw std::invalid_argument("sweep: t values must be >= 0");
            times.push_back(v * gate);
        }
        if (!std::is_sorted(times.begin(), times.end()))
            throw std::invalid_argument("sweep: t values must be non-decreasing");
        const auto dyn = simulate_qubit_dynamics(base, model, times, options);
        const int n = base.n_atoms();
        std::vector<double> wrapped;
        for (const auto& b : dyn.blocks) wrapped.push_back(conditional_phase(b.unitary, n));
        const auto phases = unwrap_phases(wrapped);
        for (std::size_t k = 0; k < times.size(); ++k) {
            const auto& b = dyn.blocks[k];
            const double expected = *d.lambda_prime * times[k];
            double m = 0.0;
            switch (metric) {
                case SweepMetric::phase: m = phases[k]; break;
                case SweepMetric::leakage: m = std::max(0.0, b.leakage.maxCoeff()); break;
                case SweepMetric::phase_deviation:
                    m = expected == 0.0 ? std::numeric_limits<double>::quiet_NaN()
                                        : std::abs(std::abs(phases[k]) - std::abs(expected)) / std::abs(expected);
                    break;
                case SweepMetric::fidelity: {
                    const DenseMatrix u = apply_correction_frame(b.unitary, -std::arg(b.unitary(1, 1)));
                    m = gate_fidelity(u, DenseMatrix(entangling_unitary(n, times[k], *d.lambda_prime)));
                    break;
                }
            }
            r.rows.push_back({values[k], m});
        }
        if (metric == SweepMetric::phase && times.size() >= 2) {
            r.slope = least_squares_slope(times, phases);
            r.expected_slope = *d.lambda_prime;
        }
        r.notes.push_back("t is given as a fraction of the gate time pi/|lambda'|");
        return r;
    }

    for (double v : values) {
        DriveParams p = base;
        GateOptions o = options;
        switch (param) {
            case SweepParam::delta_scale:
                if (!(v > 0.0)) throw std::invalid_argument("sweep: delta scale must be > 0");
                p = base.scaled_detunings(v);
                break;
            case SweepParam::omega:
                if (!base.is_uniform()) throw std::invalid_argument("sweep: omega sweep requires uniform parameters");
                p = DriveParams::uniform(base.n_atoms(), base.g().front().real(), v, base.delta1(), base.delta2());
                break;
            case SweepParam::n_max:
                if (v < 0.0 || v != std::floor(v)) throw std::invalid_argument("sweep: n_max values must be integers >= 0");
                o.n_max = static_cast<int>(v);
                break;
            case SweepParam::t: break;
        }
        r.rows.push_back({v, pick(evaluate_at_gate(p, model, metric, o), metric)});
    }
    return r;
}

// ---------------------------------------------------------------------------

CzRun run_cz(const DriveParams& params, ModelKind model, int samples, const GateOptions& options,
             std::optional<double> t_final) {
    if (samples < 1) throw std::invalid_argument("run_cz: samples must be >= 1");
    const auto d = derive(params);
    if (!d.lambda_prime) throw std::invalid_argument("run_cz: requires uniform parameters");
    if (t_final && !(*t_final > 0.0)) throw std::invalid_argument("run_cz: t must be > 0");
    const double gate = t_final ? *t_final : cz_gate_time(params);
    const int n = params.n_atoms();
    TimeSeries s;
    s.n_atoms = n;
    for (int k = 1; k <= samples; ++k) s.t.push_back(gate * k / samples);
    const auto dyn = simulate_qubit_dynamics(params, model, s.t, options);
    std::vector<double> wrapped;
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        const auto& b = dyn.blocks[k];
        std::vector<double> ph, sv;
        for (Index i = 0; i < b.unitary.rows(); ++i) {
            ph.push_back(std::arg(b.unitary(i, i)));
            sv.push_back(std::norm(b.unitary(i, i)));
        }
        s.phase.push_back(std::move(ph));
        s.survival.push_back(std::move(sv));
        wrapped.push_back(conditional_phase(b.unitary, n));
        s.expected_phase.push_back(*d.lambda_prime * s.t[k]);
        s.max_leakage.push_back(std::max(0.0, b.leakage.maxCoeff()));
        s.excited.push_back(dyn.sample_excited[k]);
        s.photon.push_back(dyn.sample_photon[k]);
    }
    s.conditional_phase = unwrap_phases(wrapped);
    CzRun run{score_cz(dyn.blocks.back(), model, gate, *d.lambda_prime), std::move(s)};
    return run;
}

// ---------------------------------------------------------------------------

double round12(double x) {
    if (!std::isfinite(x) || x == 0.0) return x;
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return std::strtod(buf, nullptr);
}

std::string format12(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", x);
    return buf;
}

namespace {

using Json = nlohmann::ordered_json;

Json num(double x) {
    if (!std::isfinite(x)) return nullptr;
    return round12(x);
}

Json matrix_json(const DenseMatrix& m) {
    Json rows = Json::array();
    for (Index r = 0; r < m.rows(); ++r) {
        Json row = Json::array();
        for (Index c = 0; c < m.cols(); ++c) row.push_back(Json::array({num(m(r, c).real()), num(m(r, c).imag())}));
        rows.push_back(std::move(row));
    }
    return rows;
}

Json complex_list(const std::vector<Complex>& v) {
    Json out = Json::array();
    for (auto c : v) out.push_back(Json::array({num(c.real()), num(c.imag())}));
    return out;
}

Json params_json(const Preset& preset) {
    const auto& p = preset.params;
    const auto d = derive(p);
    Json j;
    j["n_atoms"] = p.n_atoms();
    j["g"] = complex_list(p.g());
    j["omega"] = complex_list(p.omega());
    j["delta1"] = num(p.delta1());
    j["delta2"] = num(p.delta2());
    j["delta"] = num(d.delta);
    if (d.lambda) j["lambda"] = num(*d.lambda);
    if (d.lambda_prime) j["lambda_prime"] = num(*d.lambda_prime);
    j["g_physical_hz"] = num(preset.g_physical);
    return j;
}

Json header(const std::string& kind, const Preset* preset) {
    Json j;
    j["schema_version"] = kReportSchemaVersion;
    j["kind"] = kind;
    if (preset) {
        j["preset"] = preset->name;
        j["params"] = params_json(*preset);
        if (!preset->notes.empty()) j["preset_notes"] = preset->notes;
    }
    return j;
}

Json gate_time_json(const GateTime& g) {
    Json j;
    j["dimensionless"] = num(g.dimensionless);
    j["seconds"] = num(g.seconds);
    if (g.seconds_cyclic) j["seconds_cyclic_reading"] = num(*g.seconds_cyclic);
    return j;
}

}  // namespace

nlohmann::ordered_json regime_json(const Preset& preset, const RegimeReport& report) {
    Json j = header("regime", &preset);
    Json ratios = Json::array();
    for (const auto& [name, value] : report.ratios) {
        Json row;
        row["name"] = name;
        row["value"] = num(value);
        row["pass"] = value >= report.threshold;
        ratios.push_back(std::move(row));
    }
    j["threshold"] = num(report.threshold);
    j["ratios"] = std::move(ratios);
    j["pass"] = report.pass;
    return j;
}

nlohmann::ordered_json cz_json(const Preset& preset, const CzRun& run, const GateOptions& options) {
    const auto& g = run.gate;
    Json j = header("cz", &preset);
    j["model"] = std::string(to_string(g.model));
    if (g.model != ModelKind::eff_diag) {
        j["n_max"] = options.n_max;
        if (g.model == ModelKind::full) j["solver"] = std::string(to_string(options.solver));
        if (options.solver == Solver::rk4) j["step_fraction"] = num(options.step_fraction);
    }
    j["gate_time"] = gate_time_json(gate_time(preset));
    j["t"] = num(g.t);
    j["t_seconds"] = num(to_seconds(g.t, preset.g_physical));
    j["xi_I"] = num(g.xi_I);
    j["phi"] = num(g.phi);
    j["fidelity"] = num(g.fidelity);
    j["max_leakage"] = num(g.max_leakage);
    Json leak = Json::array();
    for (Index i = 0; i < g.leakage.size(); ++i) leak.push_back(num(g.leakage[i]));
    j["leakage"] = std::move(leak);
    j["unitary"] = matrix_json(g.unitary);
    j["ideal"] = matrix_json(g.ideal);
    j["raw_unitary"] = matrix_json(g.raw);
    return j;
}

nlohmann::ordered_json budget_json(const BudgetReport& report) {
    Json j = header("budget", nullptr);
    j["preset"] = report.preset;
    j["gate_time"] = gate_time_json(report.gate);
    Json cols = Json::array();
    for (const auto& c : report.columns) {
        Json col;
        col["label"] = c.label;
        col["p_r"] = num(c.p_r);
        col["p_c"] = num(c.p_c);
        col["t_r_eff_s"] = num(c.t_r_eff);
        col["t_c_eff_s"] = num(c.t_c_eff);
        col["headroom"] = num(c.headroom);
        cols.push_back(std::move(col));
    }
    j["columns"] = std::move(cols);
    if (report.t_d) j["t_d_s"] = num(*report.t_d);
    if (report.motional_headroom) j["motional_headroom"] = num(*report.motional_headroom);
    if (report.motional_headroom_cyclic) j["motional_headroom_cyclic_reading"] = num(*report.motional_headroom_cyclic);
    j["notes"] = report.notes;
    return j;
}

nlohmann::ordered_json plan_json(const FusionPlan& plan, const PlanOutcome& outcome) {
    Json j = header("fuse", nullptr);
    j["plan"] = plan.name;
    j["description"] = plan.description;
    j["reconstructed"] = plan.reconstructed;
    j["n_qubits"] = plan.n_qubits;
    j["status"] = to_string(outcome.search.status);
    if (outcome.search.status == LcStatus::equivalent) j["witness"] = outcome.search.witness;
    else j["witness"] = nullptr;
    j["explored"] = outcome.search.explored;
    j["statevector_checked"] = outcome.statevector_checked;
    j["statevector_verified"] = outcome.statevector_verified;
    j["final_edges"] = format_edges(outcome.final_graph);
    j["target_edges"] = format_edges(plan.target);
    j["final_adjacency"] = to_adjacency_list(outcome.final_graph);
    j["notes"] = outcome.notes;
    return j;
}

nlohmann::ordered_json sweep_json(const Preset& preset, const SweepResult& result) {
    Json j = header("sweep", &preset);
    j["model"] = std::string(to_string(result.model));
    j["param"] = std::string(to_string(result.param));
    j["metric"] = std::string(to_string(result.metric));
    Json rows = Json::array();
    for (const auto& r : result.rows) rows.push_back(Json::array({num(r.value), num(r.metric)}));
    j["rows"] = std::move(rows);
    if (result.slope) j["slope"] = num(*result.slope);
    if (result.expected_slope) j["expected_slope"] = num(*result.expected_slope);
    j["notes"] = result.notes;
    return j;
}

std::string regime_text(const Preset& preset, const RegimeReport& report) {
    std::ostringstream os;
    os << "preset " << preset.name << ", threshold " << format12(report.threshold) << "\n";
    char line[128];
    for (const auto& [name, value] : report.ratios) {
        std::snprintf(line, sizeof line, "  %-24s %12s  %s\n", name.c_str(), format12(value).c_str(),
                      value >= report.threshold ? "ok" : "FAIL <<<");
        os << line;
    }
    os << (report.pass ? "dispersive regime: pass\n" : "dispersive regime: FAIL\n");
    return os.str();
}

std::string budget_text(const BudgetReport& report) {
    std::ostringstream os;
    os << "preset " << report.preset << ", gate time " << format12(report.gate.seconds) << " s";
    if (report.gate.seconds_cyclic) os << " (cyclic reading " << format12(*report.gate.seconds_cyclic) << " s)";
    os << "\n";
    for (const auto& c : report.columns)
        os << "  " << c.label << ": P_r " << format12(c.p_r) << ", P_c " << format12(c.p_c) << ", t_r' "
           << format12(c.t_r_eff) << " s, t_c' " << format12(c.t_c_eff) << " s, headroom " << format12(c.headroom)
           << "\n";
    if (report.motional_headroom)
        os << "  t_d " << format12(*report.t_d) << " s, headroom " << format12(*report.motional_headroom) << "\n";
    for (const auto& n : report.notes) os << "  note: " << n << "\n";
    return os.str();
}

std::string time_series_tsv(const TimeSeries& s, double g_physical) {
    std::ostringstream os;
    os << "t\tt_seconds";
    const std::size_t d = s.phase.empty() ? 0 : s.phase.front().size();
    for (std::size_t b = 0; b < d; ++b) os << "\tphase_" << bitstring(static_cast<std::uint32_t>(b), s.n_atoms);
    for (std::size_t b = 0; b < d; ++b) os << "\tsurvival_" << bitstring(static_cast<std::uint32_t>(b), s.n_atoms);
    os << "\tconditional_phase\tlambda_prime_t\tmax_leakage\tp_excited\tp_photon\n";
    for (std::size_t k = 0; k < s.t.size(); ++k) {
        os << format12(s.t[k]) << '\t' << format12(to_seconds(s.t[k], g_physical));
        for (double p : s.phase[k]) os << '\t' << format12(p);
        for (double p : s.survival[k]) os << '\t' << format12(p);
        os << '\t' << format12(s.conditional_phase[k]) << '\t' << format12(s.expected_phase[k]) << '\t'
           << format12(s.max_leakage[k]) << '\t' << format12(s.excited[k]) << '\t' << format12(s.photon[k]) << '\n';
    }
    return os.str();
}

std::string sweep_tsv(const SweepResult& r) {
    std::ostringstream os;
    os << to_string(r.param) << '\t' << to_string(r.metric) << '\n';
    for (const auto& row : r.rows) os << format12(row.value) << '\t' << format12(row.metric) << '\n';
    return os.str();
}

std::string render(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace phasegate
