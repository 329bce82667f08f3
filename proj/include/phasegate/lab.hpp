// lab.hpp - experimental presets, physical-time conversion, decoherence
// budgets, parameter sweeps and report serialization for the command line.
//
// Conversion between units of 1/g and seconds happens only here:
// t_seconds = t / g_physical.

#pragma once

#include "phasegate/config.hpp"
#include "phasegate/gates.hpp"
#include "phasegate/graphs.hpp"
#include "phasegate/model.hpp"

#include "json.hpp"

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace phasegate {

inline constexpr int kReportSchemaVersion = 1;

struct Preset {
    std::string name;
    DriveParams params;
    double g_physical = 0.0;  // Hz
    std::optional<double> t_c;  // cavity lifetime, s
    std::optional<double> t_r;  // excited-state lifetime, s
    std::optional<double> t_d;  // motional decoherence time, s
    std::optional<double> lambda_prime_physical;  // Hz, when the preset is fixed by lambda'
    std::vector<std::string> notes;
};

/// Omega = 1.05 g, Delta1 = 20 g, Delta2 = 21 g, g = 1.8e8 Hz, t_c = t_r = 7.6e-7 s.
Preset squid_preset(int n_atoms = 2);
/// Same dimensionless couplings as the squid preset, with g_physical chosen so
/// that lambda' = 1e4 Hz; t_d = 1e-2 s.
Preset ion_preset(int n_atoms = 2);
/// Drive parameters from the model key-value schema plus
///   name, g_physical (required), t_c, t_r, t_d (optional).
Preset custom_preset(const KeyValueConfig& cfg);
/// "squid", "ion" or "custom" (which needs `config`).
Preset load_preset(const std::string& name, const std::optional<std::string>& config_path, int n_atoms);

double to_seconds(double t, double g_physical);
double to_dimensionless(double seconds, double g_physical);

struct GateTime {
    double dimensionless = 0.0;  // pi / |lambda'|, units of 1/g
    double seconds = 0.0;
    /// pi / (2 pi lambda'_physical), the reading with lambda' in cycles per second.
    std::optional<double> seconds_cyclic;
};

GateTime gate_time(const Preset& preset);

struct BudgetColumn {
    std::string label;  // "nominal" or "measured"
    double p_r = 0.0;
    double p_c = 0.0;
    double t_r_eff = 0.0;
    double t_c_eff = 0.0;
    double headroom = 0.0;  // min(t_r_eff, t_c_eff) / t_gate
};

inline constexpr double kNominalOccupation = 0.01;

struct BudgetReport {
    std::string preset;
    GateTime gate;
    std::vector<BudgetColumn> columns;
    std::optional<double> t_d;
    std::optional<double> motional_headroom;         // t_d / t_gate
    std::optional<double> motional_headroom_cyclic;  // t_d / t_gate (cyclic reading)
    std::vector<std::string> notes;
};

BudgetColumn budget_column(std::string label, double p_r, double p_c, double t_r, double t_c, double t_gate);

/// Cavity/excited-state budgets when the preset has t_c and t_r (nominal
/// column always, measured column from a full-model run over the gate when
/// `measure` is set), motional budget when it has t_d.
BudgetReport budget(const Preset& preset, bool measure, const GateOptions& options = {});

// Sweeps ---------------------------------------------------------------------

enum class SweepParam { delta_scale, omega, n_max, t };
enum class SweepMetric { fidelity, leakage, phase_deviation, phase };

SweepParam parse_sweep_param(std::string_view text);
SweepMetric parse_sweep_metric(std::string_view text);
std::string_view to_string(SweepParam p);
std::string_view to_string(SweepMetric m);

/// "1,2,4" (explicit list) or "start:stop:count" (inclusive, evenly spaced).
std::vector<double> parse_range(std::string_view text);

struct SweepRow {
    double value = 0.0;
    double metric = 0.0;
};

struct SweepResult {
    SweepParam param = SweepParam::delta_scale;
    SweepMetric metric = SweepMetric::fidelity;
    ModelKind model = ModelKind::full;
    std::vector<SweepRow> rows;
    // for param t: least-squares slope of the metric against t (units of 1/g)
    std::optional<double> slope;
    std::optional<double> expected_slope;
    std::vector<std::string> notes;
};

/// Values of `t` are fractions of the gate time pi / |lambda'|; delta_scale
/// multiplies both detunings; omega replaces Omega (units of g); n_max sets
/// the Fock truncation. Rows keep the order of `values`.
SweepResult run_sweep(const DriveParams& base, ModelKind model, SweepParam param, std::span<const double> values,
                      SweepMetric metric, const GateOptions& options = {});

double least_squares_slope(std::span<const double> x, std::span<const double> y);

// Time series ------------------------------------------------------------------

struct TimeSeries {
    int n_atoms = 2;
    std::vector<double> t;
    std::vector<std::vector<double>> phase;  // [sample][bitstring]
    std::vector<std::vector<double>> survival;  // |<b|U|b>|^2
    std::vector<double> conditional_phase;   // unwrapped
    std::vector<double> expected_phase;      // lambda' t
    std::vector<double> max_leakage;
    std::vector<double> excited;
    std::vector<double> photon;
};

struct CzRun {
    GateResult gate;
    TimeSeries series;
};

/// Samples t_k = k T / samples, k = 1..samples, and scores the last sample
/// against the entangling unitary at T. T defaults to the gate time
/// pi / |lambda'|; at that time the target is CZ.
CzRun run_cz(const DriveParams& params, ModelKind model, int samples, const GateOptions& options = {},
             std::optional<double> t_final = std::nullopt);

// Reports --------------------------------------------------------------------

/// Rounds to 12 significant digits so that reports are byte-stable.
double round12(double x);
/// %.12g
std::string format12(double x);

nlohmann::ordered_json regime_json(const Preset& preset, const RegimeReport& report);
nlohmann::ordered_json cz_json(const Preset& preset, const CzRun& run, const GateOptions& options);
nlohmann::ordered_json budget_json(const BudgetReport& report);
nlohmann::ordered_json plan_json(const FusionPlan& plan, const PlanOutcome& outcome);
nlohmann::ordered_json sweep_json(const Preset& preset, const SweepResult& result);

std::string regime_text(const Preset& preset, const RegimeReport& report);
std::string budget_text(const BudgetReport& report);
std::string time_series_tsv(const TimeSeries& series, double g_physical);
std::string sweep_tsv(const SweepResult& result);

/// dump(2) plus a trailing newline.
std::string render(const nlohmann::ordered_json& j);

}  // namespace phasegate
