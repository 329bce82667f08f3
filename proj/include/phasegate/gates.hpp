// gates.hpp - conditional-phase extraction, the single-qubit correction frame,
// the tunable phase schedule, the m-qubit entangling unitary and gate scoring.
//
// Qubit bitstrings put atom 0 in the most significant bit. For two atoms the
// four inputs are 00, 01, 10, 11 -> indices 0, 1, 2, 3.

#pragma once

#include "phasegate/core.hpp"
#include "phasegate/model.hpp"

#include <bit>
#include <cmath>
#include <numbers>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace phasegate {

enum class ModelKind { full, eff_cavity, eff_diag };

std::string_view to_string(ModelKind m);
/// Accepts "full", "eff_cavity", "eff_diag" (and '-' for '_').
ModelKind parse_model_kind(std::string_view text);

/// How the full model is propagated. rotating_frame diagonalizes the
/// time-independent h_full_rotating once; it only applies to ModelKind::full.
enum class Solver { rk4, rotating_frame };

std::string_view to_string(Solver s);
Solver parse_solver(std::string_view text);

/// RK4 step = step_fraction / frequency_bound(H). 0.025 keeps the norm drift of
/// a two-atom CZ below 1e-9 up to twice the default detunings.
inline constexpr double kDefaultStepFraction = 0.025;
inline constexpr double kSurvivalThreshold = 0.5;

struct GateOptions {
    int n_max = 4;
    double step_fraction = kDefaultStepFraction;
    double norm_tolerance = 1e-9;
    Solver solver = Solver::rk4;
};

EvolutionSpec default_evolution_spec(const TimeDependentOperator& h, double t_final,
                                     const GateOptions& options = {});

class ExcessiveLeakage : public std::runtime_error {
  public:
    ExcessiveLeakage(std::uint32_t bits, int n_atoms, double survival);
    std::uint32_t bits() const { return bits_; }
    double survival() const { return survival_; }

  private:
    std::uint32_t bits_;
    double survival_;
};

std::string bitstring(std::uint32_t bits, int n_atoms);

/// Phase reduced into (-pi, pi].
double wrap_phase(double phase);
/// Removes 2 pi jumps between consecutive samples.
std::vector<double> unwrap_phases(std::span<const double> wrapped);

struct PhaseReport {
    ModelKind model = ModelKind::eff_diag;
    int n_atoms = 2;
    double t = 0.0;
    std::vector<double> phase;    // arg <b|U|b>, (-pi, pi], indexed by bitstring
    std::vector<double> leakage;  // 1 - ||column_b||^2 on qubit (x) vacuum
    double xi_I = 0.0;            // -phase(01)
    double phi = 0.0;             // -(phase(11) - phase(01) - phase(10) + phase(00)), wrapped
    bool regime_ok = true;
    std::vector<std::string> warnings;
};

/// Qubit-block evolution of `model` for every computational input at each of
/// the (non-decreasing) `times`.
struct QubitDynamics {
    std::vector<double> times;
    std::vector<SubspaceEvolution> blocks;
    // maxima over every integration step and every input column; zero for
    // models without the corresponding degree of freedom
    double max_excited = 0.0;
    double max_photon = 0.0;
    // the same populations at each sample time (largest over the columns)
    std::vector<double> sample_excited;
    std::vector<double> sample_photon;
};

QubitDynamics simulate_qubit_dynamics(const DriveParams& params, ModelKind model,
                                      std::span<const double> times, const GateOptions& options = {},
                                      bool track_populations = false);

/// -(phase(11) - phase(01) - phase(10) + phase(00)) for atoms 0 and 1 with any
/// further atoms in |0>, wrapped into (-pi, pi]. Throws ExcessiveLeakage.
double conditional_phase(const DenseMatrix& u, int n_atoms);

PhaseReport truth_table(const DriveParams& params, double t, ModelKind model,
                        const GateOptions& options = {});

/// Left-multiplies by diag(1, e^{i xi_I}) on every qubit: row b is scaled by
/// e^{i xi_I popcount(b)}.
DenseMatrix apply_correction_frame(const DenseMatrix& u, double xi_I);

struct Segment {
    double lambda_prime = 0.0;
    double duration = 0.0;
};

struct ScheduleResult {
    double accumulated = 0.0;  // sum lambda'_i duration_i
    double residual = 0.0;     // target - accumulated, reduced into (-pi, pi]
};

/// phi_target must lie in [0, 2 pi); durations must be >= 0.
ScheduleResult tunable_phase_schedule(double phi_target, std::span<const Segment> segments);

/// Shortest duration >= 0 after which a single segment at rate lambda'
/// accumulates phi_target modulo 2 pi. Throws std::domain_error for
/// lambda' = 0 with a nonzero target.
double single_segment_duration(double phi_target, double lambda_prime);

/// diag_b = exp(-i lambda' t w (w - 1) / 2), w = popcount(b).
template <typename Scalar = double>
Eigen::DiagonalMatrix<std::complex<Scalar>, Eigen::Dynamic> entangling_unitary(int m, Scalar t,
                                                                                Scalar lambda_prime) {
    if (m < 2 || m > 30) throw std::invalid_argument("entangling_unitary: m must be in [2, 30]");
    const Index d = Index{1} << m;
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> diag(d);
    for (Index b = 0; b < d; ++b) {
        const auto w = static_cast<Scalar>(std::popcount(static_cast<std::uint32_t>(b)));
        const Scalar pairs = w * (w - 1) / 2;
        diag[b] = std::exp(std::complex<Scalar>(0, -lambda_prime * t * pairs));
    }
    return Eigen::DiagonalMatrix<std::complex<Scalar>, Eigen::Dynamic>(diag);
}

/// |tr(U_ideal^dag U_sim)|^2 / (d tr(U_sim^dag U_sim)); zero for U_sim = 0.
template <typename DerivedSim, typename DerivedIdeal>
double gate_fidelity(const Eigen::MatrixBase<DerivedSim>& u_sim,
                     const Eigen::MatrixBase<DerivedIdeal>& u_ideal) {
    if (u_sim.rows() != u_ideal.rows() || u_sim.cols() != u_ideal.cols() || u_sim.rows() != u_sim.cols())
        throw std::invalid_argument("gate_fidelity: matrices must be square and of equal shape");
    const double d = static_cast<double>(u_sim.rows());
    const double norm = u_sim.squaredNorm();
    if (norm == 0.0) return 0.0;
    const auto overlap = (u_ideal.adjoint() * u_sim).trace();
    return std::norm(overlap) / (d * norm);
}

struct GateResult {
    ModelKind model = ModelKind::eff_diag;
    int n_atoms = 2;
    double t = 0.0;
    DenseMatrix raw;       // qubit block before the correction frame
    DenseMatrix unitary;   // after the correction frame
    DenseMatrix ideal;
    double xi_I = 0.0;     // measured from phase(0..01)
    double phi = 0.0;
    double fidelity = 0.0;
    Eigen::VectorXd leakage;
    double max_leakage = 0.0;
};

/// Evolves for t = pi / |lambda'|, corrects with the xi_I measured in the same
/// run and scores against the product of all pairwise CZ gates (the ordinary
/// CZ for two atoms).
GateResult end_to_end_cz(const DriveParams& params, ModelKind model, const GateOptions& options = {});

/// Same scoring for an already computed qubit block at time t.
GateResult score_cz(const SubspaceEvolution& evolution, ModelKind model, double t, double lambda_prime);

struct PhaseDeviation {
    std::vector<double> times;
    std::vector<double> phi;        // unwrapped conditional phase
    std::vector<double> expected;   // lambda' t
    std::vector<double> relative;   // | |phi| - |lambda' t| | / |lambda' t|
    double max_relative = 0.0;
    /// Sign of phi relative to lambda' t over the grid (+1 or -1).
    int sign = 1;
    double leakage_at_gate = 0.0;   // max column leakage at the last time
};

/// Conditional phase on the grid t_k = k T / samples, k = 1..samples, with
/// T = pi / |lambda'|. Two atoms.
PhaseDeviation phase_deviation(const DriveParams& params, ModelKind model, int samples = 16,
                               const GateOptions& options = {});

}  // namespace phasegate
