#include "phasegate/gates.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <numbers>

namespace phasegate {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

std::string normalized(std::string_view text) {
    std::string s(text);
    std::replace(s.begin(), s.end(), '-', '_');
    return s;
}

}  // namespace

std::string_view to_string(ModelKind m) {
    switch (m) {
        case ModelKind::full: return "full";
        case ModelKind::eff_cavity: return "eff_cavity";
        case ModelKind::eff_diag: return "eff_diag";
    }
    return "?";
}

ModelKind parse_model_kind(std::string_view text) {
    const auto s = normalized(text);
    if (s == "full") return ModelKind::full;
    if (s == "eff_cavity") return ModelKind::eff_cavity;
    if (s == "eff_diag") return ModelKind::eff_diag;
    throw std::invalid_argument("unknown model `" + std::string(text) + "` (full, eff_cavity, eff_diag)");
}

std::string_view to_string(Solver s) { return s == Solver::rk4 ? "rk4" : "rotating_frame"; }

Solver parse_solver(std::string_view text) {
    const auto s = normalized(text);
    if (s == "rk4") return Solver::rk4;
    if (s == "rotating_frame") return Solver::rotating_frame;
    throw std::invalid_argument("unknown solver `" + std::string(text) + "` (rk4, rotating_frame)");
}

EvolutionSpec default_evolution_spec(const TimeDependentOperator& h, double t_final,
                                     const GateOptions& options) {
    if (!(options.step_fraction > 0.0)) throw std::invalid_argument("step_fraction must be > 0");
    const double bound = h.frequency_bound();
    EvolutionSpec spec;
    spec.t_final = t_final;
    spec.max_step = bound > 0.0 ? options.step_fraction / bound : std::max(t_final, 1.0);
    spec.norm_tolerance = options.norm_tolerance;
    return spec;
}

std::string bitstring(std::uint32_t bits, int n_atoms) {
    std::string s(n_atoms, '0');
    for (int j = 0; j < n_atoms; ++j)
        if ((bits >> (n_atoms - 1 - j)) & 1u) s[j] = '1';
    return s;
}

ExcessiveLeakage::ExcessiveLeakage(std::uint32_t bits, int n_atoms, double survival)
    : std::runtime_error("excessive leakage from |" + bitstring(bits, n_atoms) + ">: survival amplitude " +
                         std::to_string(survival) + " <= 0.5, phase undefined"),
      bits_(bits),
      survival_(survival) {}

double wrap_phase(double phase) {
    double r = std::remainder(phase, kTwoPi);
    if (r <= -std::numbers::pi) r += kTwoPi;
    return r;
}

std::vector<double> unwrap_phases(std::span<const double> wrapped) {
    std::vector<double> out(wrapped.begin(), wrapped.end());
    for (std::size_t k = 1; k < out.size(); ++k)
        out[k] = out[k - 1] + wrap_phase(wrapped[k] - wrapped[k - 1]);
    return out;
}

// ---------------------------------------------------------------------------

namespace {

SubspaceEvolution project_block(const Dims& dims, const StateBlock& block) {
    std::vector<QuantumState> columns;
    columns.reserve(block.cols());
    for (Index c = 0; c < block.cols(); ++c) columns.push_back({dims, block.col(c)});
    return project_qubit_subspace(columns);
}

struct PopulationMasks {
    std::vector<Index> excited;
    std::vector<Index> photon;

    explicit PopulationMasks(const Dims& dims) {
        for (Index i = 0; i < dims.total(); ++i) {
            bool e = false;
            for (int j = 0; j < dims.n_atoms && !e; ++j) e = atom_level(dims, i, j) == kLevelE;
            if (e) excited.push_back(i);
            if (photon_count(dims, i) > 0) photon.push_back(i);
        }
    }

    // largest per-column population of the rows in `rows`
    static double max_over_columns(const StateBlock& b, const std::vector<Index>& rows) {
        Eigen::VectorXd acc = Eigen::VectorXd::Zero(b.cols());
        for (Index r : rows) acc += b.row(r).cwiseAbs2().transpose();
        return acc.size() ? acc.maxCoeff() : 0.0;
    }
};

StateBlock qubit_inputs(const Dims& dims) {
    const Index d = Index{1} << dims.n_atoms;
    StateBlock block = StateBlock::Zero(dims.total(), d);
    for (Index b = 0; b < d; ++b) block(qubit_basis_index(dims, static_cast<std::uint32_t>(b)), b) = 1.0;
    return block;
}

void check_times(std::span<const double> times) {
    double prev = 0.0;
    for (double t : times) {
        if (!(t >= prev)) throw std::invalid_argument("sample times must be non-decreasing and >= 0");
        prev = t;
    }
}

}  // namespace

QubitDynamics simulate_qubit_dynamics(const DriveParams& params, ModelKind model,
                                      std::span<const double> times, const GateOptions& options,
                                      bool track_populations) {
    const int n = params.n_atoms();
    if (n > kMaxSubspaceAtoms) throw std::invalid_argument("simulate_qubit_dynamics: at most 12 atoms");
    check_times(times);
    QubitDynamics out;
    out.times.assign(times.begin(), times.end());
    if (options.solver == Solver::rotating_frame && model != ModelKind::full)
        throw std::invalid_argument("the rotating_frame solver applies to the full model only");

    if (model == ModelKind::eff_diag) {
        const Dims dims(n, 0);
        const SparseOperator h = h_eff_diag(params, dims, true);
        const Eigen::VectorXcd energies = DenseMatrix(h.matrix()).diagonal();
        const Index d = Index{1} << n;
        for (double t : times) {
            SubspaceEvolution s{DenseMatrix::Zero(d, d), Eigen::VectorXd::Zero(d)};
            for (Index b = 0; b < d; ++b) {
                const Index i = qubit_basis_index(dims, static_cast<std::uint32_t>(b));
                s.unitary(b, b) = std::exp(Complex(0.0, -1.0) * energies[i] * t);
            }
            out.blocks.push_back(std::move(s));
        }
        out.sample_excited.assign(times.size(), 0.0);
        out.sample_photon.assign(times.size(), 0.0);
        return out;
    }

    const Dims dims(n, options.n_max);
    const StateBlock inputs = qubit_inputs(dims);
    const PopulationMasks masks(dims);
    auto track = [&](const StateBlock& b) {
        out.max_excited = std::max(out.max_excited, PopulationMasks::max_over_columns(b, masks.excited));
        out.max_photon = std::max(out.max_photon, PopulationMasks::max_over_columns(b, masks.photon));
    };
    auto record = [&](const StateBlock& b) {
        out.sample_excited.push_back(PopulationMasks::max_over_columns(b, masks.excited));
        out.sample_photon.push_back(PopulationMasks::max_over_columns(b, masks.photon));
        out.blocks.push_back(project_block(dims, b));
    };

    if (options.solver == Solver::rotating_frame) {
        // amplitudes on qubit (x) vacuum and the populations tracked here are
        // identical in the rotating and the interaction frame
        const DenseMatrix h = DenseMatrix(h_full_rotating(params, dims).matrix());
        Eigen::SelfAdjointEigenSolver<DenseMatrix> es(h);
        if (es.info() != Eigen::Success) throw std::runtime_error("eigendecomposition failed");
        const DenseMatrix coeffs = es.eigenvectors().adjoint() * inputs;
        for (double t : times) {
            const Eigen::VectorXcd phases =
                (es.eigenvalues().cast<Complex>() * Complex(0.0, -t)).array().exp().matrix();
            const StateBlock state = es.eigenvectors() * (phases.asDiagonal() * coeffs);
            if (track_populations) track(state);
            record(state);
        }
        return out;
    }

    const TimeDependentOperator h = model == ModelKind::full ? h_full(params, dims) : h_eff_cavity(params, dims);
    const double t_end = times.empty() ? 0.0 : times.back();
    const EvolutionSpec spec = default_evolution_spec(h, t_end, options);
    std::function<void(double, const StateBlock&)> observer;
    if (track_populations) observer = [&](double, const StateBlock& b) { track(b); };
    for (const auto& b : evolve_block(h, inputs, spec, times, observer)) record(b);
    return out;
}

double conditional_phase(const DenseMatrix& u, int n_atoms) {
    if (n_atoms < 2) throw std::invalid_argument("conditional_phase: needs at least two atoms");
    if (u.rows() != (Index{1} << n_atoms) || u.cols() != u.rows())
        throw std::invalid_argument("conditional_phase: matrix is not 2^n x 2^n");
    const std::uint32_t b01 = 1u << (n_atoms - 2);
    const std::uint32_t b10 = 1u << (n_atoms - 1);
    auto phase = [&](std::uint32_t b) {
        const Complex a = u(b, b);
        if (std::abs(a) <= kSurvivalThreshold) throw ExcessiveLeakage(b, n_atoms, std::abs(a));
        return std::arg(a);
    };
    return wrap_phase(-(phase(b01 | b10) - phase(b01) - phase(b10) + phase(0)));
}

PhaseReport truth_table(const DriveParams& params, double t, ModelKind model, const GateOptions& options) {
    if (!(t >= 0.0)) throw std::invalid_argument("truth_table: t must be >= 0");
    const int n = params.n_atoms();
    if (n < 2) throw std::invalid_argument("truth_table: needs at least two atoms");
    PhaseReport r;
    r.model = model;
    r.n_atoms = n;
    r.t = t;
    if (model == ModelKind::full) {
        const auto regime = regime_check(params);
        r.regime_ok = regime.pass;
        if (!regime.pass) r.warnings.push_back("dispersive regime check failed; phases may be meaningless");
    }
    const double times[] = {t};
    const auto dyn = simulate_qubit_dynamics(params, model, times, options);
    const SubspaceEvolution& s = dyn.blocks.front();
    const Index d = s.unitary.rows();
    for (Index b = 0; b < d; ++b) {
        const Complex a = s.unitary(b, b);
        if (std::abs(a) <= kSurvivalThreshold)
            throw ExcessiveLeakage(static_cast<std::uint32_t>(b), n, std::abs(a));
        r.phase.push_back(std::arg(a));
        r.leakage.push_back(s.leakage[b]);
    }
    r.xi_I = -r.phase[1];
    r.phi = conditional_phase(s.unitary, n);
    return r;
}

DenseMatrix apply_correction_frame(const DenseMatrix& u, double xi_I) {
    if (u.rows() != u.cols() || u.rows() == 0 || !std::has_single_bit(static_cast<std::uint64_t>(u.rows())))
        throw std::invalid_argument("apply_correction_frame: matrix must be square with size 2^n");
    DenseMatrix out = u;
    for (Index b = 0; b < u.rows(); ++b) {
        const int w = std::popcount(static_cast<std::uint64_t>(b));
        if (w) out.row(b) *= std::exp(Complex(0.0, xi_I * w));
    }
    return out;
}

ScheduleResult tunable_phase_schedule(double phi_target, std::span<const Segment> segments) {
    if (!(phi_target >= 0.0 && phi_target < kTwoPi))
        throw std::invalid_argument("tunable_phase_schedule: target must lie in [0, 2 pi)");
    ScheduleResult r;
    for (const auto& s : segments) {
        if (!(s.duration >= 0.0) || !std::isfinite(s.duration) || !std::isfinite(s.lambda_prime))
            throw std::invalid_argument("tunable_phase_schedule: durations must be finite and >= 0");
        r.accumulated += s.lambda_prime * s.duration;
    }
    r.residual = wrap_phase(phi_target - r.accumulated);
    return r;
}

double single_segment_duration(double phi_target, double lambda_prime) {
    if (!(phi_target >= 0.0 && phi_target < kTwoPi))
        throw std::invalid_argument("single_segment_duration: target must lie in [0, 2 pi)");
    if (phi_target == 0.0) return 0.0;
    if (lambda_prime == 0.0) throw std::domain_error("single_segment_duration: lambda' = 0 cannot reach the target");
    if (lambda_prime > 0.0) return phi_target / lambda_prime;
    return (kTwoPi - phi_target) / -lambda_prime;
}

GateResult score_cz(const SubspaceEvolution& evolution, ModelKind model, double t, double lambda_prime) {
    const Index d = evolution.unitary.rows();
    const int n = std::countr_zero(static_cast<std::uint64_t>(d));
    GateResult g;
    g.model = model;
    g.n_atoms = n;
    g.t = t;
    g.raw = evolution.unitary;
    for (Index b = 0; b < d; ++b) {
        const double survival = std::abs(g.raw(b, b));
        if (survival <= kSurvivalThreshold) throw ExcessiveLeakage(static_cast<std::uint32_t>(b), n, survival);
    }
    g.xi_I = -std::arg(g.raw(1, 1));
    g.phi = conditional_phase(g.raw, n);
    g.unitary = apply_correction_frame(g.raw, g.xi_I);
    g.ideal = DenseMatrix(entangling_unitary(n, t, lambda_prime));
    g.fidelity = gate_fidelity(g.unitary, g.ideal);
    g.leakage = evolution.leakage;
    g.max_leakage = std::max(0.0, evolution.leakage.maxCoeff());
    return g;
}

GateResult end_to_end_cz(const DriveParams& params, ModelKind model, const GateOptions& options) {
    if (params.n_atoms() < 2) throw std::invalid_argument("end_to_end_cz: needs at least two atoms");
    const auto derived = derive(params);
    if (!derived.lambda_prime) throw std::invalid_argument("end_to_end_cz: requires uniform parameters");
    const double t = cz_gate_time(params);
    const double times[] = {t};
    const auto dyn = simulate_qubit_dynamics(params, model, times, options);
    return score_cz(dyn.blocks.front(), model, t, *derived.lambda_prime);
}

PhaseDeviation phase_deviation(const DriveParams& params, ModelKind model, int samples,
                               const GateOptions& options) {
    if (samples < 1) throw std::invalid_argument("phase_deviation: samples must be >= 1");
    const auto derived = derive(params);
    if (!derived.lambda_prime) throw std::invalid_argument("phase_deviation: requires uniform parameters");
    const double lp = *derived.lambda_prime;
    const double gate = cz_gate_time(params);
    PhaseDeviation r;
    for (int k = 1; k <= samples; ++k) r.times.push_back(gate * k / samples);
    const auto dyn = simulate_qubit_dynamics(params, model, r.times, options);
    std::vector<double> wrapped;
    for (const auto& b : dyn.blocks) wrapped.push_back(conditional_phase(b.unitary, params.n_atoms()));
    r.phi = unwrap_phases(wrapped);
    double dot = 0.0;
    for (std::size_t k = 0; k < r.times.size(); ++k) {
        const double e = lp * r.times[k];
        r.expected.push_back(e);
        r.relative.push_back(std::abs(std::abs(r.phi[k]) - std::abs(e)) / std::abs(e));
        r.max_relative = std::max(r.max_relative, r.relative.back());
        dot += r.phi[k] * e;
    }
    r.sign = dot < 0.0 ? -1 : 1;
    r.leakage_at_gate = std::max(0.0, dyn.blocks.back().leakage.maxCoeff());
    return r;
}

}  // namespace phasegate
