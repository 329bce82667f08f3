#include "phasegate/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace phasegate {

Dims::Dims(int atoms, int max_photons) : n_atoms(atoms), n_max(max_photons) {
    if (atoms < 1) throw std::invalid_argument("Dims: n_atoms must be >= 1");
    if (max_photons < 0) throw std::invalid_argument("Dims: n_max must be >= 0");
    constexpr Index limit = std::numeric_limits<Index>::max();
    Index dim = 1;
    for (int j = 0; j < atoms; ++j) {
        if (dim > limit / kLevels) throw std::invalid_argument("Dims: dimension overflow");
        dim *= kLevels;
    }
    if (dim > limit / (static_cast<Index>(max_photons) + 1))
        throw std::invalid_argument("Dims: dimension overflow");
    atomic_dim_ = dim;
}

Index basis_index(const Dims& dims, std::span<const int> digits, int photons) {
    if (static_cast<int>(digits.size()) != dims.n_atoms)
        throw std::out_of_range("basis_index: expected one digit per atom");
    if (photons < 0 || photons > dims.n_max)
        throw std::out_of_range("basis_index: photon count outside [0, n_max]");
    Index atomic = 0;
    for (int d : digits) {
        if (d < 0 || d >= kLevels) throw std::out_of_range("basis_index: level digit must be 0, 1 or 2");
        atomic = atomic * kLevels + d;
    }
    return atomic * dims.photon_dim() + photons;
}

BasisLabel basis_label(const Dims& dims, Index index) {
    if (index < 0 || index >= dims.total()) throw std::out_of_range("basis_label: index out of range");
    BasisLabel label;
    label.photons = static_cast<int>(index % dims.photon_dim());
    Index atomic = index / dims.photon_dim();
    label.digits.assign(dims.n_atoms, 0);
    for (int j = dims.n_atoms - 1; j >= 0; --j) {
        label.digits[j] = static_cast<int>(atomic % kLevels);
        atomic /= kLevels;
    }
    return label;
}

int atom_level(const Dims& dims, Index index, int atom) {
    Index atomic = index / dims.photon_dim();
    for (int j = dims.n_atoms - 1; j > atom; --j) atomic /= kLevels;
    return static_cast<int>(atomic % kLevels);
}

int photon_count(const Dims& dims, Index index) {
    return static_cast<int>(index % dims.photon_dim());
}

QuantumState product_state(const Dims& dims, std::span<const int> qubit_levels, int photons) {
    for (int l : qubit_levels) {
        if (l != kLevel0 && l != kLevel1)
            throw std::out_of_range("product_state: qubit levels must be 0 or 1");
    }
    QuantumState psi{dims, StateVector::Zero(dims.total())};
    psi.amplitudes(basis_index(dims, qubit_levels, photons)) = 1.0;
    return psi;
}

QuantumState plus_state(const Dims& dims, int photons) {
    QuantumState psi{dims, StateVector::Zero(dims.total())};
    const std::uint32_t count = 1u << dims.n_atoms;
    const double amp = 1.0 / std::sqrt(static_cast<double>(count));
    std::vector<int> digits(dims.n_atoms);
    for (std::uint32_t b = 0; b < count; ++b) {
        for (int j = 0; j < dims.n_atoms; ++j) digits[j] = (b >> (dims.n_atoms - 1 - j)) & 1u;
        psi.amplitudes(basis_index(dims, digits, photons)) = amp;
    }
    return psi;
}

// ---------------------------------------------------------------------------

SparseOperator::SparseOperator(Dims dims, SparseMatrix matrix, bool hermitian)
    : dims_(dims), matrix_(std::move(matrix)), hermitian_(hermitian) {
    if (matrix_.rows() != dims_.total() || matrix_.cols() != dims_.total())
        throw std::invalid_argument("SparseOperator: matrix shape does not match dims");
    matrix_.makeCompressed();
    if (hermitian_) {
        SparseMatrix adj = matrix_.adjoint();
        if ((SparseMatrix(matrix_ - adj)).norm() > 1e-12 * std::max(1.0, matrix_.norm()))
            throw std::invalid_argument("SparseOperator: entries are not closed under conjugate transpose");
    }
}

SparseOperator SparseOperator::from_entries(const Dims& dims, std::span<const Entry> entries,
                                            bool hermitian) {
    std::vector<Eigen::Triplet<Complex>> triplets;
    triplets.reserve(entries.size());
    for (const auto& e : entries) {
        if (e.row < 0 || e.row >= dims.total() || e.col < 0 || e.col >= dims.total())
            throw std::out_of_range("SparseOperator: entry index outside the space");
        triplets.emplace_back(e.row, e.col, e.value);
    }
    SparseMatrix m(dims.total(), dims.total());
    m.setFromTriplets(triplets.begin(), triplets.end());
    return SparseOperator(dims, std::move(m), hermitian);
}

SparseOperator SparseOperator::identity(const Dims& dims) {
    SparseMatrix m(dims.total(), dims.total());
    m.setIdentity();
    return SparseOperator(dims, std::move(m), true);
}

SparseOperator SparseOperator::zero(const Dims& dims) {
    return SparseOperator(dims, SparseMatrix(dims.total(), dims.total()), true);
}

bool SparseOperator::is_diagonal() const {
    for (Index r = 0; r < matrix_.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(matrix_, r); it; ++it)
            if (it.col() != r && it.value() != Complex{}) return false;
    return true;
}

QuantumState apply(const SparseOperator& op, const QuantumState& psi) {
    if (!(op.dims() == psi.dims) || psi.amplitudes.size() != op.dims().total())
        throw std::invalid_argument("apply: operator and state dimensions differ");
    return {psi.dims, op.matrix() * psi.amplitudes};
}

// ---------------------------------------------------------------------------

TimeDependentOperator::TimeDependentOperator(const SparseOperator& op) : dims_(op.dims()) {
    add_term(op.matrix(), 0.0);
}

void TimeDependentOperator::add_term(SparseMatrix op, double frequency) {
    if (op.rows() != dims_.total() || op.cols() != dims_.total())
        throw std::invalid_argument("TimeDependentOperator: term shape does not match dims");
    op.makeCompressed();
    terms_.push_back({std::move(op), frequency});
}

SparseMatrix TimeDependentOperator::at(double t) const {
    SparseMatrix h(dims_.total(), dims_.total());
    for (const auto& term : terms_) h += term.op * std::exp(Complex(0.0, term.frequency * t));
    h.makeCompressed();
    return h;
}

void TimeDependentOperator::apply(double t, const StateVector& in, StateVector& out) const {
    out.setZero(in.size());
    for (const auto& term : terms_) {
        const Complex c = term.frequency == 0.0 ? Complex(1.0) : std::exp(Complex(0.0, term.frequency * t));
        const auto* outer = term.op.outerIndexPtr();
        const auto* inner = term.op.innerIndexPtr();
        const auto* values = term.op.valuePtr();
        for (Index r = 0; r < term.op.outerSize(); ++r) {
            Complex acc{};
            for (auto k = outer[r]; k < outer[r + 1]; ++k) acc += values[k] * in[inner[k]];
            out[r] += c * acc;
        }
    }
}

double TimeDependentOperator::frequency_bound() const {
    double max_freq = 0.0;
    double op_bound = 0.0;
    for (const auto& term : terms_) {
        max_freq = std::max(max_freq, std::abs(term.frequency));
        double row_max = 0.0;
        for (Index r = 0; r < term.op.outerSize(); ++r) {
            double s = 0.0;
            for (SparseMatrix::InnerIterator it(term.op, r); it; ++it) s += std::abs(it.value());
            row_max = std::max(row_max, s);
        }
        op_bound += row_max;
    }
    return max_freq + op_bound;
}

bool TimeDependentOperator::is_hermitian_at(double t, double tol) const {
    SparseMatrix h = at(t);
    SparseMatrix diff = h - SparseMatrix(h.adjoint());
    for (Index r = 0; r < diff.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(diff, r); it; ++it)
            if (std::abs(it.value()) > tol) return false;
    return true;
}

// ---------------------------------------------------------------------------

void EvolutionSpec::validate() const {
    if (!(t_final >= 0.0)) throw std::invalid_argument("EvolutionSpec: t_final must be >= 0");
    if (!(max_step > 0.0)) throw std::invalid_argument("EvolutionSpec: max_step must be > 0");
    if (!(norm_tolerance > 0.0)) throw std::invalid_argument("EvolutionSpec: norm_tolerance must be > 0");
}

namespace {

// Accumulates out = sum_k coeffs[k] * op_k * in for a row-major block.
void apply_terms(const TimeDependentOperator& h, const std::vector<Complex>& coeffs,
                 const StateBlock& in, StateBlock& out) {
    out.setZero();
    const Index cols = in.cols();
    for (std::size_t k = 0; k < h.terms().size(); ++k) {
        const SparseMatrix& op = h.terms()[k].op;
        const Complex c = coeffs[k];
        const auto* outer = op.outerIndexPtr();
        const auto* inner = op.innerIndexPtr();
        const auto* values = op.valuePtr();
        // complex products spelled out: std::complex operator* goes through
        // the Annex G NaN/Inf path, which dominates this loop
        for (Index r = 0; r < op.outerSize(); ++r) {
            double* dst = reinterpret_cast<double*>(out.data() + r * cols);
            for (auto e = outer[r]; e < outer[r + 1]; ++e) {
                const double vr = c.real() * values[e].real() - c.imag() * values[e].imag();
                const double vi = c.real() * values[e].imag() + c.imag() * values[e].real();
                const double* src = reinterpret_cast<const double*>(in.data() + inner[e] * cols);
                for (Index j = 0; j < cols; ++j) {
                    const double sr = src[2 * j], si = src[2 * j + 1];
                    dst[2 * j] += vr * sr - vi * si;
                    dst[2 * j + 1] += vr * si + vi * sr;
                }
            }
        }
    }
}

class Rk4Stepper {
  public:
    Rk4Stepper(const TimeDependentOperator& h, Index rows, Index cols)
        : h_(h), k1_(rows, cols), k2_(rows, cols), k3_(rows, cols), k4_(rows, cols),
          tmp_(rows, cols) {}

    // psi <- psi(t + dt) for d(psi)/dt = -i H(t) psi. The coefficients at t
    // are carried over from the previous step's end point when it matches.
    void step(double t, double dt, StateBlock& psi) {
        if (!(has_cached_ && cached_t_ == t)) scaled_coefficients(t, c_start_);
        scaled_coefficients(t + 0.5 * dt, c_mid_);
        scaled_coefficients(t + dt, c_end_);

        apply_terms(h_, c_start_, psi, k1_);
        tmp_ = psi + (0.5 * dt) * k1_;
        apply_terms(h_, c_mid_, tmp_, k2_);
        tmp_ = psi + (0.5 * dt) * k2_;
        apply_terms(h_, c_mid_, tmp_, k3_);
        tmp_ = psi + dt * k3_;
        apply_terms(h_, c_end_, tmp_, k4_);
        psi += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);

        std::swap(c_start_, c_end_);
        cached_t_ = t + dt;
        has_cached_ = true;
    }

  private:
    const TimeDependentOperator& h_;
    StateBlock k1_, k2_, k3_, k4_, tmp_;
    std::vector<Complex> c_start_, c_mid_, c_end_;
    double cached_t_ = 0.0;
    bool has_cached_ = false;

    // -i exp(i w_k t), so that apply_terms yields d(psi)/dt directly
    void scaled_coefficients(double t, std::vector<Complex>& c) const {
        h_.coefficients(t, c);
        for (auto& x : c) x *= Complex(0.0, -1.0);
    }
};

constexpr long kNormCheckInterval = 4096;

void check_norm(const StateBlock& psi, const Eigen::VectorXd& initial_norms, double tolerance,
                double dt, double t) {
    for (Index c = 0; c < psi.cols(); ++c) {
        const double drift = std::abs(psi.col(c).norm() - initial_norms[c]);
        if (drift > tolerance || !std::isfinite(drift)) {
            std::ostringstream msg;
            msg << "evolve: norm drift " << drift << " exceeds tolerance " << tolerance
                << " (step " << dt << ", time reached " << t << ")";
            throw IntegrationError(msg.str(), dt, t);
        }
    }
}

using BlockObserver = std::function<void(double, const StateBlock&)>;

void integrate_interval(Rk4Stepper& stepper, double t0, double t1, double max_step,
                        const Eigen::VectorXd& initial_norms, double tolerance, StateBlock& psi,
                        const BlockObserver& observer) {
    const double span = t1 - t0;
    if (span <= 0.0) return;
    const long steps = static_cast<long>(std::ceil(span / max_step));
    const double dt = span / static_cast<double>(steps);
    for (long s = 0; s < steps; ++s) {
        // the last step lands exactly on t1
        const double t = t0 + static_cast<double>(s) * dt;
        const double next = (s + 1 == steps) ? t1 : t0 + static_cast<double>(s + 1) * dt;
        stepper.step(t, next - t, psi);
        if (observer) observer(next, psi);
        if ((s + 1) % kNormCheckInterval == 0) check_norm(psi, initial_norms, tolerance, dt, next);
    }
    check_norm(psi, initial_norms, tolerance, dt, t1);
}

void check_compatible(const TimeDependentOperator& h, const Dims& dims, Index rows) {
    if (!(h.dims() == dims) || rows != h.dims().total())
        throw std::invalid_argument("evolve: Hamiltonian and state dimensions differ");
}

}  // namespace

void TimeDependentOperator::coefficients(double t, std::vector<Complex>& coeffs) const {
    coeffs.resize(terms_.size());
    for (std::size_t k = 0; k < terms_.size(); ++k) {
        const double w = terms_[k].frequency;
        coeffs[k] = w == 0.0 ? Complex(1.0) : std::exp(Complex(0.0, w * t));
    }
}

std::vector<StateBlock> evolve_block(const TimeDependentOperator& h, const StateBlock& block,
                                     const EvolutionSpec& spec, std::span<const double> times,
                                     const BlockObserver& observer) {
    EvolutionSpec checked = spec;
    checked.t_final = 0.0;
    checked.validate();
    check_compatible(h, h.dims(), block.rows());
    Eigen::VectorXd norms(block.cols());
    for (Index c = 0; c < block.cols(); ++c) norms[c] = block.col(c).norm();

    std::vector<StateBlock> out;
    out.reserve(times.size());
    StateBlock psi = block;
    Rk4Stepper stepper(h, block.rows(), block.cols());
    double t = 0.0;
    for (double target : times) {
        if (!(target >= t)) throw std::invalid_argument("evolve: sample times must be non-decreasing and >= 0");
        if (!h.terms().empty())
            integrate_interval(stepper, t, target, spec.max_step, norms, spec.norm_tolerance, psi, observer);
        t = target;
        out.push_back(psi);
    }
    return out;
}

namespace {

StateBlock as_block(const QuantumState& psi) {
    StateBlock b(psi.amplitudes.size(), 1);
    b.col(0) = psi.amplitudes;
    return b;
}

BlockObserver wrap_observer(const StepObserver& observer) {
    if (!observer) return {};
    return [observer, scratch = StateVector()](double t, const StateBlock& b) mutable {
        scratch = b.col(0);
        observer(t, scratch);
    };
}

}  // namespace

QuantumState evolve(const TimeDependentOperator& h, const QuantumState& psi0,
                    const EvolutionSpec& spec, const StepObserver& observer) {
    spec.validate();
    check_compatible(h, psi0.dims, psi0.amplitudes.size());
    if (h.terms().empty() || spec.t_final == 0.0) return psi0;
    const double times[] = {spec.t_final};
    auto blocks = evolve_block(h, as_block(psi0), spec, times, wrap_observer(observer));
    return {psi0.dims, blocks.front().col(0)};
}

std::vector<QuantumState> evolve_sampled(const TimeDependentOperator& h, const QuantumState& psi0,
                                         const EvolutionSpec& spec, std::span<const double> times,
                                         const StepObserver& observer) {
    check_compatible(h, psi0.dims, psi0.amplitudes.size());
    auto blocks = evolve_block(h, as_block(psi0), spec, times, wrap_observer(observer));
    std::vector<QuantumState> out;
    out.reserve(blocks.size());
    for (auto& b : blocks) out.push_back({psi0.dims, b.col(0)});
    return out;
}

QuantumState evolve_diagonal(const SparseOperator& h, const QuantumState& psi0, double t) {
    if (!(h.dims() == psi0.dims)) throw std::invalid_argument("evolve_diagonal: dimension mismatch");
    if (!h.is_diagonal()) throw std::invalid_argument("evolve_diagonal: operator is not diagonal");
    QuantumState psi = psi0;
    const SparseMatrix& m = h.matrix();
    for (Index r = 0; r < m.outerSize(); ++r) {
        for (SparseMatrix::InnerIterator it(m, r); it; ++it) {
            const Complex e = it.value();
            // exp(-i E t) for complex E keeps non-Hermitian input honest
            psi.amplitudes[r] *= std::exp(Complex(0.0, -1.0) * e * t);
        }
    }
    return psi;
}

StepHalvingReport evolve_step_halving(const TimeDependentOperator& h, const QuantumState& psi0,
                                      const EvolutionSpec& spec) {
    EvolutionSpec half = spec;
    half.max_step = spec.max_step / 2.0;
    StepHalvingReport r{evolve(h, psi0, spec), evolve(h, psi0, half), 0.0};
    r.difference = (r.fine.amplitudes - r.coarse.amplitudes).norm();
    return r;
}

// ---------------------------------------------------------------------------

double populations(const QuantumState& psi, const PopulationSelector& selector) {
    const Dims& dims = psi.dims;
    double total = 0.0;
    std::visit(
        [&](const auto& sel) {
            using T = std::decay_t<decltype(sel)>;
            if constexpr (std::is_same_v<T, AtomInLevel>) {
                if (sel.atom < 0 || sel.atom >= dims.n_atoms || sel.level < 0 || sel.level >= kLevels)
                    throw std::out_of_range("populations: invalid atom/level selector");
            } else if constexpr (std::is_same_v<T, PhotonCount>) {
                if (sel.photons < 0 || sel.photons > dims.n_max)
                    throw std::out_of_range("populations: photon count outside [0, n_max]");
            }
            for (Index i = 0; i < dims.total(); ++i) {
                bool match = false;
                if constexpr (std::is_same_v<T, AtomInLevel>) {
                    match = atom_level(dims, i, sel.atom) == sel.level;
                } else if constexpr (std::is_same_v<T, PhotonCount>) {
                    match = photon_count(dims, i) == sel.photons;
                } else {
                    match = photon_count(dims, i) == 0;
                    for (int j = 0; match && j < dims.n_atoms; ++j)
                        match = atom_level(dims, i, j) != kLevelE;
                }
                if (match) total += std::norm(psi.amplitudes[i]);
            }
        },
        selector);
    return total;
}

Index qubit_basis_index(const Dims& dims, std::uint32_t bits) {
    std::vector<int> digits(dims.n_atoms);
    for (int j = 0; j < dims.n_atoms; ++j) digits[j] = (bits >> (dims.n_atoms - 1 - j)) & 1u;
    return basis_index(dims, digits, 0);
}

SubspaceEvolution project_qubit_subspace(std::span<const QuantumState> columns) {
    if (columns.empty()) throw std::invalid_argument("project_qubit_subspace: no columns");
    const Dims dims = columns.front().dims;
    const Index d = Index{1} << dims.n_atoms;
    if (static_cast<Index>(columns.size()) != d)
        throw std::invalid_argument("project_qubit_subspace: expected 2^n columns");
    SubspaceEvolution out{DenseMatrix::Zero(d, d), Eigen::VectorXd::Zero(d)};
    std::vector<Index> rows(d);
    for (Index b = 0; b < d; ++b) rows[b] = qubit_basis_index(dims, static_cast<std::uint32_t>(b));
    for (Index c = 0; c < d; ++c) {
        for (Index r = 0; r < d; ++r) out.unitary(r, c) = columns[c].amplitudes[rows[r]];
        out.leakage[c] = 1.0 - out.unitary.col(c).squaredNorm();
    }
    return out;
}

SubspaceEvolution qubit_subspace_unitary(const TimeDependentOperator& h, const EvolutionSpec& spec,
                                         int n_atoms) {
    if (n_atoms < 1 || n_atoms > kMaxSubspaceAtoms)
        throw std::invalid_argument("qubit_subspace_unitary: n_atoms must be in [1, 12]");
    if (h.dims().n_atoms != n_atoms)
        throw std::invalid_argument("qubit_subspace_unitary: Hamiltonian built for a different atom count");
    spec.validate();
    const Dims& dims = h.dims();
    const Index d = Index{1} << n_atoms;
    StateBlock block = StateBlock::Zero(dims.total(), d);
    for (Index b = 0; b < d; ++b) block(qubit_basis_index(dims, static_cast<std::uint32_t>(b)), b) = 1.0;
    StateBlock final_block = block;
    if (!h.terms().empty() && spec.t_final > 0.0) {
        const double times[] = {spec.t_final};
        final_block = evolve_block(h, block, spec, times).front();
    }
    std::vector<QuantumState> columns;
    columns.reserve(d);
    for (Index b = 0; b < d; ++b) columns.push_back({dims, final_block.col(b)});
    return project_qubit_subspace(columns);
}

}  // namespace phasegate
