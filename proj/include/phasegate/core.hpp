// core.hpp - Hilbert space of N three-level atoms sharing one truncated bosonic
// mode, sparse operators, and fixed-step RK4 Schroedinger integration.
//
// Basis ordering: atom-major base-3 digits (atom 0 most significant) with the
// photon number as the least significant digit:
//
//     index = (sum_j digit_j * 3^(N-1-j)) * (n_max + 1) + photons
//
// Atomic digits: 0 -> |0>, 1 -> |1>, 2 -> |e>.

#pragma once

#include <Eigen/Dense>
#include <Eigen/SparseCore>

#include <complex>
#include <cstdint>
#include <functional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace phasegate {

using Complex = std::complex<double>;
using Index = Eigen::Index;
using StateVector = Eigen::VectorXcd;
using DenseMatrix = Eigen::MatrixXcd;
using SparseMatrix = Eigen::SparseMatrix<Complex, Eigen::RowMajor>;
/// Several states, one per column, in row-major storage so that a sparse row
/// product touches contiguous memory.
using StateBlock = Eigen::Matrix<Complex, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

inline constexpr int kLevel0 = 0;
inline constexpr int kLevel1 = 1;
inline constexpr int kLevelE = 2;
inline constexpr int kLevels = 3;

struct Dims {
    int n_atoms = 1;
    int n_max = 0;

    Dims() = default;
    /// Throws std::invalid_argument for n_atoms < 1, n_max < 0 or a total
    /// dimension that does not fit in Index.
    Dims(int atoms, int max_photons);

    Index atomic_dim() const { return atomic_dim_; }
    Index photon_dim() const { return n_max + 1; }
    Index total() const { return atomic_dim_ * photon_dim(); }

    friend bool operator==(const Dims& a, const Dims& b) {
        return a.n_atoms == b.n_atoms && a.n_max == b.n_max;
    }

  private:
    Index atomic_dim_ = 3;
};

struct BasisLabel {
    std::vector<int> digits;
    int photons = 0;
};

Index basis_index(const Dims& dims, std::span<const int> digits, int photons);
BasisLabel basis_label(const Dims& dims, Index index);
/// Level of atom `atom` in basis state `index`.
int atom_level(const Dims& dims, Index index, int atom);
int photon_count(const Dims& dims, Index index);

struct QuantumState {
    Dims dims;
    StateVector amplitudes;

    double norm() const { return amplitudes.norm(); }
};

QuantumState product_state(const Dims& dims, std::span<const int> qubit_levels,
                           int photons = 0);
/// Normalized |+>^N with the mode in Fock state `photons`.
QuantumState plus_state(const Dims& dims, int photons = 0);

class SparseOperator {
  public:
    SparseOperator() = default;
    SparseOperator(Dims dims, SparseMatrix matrix, bool hermitian = false);

    struct Entry {
        Index row;
        Index col;
        Complex value;
    };
    /// Duplicate entries are summed. Throws std::out_of_range for indices
    /// outside the space and std::invalid_argument when `hermitian` is set
    /// but the entries are not closed under conjugate transpose.
    static SparseOperator from_entries(const Dims& dims, std::span<const Entry> entries,
                                       bool hermitian = false);
    static SparseOperator identity(const Dims& dims);
    static SparseOperator zero(const Dims& dims);

    const Dims& dims() const { return dims_; }
    const SparseMatrix& matrix() const { return matrix_; }
    bool hermitian() const { return hermitian_; }
    bool is_diagonal() const;

  private:
    Dims dims_;
    SparseMatrix matrix_;
    bool hermitian_ = false;
};

QuantumState apply(const SparseOperator& op, const QuantumState& psi);

/// H(t) = sum_k op_k * exp(i * frequency_k * t). Every Hamiltonian built in
/// this project has this form, so the phases are evaluated exactly at each
/// sample time.
class TimeDependentOperator {
  public:
    struct Term {
        SparseMatrix op;
        double frequency = 0.0;
    };

    TimeDependentOperator() = default;
    explicit TimeDependentOperator(Dims dims) : dims_(dims) {}
    /// Wraps a time-independent operator.
    TimeDependentOperator(const SparseOperator& op);  // NOLINT(google-explicit-constructor)

    void add_term(SparseMatrix op, double frequency = 0.0);

    const Dims& dims() const { return dims_; }
    const std::vector<Term>& terms() const { return terms_; }

    SparseMatrix at(double t) const;
    /// out = H(t) * in
    void apply(double t, const StateVector& in, StateVector& out) const;
    /// coeffs[k] = exp(i * frequency_k * t)
    void coefficients(double t, std::vector<Complex>& coeffs) const;
    /// Largest |frequency| plus an infinity-norm bound on the operators.
    double frequency_bound() const;
    bool is_hermitian_at(double t, double tol = 1e-14) const;

  private:
    Dims dims_;
    std::vector<Term> terms_;
};

struct EvolutionSpec {
    double t_final = 0.0;
    double max_step = 1e-2;
    double norm_tolerance = 1e-9;

    /// Throws std::invalid_argument when the invariants are violated.
    void validate() const;
};

class IntegrationError : public std::runtime_error {
  public:
    IntegrationError(const std::string& what, double step, double time_reached)
        : std::runtime_error(what), step_(step), time_reached_(time_reached) {}
    double step() const { return step_; }
    double time_reached() const { return time_reached_; }

  private:
    double step_;
    double time_reached_;
};

/// Called after every accepted step with the current time and state.
using StepObserver = std::function<void(double t, const StateVector& psi)>;

/// Solves i d(psi)/dt = H(t) psi with classic RK4 on a uniform grid of
/// ceil(t_final / max_step) steps. The state is never renormalized; norm
/// drift beyond spec.norm_tolerance throws IntegrationError.
QuantumState evolve(const TimeDependentOperator& h, const QuantumState& psi0,
                    const EvolutionSpec& spec, const StepObserver& observer = {});

/// Same integrator, returning the state at each of the non-decreasing
/// `times`; spec.t_final is ignored. Each interval is integrated on its own
/// uniform grid with steps <= max_step.
std::vector<QuantumState> evolve_sampled(const TimeDependentOperator& h,
                                         const QuantumState& psi0,
                                         const EvolutionSpec& spec,
                                         std::span<const double> times,
                                         const StepObserver& observer = {});

/// Evolves every column of `block` as an independent state on a shared
/// time grid. Norm drift is checked per column. Returns one block per entry
/// of `times` (non-decreasing, >= 0).
std::vector<StateBlock> evolve_block(const TimeDependentOperator& h, const StateBlock& block,
                                     const EvolutionSpec& spec, std::span<const double> times,
                                     const std::function<void(double, const StateBlock&)>& observer = {});

/// Exact propagation under a diagonal time-independent operator.
QuantumState evolve_diagonal(const SparseOperator& h, const QuantumState& psi0,
                             double t);

struct StepHalvingReport {
    QuantumState coarse;
    QuantumState fine;
    double difference = 0.0;  // ||fine - coarse||_2
};

/// Runs evolve at max_step and max_step / 2. For RK4 the difference is
/// about 15/16 of the coarse-grid global error.
StepHalvingReport evolve_step_halving(const TimeDependentOperator& h,
                                      const QuantumState& psi0,
                                      const EvolutionSpec& spec);

struct AtomInLevel {
    int atom = 0;
    int level = 0;
};
struct PhotonCount {
    int photons = 0;
};
/// All atoms in {|0>, |1>} and the mode in vacuum.
struct QubitSubspace {};

using PopulationSelector = std::variant<AtomInLevel, PhotonCount, QubitSubspace>;

double populations(const QuantumState& psi, const PopulationSelector& selector);

struct SubspaceEvolution {
    DenseMatrix unitary;     // 2^n x 2^n, qubit (x) vacuum block
    Eigen::VectorXd leakage; // 1 - ||column||^2
};

inline constexpr int kMaxSubspaceAtoms = 12;

/// Qubit bitstring b (atom 0 = most significant bit) <-> full basis index
/// with the mode in vacuum.
Index qubit_basis_index(const Dims& dims, std::uint32_t bits);

SubspaceEvolution qubit_subspace_unitary(const TimeDependentOperator& h,
                                         const EvolutionSpec& spec, int n_atoms);

/// Projects already-evolved basis columns (one per qubit bitstring) onto the
/// qubit (x) vacuum block.
SubspaceEvolution project_qubit_subspace(std::span<const QuantumState> columns);

}  // namespace phasegate
