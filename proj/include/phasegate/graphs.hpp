// graphs.hpp - labeled graph states: stabilizers, local complementation,
// LC-orbit search, clique toggling by the m-qubit entangling gate, and fusion
// plans.
//
// Statevectors use the qubit ordering of the gate code: vertex 0 is the most
// significant bit of the amplitude index.

#pragma once

#include <Eigen/Dense>

#include <array>
#include <bit>
#include <bitset>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <variant>
#include <vector>

namespace phasegate {

inline constexpr int kMaxGraphVertices = 32;
inline constexpr int kMaxStatevectorVertices = 16;

class Graph {
  public:
    using Key = std::bitset<kMaxGraphVertices * (kMaxGraphVertices - 1) / 2>;

    explicit Graph(int n = 0);
    static Graph from_edges(int n, std::span<const std::pair<int, int>> edges);
    static Graph from_key(int n, const Key& key);

    static Graph path(int n);
    static Graph complete(int n);
    static Graph star(int n, int hub = 0);
    static Graph cycle(int n);
    /// w x h square lattice, vertex r * w + c.
    static Graph grid(int w, int h);
    /// x x y x z cubic lattice, vertex (k * y + j) * x + i.
    static Graph grid3d(int x, int y, int z);

    int n() const { return n_; }
    bool has_edge(int a, int b) const;
    void set_edge(int a, int b, bool present);
    void toggle_edge(int a, int b);
    std::uint32_t neighbors(int v) const;
    int degree(int v) const;
    std::vector<std::pair<int, int>> edges() const;
    std::size_t edge_count() const;
    /// Upper triangle, row by row.
    Key key() const;

    friend bool operator==(const Graph& a, const Graph& b) { return a.n_ == b.n_ && a.rows_ == b.rows_; }

  private:
    void check_vertex(int v) const;
    void check_pair(int a, int b) const;

    int n_ = 0;
    std::array<std::uint32_t, kMaxGraphVertices> rows_{};
};

struct StabilizerGenerator {
    int vertex = 0;
    std::uint32_t x_support = 0;
    std::uint32_t z_support = 0;
};

/// S_i = X_i prod_{j in N(i)} Z_j for every vertex.
std::vector<StabilizerGenerator> stabilizer_generators(const Graph& g);

using QubitVector = Eigen::VectorXcd;

/// amplitude(x) = 2^{-n/2} (-1)^{sum over edges of x_a x_b}; n <= 16.
template <typename Scalar = double>
Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> graph_state_vector(const Graph& g) {
    if (g.n() < 1 || g.n() > kMaxStatevectorVertices)
        throw std::invalid_argument("graph_state_vector: need 1 <= n <= 16");
    const int n = g.n();
    const std::uint64_t d = std::uint64_t{1} << n;
    const Scalar amp = Scalar(1) / std::sqrt(static_cast<Scalar>(d));
    // bit of vertex v inside the amplitude index
    auto bit = [n](int v) { return std::uint32_t{1} << (n - 1 - v); };
    std::vector<std::uint32_t> masks(n, 0);
    for (int v = 0; v < n; ++v)
        for (int u = v + 1; u < n; ++u)
            if (g.has_edge(v, u)) masks[v] |= bit(u);
    Eigen::Matrix<std::complex<Scalar>, Eigen::Dynamic, 1> psi(static_cast<Eigen::Index>(d));
    for (std::uint64_t x = 0; x < d; ++x) {
        int parity = 0;
        for (int v = 0; v < n; ++v)
            if (x & bit(v)) parity += std::popcount(static_cast<std::uint32_t>(x) & masks[v]);
        psi[static_cast<Eigen::Index>(x)] = (parity & 1) ? -amp : amp;
    }
    return psi;
}

/// <psi|S_i|psi> for each generator.
std::vector<double> stabilizer_expectations(const QubitVector& psi, const Graph& g);

/// Toggles every edge among N(v).
Graph local_complement(const Graph& g, int v);

/// One 2x2 operator per qubit.
using LocalOps = std::vector<Eigen::Matrix2cd>;

QubitVector apply_local_ops(const QubitVector& psi, const LocalOps& ops);

/// min over global phases of || a - e^{i theta} b ||.
double distance_up_to_phase(const QubitVector& a, const QubitVector& b);

/// (I - iX)/sqrt(2) at v and diag(1, -i) on every neighbour; maps |G> to
/// |local_complement(G, v)> up to a global phase. For n <= 12 the claim is
/// checked on the statevector and std::logic_error is thrown on mismatch.
LocalOps lc_implementing_unitary(const Graph& g, int v);

/// Symmetric difference with the clique on `subset`.
Graph toggle_clique(const Graph& g, std::span<const int> subset);

enum class LcStatus { equivalent, not_in_orbit, cap_reached };
const char* to_string(LcStatus s);

struct LcSearchResult {
    LcStatus status = LcStatus::not_in_orbit;
    std::vector<int> witness;  // meaningful only when equivalent
    std::size_t explored = 0;  // distinct graphs discovered
};

inline constexpr std::size_t kDefaultOrbitCap = 1'000'000;

/// Breadth-first search over local complementations of `source` (labeled, no
/// vertex permutations). Returns the shortest witness when `target` is found;
/// `not_in_orbit` only after the whole orbit has been exhausted.
LcSearchResult lc_equivalent(const Graph& source, const Graph& target, std::size_t orbit_cap = kDefaultOrbitCap);

Graph replay_witness(const Graph& g, std::span<const int> witness);

// Fusion plans ---------------------------------------------------------------

struct Entangle {
    std::vector<int> vertices;
};
struct Cz {
    int a = 0;
    int b = 0;
};
struct LocalComplement {
    int vertex = 0;
};
using PlanStep = std::variant<Entangle, Cz, LocalComplement>;

struct FusionPlan {
    std::string name;
    int n_qubits = 0;
    std::vector<PlanStep> steps;
    Graph target;
    std::string description;
    bool reconstructed = false;

    /// Throws std::invalid_argument naming the offending step.
    void validate() const;
};

inline constexpr int kMaxPlanStatevector = 14;

struct PlanOutcome {
    Graph final_graph;
    LcSearchResult search;
    bool statevector_checked = false;
    bool statevector_verified = false;
    std::vector<std::string> notes;
};

/// Starts from the empty graph (every qubit in |+>), applies the steps, then
/// searches for `target` in the LC orbit of the result. For n <= 14 each step
/// and the witness are replayed on the statevector, with Entangle steps
/// realized by entangling_unitary at t = pi / lambda'.
PlanOutcome run_plan(const FusionPlan& plan, std::size_t orbit_cap = kDefaultOrbitCap);

std::vector<FusionPlan> recipes();
/// Throws std::out_of_range for unknown names.
FusionPlan find_recipe(const std::string& name);
/// (n - 1) / 2 three-qubit gates, each followed by LC at its middle qubit.
FusionPlan linear_cluster_plan(int n);

struct NamedGraph {
    std::string name;
    Graph graph;
};
/// Every target graph used by the recipes plus the standard families.
std::vector<NamedGraph> catalog_graphs();

std::string to_dot(const Graph& g, const std::string& name = "G");
/// One line per vertex: `v: n1 n2 ...`.
std::string to_adjacency_list(const Graph& g);
/// `0-1, 1-2` style edge list.
std::string format_edges(const Graph& g);
Graph parse_edges(int n, const std::string& text);

// Plan text schema (key = value, '#' comments):
//   name = fig2b
//   n_qubits = 7
//   step = entangle 2 3 4      (repeatable, applied in order)
//   step = cz 0 2
//   step = lc 3
//   target = 0-1, 1-2, 2-3
//   description = free text
//   reconstructed = false
std::string plan_to_text(const FusionPlan& plan);
FusionPlan plan_from_text(const std::string& text);

}  // namespace phasegate
