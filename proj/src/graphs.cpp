#include "phasegate/graphs.hpp"

#include "phasegate/config.hpp"
#include "phasegate/gates.hpp"

#include <algorithm>
#include <numbers>
#include <sstream>
#include <unordered_map>

namespace phasegate {

Graph::Graph(int n) : n_(n) {
    if (n < 0 || n > kMaxGraphVertices) throw std::invalid_argument("Graph: vertex count must be in [0, 32]");
}

void Graph::check_vertex(int v) const {
    if (v < 0 || v >= n_) throw std::out_of_range("Graph: vertex " + std::to_string(v) + " out of range");
}

void Graph::check_pair(int a, int b) const {
    check_vertex(a);
    check_vertex(b);
    if (a == b) throw std::invalid_argument("Graph: self-loops are not allowed");
}

bool Graph::has_edge(int a, int b) const {
    check_vertex(a);
    check_vertex(b);
    return (rows_[a] >> b) & 1u;
}

void Graph::set_edge(int a, int b, bool present) {
    check_pair(a, b);
    if (present) {
        rows_[a] |= 1u << b;
        rows_[b] |= 1u << a;
    } else {
        rows_[a] &= ~(1u << b);
        rows_[b] &= ~(1u << a);
    }
}

void Graph::toggle_edge(int a, int b) {
    check_pair(a, b);
    rows_[a] ^= 1u << b;
    rows_[b] ^= 1u << a;
}

std::uint32_t Graph::neighbors(int v) const {
    check_vertex(v);
    return rows_[v];
}

int Graph::degree(int v) const { return std::popcount(neighbors(v)); }

std::vector<std::pair<int, int>> Graph::edges() const {
    std::vector<std::pair<int, int>> out;
    for (int a = 0; a < n_; ++a)
        for (int b = a + 1; b < n_; ++b)
            if ((rows_[a] >> b) & 1u) out.emplace_back(a, b);
    return out;
}

std::size_t Graph::edge_count() const {
    std::size_t twice = 0;
    for (int v = 0; v < n_; ++v) twice += std::popcount(rows_[v]);
    return twice / 2;
}

Graph::Key Graph::key() const {
    Key k;
    std::size_t offset = 0;
    for (int v = 0; v + 1 < n_; ++v) {
        const std::uint64_t upper = rows_[v] >> (v + 1);
        if (upper) k |= Key(upper) << offset;
        offset += n_ - 1 - v;
    }
    return k;
}

Graph Graph::from_key(int n, const Key& key) {
    Graph g(n);
    const Key mask(0xFFFFFFFFull);
    std::size_t offset = 0;
    for (int v = 0; v + 1 < n; ++v) {
        const auto upper = static_cast<std::uint32_t>(((key >> offset) & mask).to_ullong());
        const int width = n - 1 - v;
        const std::uint32_t bits = width >= 32 ? upper : upper & ((1u << width) - 1u);
        for (std::uint32_t rest = bits; rest; rest &= rest - 1) {
            const int u = v + 1 + std::countr_zero(rest);
            g.rows_[v] |= 1u << u;
            g.rows_[u] |= 1u << v;
        }
        offset += width;
    }
    return g;
}

Graph Graph::from_edges(int n, std::span<const std::pair<int, int>> edges) {
    Graph g(n);
    for (auto [a, b] : edges) g.set_edge(a, b, true);
    return g;
}

Graph Graph::path(int n) {
    Graph g(n);
    for (int v = 0; v + 1 < n; ++v) g.set_edge(v, v + 1, true);
    return g;
}

Graph Graph::complete(int n) {
    Graph g(n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b) g.set_edge(a, b, true);
    return g;
}

Graph Graph::star(int n, int hub) {
    Graph g(n);
    g.check_vertex(hub);
    for (int v = 0; v < n; ++v)
        if (v != hub) g.set_edge(hub, v, true);
    return g;
}

Graph Graph::cycle(int n) {
    if (n < 3) throw std::invalid_argument("Graph::cycle: need n >= 3");
    Graph g = path(n);
    g.set_edge(n - 1, 0, true);
    return g;
}

Graph Graph::grid(int w, int h) {
    if (w < 1 || h < 1) throw std::invalid_argument("Graph::grid: sides must be >= 1");
    Graph g(w * h);
    for (int r = 0; r < h; ++r)
        for (int c = 0; c < w; ++c) {
            if (c + 1 < w) g.set_edge(r * w + c, r * w + c + 1, true);
            if (r + 1 < h) g.set_edge(r * w + c, (r + 1) * w + c, true);
        }
    return g;
}

Graph Graph::grid3d(int x, int y, int z) {
    if (x < 1 || y < 1 || z < 1) throw std::invalid_argument("Graph::grid3d: sides must be >= 1");
    Graph g(x * y * z);
    auto id = [&](int i, int j, int k) { return (k * y + j) * x + i; };
    for (int k = 0; k < z; ++k)
        for (int j = 0; j < y; ++j)
            for (int i = 0; i < x; ++i) {
                if (i + 1 < x) g.set_edge(id(i, j, k), id(i + 1, j, k), true);
                if (j + 1 < y) g.set_edge(id(i, j, k), id(i, j + 1, k), true);
                if (k + 1 < z) g.set_edge(id(i, j, k), id(i, j, k + 1), true);
            }
    return g;
}

// ---------------------------------------------------------------------------

std::vector<StabilizerGenerator> stabilizer_generators(const Graph& g) {
    std::vector<StabilizerGenerator> out;
    for (int v = 0; v < g.n(); ++v) out.push_back({v, 1u << v, g.neighbors(v)});
    return out;
}

namespace {

std::uint64_t qubit_bit(int n, int v) { return std::uint64_t{1} << (n - 1 - v); }

void check_statevector(const QubitVector& psi, int n) {
    if (n > kMaxStatevectorVertices || psi.size() != (Index{1} << n))
        throw std::invalid_argument("statevector length does not match 2^n (n <= 16)");
}

}  // namespace

std::vector<double> stabilizer_expectations(const QubitVector& psi, const Graph& g) {
    const int n = g.n();
    check_statevector(psi, n);
    std::vector<double> out;
    for (const auto& s : stabilizer_generators(g)) {
        std::uint64_t zmask = 0;
        for (int u = 0; u < n; ++u)
            if ((s.z_support >> u) & 1u) zmask |= qubit_bit(n, u);
        const std::uint64_t flip = qubit_bit(n, s.vertex);
        // S|x> = (-1)^{popcount(x & zmask)} |x ^ flip>
        Complex acc{};
        for (Index x = 0; x < psi.size(); ++x) {
            const auto ux = static_cast<std::uint64_t>(x);
            const double sign = (std::popcount(ux & zmask) & 1) ? -1.0 : 1.0;
            acc += std::conj(psi[static_cast<Index>(ux ^ flip)]) * sign * psi[x];
        }
        out.push_back(acc.real());
    }
    return out;
}

Graph local_complement(const Graph& g, int v) {
    const std::uint32_t nv = g.neighbors(v);
    Graph out = g;
    for (std::uint32_t rest = nv; rest; rest &= rest - 1) {
        const int a = std::countr_zero(rest);
        for (std::uint32_t later = rest & (rest - 1); later; later &= later - 1)
            out.toggle_edge(a, std::countr_zero(later));
    }
    return out;
}

QubitVector apply_local_ops(const QubitVector& psi, const LocalOps& ops) {
    const int n = static_cast<int>(ops.size());
    check_statevector(psi, n);
    QubitVector out = psi;
    for (int q = 0; q < n; ++q) {
        const Eigen::Matrix2cd& m = ops[q];
        if (m.isIdentity(0.0)) continue;
        const std::uint64_t bit = qubit_bit(n, q);
        for (Index x = 0; x < out.size(); ++x) {
            const auto ux = static_cast<std::uint64_t>(x);
            if (ux & bit) continue;
            const Index y = static_cast<Index>(ux | bit);
            const Complex a0 = out[x];
            const Complex a1 = out[y];
            out[x] = m(0, 0) * a0 + m(0, 1) * a1;
            out[y] = m(1, 0) * a0 + m(1, 1) * a1;
        }
    }
    return out;
}

double distance_up_to_phase(const QubitVector& a, const QubitVector& b) {
    if (a.size() != b.size()) throw std::invalid_argument("distance_up_to_phase: size mismatch");
    const Complex overlap = b.dot(a);
    const Complex phase = std::abs(overlap) > 0.0 ? overlap / std::abs(overlap) : Complex(1.0);
    return (a - phase * b).norm();
}

LocalOps lc_implementing_unitary(const Graph& g, int v) {
    const std::uint32_t nv = g.neighbors(v);
    const Complex i(0.0, 1.0);
    LocalOps ops(g.n(), Eigen::Matrix2cd::Identity());
    Eigen::Matrix2cd sqrt_minus_ix;
    sqrt_minus_ix << 1.0, -i, -i, 1.0;
    ops[v] = sqrt_minus_ix / std::numbers::sqrt2;
    Eigen::Matrix2cd sqrt_iz = Eigen::Matrix2cd::Zero();
    sqrt_iz(0, 0) = 1.0;
    sqrt_iz(1, 1) = -i;
    for (std::uint32_t rest = nv; rest; rest &= rest - 1) ops[std::countr_zero(rest)] = sqrt_iz;

    if (g.n() <= 12) {
        const QubitVector mapped = apply_local_ops(graph_state_vector(g), ops);
        const QubitVector expected = graph_state_vector(local_complement(g, v));
        if (distance_up_to_phase(mapped, expected) > 1e-9)
            throw std::logic_error("lc_implementing_unitary: statevector check failed");
    }
    return ops;
}

Graph toggle_clique(const Graph& g, std::span<const int> subset) {
    if (subset.size() < 2) throw std::invalid_argument("toggle_clique: subset needs at least two vertices");
    std::uint32_t seen = 0;
    for (int v : subset) {
        if (v < 0 || v >= g.n()) throw std::out_of_range("toggle_clique: vertex out of range");
        if ((seen >> v) & 1u) throw std::invalid_argument("toggle_clique: duplicate vertex " + std::to_string(v));
        seen |= 1u << v;
    }
    Graph out = g;
    for (std::size_t a = 0; a < subset.size(); ++a)
        for (std::size_t b = a + 1; b < subset.size(); ++b) out.toggle_edge(subset[a], subset[b]);
    return out;
}

const char* to_string(LcStatus s) {
    switch (s) {
        case LcStatus::equivalent: return "equivalent";
        case LcStatus::not_in_orbit: return "not_in_orbit";
        case LcStatus::cap_reached: return "cap_reached";
    }
    return "?";
}

LcSearchResult lc_equivalent(const Graph& source, const Graph& target, std::size_t orbit_cap) {
    if (source.n() != target.n()) throw std::invalid_argument("lc_equivalent: vertex counts differ");
    if (orbit_cap < 1) throw std::invalid_argument("lc_equivalent: orbit cap must be >= 1");
    const int n = source.n();
    LcSearchResult r;
    if (source == target) {
        r.status = LcStatus::equivalent;
        r.explored = 1;
        return r;
    }
    struct Node {
        Graph::Key key;
        std::int64_t parent;
        int vertex;
    };
    std::vector<Node> nodes{{source.key(), -1, -1}};
    std::unordered_map<Graph::Key, std::int64_t> seen{{nodes.front().key, 0}};
    const Graph::Key goal = target.key();

    for (std::size_t head = 0; head < nodes.size(); ++head) {
        const Graph current = Graph::from_key(n, nodes[head].key);
        for (int v = 0; v < n; ++v) {
            // LC at a vertex of degree < 2 is the identity
            if (current.degree(v) < 2) continue;
            const Graph::Key k = local_complement(current, v).key();
            if (seen.contains(k)) continue;
            if (nodes.size() >= orbit_cap) {
                r.status = LcStatus::cap_reached;
                r.explored = nodes.size();
                return r;
            }
            seen.emplace(k, static_cast<std::int64_t>(nodes.size()));
            nodes.push_back({k, static_cast<std::int64_t>(head), v});
            if (k == goal) {
                for (std::int64_t at = static_cast<std::int64_t>(nodes.size()) - 1; nodes[at].parent >= 0;
                     at = nodes[at].parent)
                    r.witness.push_back(nodes[at].vertex);
                std::reverse(r.witness.begin(), r.witness.end());
                r.status = LcStatus::equivalent;
                r.explored = nodes.size();
                return r;
            }
        }
    }
    r.status = LcStatus::not_in_orbit;
    r.explored = nodes.size();
    return r;
}

Graph replay_witness(const Graph& g, std::span<const int> witness) {
    Graph out = g;
    for (int v : witness) out = local_complement(out, v);
    return out;
}

// ---------------------------------------------------------------------------

void FusionPlan::validate() const {
    if (n_qubits < 1 || n_qubits > kMaxGraphVertices)
        throw std::invalid_argument("plan `" + name + "`: n_qubits must be in [1, 32]");
    if (target.n() != n_qubits) throw std::invalid_argument("plan `" + name + "`: target has the wrong vertex count");
    auto check = [&](std::size_t step, int v) {
        if (v < 0 || v >= n_qubits)
            throw std::invalid_argument("plan `" + name + "` step " + std::to_string(step + 1) + ": vertex " +
                                        std::to_string(v) + " out of range");
    };
    for (std::size_t s = 0; s < steps.size(); ++s) {
        std::visit(
            [&](const auto& st) {
                using T = std::decay_t<decltype(st)>;
                if constexpr (std::is_same_v<T, Entangle>) {
                    if (st.vertices.size() < 2)
                        throw std::invalid_argument("plan `" + name + "` step " + std::to_string(s + 1) +
                                                    ": entangle needs at least two qubits");
                    std::uint32_t seen = 0;
                    for (int v : st.vertices) {
                        check(s, v);
                        if ((seen >> v) & 1u)
                            throw std::invalid_argument("plan `" + name + "` step " + std::to_string(s + 1) +
                                                        ": duplicate qubit");
                        seen |= 1u << v;
                    }
                } else if constexpr (std::is_same_v<T, Cz>) {
                    check(s, st.a);
                    check(s, st.b);
                    if (st.a == st.b)
                        throw std::invalid_argument("plan `" + name + "` step " + std::to_string(s + 1) +
                                                    ": cz needs two distinct qubits");
                } else {
                    check(s, st.vertex);
                }
            },
            steps[s]);
    }
}

namespace {

// Entangle realized as the gate-level diagonal unitary restricted to `vertices`.
void apply_entangle(QubitVector& psi, int n, const std::vector<int>& vertices) {
    const int m = static_cast<int>(vertices.size());
    const double lambda_prime = 1.0;
    const auto u = entangling_unitary<double>(m, std::numbers::pi / lambda_prime, lambda_prime);
    for (Index x = 0; x < psi.size(); ++x) {
        std::uint32_t sub = 0;
        for (int k = 0; k < m; ++k)
            if (static_cast<std::uint64_t>(x) & qubit_bit(n, vertices[k])) sub |= 1u << (m - 1 - k);
        psi[x] *= u.diagonal()[sub];
    }
}

void apply_cz(QubitVector& psi, int n, int a, int b) {
    const std::uint64_t both = qubit_bit(n, a) | qubit_bit(n, b);
    for (Index x = 0; x < psi.size(); ++x)
        if ((static_cast<std::uint64_t>(x) & both) == both) psi[x] = -psi[x];
}

constexpr double kStatevectorTolerance = 1e-9;

}  // namespace

PlanOutcome run_plan(const FusionPlan& plan, std::size_t orbit_cap) {
    plan.validate();
    const int n = plan.n_qubits;
    PlanOutcome out;
    out.statevector_checked = n <= kMaxPlanStatevector;
    out.statevector_verified = out.statevector_checked;
    Graph g(n);
    QubitVector psi;
    if (out.statevector_checked) psi = graph_state_vector(g);

    for (std::size_t s = 0; s < plan.steps.size(); ++s) {
        std::visit(
            [&](const auto& st) {
                using T = std::decay_t<decltype(st)>;
                if constexpr (std::is_same_v<T, Entangle>) {
                    if (out.statevector_checked) apply_entangle(psi, n, st.vertices);
                    g = toggle_clique(g, st.vertices);
                } else if constexpr (std::is_same_v<T, Cz>) {
                    if (out.statevector_checked) apply_cz(psi, n, st.a, st.b);
                    g.toggle_edge(st.a, st.b);
                } else {
                    if (out.statevector_checked) psi = apply_local_ops(psi, lc_implementing_unitary(g, st.vertex));
                    g = local_complement(g, st.vertex);
                }
            },
            plan.steps[s]);
        if (out.statevector_checked && distance_up_to_phase(psi, graph_state_vector(g)) > kStatevectorTolerance) {
            out.statevector_verified = false;
            out.notes.push_back("statevector differs from the graph state after step " + std::to_string(s + 1));
        }
    }
    out.final_graph = g;
    out.search = lc_equivalent(g, plan.target, orbit_cap);

    if (out.statevector_checked && out.search.status == LcStatus::equivalent) {
        Graph h = g;
        for (int v : out.search.witness) {
            psi = apply_local_ops(psi, lc_implementing_unitary(h, v));
            h = local_complement(h, v);
        }
        if (distance_up_to_phase(psi, graph_state_vector(plan.target)) > kStatevectorTolerance) {
            out.statevector_verified = false;
            out.notes.push_back("witness replay does not reach the target statevector");
        }
    }
    if (!out.statevector_checked)
        out.notes.push_back("statevector check skipped: " + std::to_string(n) + " qubits > " +
                            std::to_string(kMaxPlanStatevector));
    if (plan.reconstructed) out.notes.push_back("reconstructed plan: outcome is reported, not asserted");
    return out;
}

// ---------------------------------------------------------------------------

namespace {

// Entangle each centre with its target neighbours, then LC at the centre.
// With edge-disjoint stars the LC undoes exactly the clique among the leaves.
FusionPlan star_cover_plan(std::string name, const Graph& target, std::span<const int> centres,
                           std::string description) {
    FusionPlan p;
    p.name = std::move(name);
    p.n_qubits = target.n();
    p.target = target;
    p.description = std::move(description);
    p.reconstructed = true;
    for (int c : centres) {
        Entangle e{{c}};
        for (std::uint32_t rest = target.neighbors(c); rest; rest &= rest - 1)
            e.vertices.push_back(std::countr_zero(rest));
        p.steps.emplace_back(std::move(e));
        p.steps.emplace_back(LocalComplement{c});
    }
    return p;
}

Graph h_shape() {
    // v = 0, a1..a3 = 1..3, b1..b3 = 4..6
    const std::pair<int, int> e[] = {{0, 1}, {1, 2}, {1, 3}, {0, 4}, {4, 5}, {4, 6}};
    return Graph::from_edges(7, e);
}

Graph fig4b_target() {
    // centres 0 = (1,1) and 5 = (2,2); shared leaves 3 = (1,2), 4 = (2,1)
    const std::pair<int, int> e[] = {{0, 1}, {0, 2}, {0, 3}, {0, 4}, {5, 3}, {5, 4}, {5, 6}, {5, 7}};
    return Graph::from_edges(8, e);
}

}  // namespace

FusionPlan linear_cluster_plan(int n) {
    if (n < 3 || n % 2 == 0 || n > kMaxGraphVertices)
        throw std::invalid_argument("linear_cluster_plan: n must be odd, 3 <= n <= 31");
    FusionPlan p;
    p.name = "linear" + std::to_string(n);
    p.n_qubits = n;
    p.target = Graph::path(n);
    p.description = "path of " + std::to_string(n) + " qubits from three-qubit gates, LC at each middle qubit";
    for (int s = 0; s + 2 < n; s += 2) {
        p.steps.emplace_back(Entangle{{s, s + 1, s + 2}});
        p.steps.emplace_back(LocalComplement{s + 1});
    }
    return p;
}

std::vector<FusionPlan> recipes() {
    std::vector<FusionPlan> out;

    FusionPlan fig2a;
    fig2a.name = "fig2a";
    fig2a.n_qubits = 3;
    fig2a.steps = {Entangle{{0, 1, 2}}};
    fig2a.target = Graph::path(3);
    fig2a.description = "three-qubit gate on |+++>: triangle, one LC from the 3-path";
    out.push_back(fig2a);

    FusionPlan fig2b;
    fig2b.name = "fig2b";
    fig2b.n_qubits = 7;
    fig2b.steps = {Entangle{{0, 1, 2}}, LocalComplement{1}, Entangle{{4, 5, 6}}, LocalComplement{5},
                   Entangle{{2, 3, 4}}};
    fig2b.target = Graph::path(7);
    fig2b.description = "paths 0-1-2 and 4-5-6 fused through fresh qubit 3 by a three-qubit gate on {2,3,4}";
    out.push_back(fig2b);

    FusionPlan fig3a;
    fig3a.name = "fig3a";
    fig3a.n_qubits = 4;
    fig3a.steps = {Entangle{{0, 1, 2, 3}}};
    fig3a.target = Graph::star(4, 0);
    fig3a.description = "four-qubit gate: K4, one LC from the star centred at 0";
    out.push_back(fig3a);

    FusionPlan fig3b;
    fig3b.name = "fig3b";
    fig3b.n_qubits = 7;
    fig3b.steps = {Entangle{{0, 1, 2, 3}}, Entangle{{0, 4, 5, 6}}};
    fig3b.target = h_shape();
    fig3b.description = "two four-qubit gates sharing qubit 0 (v); a = 1,2,3, b = 4,5,6; H-shaped target";
    out.push_back(fig3b);

    FusionPlan fig3c;
    fig3c.name = "fig3c";
    fig3c.n_qubits = 4;
    fig3c.steps = {Entangle{{0, 1, 2, 3}}, Cz{0, 2}};
    fig3c.target = Graph::cycle(4);
    fig3c.description = "four-qubit gate plus CZ on the diagonal {0,2}: box graph 0-1-2-3-0";
    out.push_back(fig3c);

    FusionPlan fig4a;
    fig4a.name = "fig4a";
    fig4a.n_qubits = 5;
    fig4a.steps = {Entangle{{0, 1, 2, 3, 4}}, LocalComplement{0}};
    fig4a.target = Graph::star(5, 0);
    fig4a.description = "five-qubit gate then LC at the hub: star, GHZ class";
    out.push_back(fig4a);

    const int fig4b_centres[] = {0, 5};
    out.push_back(star_cover_plan("fig4b", fig4b_target(), fig4b_centres,
                                  "two five-qubit gates on plus-shaped stars sharing two leaves (8 qubits)"));

    const int fig4c_centres[] = {4, 0, 2, 6, 8};
    out.push_back(star_cover_plan("fig4c", Graph::grid(3, 3), fig4c_centres,
                                  "3x3 square lattice: five-qubit gate at the centre, three-qubit gates at corners"));

    std::vector<int> fig5_centres;
    fig5_centres.push_back(13);  // body centre (1,1,1), seven-qubit gate
    for (int k = 0; k < 3; ++k)
        for (int j = 0; j < 3; ++j)
            for (int i = 0; i < 3; ++i)
                if ((i + j + k) % 2 == 1 && (k * 3 + j) * 3 + i != 13) fig5_centres.push_back((k * 3 + j) * 3 + i);
    out.push_back(star_cover_plan("fig5", Graph::grid3d(3, 3, 3), fig5_centres,
                                  "3x3x3 cubic lattice from stars centred on odd-parity sites"));

    out.push_back(linear_cluster_plan(9));
    return out;
}

FusionPlan find_recipe(const std::string& name) {
    for (auto& p : recipes())
        if (p.name == name) return p;
    throw std::out_of_range("unknown recipe `" + name + "`");
}

std::vector<NamedGraph> catalog_graphs() {
    return {
        {"linear_cluster(3)", Graph::path(3)},
        {"linear_cluster(5)", Graph::path(5)},
        {"linear_cluster(7)", Graph::path(7)},
        {"linear_cluster(9)", Graph::path(9)},
        {"complete(4)", Graph::complete(4)},
        {"star(4)", Graph::star(4)},
        {"star(5)", Graph::star(5)},
        {"box(4)", Graph::cycle(4)},
        {"h_shape(7)", h_shape()},
        {"fig4b(8)", fig4b_target()},
        {"grid(2,2)", Graph::grid(2, 2)},
        {"grid(3,3)", Graph::grid(3, 3)},
        {"grid(3,4)", Graph::grid(3, 4)},
        {"grid(4,4)", Graph::grid(4, 4)},
        {"grid3d(2,2,2)", Graph::grid3d(2, 2, 2)},
        {"grid3d(2,2,3)", Graph::grid3d(2, 2, 3)},
        {"grid3d(3,3,3)", Graph::grid3d(3, 3, 3)},
    };
}

// ---------------------------------------------------------------------------

std::string to_dot(const Graph& g, const std::string& name) {
    std::ostringstream os;
    os << "graph " << name << " {\n";
    for (int v = 0; v < g.n(); ++v) os << "  " << v << ";\n";
    for (auto [a, b] : g.edges()) os << "  " << a << " -- " << b << ";\n";
    os << "}\n";
    return os.str();
}

std::string to_adjacency_list(const Graph& g) {
    std::ostringstream os;
    for (int v = 0; v < g.n(); ++v) {
        os << v << ':';
        for (std::uint32_t rest = g.neighbors(v); rest; rest &= rest - 1) os << ' ' << std::countr_zero(rest);
        os << '\n';
    }
    return os.str();
}

std::string format_edges(const Graph& g) {
    std::string out;
    for (auto [a, b] : g.edges()) out += (out.empty() ? "" : ", ") + std::to_string(a) + "-" + std::to_string(b);
    return out;
}

Graph parse_edges(int n, const std::string& text) {
    Graph g(n);
    for (const auto& item : split_list(text)) {
        const auto dash = item.find('-');
        if (dash == std::string::npos) throw ConfigError("edge `" + item + "` is not of the form a-b");
        const int a = parse_int(item.substr(0, dash));
        const int b = parse_int(item.substr(dash + 1));
        if (a < 0 || a >= n || b < 0 || b >= n || a == b) throw ConfigError("edge `" + item + "` is invalid");
        g.set_edge(a, b, true);
    }
    return g;
}

std::string plan_to_text(const FusionPlan& plan) {
    std::ostringstream os;
    os << "name = " << plan.name << "\n";
    os << "n_qubits = " << plan.n_qubits << "\n";
    for (const auto& step : plan.steps) {
        os << "step = ";
        std::visit(
            [&](const auto& st) {
                using T = std::decay_t<decltype(st)>;
                if constexpr (std::is_same_v<T, Entangle>) {
                    os << "entangle";
                    for (int v : st.vertices) os << ' ' << v;
                } else if constexpr (std::is_same_v<T, Cz>) {
                    os << "cz " << st.a << ' ' << st.b;
                } else {
                    os << "lc " << st.vertex;
                }
            },
            step);
        os << "\n";
    }
    os << "target = " << format_edges(plan.target) << "\n";
    if (!plan.description.empty()) os << "description = " << plan.description << "\n";
    os << "reconstructed = " << (plan.reconstructed ? "true" : "false") << "\n";
    return os.str();
}

FusionPlan plan_from_text(const std::string& text) {
    const auto cfg = KeyValueConfig::parse(text);
    FusionPlan p;
    p.name = cfg.get("name").value_or("plan");
    p.n_qubits = cfg.require_int("n_qubits");
    if (p.n_qubits < 1 || p.n_qubits > kMaxGraphVertices) throw ConfigError("`n_qubits` must be in [1, 32]");
    for (const auto& line : cfg.get_all("step")) {
        const auto words = split_list(line, ' ');
        if (words.empty()) throw ConfigError("empty step");
        std::vector<int> args;
        for (std::size_t k = 1; k < words.size(); ++k) args.push_back(parse_int(words[k]));
        if (words[0] == "entangle") {
            p.steps.emplace_back(Entangle{args});
        } else if (words[0] == "cz") {
            if (args.size() != 2) throw ConfigError("step `" + line + "`: cz takes two qubits");
            p.steps.emplace_back(Cz{args[0], args[1]});
        } else if (words[0] == "lc") {
            if (args.size() != 1) throw ConfigError("step `" + line + "`: lc takes one qubit");
            p.steps.emplace_back(LocalComplement{args[0]});
        } else {
            throw ConfigError("unknown step `" + words[0] + "` (entangle, cz, lc)");
        }
    }
    p.target = parse_edges(p.n_qubits, cfg.get("target").value_or(""));
    p.description = cfg.get("description").value_or("");
    const auto rec = cfg.get("reconstructed").value_or("false");
    if (rec != "true" && rec != "false") throw ConfigError("`reconstructed` must be true or false");
    p.reconstructed = rec == "true";
    try {
        p.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return p;
}

}  // namespace phasegate
