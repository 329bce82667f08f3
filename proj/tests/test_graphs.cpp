#include "phasegate/gates.hpp"
#include "phasegate/graphs.hpp"

#include <gtest/gtest.h>

#include <Eigen/SVD>

#include <numbers>
#include <random>

using namespace phasegate;

namespace {

Graph random_graph(int n, double p, std::mt19937& rng) {
    std::bernoulli_distribution coin(p);
    Graph g(n);
    for (int a = 0; a < n; ++a)
        for (int b = a + 1; b < n; ++b)
            if (coin(rng)) g.set_edge(a, b, true);
    return g;
}

// Schmidt rank across the cut {first k vertices} | {rest}.
int schmidt_rank(const QubitVector& psi, int n, int k) {
    const Index rows = Index{1} << k, cols = Index{1} << (n - k);
    Eigen::MatrixXcd m(rows, cols);
    for (Index r = 0; r < rows; ++r)
        for (Index c = 0; c < cols; ++c) m(r, c) = psi[r * cols + c];
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(m);
    int rank = 0;
    for (Index i = 0; i < svd.singularValues().size(); ++i) rank += svd.singularValues()[i] > 1e-10;
    return rank;
}

}  // namespace

TEST(Graph, Families) {
    EXPECT_EQ(Graph::path(5).edge_count(), 4u);
    EXPECT_EQ(Graph::cycle(5).edge_count(), 5u);
    EXPECT_EQ(Graph::complete(6).edge_count(), 15u);
    EXPECT_EQ(Graph::star(5, 2).degree(2), 4);
    EXPECT_EQ(Graph::grid(3, 3).edge_count(), 12u);
    EXPECT_EQ(Graph::grid(3, 3).degree(4), 4);
    EXPECT_EQ(Graph::grid3d(3, 3, 3).edge_count(), 54u);
    EXPECT_EQ(Graph::grid3d(3, 3, 3).degree(13), 6);
    EXPECT_TRUE(Graph::grid(4, 2).has_edge(1, 5));
}

TEST(Graph, EdgeEditingAndErrors) {
    Graph g(4);
    g.toggle_edge(0, 3);
    EXPECT_TRUE(g.has_edge(3, 0));
    g.toggle_edge(3, 0);
    EXPECT_FALSE(g.has_edge(0, 3));
    EXPECT_THROW(g.set_edge(1, 1, true), std::invalid_argument);
    EXPECT_THROW(g.has_edge(0, 4), std::out_of_range);
    EXPECT_THROW(Graph(33), std::invalid_argument);
}

TEST(Graph, KeyRoundTrip) {
    std::mt19937 rng(5);
    for (int k = 0; k < 50; ++k) {
        const int n = 2 + k % 30;
        const auto g = random_graph(n, 0.3, rng);
        EXPECT_EQ(Graph::from_key(n, g.key()), g);
    }
}

TEST(Graph, EdgeTextRoundTrip) {
    const auto g = Graph::grid(3, 2);
    EXPECT_EQ(parse_edges(6, format_edges(g)), g);
    EXPECT_EQ(format_edges(Graph::path(3)), "0-1, 1-2");
    EXPECT_THROW(parse_edges(3, "0-3"), std::exception);
    EXPECT_THROW(parse_edges(3, "0_1"), std::exception);
}

TEST(Stabilizers, GeneratorsOfPath) {
    const auto s = stabilizer_generators(Graph::path(3));
    ASSERT_EQ(s.size(), 3u);
    EXPECT_EQ(s[1].x_support, 1u << 1);
    EXPECT_EQ(s[1].z_support, (1u << 0) | (1u << 2));
}

TEST(Stabilizers, CatalogExpectationsArePlusOne) {
    for (const auto& [name, g] : catalog_graphs()) {
        if (g.n() > 12) continue;
        const auto e = stabilizer_expectations(graph_state_vector(g), g);
        for (double v : e) EXPECT_NEAR(v, 1.0, 1e-9) << name;
    }
}

TEST(Stabilizers, WrongGraphFails) {
    const auto e = stabilizer_expectations(graph_state_vector(Graph::path(4)), Graph::cycle(4));
    EXPECT_LT(*std::min_element(e.begin(), e.end()), 0.5);
}

TEST(LocalComplement, CompleteToStar) {
    for (int n = 2; n <= 8; ++n)
        for (int v = 0; v < n; ++v) EXPECT_EQ(local_complement(Graph::complete(n), v), Graph::star(n, v));
}

TEST(LocalComplement, InvolutionOnRandomGraphs) {
    std::mt19937 rng(17);
    for (int k = 0; k < 100; ++k) {
        const int n = 2 + k % 11;
        const auto g = random_graph(n, 0.4, rng);
        const int v = static_cast<int>(rng() % n);
        EXPECT_EQ(local_complement(local_complement(g, v), v), g);
    }
}

TEST(LocalComplement, UnitaryMapsStates) {
    std::mt19937 rng(23);
    for (int k = 0; k < 100; ++k) {
        const int n = 2 + k % 7;
        const auto g = random_graph(n, 0.5, rng);
        const int v = static_cast<int>(rng() % n);
        const auto ops = lc_implementing_unitary(g, v);
        const auto mapped = apply_local_ops(graph_state_vector(g), ops);
        EXPECT_LT(distance_up_to_phase(mapped, graph_state_vector(local_complement(g, v))), 1e-9);
    }
}

TEST(LocalComplement, DistanceUpToPhase) {
    const auto psi = graph_state_vector(Graph::path(3));
    EXPECT_LT(distance_up_to_phase(psi, QubitVector(std::exp(Complex(0, 1.1)) * psi)), 1e-15);
    EXPECT_GT(distance_up_to_phase(psi, graph_state_vector(Graph::complete(3))), 0.5);
}

TEST(Clique, ToggleMatchesEntanglingGate) {
    std::mt19937 rng(29);
    for (int k = 0; k < 20; ++k) {
        const int n = 4 + k % 4;
        const auto g = random_graph(n, 0.4, rng);
        std::vector<int> subset;
        for (int v = 0; v < n; ++v)
            if (rng() % 2) subset.push_back(v);
        if (subset.size() < 2) subset = {0, n - 1};
        const int m = static_cast<int>(subset.size());
        const auto u = entangling_unitary(m, std::numbers::pi, 1.0);
        QubitVector psi = graph_state_vector(g);
        for (Index x = 0; x < psi.size(); ++x) {
            std::uint32_t sub = 0;
            for (int i = 0; i < m; ++i)
                if ((x >> (n - 1 - subset[i])) & 1) sub |= 1u << (m - 1 - i);
            psi[x] *= u.diagonal()[sub];
        }
        EXPECT_LT(distance_up_to_phase(psi, graph_state_vector(toggle_clique(g, subset))), 1e-12);
    }
}

TEST(Orbit, WitnessReplaysToTarget) {
    std::mt19937 rng(31);
    for (int k = 0; k < 20; ++k) {
        const int n = 3 + k % 5;
        const auto g = random_graph(n, 0.5, rng);
        Graph h = g;
        for (int s = 0; s < 3; ++s) h = local_complement(h, static_cast<int>(rng() % n));
        const auto r = lc_equivalent(g, h);
        ASSERT_EQ(r.status, LcStatus::equivalent);
        EXPECT_LE(r.witness.size(), 3u);
        EXPECT_EQ(replay_witness(g, r.witness), h);
    }
}

TEST(Orbit, NotInOrbitAndCap) {
    EXPECT_EQ(lc_equivalent(Graph::path(3), Graph(3)).status, LcStatus::not_in_orbit);
    EXPECT_EQ(lc_equivalent(Graph::path(4), Graph::complete(4)).status, LcStatus::not_in_orbit);
    EXPECT_EQ(lc_equivalent(Graph::path(8), Graph::cycle(8), 2).status, LcStatus::cap_reached);
    const auto same = lc_equivalent(Graph::cycle(5), Graph::cycle(5));
    EXPECT_EQ(same.status, LcStatus::equivalent);
    EXPECT_TRUE(same.witness.empty());
}

TEST(Orbit, StarAndCompleteAreGhzClass) {
    for (int n = 3; n <= 6; ++n) {
        const auto psi = graph_state_vector(Graph::star(n, 0));
        for (int k = 1; k < n; ++k) EXPECT_EQ(schmidt_rank(psi, n, k), 2);
        EXPECT_EQ(lc_equivalent(Graph::star(n, 0), Graph::complete(n)).status, LcStatus::equivalent);
    }
    // the box is not GHZ class: two edges cross the middle cut
    EXPECT_EQ(schmidt_rank(graph_state_vector(Graph::cycle(4)), 4, 2), 4);
    EXPECT_EQ(lc_equivalent(Graph::cycle(4), Graph::star(4, 0)).status, LcStatus::not_in_orbit);
}

TEST(Plans, TextRoundTrip) {
    for (const auto& plan : recipes()) {
        const auto back = plan_from_text(plan_to_text(plan));
        EXPECT_EQ(back.name, plan.name);
        EXPECT_EQ(back.n_qubits, plan.n_qubits);
        EXPECT_EQ(back.target, plan.target);
        EXPECT_EQ(back.steps.size(), plan.steps.size());
        EXPECT_EQ(back.reconstructed, plan.reconstructed);
        EXPECT_EQ(plan_to_text(back), plan_to_text(plan));
    }
}

TEST(Plans, ValidationErrors) {
    EXPECT_ANY_THROW(plan_from_text("name = x\nn_qubits = 3\nstep = entangle 0 0\ntarget = 0-1\n"));
    EXPECT_ANY_THROW(plan_from_text("name = x\nn_qubits = 3\nstep = lc 5\ntarget = 0-1\n"));
    EXPECT_ANY_THROW(plan_from_text("name = x\nn_qubits = 3\nstep = swap 0 1\ntarget = 0-1\n"));
    EXPECT_THROW(find_recipe("fig9"), std::out_of_range);
}

TEST(Plans, PublishedRecipeVerdicts) {
    struct Case {
        const char* name;
        std::vector<int> witness;
    };
    const Case cases[] = {{"fig2a", {1}}, {"fig2b", {3}}, {"fig3a", {0}}, {"fig3b", {1, 4}}, {"fig3c", {0}}};
    for (const auto& c : cases) {
        const auto out = run_plan(find_recipe(c.name));
        EXPECT_EQ(out.search.status, LcStatus::equivalent) << c.name;
        EXPECT_EQ(out.search.witness, c.witness) << c.name;
        EXPECT_TRUE(out.statevector_checked);
        EXPECT_TRUE(out.statevector_verified) << c.name;
    }
}

TEST(Plans, ReconstructedRecipesComplete) {
    for (const char* name : {"fig4a", "fig4b", "fig4c", "fig5", "linear9"}) {
        const auto plan = find_recipe(name);
        const auto out = run_plan(plan);
        EXPECT_NE(to_string(out.search.status), nullptr);
        EXPECT_EQ(replay_witness(out.final_graph, out.search.witness), plan.target) << name;
        if (out.statevector_checked) {
            EXPECT_TRUE(out.statevector_verified) << name;
        }
    }
}

TEST(Plans, LinearClusterLengths) {
    for (int n : {3, 5, 7, 11}) {
        const auto out = run_plan(linear_cluster_plan(n));
        EXPECT_EQ(out.final_graph, Graph::path(n));
    }
    EXPECT_THROW(linear_cluster_plan(4), std::invalid_argument);
}

TEST(Export, DotAndAdjacency) {
    const auto dot = to_dot(Graph::path(3), "p3");
    EXPECT_NE(dot.find("graph p3"), std::string::npos);
    EXPECT_NE(dot.find("0 -- 1"), std::string::npos);
    EXPECT_EQ(to_adjacency_list(Graph::path(3)), "0: 1\n1: 0 2\n2: 1\n");
}
