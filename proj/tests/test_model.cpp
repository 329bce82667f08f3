#include "phasegate/gates.hpp"
#include "phasegate/model.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <random>

using namespace phasegate;

namespace {

DriveParams squid(int n = 2) { return DriveParams::uniform(n, 1.0, 1.05, 20.0, 21.0); }

Complex element(const SparseMatrix& m, Index r, Index c) { return m.coeff(r, c); }

}  // namespace

TEST(Derive, SquidValues) {
    const auto d = derive(squid());
    EXPECT_DOUBLE_EQ(d.delta, 1.0);
    // independent arithmetic: 1.05 * (1/20 + 1/21) / 2 = 1.05 * 41 / 840
    const double lambda = 1.05 * 41.0 / 840.0;
    EXPECT_NEAR(*d.lambda, lambda, 1e-15);
    EXPECT_NEAR(*d.lambda, 0.05125, 1e-15);
    EXPECT_NEAR(*d.lambda_prime, 2.0 * lambda * lambda, 1e-17);
    EXPECT_NEAR(*d.lambda_prime, 5.253125e-3, 1e-15);
    EXPECT_NEAR(cz_gate_time(squid()), std::numbers::pi / 5.253125e-3, 1e-9);
}

TEST(Derive, NonUniformHasNoScalarLambda) {
    DriveParams p({1.0, 0.9}, {1.05, 1.05}, 20.0, 21.0);
    const auto d = derive(p);
    EXPECT_FALSE(d.lambda.has_value());
    EXPECT_FALSE(d.lambda_prime.has_value());
    EXPECT_EQ(d.lambda_j.size(), 2u);
    EXPECT_NEAR(d.lambda_j[1].real(), 0.9 * 1.05 * 41.0 / 840.0, 1e-15);
}

TEST(Derive, DegenerateDetuningThrows) {
    EXPECT_THROW(derive(DriveParams::uniform(2, 1.0, 1.0, 20.0, 20.0)), DegenerateDetuning);
    EXPECT_THROW(DriveParams::uniform(2, 1.0, 1.0, 0.0, 20.0), std::invalid_argument);
    EXPECT_THROW(DriveParams({1.0}, {1.0, 1.0}, 20.0, 21.0), std::invalid_argument);
}

TEST(Regime, SquidRatios) {
    const auto r = regime_check(squid());
    ASSERT_EQ(r.ratios.size(), 5u);
    EXPECT_TRUE(r.pass);
    EXPECT_NEAR(r.ratios[0].second, 20.0, 1e-12);
    EXPECT_NEAR(r.ratios[1].second, 20.0, 1e-12);
    EXPECT_NEAR(r.ratios[2].second, 400.0 / 21.0, 1e-12);
    EXPECT_NEAR(r.ratios[4].second, 840.0 / 43.05, 1e-12);
}

TEST(Regime, SmallDetuningFails) {
    EXPECT_FALSE(regime_check(DriveParams::uniform(2, 1.0, 1.05, 2.0, 3.0)).pass);
    EXPECT_FALSE(regime_check(squid(), 25.0).pass);
}

TEST(Hamiltonian, FullMatrixElements) {
    const auto p = DriveParams::uniform(1, 0.7, 0.4, 20.0, 21.0);
    Dims dims(1, 3);
    const auto h = h_full(p, dims);
    const double t = 0.37;
    const auto m = h.at(t);
    const int one[] = {kLevel1}, exc[] = {kLevelE};
    for (int n = 1; n <= 3; ++n) {
        const Complex expected = 0.7 * std::sqrt(double(n)) * std::exp(Complex(0.0, 20.0 * t));
        EXPECT_NEAR(std::abs(element(m, basis_index(dims, exc, n - 1), basis_index(dims, one, n)) - expected), 0.0,
                    1e-14);
    }
    for (int n = 0; n <= 3; ++n) {
        const Complex expected = 0.4 * std::exp(Complex(0.0, 21.0 * t));
        EXPECT_NEAR(std::abs(element(m, basis_index(dims, exc, n), basis_index(dims, one, n)) - expected), 0.0, 1e-14);
    }
}

TEST(Hamiltonian, HermitianAtRandomTimes) {
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> u(0.0, 1000.0);
    const DriveParams p({1.0, Complex(0.8, 0.3)}, {1.05, Complex(0.2, -0.9)}, 20.0, 21.0);
    Dims dims(2, 3);
    const auto full = h_full(p, dims);
    const auto cav = h_eff_cavity(p, dims);
    for (int k = 0; k < 20; ++k) {
        const double t = u(rng);
        EXPECT_TRUE(full.is_hermitian_at(t));
        EXPECT_TRUE(cav.is_hermitian_at(t));
    }
}

TEST(Hamiltonian, GroundLevelIsConserved) {
    // |0> is untouched by every coupling, so H commutes with each atom's |0><0|
    Dims dims(3, 2);
    const auto h = h_full(squid(3), dims);
    const auto m = DenseMatrix(h.at(1.234));
    for (int atom = 0; atom < 3; ++atom) {
        DenseMatrix proj = DenseMatrix::Zero(dims.total(), dims.total());
        for (Index i = 0; i < dims.total(); ++i)
            if (atom_level(dims, i, atom) == kLevel0) proj(i, i) = 1.0;
        EXPECT_LT((m * proj - proj * m).norm(), 1e-13);
    }
}

TEST(Hamiltonian, CavityModelKeepsAtomicLevels) {
    Dims dims(2, 3);
    const auto m = h_eff_cavity(squid(), dims).at(0.9);
    for (Index r = 0; r < m.outerSize(); ++r)
        for (SparseMatrix::InnerIterator it(m, r); it; ++it)
            EXPECT_EQ(basis_label(dims, it.row()).digits, basis_label(dims, it.col()).digits);
}

TEST(Hamiltonian, RotatingFrameIsTimeIndependentPartner) {
    // H_rot = e^{-iDt} H(t) e^{iDt} + D, checked element by element
    const auto p = squid();
    Dims dims(2, 2);
    const auto h = h_full(p, dims);
    const auto rot = h_full_rotating(p, dims);
    const double t = 2.5, delta = p.delta2() - p.delta1();
    const auto ht = DenseMatrix(h.at(t));
    const auto hr = DenseMatrix(rot.matrix());
    Eigen::VectorXd dvals(dims.total());
    for (Index i = 0; i < dims.total(); ++i) {
        int excited = 0;
        for (int j = 0; j < 2; ++j) excited += atom_level(dims, i, j) == kLevelE;
        dvals[i] = p.delta2() * excited + delta * photon_count(dims, i);
    }
    for (Index r = 0; r < dims.total(); ++r)
        for (Index c = 0; c < dims.total(); ++c) {
            const Complex moved = std::exp(Complex(0.0, -(dvals[r] - dvals[c]) * t)) * ht(r, c);
            const Complex expected = r == c ? hr(r, c) - dvals[r] : hr(r, c);
            EXPECT_NEAR(std::abs(moved - expected), 0.0, 1e-12) << r << "," << c;
        }
}

TEST(Hamiltonian, DispersiveVacuumBlockEqualsDiagModel) {
    const auto p = squid(3);
    Dims with_photons(3, 2), vacuum(3, 0);
    const auto disp = DenseMatrix(h_eff_dispersive(p, with_photons).matrix());
    const auto diag = DenseMatrix(h_eff_diag(p, vacuum, true).matrix());
    for (Index i = 0; i < vacuum.total(); ++i) {
        const auto l = basis_label(vacuum, i);
        const Index j = basis_index(with_photons, l.digits, 0);
        EXPECT_NEAR(std::abs(disp(j, j) - diag(i, i)), 0.0, 1e-15);
    }
    EXPECT_TRUE(h_eff_diag(p, vacuum, true).is_diagonal());
}

TEST(Hamiltonian, EntanglingPartIsPairCount) {
    const auto p = squid(4);
    Dims dims(4, 0);
    const auto h = DenseMatrix(h_eff_diag(p, dims, false).matrix());
    const double lp = *derive(p).lambda_prime;
    for (Index i = 0; i < dims.total(); ++i) {
        int m = 0;
        for (int j = 0; j < 4; ++j) m += atom_level(dims, i, j) == kLevel1;
        EXPECT_NEAR(h(i, i).real(), lp * m * (m - 1) / 2.0, 1e-16);
    }
}

TEST(Hamiltonian, RotatingFrameMatchesRk4OnQubitBlock) {
    const auto p = squid();
    const double times[] = {10.0, 40.0};
    GateOptions rk;
    GateOptions exact;
    exact.solver = Solver::rotating_frame;
    const auto a = simulate_qubit_dynamics(p, ModelKind::full, times, rk);
    const auto b = simulate_qubit_dynamics(p, ModelKind::full, times, exact);
    for (std::size_t k = 0; k < 2; ++k) EXPECT_LT((a.blocks[k].unitary - b.blocks[k].unitary).norm(), 1e-7);
}

TEST(Config, KeyValueRoundTrip) {
    const DriveParams p({1.0, Complex(0.8, 0.3)}, {1.05, Complex(0.2, -0.9)}, 20.0, 21.5);
    const auto q = drive_params_from_key_value(to_key_value(p));
    EXPECT_EQ(q.n_atoms(), 2);
    for (int j = 0; j < 2; ++j) {
        EXPECT_EQ(q.g()[j], p.g()[j]);
        EXPECT_EQ(q.omega()[j], p.omega()[j]);
    }
    EXPECT_EQ(q.delta1(), p.delta1());
    EXPECT_EQ(q.delta2(), p.delta2());
}

TEST(Config, BroadcastAndErrors) {
    const auto p = drive_params_from_key_value("n_atoms = 3\ng = 1\nomega = 1.05\ndelta1 = 20\ndelta2 = 21\n");
    EXPECT_EQ(p.n_atoms(), 3);
    EXPECT_TRUE(p.is_uniform());
    EXPECT_ANY_THROW(drive_params_from_key_value("n_atoms = 2\ng = 1\nomega = 1.05\ndelta1 = 20\n"));
    EXPECT_ANY_THROW(drive_params_from_key_value("n_atoms = 2\ng = 1, 2, 3\nomega = 1\ndelta1 = 20\ndelta2 = 21\n"));
    EXPECT_ANY_THROW(drive_params_from_key_value("n_atoms = two\ng = 1\nomega = 1\ndelta1 = 20\ndelta2 = 21\n"));
}
