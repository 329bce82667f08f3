// model.hpp - drive parameters and the Hamiltonians of the dispersive
// multi-atom gate: the full interaction-picture Hamiltonian, the
// adiabatically eliminated cavity model, and the vacuum-sector diagonal model.
//
// All frequencies are in units of the cavity coupling g (g = 1) and are
// treated as angular frequencies; times are in units of 1/g.

#pragma once

#include "phasegate/core.hpp"

#include <optional>
#include <string>
#include <utility>
#include <vector>

namespace phasegate {

class DriveParams {
  public:
    /// Per-atom couplings. Throws std::invalid_argument if the lists differ in
    /// length, are empty, or either detuning is zero.
    DriveParams(std::vector<Complex> g, std::vector<Complex> omega, double delta1, double delta2);

    /// g_j = g and Omega_j = Omega, both real, for every atom.
    static DriveParams uniform(int n_atoms, double g, double omega, double delta1, double delta2);

    int n_atoms() const { return static_cast<int>(g_.size()); }
    const std::vector<Complex>& g() const { return g_; }
    const std::vector<Complex>& omega() const { return omega_; }
    double delta1() const { return delta1_; }
    double delta2() const { return delta2_; }

    /// True when every g_j equals g_0, every Omega_j equals Omega_0 and both are real.
    bool is_uniform() const;
    /// Uniform parameters resized to `n` atoms. Throws for non-uniform input.
    DriveParams with_atoms(int n) const;
    /// Detunings multiplied by `factor`, couplings unchanged.
    DriveParams scaled_detunings(double factor) const;

  private:
    std::vector<Complex> g_;
    std::vector<Complex> omega_;
    double delta1_;
    double delta2_;
};

struct DerivedParams {
    double delta = 0.0;                  // Delta2 - Delta1
    std::vector<Complex> lambda_j;       // Omega_j^* g_j (1/Delta1 + 1/Delta2) / 2
    std::optional<double> lambda;        // uniform case only
    std::optional<double> lambda_prime;  // 2 lambda^2 / delta, uniform case only
};

class DegenerateDetuning : public std::domain_error {
  public:
    DegenerateDetuning() : std::domain_error("derive: delta = Delta2 - Delta1 is zero") {}
};

DerivedParams derive(const DriveParams& params);

/// Gate time for a pi conditional phase, pi / |lambda'|.
double cz_gate_time(const DriveParams& params);

/// sum_j (g_j e^{i Delta1 t} a |e_j><1_j| + Omega_j e^{i Delta2 t} |e_j><1_j|) + h.c.
TimeDependentOperator h_full(const DriveParams& params, const Dims& dims);

/// The full Hamiltonian in the frame rotating with
/// D = Delta2 * sum_j |e_j><e_j| + delta * a^dag a, where it is time
/// independent:
///     sum_j (g_j a |e_j><1_j| + Omega_j |e_j><1_j| + h.c.) + D.
/// D vanishes on qubit (x) vacuum states, so amplitudes there agree with
/// h_full dynamics.
SparseOperator h_full_rotating(const DriveParams& params, const Dims& dims);

/// Excited level eliminated; the atom-assisted cavity coupling keeps its
/// explicit e^{-/+ i delta t} time dependence.
TimeDependentOperator h_eff_cavity(const DriveParams& params, const Dims& dims);

/// Dispersive model including the photon-number dependent Stark shift:
/// sum_j (-g^2/Delta1 a^dag a - Omega^2/Delta2 + lambda^2/delta)|1_j><1_j|
///   + lambda' sum_{j<k} |1_j><1_j||1_k><1_k|.
/// Uniform parameters only.
SparseOperator h_eff_dispersive(const DriveParams& params, const Dims& dims);

/// Vacuum-cavity reduction of h_eff_dispersive (no a^dag a term). With
/// include_self_energy = false only the pairwise lambda' term remains, which
/// is the multi-qubit entangling Hamiltonian. Uniform parameters only.
SparseOperator h_eff_diag(const DriveParams& params, const Dims& dims, bool include_self_energy);

struct RegimeReport {
    std::vector<std::pair<std::string, double>> ratios;
    double threshold = 10.0;
    bool pass = false;
};

inline constexpr double kDefaultRegimeThreshold = 10.0;

/// Ratios Delta1/|g|, Delta2/|Omega|, delta/(Omega^2/Delta2), delta/(g^2/Delta1),
/// delta/|lambda|, each taken over the worst atom.
RegimeReport regime_check(const DriveParams& params, double threshold = kDefaultRegimeThreshold);

// Key-value text schema, one `key = value` per line, '#' starts a comment:
//   n_atoms = 2
//   g       = 1                 (one value, or one per atom, comma separated)
//   omega   = 1.05
//   delta1  = 20
//   delta2  = 21
// Complex per-atom values are written re:im, e.g. `omega = 1.05, 1.0:0.2`.
std::string to_key_value(const DriveParams& params);
DriveParams drive_params_from_key_value(const std::string& text);

}  // namespace phasegate
