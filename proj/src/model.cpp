#include "phasegate/model.hpp"

#include "phasegate/config.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace phasegate {

DriveParams::DriveParams(std::vector<Complex> g, std::vector<Complex> omega, double delta1,
                         double delta2)
    : g_(std::move(g)), omega_(std::move(omega)), delta1_(delta1), delta2_(delta2) {
    if (g_.empty()) throw std::invalid_argument("DriveParams: need at least one atom");
    if (g_.size() != omega_.size())
        throw std::invalid_argument("DriveParams: g and Omega lists differ in length");
    if (delta1_ == 0.0 || delta2_ == 0.0)
        throw std::invalid_argument("DriveParams: detunings must be nonzero");
    if (!std::isfinite(delta1_) || !std::isfinite(delta2_))
        throw std::invalid_argument("DriveParams: detunings must be finite");
}

DriveParams DriveParams::uniform(int n_atoms, double g, double omega, double delta1, double delta2) {
    if (n_atoms < 1) throw std::invalid_argument("DriveParams: need at least one atom");
    return DriveParams(std::vector<Complex>(n_atoms, g), std::vector<Complex>(n_atoms, omega),
                       delta1, delta2);
}

bool DriveParams::is_uniform() const {
    auto same = [](const std::vector<Complex>& v) {
        return v.front().imag() == 0.0 &&
               std::all_of(v.begin(), v.end(), [&](Complex c) { return c == v.front(); });
    };
    return same(g_) && same(omega_);
}

DriveParams DriveParams::with_atoms(int n) const {
    if (!is_uniform()) throw std::invalid_argument("DriveParams::with_atoms: parameters are not uniform");
    return uniform(n, g_.front().real(), omega_.front().real(), delta1_, delta2_);
}

DriveParams DriveParams::scaled_detunings(double factor) const {
    return DriveParams(g_, omega_, delta1_ * factor, delta2_ * factor);
}

DerivedParams derive(const DriveParams& params) {
    DerivedParams d;
    d.delta = params.delta2() - params.delta1();
    if (d.delta == 0.0) throw DegenerateDetuning();
    const double inv = (1.0 / params.delta1() + 1.0 / params.delta2()) / 2.0;
    for (int j = 0; j < params.n_atoms(); ++j)
        d.lambda_j.push_back(std::conj(params.omega()[j]) * params.g()[j] * inv);
    if (params.is_uniform()) {
        d.lambda = d.lambda_j.front().real();
        d.lambda_prime = 2.0 * *d.lambda * *d.lambda / d.delta;
    }
    return d;
}

double cz_gate_time(const DriveParams& params) {
    const auto d = derive(params);
    if (!d.lambda_prime) throw std::invalid_argument("cz_gate_time: requires uniform parameters");
    if (*d.lambda_prime == 0.0) throw std::domain_error("cz_gate_time: lambda' is zero");
    return std::numbers::pi / std::abs(*d.lambda_prime);
}

namespace {

using Triplets = std::vector<Eigen::Triplet<Complex>>;

SparseMatrix to_matrix(const Dims& dims, const Triplets& t) {
    SparseMatrix m(dims.total(), dims.total());
    m.setFromTriplets(t.begin(), t.end());
    m.makeCompressed();
    return m;
}

void check_atoms(const DriveParams& params, const Dims& dims) {
    if (params.n_atoms() != dims.n_atoms)
        throw std::invalid_argument("Hamiltonian: parameter atom count does not match dims");
}

// Index of `index` with atom j moved to `level`.
Index with_level(const Dims& dims, Index index, int atom, int level) {
    BasisLabel l = basis_label(dims, index);
    l.digits[atom] = level;
    return basis_index(dims, l.digits, l.photons);
}

struct RaisingParts {
    Triplets cavity;  // g_j a |e_j><1_j|
    Triplets drive;   // Omega_j |e_j><1_j|
};

RaisingParts raising_parts(const DriveParams& params, const Dims& dims) {
    RaisingParts p;
    for (Index i = 0; i < dims.total(); ++i) {
        const int n = photon_count(dims, i);
        for (int j = 0; j < dims.n_atoms; ++j) {
            if (atom_level(dims, i, j) != kLevel1) continue;
            const Index excited = with_level(dims, i, j, kLevelE);
            p.drive.emplace_back(excited, i, params.omega()[j]);
            if (n > 0)
                p.cavity.emplace_back(excited - 1, i, params.g()[j] * std::sqrt(static_cast<double>(n)));
        }
    }
    return p;
}

int count_level(const Dims& dims, Index i, int level) {
    int c = 0;
    for (int j = 0; j < dims.n_atoms; ++j) c += atom_level(dims, i, j) == level;
    return c;
}

void require_uniform(const DriveParams& params, const char* who) {
    if (!params.is_uniform())
        throw std::invalid_argument(std::string(who) + ": requires uniform real g and Omega");
}

}  // namespace

TimeDependentOperator h_full(const DriveParams& params, const Dims& dims) {
    check_atoms(params, dims);
    const auto parts = raising_parts(params, dims);
    const SparseMatrix cavity = to_matrix(dims, parts.cavity);
    const SparseMatrix drive = to_matrix(dims, parts.drive);
    TimeDependentOperator h(dims);
    h.add_term(cavity, params.delta1());
    h.add_term(SparseMatrix(cavity.adjoint()), -params.delta1());
    h.add_term(drive, params.delta2());
    h.add_term(SparseMatrix(drive.adjoint()), -params.delta2());
    return h;
}

SparseOperator h_full_rotating(const DriveParams& params, const Dims& dims) {
    check_atoms(params, dims);
    const double delta = params.delta2() - params.delta1();
    const auto parts = raising_parts(params, dims);
    SparseMatrix raise = to_matrix(dims, parts.cavity) + to_matrix(dims, parts.drive);
    Triplets diag;
    for (Index i = 0; i < dims.total(); ++i) {
        const double e = params.delta2() * count_level(dims, i, kLevelE) + delta * photon_count(dims, i);
        if (e != 0.0) diag.emplace_back(i, i, e);
    }
    SparseMatrix h = raise + SparseMatrix(raise.adjoint()) + to_matrix(dims, diag);
    return SparseOperator(dims, std::move(h), true);
}

TimeDependentOperator h_eff_cavity(const DriveParams& params, const Dims& dims) {
    check_atoms(params, dims);
    const auto derived = derive(params);
    Triplets stark;
    Triplets lower;  // -lambda_j a |1_j><1_j|, multiplies e^{-i delta t}
    for (Index i = 0; i < dims.total(); ++i) {
        const int n = photon_count(dims, i);
        for (int j = 0; j < dims.n_atoms; ++j) {
            if (atom_level(dims, i, j) != kLevel1) continue;
            const double s = -std::norm(params.g()[j]) / params.delta1() * n -
                             std::norm(params.omega()[j]) / params.delta2();
            stark.emplace_back(i, i, s);
            if (n > 0) lower.emplace_back(i - 1, i, -derived.lambda_j[j] * std::sqrt(static_cast<double>(n)));
        }
    }
    const SparseMatrix lowering = to_matrix(dims, lower);
    TimeDependentOperator h(dims);
    h.add_term(to_matrix(dims, stark), 0.0);
    h.add_term(lowering, -derived.delta);
    h.add_term(SparseMatrix(lowering.adjoint()), derived.delta);
    return h;
}

namespace {

SparseOperator dispersive_diagonal(const DriveParams& params, const Dims& dims, bool self_energy,
                                   bool photon_stark) {
    check_atoms(params, dims);
    require_uniform(params, "h_eff_diag");
    const auto d = derive(params);
    const double g = params.g().front().real();
    const double omega = params.omega().front().real();
    const double single = -omega * omega / params.delta2() + *d.lambda * *d.lambda / d.delta;
    Triplets diag;
    for (Index i = 0; i < dims.total(); ++i) {
        const int m = count_level(dims, i, kLevel1);
        double e = *d.lambda_prime * m * (m - 1) / 2.0;
        if (self_energy) e += single * m;
        if (photon_stark) e += -g * g / params.delta1() * photon_count(dims, i) * m;
        if (e != 0.0) diag.emplace_back(i, i, e);
    }
    return SparseOperator(dims, to_matrix(dims, diag), true);
}

}  // namespace

SparseOperator h_eff_dispersive(const DriveParams& params, const Dims& dims) {
    return dispersive_diagonal(params, dims, true, true);
}

SparseOperator h_eff_diag(const DriveParams& params, const Dims& dims, bool include_self_energy) {
    return dispersive_diagonal(params, dims, include_self_energy, false);
}

RegimeReport regime_check(const DriveParams& params, double threshold) {
    const auto d = derive(params);
    auto max_abs = [](const std::vector<Complex>& v) {
        double m = 0.0;
        for (auto c : v) m = std::max(m, std::abs(c));
        return m;
    };
    auto ratio = [](double num, double den) {
        return den == 0.0 ? std::numeric_limits<double>::infinity() : num / den;
    };
    const double g = max_abs(params.g());
    const double omega = max_abs(params.omega());
    const double lambda = max_abs(d.lambda_j);
    const double ad1 = std::abs(params.delta1());
    const double ad2 = std::abs(params.delta2());
    const double ad = std::abs(d.delta);

    RegimeReport r;
    r.threshold = threshold;
    r.ratios = {
        {"Delta1/|g|", ratio(ad1, g)},
        {"Delta2/|Omega|", ratio(ad2, omega)},
        {"delta/(Omega^2/Delta2)", ratio(ad, omega * omega / ad2)},
        {"delta/(g^2/Delta1)", ratio(ad, g * g / ad1)},
        {"delta/|lambda|", ratio(ad, lambda)},
    };
    r.pass = std::all_of(r.ratios.begin(), r.ratios.end(),
                         [&](const auto& kv) { return kv.second >= threshold; });
    return r;
}

namespace {

std::string format_complex(Complex c) {
    std::ostringstream os;
    os.precision(17);
    os << c.real();
    if (c.imag() != 0.0) os << ':' << c.imag();
    return os.str();
}

Complex parse_complex(const std::string& s) {
    const auto colon = s.find(':');
    if (colon == std::string::npos) return {parse_double(s), 0.0};
    return {parse_double(s.substr(0, colon)), parse_double(s.substr(colon + 1))};
}

std::string join_complex(const std::vector<Complex>& v) {
    bool all_same = std::all_of(v.begin(), v.end(), [&](Complex c) { return c == v.front(); });
    if (all_same) return format_complex(v.front());
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) out += (i ? ", " : "") + format_complex(v[i]);
    return out;
}

std::vector<Complex> per_atom(const std::string& text, int n_atoms, const char* key) {
    auto items = split_list(text);
    std::vector<Complex> out;
    for (const auto& it : items) out.push_back(parse_complex(it));
    if (out.size() == 1) out.assign(n_atoms, out.front());
    if (static_cast<int>(out.size()) != n_atoms)
        throw ConfigError(std::string("`") + key + "` needs 1 or n_atoms values");
    return out;
}

}  // namespace

std::string to_key_value(const DriveParams& params) {
    std::ostringstream os;
    os.precision(17);
    os << "n_atoms = " << params.n_atoms() << "\n"
       << "g = " << join_complex(params.g()) << "\n"
       << "omega = " << join_complex(params.omega()) << "\n"
       << "delta1 = " << params.delta1() << "\n"
       << "delta2 = " << params.delta2() << "\n";
    return os.str();
}

DriveParams drive_params_from_key_value(const std::string& text) {
    const auto cfg = KeyValueConfig::parse(text);
    const int n = cfg.contains("n_atoms") ? cfg.require_int("n_atoms") : 2;
    if (n < 1) throw ConfigError("`n_atoms` must be >= 1");
    return DriveParams(per_atom(cfg.require("g"), n, "g"), per_atom(cfg.require("omega"), n, "omega"),
                       cfg.require_double("delta1"), cfg.require_double("delta2"));
}

}  // namespace phasegate
