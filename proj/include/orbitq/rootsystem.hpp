#pragma once

#include "orbitq/matrix.hpp"
#include "orbitq/rational.hpp"

#include <nlohmann/json_fwd.hpp>
#include <string>
#include <vector>

namespace orbitq {

/// Root in simple-root coordinates.
using Root = std::vector<int>;

inline int root_height(const Root& r) {
    int h = 0;
    for (int c : r) h += c;
    return h;
}

/// Root datum for the supported simple types A1, A2, B2, A3.
/// Convention: cartan[i][j] is the value of alpha_j on the coroot h_i,
/// so [h_i, e_j] = cartan[i][j] e_j; symmetrizers satisfy d_i a_ij = d_j a_ji.
/// Positive roots are listed in height-then-lex order, fixed once here and
/// used as the monomial order everywhere downstream.
struct RootSystem {
    char letter = 'A';
    int rank = 0;
    std::vector<std::vector<int>> cartan;
    std::vector<int> d;
    std::vector<Root> positive_roots;
    /// omega_i in simple-root coordinates (columns of the inverse Cartan matrix).
    std::vector<std::vector<Rational>> fundamental_weights;

    std::string type_name() const { return std::string(1, letter) + std::to_string(rank); }
    int num_positive() const { return static_cast<int>(positive_roots.size()); }
    int root_index(const Root& r) const;

    /// <mu, alpha_i^vee> for mu in simple-root coordinates.
    Rational pairing_coroot(const std::vector<Rational>& mu_simple, int i) const;

    /// Symmetric bilinear form on the root lattice: (alpha_i, alpha_j) = d_i a_ij.
    Rational bilinear_roots(const std::vector<Rational>& a, const std::vector<Rational>& b) const;

    nlohmann::json to_json() const;
};

RootSystem build_root_system(char letter, int rank);

/// Chevalley basis realized by explicit integer matrices in a faithful
/// representation (sl_{n+1} for type A, sp_4 for B2). Basis order: e_alpha
/// for positive roots, then f_alpha, then the coroots h_1..h_rank. The sign
/// convention is whatever the fixed realization induces; it is deterministic
/// and recorded in `sign_convention`.
struct ChevalleyBasis {
    RootSystem rs;
    std::string sign_convention;
    int rep_dim = 0;
    std::vector<RatMatrix> rep;  ///< defining-representation matrix per basis element

    int npos() const { return rs.num_positive(); }
    int dim() const { return 2 * npos() + rs.rank; }
    int e_index(int a) const { return a; }
    int f_index(int a) const { return npos() + a; }
    int h_index(int i) const { return 2 * npos() + i; }
    bool is_e(int idx) const { return idx < npos(); }
    bool is_f(int idx) const { return idx >= npos() && idx < 2 * npos(); }
    bool is_h(int idx) const { return idx >= 2 * npos(); }
    std::string basis_name(int idx) const;

    /// Weight of a basis element in simple-root coordinates (0 for Cartan).
    Root weight_of(int idx) const;

    /// [x_i, x_j] as a sparse integer vector over the basis.
    const std::vector<std::pair<int, long>>& bracket(int i, int j) const { return table_.at(i).at(j); }

    /// Structure constant extraction: p+1 bound data for tests.
    int root_string_p(const Root& alpha, const Root& beta) const;

    std::vector<std::vector<std::vector<std::pair<int, long>>>> table_;
};

ChevalleyBasis chevalley_constants(const RootSystem& rs);

/// Levi datum: subset S of simple-root indices generating L; the complement
/// carries the orbit parameters lambda_1..lambda_m in increasing index order.
struct LeviDatum {
    std::vector<int> levi_simples;
    std::vector<int> orbit_params;

    static LeviDatum make(const RootSystem& rs, std::vector<int> simples);
    int m() const { return static_cast<int>(orbit_params.size()); }
    /// Index j with orbit_params[j] == i, or -1 when i is a Levi simple.
    int lambda_index(int simple) const;
};

/// Parabolic datum: the ordered basis of N^-_P (negative root vectors whose
/// root involves a simple root outside S), height-then-lex. This order is the
/// PBW order for the classical Verma layer.
struct ParabolicDatum {
    RootSystem rs;
    LeviDatum levi;
    std::vector<int> nminus_roots;  ///< indices into rs.positive_roots
    std::vector<int> levi_roots;    ///< positive roots inside L

    int size() const { return static_cast<int>(nminus_roots.size()); }
    int height(int k) const { return root_height(rs.positive_roots[nminus_roots[k]]); }
    int max_height() const;
};

ParabolicDatum parabolic_split(const RootSystem& rs, const LeviDatum& levi);

}  // namespace orbitq
