#pragma once

#include "orbitq/matrix.hpp"
#include "orbitq/multipoly.hpp"
#include "orbitq/rootsystem.hpp"

#include <map>
#include <memory>
#include <vector>

namespace orbitq {

/// PBW monomial over the ordered basis of N^-_P: exponent vector, one slot
/// per negative root vector. depth = sum(exponent * root height).
struct PBWMonomial {
    std::vector<int> exps;
    bool operator<(const PBWMonomial& o) const { return exps < o.exps; }
    bool operator==(const PBWMonomial& o) const { return exps == o.exps; }
};

/// Finite weight-depth slice of the generalized Verma module M_lambda,
/// identified with U(N^-_P). Basis vectors are PBW monomials of depth <= D
/// in depth-then-lex order; index 0 is the highest weight vector v_0.
struct TruncatedVerma {
    ParabolicDatum pd;
    int depth_cap = 0;
    std::vector<PBWMonomial> basis;
    std::map<std::vector<int>, int> index_of;
    std::vector<int> depth;
    std::vector<Root> weight;  ///< weight relative to lambda (non-positive root combos)

    int dim() const { return static_cast<int>(basis.size()); }
    /// Largest basis index whose depth is <= d (basis is depth-sorted).
    int count_depth_at_most(int d) const;
};

TruncatedVerma verma_basis(const ParabolicDatum& pd, int depth_cap);

/// Action of one Chevalley basis element on the truncated module, exact in
/// the orbit parameters. Entries are polynomials in lambda_1..lambda_m of
/// degree <= 1. Columns from basis vectors deeper than `overflow_depth` may
/// have been truncated and are not trustworthy.
struct GeneratorAction {
    int generator = 0;   ///< index into the ChevalleyBasis
    int climb = 0;       ///< max depth increase (height of the root for f's, else 0)
    int overflow_depth = 0;
    std::vector<std::tuple<int, int, MultiPoly>> triplets;  ///< (row, col, entry)

    Matrix<MultiPoly> dense(int dim, VarSetPtr ring) const;
};

/// Straightening engine for the classical generalized Verma module. Owns the
/// memo caches; callers treat instances as immutable module data.
class VermaActions {
public:
    /// ring: polynomial ring whose first m variables are the orbit
    /// parameters lambda_1..lambda_m (extra variables such as h may follow).
    VermaActions(const ChevalleyBasis& cb, const TruncatedVerma& tv, VarSetPtr ring);

    const ChevalleyBasis& chevalley() const { return cb_; }
    const TruncatedVerma& verma() const { return tv_; }
    const VarSetPtr& ring() const { return ring_; }

    /// phi_lambda(x) on the truncated basis.
    GeneratorAction generator_action(int basis_index);

    /// h*phi_{lambda/h}(x): substitutes lambda -> lambda/h and multiplies by
    /// h. Entries must come out polynomial (degree-1 homogeneous in
    /// (lambda, h)); throws std::logic_error otherwise. `h_var` is the index
    /// of h in the ring.
    GeneratorAction rescaled_action(int basis_index, int h_var);

    /// lambda evaluated on the Cartan element h_i (a variable or zero).
    MultiPoly lambda_of_cartan(int i) const;

    /// Applies phi(x) to a single module element (sparse map form).
    std::map<std::vector<int>, MultiPoly> apply(int basis_index,
                                                const std::map<std::vector<int>, MultiPoly>& elt);

private:
    using Element = std::map<std::vector<int>, MultiPoly>;

    Element act_basis(int x, const std::vector<int>& mono);
    Element left_mul_f(int slot, const Element& elt);
    Element left_mul_f_mono(int slot, const std::vector<int>& mono);
    void add_scaled(Element& into, const Element& from, const MultiPoly& c);
    int depth_of_exps(const std::vector<int>& exps) const;

    const ChevalleyBasis& cb_;
    const TruncatedVerma& tv_;
    VarSetPtr ring_;
    std::vector<int> fslot_of_basis_;  ///< ChevalleyBasis f-index -> N^-_P slot or -1
    std::map<std::pair<int, std::vector<int>>, Element> act_memo_;
    std::map<std::pair<int, std::vector<int>>, Element> lmul_memo_;
};

/// One depth level of the Shapovalov-type pairing: matrix of v_0-coefficients
/// of phi_lambda(E-word) applied to F-word basis vectors, over weight-matched
/// pairs at the given depth.
struct ShapovalovLevel {
    int depth = 0;
    std::vector<PBWMonomial> e_words;     ///< rows (mirrored PBW monomials)
    std::vector<PBWMonomial> f_words;     ///< columns
    Matrix<MultiPoly> pairing;            ///< entries in Q[lambda]
    size_t generic_rank = 0;
    bool full = false;
    /// Determinant data per square weight block: (weight, det, linear factors
    /// "lambda_j - c" with multiplicity, residual cofactor).
    struct BlockDet {
        Root weight;
        MultiPoly det;
        std::vector<std::pair<Rational, int>> rational_roots;  ///< over the single lambda variable
        MultiPoly cofactor;
    };
    std::vector<BlockDet> block_dets;
};

std::vector<ShapovalovLevel> shapovalov_rank(const ChevalleyBasis& cb, const ParabolicDatum& pd,
                                             int depth_cap);

}  // namespace orbitq
