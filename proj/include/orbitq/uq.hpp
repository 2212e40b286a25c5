#pragma once

#include "orbitq/fraction.hpp"
#include "orbitq/matrix.hpp"
#include "orbitq/qseries.hpp"
#include "orbitq/quantizer.hpp"
#include "orbitq/rootsystem.hpp"

#include <map>
#include <vector>

namespace orbitq {

/// Normal-form monomial of U_q(g): F-word x lattice element x E-word, with
/// the F- and E-words as PBW exponent vectors over the fixed convex root
/// order and the lattice element over the simple roots.
struct UqMono {
    std::vector<int> fexp;
    std::vector<int> kvec;
    std::vector<int> eexp;
    bool operator<(const UqMono& o) const {
        if (fexp != o.fexp) return fexp < o.fexp;
        if (kvec != o.kvec) return kvec < o.kvec;
        return eexp < o.eexp;
    }
    bool operator==(const UqMono& o) const {
        return fexp == o.fexp && kvec == o.kvec && eexp == o.eexp;
    }
};

/// Element of U_q(g): normal-form monomials with coefficients in Q(q) (the
/// L_i symbols join only through module actions).
struct UqElement {
    std::map<UqMono, FractionElement> terms;
    bool is_zero() const { return terms.empty(); }
};

/// Classical element of U(g) in PBW form F-word x H-monomial x E-word,
/// used as the target of the q -> 1 specialization.
struct ClassicalUElement {
    // key: fexp ++ hexp ++ eexp concatenated
    std::map<std::vector<int>, Rational> terms;
    bool is_zero() const { return terms.empty(); }
    bool operator==(const ClassicalUElement& o) const { return terms == o.terms; }
};

/// U_q(g) for types A1 and A2 with the Lusztig relations, realized by a
/// confluent straightening of words onto the PBW basis. Hopf structure in the
/// convention Delta(E) = E x 1 + K x E, Delta(F) = F x K^-1 + 1 x F,
/// Delta(K) = K x K. Products memoize the letter-level rewrites.
class UqAlgebra {
public:
    explicit UqAlgebra(const RootSystem& rs, int num_L_symbols);

    const RootSystem& rs() const { return rs_; }
    /// PBW roots in the fixed convex order (A1: alpha; A2: a1 < a1+a2 < a2).
    const std::vector<Root>& pbw_roots() const { return pbw_roots_; }
    const VarSetPtr& coeff_ring() const { return ring_; }
    int q_var() const { return 0; }
    int L_var(int j) const { return 1 + j; }

    FractionElement q_power(long n) const;
    FractionElement coeff_one() const { return FractionElement::constant(ring_, Rational(1)); }

    UqElement one() const;
    UqElement E(int i) const;  ///< simple generator
    UqElement F(int i) const;
    UqElement K(const std::vector<int>& lattice) const;
    UqElement Ki(int i, int power) const;

    UqElement add(const UqElement& a, const UqElement& b) const;
    UqElement sub(const UqElement& a, const UqElement& b) const;
    UqElement scale(const UqElement& a, const FractionElement& c) const;
    UqElement mul(const UqElement& a, const UqElement& b) const;

    /// Weight of a monomial in simple-root coordinates (E-part minus F-part).
    Root weight_of(const UqMono& m) const;
    bool weight_homogeneous(const UqElement& x, Root* w) const;

    // --- Hopf structure -----------------------------------------------------
    using Tensor = std::map<std::pair<UqMono, UqMono>, FractionElement>;
    Tensor coproduct(const UqElement& x) const;
    UqElement antipode(const UqElement& x) const;
    FractionElement counit(const UqElement& x) const;
    Tensor tensor_mul(const Tensor& a, const Tensor& b) const;
    Tensor tensor_sub(const Tensor& a, const Tensor& b) const;

    /// Generators for adjoint-action iteration: 0..rank-1 the E_i, rank..2rank-1
    /// the F_i.
    UqElement ad_generator(int gen, const UqElement& x) const;
    /// Hopf adjoint action by an arbitrary element: sum u1 x S(u2).
    UqElement ad(const UqElement& u, const UqElement& x) const;

    /// q -> 1 limit: K_i = q^{d_i H_i} expands as exp(t d_i H_i); the
    /// element's coefficients must be L-free. Throws std::domain_error when a
    /// t-pole survives (no finite limit).
    ClassicalUElement classical_limit(const UqElement& x) const;

    /// Divides all coefficients by (q - q^-1)^k.
    UqElement shift_valuation(const UqElement& x, int k) const;

    int pbw_index_of_simple(int i) const { return simple_slot_[i]; }

private:
    friend class QVerma;
    using SimpleWord = std::vector<int>;  ///< simple-generator indices

    // letter-level straightening
    std::map<std::vector<int>, FractionElement> insert_letter(bool eside, int slot,
                                                              const std::vector<int>& mono);
    std::vector<std::pair<FractionElement, SimpleWord>> expand_word(bool eside,
                                                                    const std::vector<int>& pbw) const;
    UqElement push_e_through(int ei, const SimpleWord& fword);
    UqElement leftmul_e_letter(int ei, const UqElement& x);
    UqElement leftmul_f_slot(int slot, const UqElement& x);
    UqElement mul_mono(const UqMono& a, const UqMono& b);
    long k_commute_power(const std::vector<int>& lattice, const Root& wt) const;

    RootSystem rs_;
    int mL_;
    VarSetPtr ring_;
    std::vector<Root> pbw_roots_;
    std::vector<int> simple_slot_;   ///< simple index -> pbw slot
    std::vector<int> qi_power_;      ///< d_i per simple root
    // rewrite rules: (eside, hi slot, lo slot) -> sum of coeff * word(slots)
    std::map<std::tuple<bool, int, int>, std::vector<std::pair<FractionElement, std::vector<int>>>> rules_;
    std::map<std::tuple<bool, int, std::vector<int>>, std::map<std::vector<int>, FractionElement>> insert_memo_;
    std::map<std::pair<int, SimpleWord>, UqElement> push_memo_;
    mutable std::map<std::pair<UqMono, UqMono>, UqElement> mul_memo_;
};

/// Truncated quantized Verma module M_{q,lambda} for the torus Levi: basis of
/// PBW F-monomials of depth <= D; K_omega acts diagonally through the L_i
/// symbols, E_i annihilate v_0.
class QVerma {
public:
    QVerma(UqAlgebra& alg, int depth_cap);

    int dim() const { return static_cast<int>(basis_.size()); }
    int depth_cap() const { return depth_cap_; }
    const std::vector<std::vector<int>>& basis() const { return basis_; }
    int depth_of(int idx) const { return depth_[idx]; }
    int count_depth_at_most(int d) const;

    /// Matrix of the action of x, with the depth-climb of x's F-part.
    struct ActionMatrix {
        Matrix<FractionElement> mat;
        int climb = 0;
        int trust = 0;
    };
    ActionMatrix action(const UqElement& x) const;

private:
    UqAlgebra& alg_;
    int depth_cap_;
    std::vector<std::vector<int>> basis_;
    std::map<std::vector<int>, int> index_;
    std::vector<int> depth_;
};

/// Basis of the deformed adjoint representation G_q inside the ad-finite
/// part, anchored at q = 1.
struct GqBasis {
    std::vector<UqElement> elements;      ///< dim g of them, normalized
    std::vector<Root> weights;
    std::vector<ClassicalUElement> limits;  ///< exactly the Chevalley basis images
    size_t closure_dim = 0;               ///< dim of ad(U) K_{-4 mu}
    std::vector<int> lattice_anchor;      ///< the -4 mu lattice vector used
};

/// The anchor K_{scale * mu} for the ad-finite component containing G_q.
/// Under the Hopf convention used here, scale -2 lands in End(V_{q,mu})
/// (the Joseph-Letzter tau(lambda) translation of the -4 mu normalization);
/// scale -4 anchors a larger component and is kept selectable.
struct GqOptions {
    int lattice_scale = -2;
    int max_rounds = 24;
};

GqBasis find_Gq(UqAlgebra& alg, const GqOptions& opts = {});

/// t-series operator on the truncated quantized Verma module: one matrix of
/// nu-polynomials per t-order (the global h-power is carried by the degree).
struct TOp {
    std::vector<Matrix<MultiPoly>> orders;
    int climb = 0;
    int trust = 0;
};

struct QSlice {
    int degree = 0;
    std::vector<TOp> spanning;
    std::vector<size_t> ranks_per_order;  ///< rank of data truncated to t-order j
    std::vector<int> basis_indices;       ///< independent set at full order
    int window = 0;
    /// Freeness shadow: every Q-combination of spanning ops that vanishes
    /// through t-order j has its t^{j+1} layer inside the span of the t^0
    /// layers (the quotient by t of an actual module element).
    bool t_saturated = false;
};

/// Builder for the two-parameter family: expands G_q module actions into
/// t-series with nu = lambda/h coefficients and assembles graded slices.
class QSliceBuilder {
public:
    QSliceBuilder(UqAlgebra& alg, const GqBasis& gq, int depth_cap, int t_order);

    const VarSetPtr& nu_ring() const { return nu_ring_; }
    const QVerma& module() const { return qv_; }
    int t_order() const { return t_order_; }
    const std::vector<TOp>& generators() const { return gen_ops_; }
    /// q-land action matrices of the G_q basis (exact coefficients).
    const std::vector<QVerma::ActionMatrix>& q_generators() const { return q_gens_; }

    std::vector<QSlice> build_slices(int d_max);

    /// Second-bracket extraction for sl2: commutators of the three degree-1
    /// generators; t^0 part must match the classical bracket, the t^1 part at
    /// h = 0 (top nu-degree 2 piece) is compared against the E^F bivector
    /// bracket by the caller.
    struct BracketTable {
        // index pairs (i, j) over the G_q basis; entries are constant matrices
        std::vector<std::vector<RatMatrix>> t_part;   ///< nu^2 coefficient of the t^1 layer
        std::vector<std::vector<bool>> kks_ok;        ///< t^0 layer equals classical commutator
        int window_cols = 0;
    };
    BracketTable second_bracket_sl2(const Quantizer& classical) const;

private:
    TOp expand_action(const QVerma::ActionMatrix& am) const;
    TOp mul_tops(const TOp& a, const TOp& b) const;

    UqAlgebra& alg_;
    const GqBasis& gq_;
    QVerma qv_;
    int t_order_;
    VarSetPtr nu_ring_;
    QSeriesSpec spec_;
    std::vector<QVerma::ActionMatrix> q_gens_;
    std::vector<TOp> gen_ops_;
};

struct EquivarianceReport {
    int checks = 0;
    int failures = 0;
    bool all_exact() const { return failures == 0; }
};

/// Theorem-2.2 style equivariance: sum ad(u_(1))(A) ad(u_(2))(B) = ad(u)(AB)
/// for u in {E_i, F_i, K_i} and random A, B drawn from products of G_q
/// actions; exact in the q-land coefficient field.
EquivarianceReport equivariance_check(UqAlgebra& alg, const QSliceBuilder& builder, int pairs,
                                      uint64_t seed);

}  // namespace orbitq
