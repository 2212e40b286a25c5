#pragma once

#include "orbitq/classical.hpp"
#include "orbitq/matrix.hpp"
#include "orbitq/verma.hpp"

#include <optional>
#include <string>
#include <vector>

namespace orbitq {

/// Raised when a verification cannot conclude within the depth budget; the
/// CLI maps this to its own exit code, distinct from failure.
struct Inconclusive : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One spanning operator of a graded slice: matrix over Q[lambda, h] plus
/// truncation bookkeeping. Columns from basis vectors deeper than `trust`
/// may have been cut off by the depth cap; `climb` bounds the depth increase.
struct SliceOp {
    Matrix<MultiPoly> mat;
    int climb = 0;
    int trust = 0;
};

/// Degree-d component of A_{lambda,h}: spanning operators, a maximal
/// Q-independent subset, and the rank (= graded dimension once depth-stable).
struct GradedSlice {
    int degree = 0;
    std::vector<SliceOp> spanning;
    std::vector<int> basis_indices;
    size_t rank = 0;
    int window = 0;  ///< depth window the rank was computed on
};

struct HilbertTable {
    std::string algebra;
    std::vector<int> levi;
    int d_max = 0;
    int depth_used = 0;
    bool stabilized = false;
    std::vector<size_t> ranks;
    std::vector<std::pair<int, std::vector<size_t>>> evidence;  ///< (depth, ranks)
};

struct CommutativityReport {
    int pairs_checked = 0;
    int nonzero_residuals = 0;
    std::vector<std::pair<int, int>> offenders;
    bool all_zero() const { return nonzero_residuals == 0; }
};

struct FlatnessDegree {
    int degree = 0;
    size_t generic_rank = 0;
    std::vector<size_t> specialized_ranks;
    std::vector<std::vector<Rational>> points;  ///< (lambda..., h) per trial
    bool drop() const {
        for (size_t r : specialized_ranks)
            if (r != generic_rank) return true;
        return false;
    }
};

struct FlatnessReport {
    std::vector<FlatnessDegree> degrees;
    bool any_drop() const {
        for (const auto& d : degrees)
            if (d.drop()) return true;
        return false;
    }
};

struct IsotypicRow {
    Weight mu;
    long n_observed = 0;
    long ell = 0;
    int first_degree = -1;  ///< first filtration degree where the component appears
};

struct IsotypicReport {
    std::vector<Rational> lambda0;
    Rational h0;
    int d_max = 0;
    std::vector<IsotypicRow> rows;
    std::vector<size_t> filtered_dims;  ///< dim of the filtered span per degree 0..d_max
};

/// Constructs the graded algebra A_{lambda,h} degree by degree inside
/// operators on the truncated Verma module and runs the flatness /
/// commutativity / multiplicity verifications.
class Quantizer {
public:
    Quantizer(const ChevalleyBasis& cb, const ParabolicDatum& pd, int depth_cap);

    const VarSetPtr& ring() const { return ring_; }
    const TruncatedVerma& verma() const { return tv_; }
    const ChevalleyBasis& chevalley() const { return cb_; }
    int h_var() const { return h_var_; }
    int lambda_count() const { return m_; }
    const SliceOp& generator_op(int basis_index) const { return gen_ops_[basis_index]; }

    /// Slices 0..d_max; spanning(d) = gens * basis(d-1) + lambda_i * basis(d-1)
    /// + h * basis(d-1). Throws Inconclusive when the depth budget is exhausted.
    std::vector<GradedSlice> build_slices(int d_max);

    /// (1/h)[h phi X, h phi Y] = h phi([X, Y]) for every unordered generator
    /// pair, verified symbolically on the trusted window.
    CommutativityReport commutativity_mod_h() const;

    /// h-constant term of the v_0-coefficient of phi_{lambda,h}(sym(f)) v_0,
    /// as a polynomial in lambda (for f a monomial given by basis indices).
    MultiPoly leading_term_v0(const std::vector<int>& monomial) const;

    /// Classical evaluation of the same symmetrized monomial at the base
    /// point of Lambda_L (the kernel-argument comparison value).
    MultiPoly classical_leading_term(const std::vector<int>& monomial) const;

    /// leading_term_v0 evaluated at a rational lambda assignment.
    Rational leading_term_eval(const std::vector<int>& monomial,
                               const std::vector<Rational>& lambda) const;

    /// Per-degree generic rank over Frac(Q[lambda, h]) vs specialized ranks at
    /// `trials` seeded random points of Lambda_L x (Q \ {0}); extra explicit
    /// points may be appended (findings, not failures).
    FlatnessReport flatness_evidence(const std::vector<GradedSlice>& slices, int trials,
                                     uint64_t seed,
                                     const std::vector<std::vector<Rational>>& extra_points = {}) const;

    /// Specialized filtered span dims and isotypic decomposition under the
    /// adjoint action at (lambda0, h0 != 0).
    IsotypicReport multiplicity_check(const std::vector<Rational>& lambda0, const Rational& h0,
                                      int d_max) const;

    /// Dimensions of the specialized filtered span per degree (no isotypic
    /// analysis); cheaper when only fiber dimensions are wanted.
    std::vector<size_t> specialized_filtered_dims(const std::vector<Rational>& lambda0,
                                                  const Rational& h0, int d_max) const;

    /// Flattened coefficient rows of a set of slice ops on a column window
    /// (exposed for cross-slice membership checks in tests).
    static RatMatrix flatten(const std::vector<const Matrix<MultiPoly>*>& ops, int cols);

    /// Depth policy: start at 2 * d_max * max height, raise by 2 until two
    /// consecutive increments leave all ranks unchanged; bounded budget, with
    /// an honest non-stabilized verdict when exceeded.
    static HilbertTable hilbert_function(const ChevalleyBasis& cb, const ParabolicDatum& pd,
                                         int d_max, int extra_depth_budget = 12);

    VarSetPtr lambda_ring() const;

private:
    const ChevalleyBasis& cb_;
    ParabolicDatum pd_;
    int m_;
    VarSetPtr ring_;
    int h_var_;
    TruncatedVerma tv_;
    mutable VermaActions actions_;
    std::vector<SliceOp> gen_ops_;   ///< rescaled generators, one per basis element
    std::vector<MultiPoly> lambda_polys_;
    MultiPoly h_poly_;
};

}  // namespace orbitq
