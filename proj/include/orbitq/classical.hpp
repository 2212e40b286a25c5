#pragma once

#include "orbitq/matrix.hpp"
#include "orbitq/multipoly.hpp"
#include "orbitq/rng.hpp"
#include "orbitq/rootsystem.hpp"

#include <map>
#include <vector>

namespace orbitq {

/// S(g) as polynomial functions on g*: one coordinate per Chevalley basis
/// element, in the basis order of ChevalleyBasis.
class SymAlgebra {
public:
    explicit SymAlgebra(const ChevalleyBasis& cb);

    const VarSetPtr& ring() const { return ring_; }
    MultiPoly coordinate(int basis_index) const { return MultiPoly::variable(ring_, basis_index); }

    /// KKS bracket: bilinear Leibniz extension of {x, y} = [x, y].
    MultiPoly kks_bracket(const MultiPoly& f, const MultiPoly& g) const;

    /// r-matrix style quadratic bracket for a bivector a^b (wedge):
    /// {X, Y}(xi) = <xi,[a,X]><xi,[b,Y]> - <xi,[b,X]><xi,[a,Y]> on linear X, Y.
    MultiPoly bivector_bracket_linear(int a, int b, int x, int y) const;

    /// Evaluates f at the base point of Lambda_L: the functional vanishing on
    /// all e's and f's with lambda(h_i) given by the orbit parameters.
    /// lambda_ring supplies the symbols lambda_1..lambda_m.
    MultiPoly evaluate_at_base_point(const MultiPoly& f, const LeviDatum& levi,
                                     VarSetPtr lambda_ring) const;

private:
    const ChevalleyBasis& cb_;
    VarSetPtr ring_;
};

/// Exact points of an adjoint orbit of sl_n: conjugates of a rational
/// diagonal matrix by integer matrices of determinant +-1.
struct OrbitSample {
    int n = 0;
    std::vector<Rational> eigenvalues;  ///< with multiplicity, length n, trace 0
    uint64_t seed = 0;
    std::vector<RatMatrix> points;
};

OrbitSample make_orbit_sample(const std::vector<Rational>& eigenvalues, int count, uint64_t seed);

/// Characteristic polynomial coefficients (monic, highest first) by exact
/// Faddeev-LeVerrier; used to validate orbit membership.
std::vector<Rational> char_poly(const RatMatrix& m);

/// dim F_{lambda0}^{<= d} via the rank of the exact evaluation matrix
/// (monomials of degree <= d) x (orbit points). Throws std::invalid_argument
/// when the sample has fewer points than monomials.
size_t orbit_filtered_dim(const ChevalleyBasis& cb, const OrbitSample& sample, int d);

/// Number of monomials of degree <= d in `vars` variables.
size_t monomial_count(int vars, int d);

/// Integral weights in fundamental-weight coordinates.
using Weight = std::vector<int>;

/// Weight multiplicities of the irreducible V_mu by Freudenthal recursion,
/// plus the Weyl-formula dimension.
struct WeightMultTable {
    Weight mu;
    long dim = 0;
    std::map<Weight, long> mult;  ///< dominant weights only; others via Weyl images
    long multiplicity(const RootSystem& rs, const Weight& w) const;
    long zero_weight_multiplicity() const;
};

WeightMultTable weight_multiplicities(const RootSystem& rs, const Weight& mu);

/// Multiplicity of the trivial L-representation in V_mu restricted to the
/// Levi L: alternating Weyl-group sum over W_L against the weight table.
long levi_invariant_dim(const RootSystem& rs, const LeviDatum& levi, const Weight& mu);

/// All dominant weights mu with dim V_mu <= cap (for report tables).
std::vector<Weight> dominant_weights_up_to(const RootSystem& rs, long dim_cap);

}  // namespace orbitq
