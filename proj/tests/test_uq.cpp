#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orbitq/rng.hpp"
#include "orbitq/uq.hpp"

using namespace orbitq;

namespace {

UqElement random_word(UqAlgebra& alg, Rng& rng, int len) {
    UqElement x = alg.one();
    int r = alg.rs().rank;
    for (int t = 0; t < len; ++t) {
        long pick = rng.uniform(0, 3 * r - 1);
        UqElement g;
        if (pick < r)
            g = alg.E(static_cast<int>(pick));
        else if (pick < 2 * r)
            g = alg.F(static_cast<int>(pick - r));
        else
            g = alg.Ki(static_cast<int>(pick - 2 * r), rng.uniform(0, 1) ? 1 : -1);
        x = alg.mul(x, g);
    }
    return x;
}

bool tensor_equal(const UqAlgebra::Tensor& a, const UqAlgebra::Tensor& b) {
    UqAlgebra::Tensor diff = a;
    for (const auto& [p, c] : b) {
        auto it = diff.find(p);
        if (it == diff.end())
            diff.emplace(p, FractionElement::zero(c.vars()) - c);
        else {
            it->second -= c;
            if (it->second.is_zero()) diff.erase(it);
        }
    }
    for (const auto& [p, c] : diff)
        if (!c.is_zero()) return false;
    return true;
}

}  // namespace

TEST_CASE("sl2 defining relations through the normal form") {
    RootSystem rs = build_root_system('A', 1);
    UqAlgebra alg(rs, 1);
    UqElement E = alg.E(0), F = alg.F(0), K = alg.Ki(0, 1), Kinv = alg.Ki(0, -1);

    // K E K^-1 = q^2 E
    UqElement lhs = alg.mul(alg.mul(K, E), Kinv);
    UqElement rhs = alg.scale(E, alg.q_power(2));
    CHECK(alg.sub(lhs, rhs).is_zero());

    // E F - F E = (K - K^-1)/(q - q^-1)
    UqElement comm = alg.sub(alg.mul(E, F), alg.mul(F, E));
    FractionElement den(MultiPoly::variable(alg.coeff_ring(), 0, 1) -
                        MultiPoly::variable(alg.coeff_ring(), 0, -1));
    UqElement expect = alg.scale(alg.sub(K, Kinv), alg.coeff_one() / den);
    CHECK(alg.sub(comm, expect).is_zero());

    // K K^-1 = 1
    CHECK(alg.sub(alg.mul(K, Kinv), alg.one()).is_zero());
}

TEST_CASE("A2 q-Serre relations rewrite to zero") {
    RootSystem rs = build_root_system('A', 2);
    UqAlgebra alg(rs, 2);
    FractionElement qq = alg.q_power(1) + alg.q_power(-1);
    for (int i = 0; i < 2; ++i) {
        int j = 1 - i;
        UqElement Ei = alg.E(i), Ej = alg.E(j);
        UqElement serre = alg.add(
            alg.sub(alg.mul(alg.mul(Ei, Ei), Ej), alg.scale(alg.mul(alg.mul(Ei, Ej), Ei), qq)),
            alg.mul(Ej, alg.mul(Ei, Ei)));
        CHECK(serre.is_zero());
        UqElement Fi = alg.F(i), Fj = alg.F(j);
        UqElement fserre = alg.add(
            alg.sub(alg.mul(alg.mul(Fi, Fi), Fj), alg.scale(alg.mul(alg.mul(Fi, Fj), Fi), qq)),
            alg.mul(Fj, alg.mul(Fi, Fi)));
        CHECK(fserre.is_zero());
    }
}

TEST_CASE("multiplication is associative on random words (A1 and A2)") {
    for (int rank : {1, 2}) {
        RootSystem rs = build_root_system('A', rank);
        UqAlgebra alg(rs, rank);
        Rng rng(31 + rank);
        for (int trial = 0; trial < 6; ++trial) {
            UqElement a = random_word(alg, rng, 2);
            UqElement b = random_word(alg, rng, 2);
            UqElement c = random_word(alg, rng, 2);
            UqElement l = alg.mul(alg.mul(a, b), c);
            UqElement r = alg.mul(a, alg.mul(b, c));
            CHECK(alg.sub(l, r).is_zero());
        }
    }
}

TEST_CASE("hopf axioms on generators and short random words") {
    for (int rank : {1, 2}) {
        RootSystem rs = build_root_system('A', rank);
        UqAlgebra alg(rs, rank);

        std::vector<UqElement> gens;
        for (int i = 0; i < rank; ++i) {
            gens.push_back(alg.E(i));
            gens.push_back(alg.F(i));
            gens.push_back(alg.Ki(i, 1));
        }

        // Delta is an algebra map on the defining relations: check on E_i F_j
        // commutators directly by comparing Delta(x y) with Delta(x) Delta(y).
        Rng rng(7 + rank);
        std::vector<UqElement> samples = gens;
        for (int t = 0; t < 3; ++t) samples.push_back(random_word(alg, rng, 2));
        for (const auto& x : samples) {
            for (const auto& y : gens) {
                auto lhs = alg.coproduct(alg.mul(x, y));
                auto rhs = alg.tensor_mul(alg.coproduct(x), alg.coproduct(y));
                CHECK(tensor_equal(lhs, rhs));
            }
        }

        // counit and antipode axioms on the samples:
        // m(S x id)Delta(x) = eps(x) 1 = m(id x S)Delta(x)
        for (const auto& x : samples) {
            UqElement left, right;
            for (const auto& [p, c] : alg.coproduct(x)) {
                UqElement u1{{{p.first, alg.coeff_one()}}};
                UqElement u2{{{p.second, alg.coeff_one()}}};
                left = alg.add(left, alg.scale(alg.mul(alg.antipode(u1), u2), c));
                right = alg.add(right, alg.scale(alg.mul(u1, alg.antipode(u2)), c));
            }
            UqElement expect = alg.scale(alg.one(), alg.counit(x));
            CHECK(alg.sub(left, expect).is_zero());
            CHECK(alg.sub(right, expect).is_zero());
        }

        // coassociativity on generators: (Delta x id)Delta = (id x Delta)Delta
        // checked through the equivalent statement on elements of the form
        // Delta(x): both refinements applied to generator coproducts agree.
        for (const auto& g : gens) {
            auto d = alg.coproduct(g);
            // left refinement: apply Delta to the first leg
            std::map<std::tuple<UqMono, UqMono, UqMono>, FractionElement> l3, r3;
            for (const auto& [p, c] : d) {
                UqElement leg1{{{p.first, alg.coeff_one()}}};
                for (const auto& [p2, c2] : alg.coproduct(leg1)) {
                    auto key = std::make_tuple(p2.first, p2.second, p.second);
                    auto it = l3.find(key);
                    FractionElement v = c * c2;
                    if (it == l3.end())
                        l3.emplace(key, v);
                    else
                        it->second += v;
                }
                UqElement leg2{{{p.second, alg.coeff_one()}}};
                for (const auto& [p2, c2] : alg.coproduct(leg2)) {
                    auto key = std::make_tuple(p.first, p2.first, p2.second);
                    auto it = r3.find(key);
                    FractionElement v = c * c2;
                    if (it == r3.end())
                        r3.emplace(key, v);
                    else
                        it->second += v;
                }
            }
            for (const auto& [k, v] : r3) {
                auto it = l3.find(k);
                if (it == l3.end())
                    CHECK(v.is_zero());
                else {
                    CHECK((it->second - v).is_zero());
                    l3.erase(it);
                }
            }
            for (const auto& [k, v] : l3) CHECK(v.is_zero());
        }
    }
}

TEST_CASE("ad is multiplicative: ad(uv) = ad(u) ad(v) on random pairs") {
    RootSystem rs = build_root_system('A', 1);
    UqAlgebra alg(rs, 1);
    Rng rng(11);
    for (int trial = 0; trial < 5; ++trial) {
        UqElement u = random_word(alg, rng, 2);
        UqElement v = random_word(alg, rng, 1);
        UqElement x = random_word(alg, rng, 2);
        UqElement lhs = alg.ad(alg.mul(u, v), x);
        UqElement rhs = alg.ad(u, alg.ad(v, x));
        CHECK(alg.sub(lhs, rhs).is_zero());
    }
    // ad by generators agrees with the coproduct-based ad
    for (int g = 0; g < 2; ++g) {
        UqElement x = random_word(alg, rng, 2);
        UqElement via_gen = alg.ad_generator(g, x);
        UqElement via_cop = alg.ad(g == 0 ? alg.E(0) : alg.F(0), x);
        CHECK(alg.sub(via_gen, via_cop).is_zero());
    }
    // ad(E)(1) = eps(E) 1 = 0
    CHECK(alg.ad(alg.E(0), alg.one()).is_zero());
    // ad(K)(x) = K x K^-1
    UqElement x = random_word(alg, rng, 2);
    CHECK(alg.sub(alg.ad(alg.Ki(0, 1), x),
                  alg.mul(alg.Ki(0, 1), alg.mul(x, alg.Ki(0, -1)))).is_zero());
}

TEST_CASE("quantized Verma module action: [k][lam-k+1] oracle") {
    RootSystem rs = build_root_system('A', 1);
    UqAlgebra alg(rs, 1);
    QVerma qv(alg, 6);
    CHECK(qv.dim() == 7);

    auto E = qv.action(alg.E(0));
    auto F = qv.action(alg.F(0));
    auto K = qv.action(alg.Ki(0, 1));

    VarSetPtr ring = alg.coeff_ring();
    MultiPoly q = MultiPoly::variable(ring, 0);
    MultiPoly L = MultiPoly::variable(ring, 1);
    auto qpow = [&](int n) { return MultiPoly::variable(ring, 0, n); };

    for (int k = 0; k <= 6; ++k) {
        // K F^k v0 = L q^{-2k} F^k v0
        FractionElement kexp(L * qpow(-2 * k));
        CHECK(K.mat.at(k, k) == kexp);
        // F F^k = F^{k+1}
        if (k + 1 <= 6) CHECK(F.mat.at(k + 1, k) == alg.coeff_one());
        // E F^k = [k](L q^{-(k-1)} - L^-1 q^{k-1})/(q - q^-1) F^{k-1}
        if (k >= 1) {
            MultiPoly qn(ring), qd = qpow(1) - qpow(-1);
            for (int j = 0; j < k; ++j) qn += qpow(k - 1 - 2 * j);  // [k]_q * (q - q^-1) / ...
            FractionElement bracket_k(qn);  // [k]_q as a Laurent polynomial
            MultiPoly Li = MultiPoly::variable(ring, 1, -1);
            FractionElement weight(L * qpow(-(k - 1)) - Li * qpow(k - 1), qd);
            CHECK(E.mat.at(k - 1, k) == bracket_k * weight);
        }
    }
    CHECK(F.climb == 1);
    CHECK(F.trust == 5);
}

TEST_CASE("find_Gq for sl2: 3-dimensional, ad-closed, classical limits E, H, F") {
    RootSystem rs = build_root_system('A', 1);
    UqAlgebra alg(rs, 1);
    GqBasis gq = find_Gq(alg);
    CHECK(gq.elements.size() == 3);
    CHECK(gq.closure_dim == 4);  // End(V_q,omega) under the K_{-2 mu} anchor

    // limits are exactly the Chevalley basis: keys (fexp, hexp, eexp)
    ClassicalUElement Ecl, Hcl, Fcl;
    Ecl.terms.emplace(std::vector<int>{0, 0, 1}, Rational(1));
    Hcl.terms.emplace(std::vector<int>{0, 1, 0}, Rational(1));
    Fcl.terms.emplace(std::vector<int>{1, 0, 0}, Rational(1));
    int seenE = 0, seenH = 0, seenF = 0;
    for (const auto& lim : gq.limits) {
        if (lim == Ecl) ++seenE;
        if (lim == Hcl) ++seenH;
        if (lim == Fcl) ++seenF;
    }
    CHECK(seenE == 1);
    CHECK(seenH == 1);
    CHECK(seenF == 1);

    // ad-closed: images of basis elements under every ad-generator stay inside
    // (checked via another closure round adding nothing)
    for (const auto& x : gq.elements) {
        for (int g = 0; g < 2; ++g) {
            UqElement y = alg.ad_generator(g, x);
            // y must be a combination of gq.elements: solve the linear system
            std::map<UqMono, size_t> coords;
            for (const auto& e : gq.elements)
                for (const auto& [m, c] : e.terms) coords.emplace(m, 0);
            for (const auto& [m, c] : y.terms) coords.emplace(m, 0);
            size_t nr = 0;
            for (auto& [m, i] : coords) i = nr++;
            Matrix<FractionElement> sys(nr, gq.elements.size(),
                                        FractionElement::zero(alg.coeff_ring()));
            for (size_t k = 0; k < gq.elements.size(); ++k)
                for (const auto& [m, c] : gq.elements[k].terms) sys.at(coords.at(m), k) = c;
            // augmented solve: y in span <=> rank unchanged
            Matrix<FractionElement> aug(nr, gq.elements.size() + 1,
                                        FractionElement::zero(alg.coeff_ring()));
            for (size_t i = 0; i < nr; ++i)
                for (size_t k = 0; k < gq.elements.size(); ++k) aug.at(i, k) = sys.at(i, k);
            for (const auto& [m, c] : y.terms) aug.at(coords.at(m), gq.elements.size()) = c;
            auto ker = kernel_basis_field(aug, FractionElement::zero(alg.coeff_ring()),
                                          alg.coeff_one());
            bool in_span = false;
            for (const auto& kv : ker)
                if (!kv.back().is_zero()) in_span = true;
            if (y.is_zero()) in_span = true;
            CHECK(in_span);
        }
    }

    // paper-verbatim anchor -4 mu also yields the copy (closure is End(V_alpha))
    GqOptions o4;
    o4.lattice_scale = -4;
    GqBasis gq4 = find_Gq(alg, o4);
    CHECK(gq4.elements.size() == 3);
    CHECK(gq4.closure_dim == 9);
}

TEST_CASE("find_Gq for A2: 8-dimensional ad-closed copy") {
    RootSystem rs = build_root_system('A', 2);
    UqAlgebra alg(rs, 2);
    GqBasis gq = find_Gq(alg);
    CHECK(gq.elements.size() == 8);
    CHECK(gq.closure_dim == 64);  // End(V_q,rho)
    // limits: degree-1 classical elements spanning g (2 Cartan + 6 root vectors)
    int cartan = 0, roots = 0;
    for (const auto& lim : gq.limits) {
        REQUIRE(lim.terms.size() == 1);
        const auto& key = lim.terms.begin()->first;
        int total = 0;
        for (int v : key) total += std::abs(v);
        CHECK(total == 1);
        bool is_h = key[3] != 0 || key[4] != 0;  // hexp slots for rank 2 (fexp size 3)
        if (is_h)
            ++cartan;
        else
            ++roots;
    }
    CHECK(cartan == 2);
    CHECK(roots == 6);
}

TEST_CASE("build_q_slice for sl2: t-order 0 reproduces the classical ranks") {
    RootSystem rs = build_root_system('A', 1);
    UqAlgebra alg(rs, 1);
    GqBasis gq = find_Gq(alg);
    QSliceBuilder builder(alg, gq, 8, 2);
    auto slices = builder.build_slices(2);
    REQUIRE(slices.size() == 3);
    // t^0 layer = the classical construction
    CHECK(slices[0].ranks_per_order[0] == 1);
    CHECK(slices[1].ranks_per_order[0] == 5);
    CHECK(slices[2].ranks_per_order[0] == 14);
    // two-parameter flatness evidence: vanishing-to-order-j combinations have
    // their next t-layer inside the classical span (t-torsion-free family)
    for (const auto& s : slices) CHECK(s.t_saturated);
    // the t-direction adds no directions beyond the first-order corrections
    for (const auto& s : slices) {
        REQUIRE(s.ranks_per_order.size() == 3);
        CHECK(s.ranks_per_order[1] == s.ranks_per_order[2]);
    }
}

TEST_CASE("equivariance of multiplication (Theorem-style identity)") {
    RootSystem rs = build_root_system('A', 1);
    UqAlgebra alg(rs, 1);
    GqBasis gq = find_Gq(alg);
    QSliceBuilder builder(alg, gq, 8, 2);
    EquivarianceReport rep = equivariance_check(alg, builder, 20, 0);
    CHECK(rep.checks == 60);
    CHECK(rep.all_exact());
}

TEST_CASE("second bracket for sl2: antisymmetric, proportional to the E^F bivector") {
    RootSystem rs = build_root_system('A', 1);
    ChevalleyBasis cb = chevalley_constants(rs);
    ParabolicDatum pd = parabolic_split(rs, LeviDatum::make(rs, {}));
    Quantizer classical(cb, pd, 8);

    UqAlgebra alg(rs, 1);
    GqBasis gq = find_Gq(alg);
    QSliceBuilder builder(alg, gq, 8, 2);
    auto tbl = builder.second_bracket_sl2(classical);

    size_t n = gq.elements.size();
    // KKS layer: t^0 part of every commutator equals the classical commutator
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) CHECK(tbl.kks_ok[a][b]);
    // antisymmetry of the t-part
    for (size_t a = 0; a < n; ++a)
        for (size_t b = 0; b < n; ++b) {
            RatMatrix sum = tbl.t_part[a][b] + tbl.t_part[b][a];
            CHECK(sum.is_zero());
        }

    // bivector side: quantized symbols of {X,Y}_r for r = E ^ F, compared as
    // the nu^2 layer of symmetrized products
    SymAlgebra sa(cb);
    int Ei = cb.e_index(0), Fi = cb.f_index(0), Hi = cb.h_index(0);
    // map G_q basis index -> classical basis index through the limits
    std::vector<int> cls(n);
    for (size_t k = 0; k < n; ++k) {
        const auto& key = gq.limits[k].terms.begin()->first;
        cls[k] = key[0] == 1 ? Fi : (key[1] == 1 ? Hi : Ei);
    }
    auto nu_sym = [&](const MultiPoly& s2) {
        // quantize a degree-2 symbol: sum c * sym(g_a g_b), nu^2 layer
        int dim = classical.verma().dim();
        Matrix<MultiPoly> acc(dim, dim, MultiPoly::zero(builder.nu_ring()));
        for (const auto& [e, c] : s2.terms()) {
            std::vector<int> factors;
            for (size_t v = 0; v < e.size(); ++v)
                for (int rep = 0; rep < e[v]; ++rep) factors.push_back(static_cast<int>(v));
            REQUIRE(factors.size() == 2);
            const auto& ga = classical.generator_op(factors[0]).mat;
            const auto& gb = classical.generator_op(factors[1]).mat;
            Matrix<MultiPoly> sym = ga * gb + gb * ga;
            // substitute lambda -> nu, h -> 0 (nu^2 layer of the h-normalized
            // degree-2 entries = pure lambda^2 coefficients), halve
            for (int i = 0; i < dim; ++i)
                for (int j = 0; j < dim; ++j) {
                    for (const auto& [ee, cc] : sym.at(i, j).terms()) {
                        if (ee[1] != 0) continue;  // h exponent
                        MultiPoly::Expo e2(builder.nu_ring()->size(), 0);
                        e2[0] = ee[0];
                        acc.at(i, j) += MultiPoly::monomial(builder.nu_ring(), e2,
                                                            cc * c * Rational(1, 2));
                    }
                }
        }
        return acc;
    };

    bool scalar_found = false;
    Rational scalar(0);
    for (size_t a = 0; a < n; ++a) {
        for (size_t b = 0; b < n; ++b) {
            MultiPoly biv = sa.bivector_bracket_linear(Ei, Fi, cls[a], cls[b]);
            Matrix<MultiPoly> expect_nu = nu_sym(biv);
            // compare T_ab with scalar * (nu^2 coefficient of expect)
            RatMatrix expect(tbl.t_part[a][b].rows(), tbl.t_part[a][b].cols(), Rational(0));
            for (size_t i = 0; i < expect.rows(); ++i)
                for (size_t j = 0; j < expect.cols(); ++j) {
                    for (const auto& [ee, cc] : expect_nu.at(i, j).terms())
                        if (ee[0] == 2) expect.at(i, j) = cc;
                }
            // find/check the global scalar
            bool t_zero = tbl.t_part[a][b].is_zero();
            bool e_zero = expect.is_zero();
            if (t_zero && e_zero) continue;
            REQUIRE_FALSE(e_zero);
            if (!scalar_found) {
                // pick the first nonzero entry pair
                for (size_t i = 0; i < expect.rows() && !scalar_found; ++i)
                    for (size_t j = 0; j < expect.cols() && !scalar_found; ++j)
                        if (!expect.at(i, j).is_zero()) {
                            scalar = tbl.t_part[a][b].at(i, j) / expect.at(i, j);
                            scalar_found = true;
                        }
            }
            RatMatrix scaled = expect.scaled(scalar);
            CHECK((tbl.t_part[a][b] - scaled).is_zero());
        }
    }
    CHECK(scalar_found);
    CHECK_FALSE(scalar.is_zero());
}
