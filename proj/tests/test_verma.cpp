#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orbitq/verma.hpp"

using namespace orbitq;

namespace {

struct Sl2Fixture {
    RootSystem rs = build_root_system('A', 1);
    ChevalleyBasis cb = chevalley_constants(rs);
    ParabolicDatum pd = parabolic_split(rs, LeviDatum::make(rs, {}));
    VarSetPtr ring = VarSet::make({"l1", "h"});
    MultiPoly lam() const { return MultiPoly::variable(ring, 0); }
    MultiPoly aitch() const { return MultiPoly::variable(ring, 1); }
};

// Independent sl2 oracle: coefficient of F^{k-1} v0 in E F^k v0, via the
// recursion E F^k = F (E F^{k-1}) + H F^{k-1} from [E, F] = H. Returns the
// polynomial c_k with E F^k v0 = c_k F^{k-1} v0.
MultiPoly sl2_e_coeff_oracle(VarSetPtr ring, int k) {
    MultiPoly lam = MultiPoly::variable(ring, 0);
    MultiPoly c = MultiPoly::zero(ring);
    for (int j = 0; j <= k - 1; ++j)
        c += lam - MultiPoly::constant(ring, Rational(2 * j));
    return c;  // sum_{j<k} (lam - 2j) = k(lam - k + 1)
}

}  // namespace

TEST_CASE("verma basis enumeration") {
    Sl2Fixture fx;
    TruncatedVerma tv = verma_basis(fx.pd, 3);
    CHECK(tv.dim() == 4);  // v0, F, F^2, F^3
    CHECK(tv.depth == std::vector<int>{0, 1, 2, 3});
    CHECK(tv.basis[0].exps == std::vector<int>{0});

    RootSystem a2 = build_root_system('A', 2);
    ParabolicDatum pd2 = parabolic_split(a2, LeviDatum::make(a2, {0}));
    TruncatedVerma tv2 = verma_basis(pd2, 2);
    // monomials f_{a2}^a f_{a1+a2}^b with a + 2b <= 2: (0,0),(1,0),(2,0),(0,1)
    CHECK(tv2.dim() == 4);

    TruncatedVerma tv0 = verma_basis(pd2, 0);
    CHECK(tv0.dim() == 1);
}

TEST_CASE("sl2 generator actions match the closed form") {
    Sl2Fixture fx;
    int D = 6;
    TruncatedVerma tv = verma_basis(fx.pd, D);
    VermaActions act(fx.cb, tv, fx.ring);

    Matrix<MultiPoly> E = act.generator_action(fx.cb.e_index(0)).dense(tv.dim(), fx.ring);
    Matrix<MultiPoly> H = act.generator_action(fx.cb.h_index(0)).dense(tv.dim(), fx.ring);
    Matrix<MultiPoly> F = act.generator_action(fx.cb.f_index(0)).dense(tv.dim(), fx.ring);

    for (int k = 0; k <= D; ++k) {
        // phi(H) F^k v0 = (lam - 2k) F^k v0
        CHECK(H.at(k, k) == fx.lam() - MultiPoly::constant(fx.ring, Rational(2 * k)));
        // phi(E) F^k v0 = k(lam - k + 1) F^{k-1} v0 (oracle: independent recursion)
        if (k >= 1) {
            CHECK(E.at(k - 1, k) == sl2_e_coeff_oracle(fx.ring, k));
            MultiPoly closed =
                (fx.lam() - MultiPoly::constant(fx.ring, Rational(k - 1))) * Rational(k);
            CHECK(E.at(k - 1, k) == closed);
        }
        // phi(F) F^k v0 = F^{k+1} v0, truncated at k = D
        if (k + 1 <= D) CHECK(F.at(k + 1, k) == MultiPoly::constant(fx.ring, Rational(1)));
    }
    GeneratorAction gf = act.generator_action(fx.cb.f_index(0));
    CHECK(gf.climb == 1);
    CHECK(gf.overflow_depth == D - 1);
}

TEST_CASE("homomorphism identity on trusted depths") {
    // phi(x)phi(y) - phi(y)phi(x) = phi([x,y]) for all basis pairs, checked on
    // columns whose depth leaves room for both climbs.
    for (auto setup : {std::pair<std::string, std::vector<int>>{"A1", {}},
                       {"A2", {0}},
                       {"A2", {}}}) {
        RootSystem rs = build_root_system('A', setup.first == "A1" ? 1 : 2);
        ChevalleyBasis cb = chevalley_constants(rs);
        ParabolicDatum pd = parabolic_split(rs, LeviDatum::make(rs, setup.second));
        int D = 6;
        TruncatedVerma tv = verma_basis(pd, D);
        std::vector<std::string> names;
        for (int j = 0; j < pd.levi.m(); ++j) names.push_back("l" + std::to_string(j + 1));
        VarSetPtr ring = VarSet::make(names);
        VermaActions act(cb, tv, ring);

        std::vector<Matrix<MultiPoly>> mats;
        std::vector<int> climbs;
        for (int x = 0; x < cb.dim(); ++x) {
            GeneratorAction ga = act.generator_action(x);
            mats.push_back(ga.dense(tv.dim(), ring));
            climbs.push_back(ga.climb);
        }
        for (int x = 0; x < cb.dim(); ++x) {
            for (int y = x + 1; y < cb.dim(); ++y) {
                Matrix<MultiPoly> lhs = mats[x] * mats[y] - mats[y] * mats[x];
                Matrix<MultiPoly> rhs(tv.dim(), tv.dim(), MultiPoly::zero(ring));
                for (const auto& [b, c] : cb.bracket(x, y))
                    rhs = rhs + mats[b].scaled(MultiPoly::constant(ring, Rational(c)));
                int window = D - climbs[x] - climbs[y];
                int cols = tv.count_depth_at_most(window);
                for (int i = 0; i < tv.dim(); ++i)
                    for (int j = 0; j < cols; ++j) REQUIRE(lhs.at(i, j) == rhs.at(i, j));
            }
        }
    }
}

TEST_CASE("weight compatibility of generator actions") {
    RootSystem rs = build_root_system('A', 2);
    ChevalleyBasis cb = chevalley_constants(rs);
    ParabolicDatum pd = parabolic_split(rs, LeviDatum::make(rs, {0}));
    TruncatedVerma tv = verma_basis(pd, 5);
    VarSetPtr ring = VarSet::make({"l1"});
    VermaActions act(cb, tv, ring);
    for (int x = 0; x < cb.dim(); ++x) {
        Root wx = cb.weight_of(x);
        GeneratorAction ga = act.generator_action(x);
        for (const auto& [r, c, p] : ga.triplets) {
            for (int i = 0; i < rs.rank; ++i)
                CHECK(tv.weight[r][i] == tv.weight[c][i] + wx[i]);
        }
    }
}

TEST_CASE("rescaled action: sl2 values and homogeneity") {
    Sl2Fixture fx;
    int D = 5;
    TruncatedVerma tv = verma_basis(fx.pd, D);
    VermaActions act(fx.cb, tv, fx.ring);
    int hvar = 1;

    Matrix<MultiPoly> E = act.rescaled_action(fx.cb.e_index(0), hvar).dense(tv.dim(), fx.ring);
    Matrix<MultiPoly> H = act.rescaled_action(fx.cb.h_index(0), hvar).dense(tv.dim(), fx.ring);
    Matrix<MultiPoly> F = act.rescaled_action(fx.cb.f_index(0), hvar).dense(tv.dim(), fx.ring);

    MultiPoly lam = fx.lam(), h = fx.aitch();
    for (int k = 0; k <= D; ++k) {
        // (h phi)(E) F^k = k (lam - (k-1) h) F^{k-1}
        if (k >= 1)
            CHECK(E.at(k - 1, k) == (lam - h * Rational(k - 1)) * Rational(k));
        // (h phi)(H) F^k = (lam - 2k h) F^k
        CHECK(H.at(k, k) == lam - h * Rational(2 * k));
        if (k + 1 <= D) CHECK(F.at(k + 1, k) == h);
    }
    // entries are homogeneous of total (lambda, h)-degree exactly 1
    for (int x = 0; x < fx.cb.dim(); ++x) {
        GeneratorAction ga = act.rescaled_action(x, hvar);
        for (const auto& [r, c, p] : ga.triplets) {
            int d = 0;
            CHECK(p.homogeneous({1, 1}, &d));
            CHECK(d == 1);
        }
    }
}

TEST_CASE("rescaled commutator identity (1/h)[(h phi)E,(h phi)F] = (h phi)H") {
    Sl2Fixture fx;
    int D = 6;
    TruncatedVerma tv = verma_basis(fx.pd, D);
    VermaActions act(fx.cb, tv, fx.ring);
    Matrix<MultiPoly> E = act.rescaled_action(fx.cb.e_index(0), 1).dense(tv.dim(), fx.ring);
    Matrix<MultiPoly> H = act.rescaled_action(fx.cb.h_index(0), 1).dense(tv.dim(), fx.ring);
    Matrix<MultiPoly> F = act.rescaled_action(fx.cb.f_index(0), 1).dense(tv.dim(), fx.ring);
    Matrix<MultiPoly> comm = E * F - F * E;
    MultiPoly h = fx.aitch();
    int cols = tv.count_depth_at_most(D - 1);
    for (int i = 0; i < tv.dim(); ++i)
        for (int j = 0; j < cols; ++j)
            CHECK(comm.at(i, j) == h * H.at(i, j));
}

TEST_CASE("shapovalov pairing for sl2: k! lam (lam-1) ... (lam-k+1)") {
    Sl2Fixture fx;
    auto levels = shapovalov_rank(fx.cb, fx.pd, 5);
    REQUIRE(levels.size() == 6);
    CHECK(levels[0].generic_rank == 1);  // depth 0: empty word pairing = 1 (rank of [[1]])
    VarSetPtr ring = levels[1].pairing.at(0, 0).vars();
    MultiPoly lam = MultiPoly::variable(ring, 0);
    Rational kfact(1);
    MultiPoly prod = MultiPoly::constant(ring, Rational(1));
    for (int k = 1; k <= 5; ++k) {
        kfact *= Rational(k);
        prod = prod * (lam - MultiPoly::constant(ring, Rational(k - 1)));
        REQUIRE(levels[k].pairing.rows() == 1);
        CHECK(levels[k].pairing.at(0, 0) == prod * kfact);
        CHECK(levels[k].generic_rank == 1);
        CHECK(levels[k].full);
        // vanishing locus: integer roots 0..k-1
        REQUIRE(levels[k].block_dets.size() == 1);
        const auto& roots = levels[k].block_dets[0].rational_roots;
        REQUIRE(roots.size() == static_cast<size_t>(k));
        for (const auto& [r, mult] : roots) {
            CHECK(mult == 1);
            CHECK(r.is_integer());
            long v = r.to_long();
            CHECK(v >= 0);
            CHECK(v <= k - 1);
        }
        CHECK(levels[k].block_dets[0].cofactor.is_constant());
    }
    // depth 1 determinant is exactly lam
    CHECK(levels[1].block_dets[0].det == lam);
}

TEST_CASE("shapovalov generic full rank for A2, S={alpha1}, depth <= 3") {
    RootSystem rs = build_root_system('A', 2);
    ChevalleyBasis cb = chevalley_constants(rs);
    ParabolicDatum pd = parabolic_split(rs, LeviDatum::make(rs, {0}));
    auto levels = shapovalov_rank(cb, pd, 3);
    for (const auto& lv : levels) {
        CHECK(lv.full);
        // vanishing locus is a nonempty set of rational lambda values past depth 0
        for (const auto& bd : lv.block_dets) {
            CHECK_FALSE(bd.det.is_zero());
            if (lv.depth > 0) {
                bool has_factor = !bd.rational_roots.empty() || !bd.cofactor.is_constant();
                CHECK(has_factor);
            }
        }
    }
}

TEST_CASE("depth-0 pairing is trivially rank 1") {
    RootSystem rs = build_root_system('B', 2);
    ChevalleyBasis cb = chevalley_constants(rs);
    ParabolicDatum pd = parabolic_split(rs, LeviDatum::make(rs, {1}));
    auto levels = shapovalov_rank(cb, pd, 0);
    REQUIRE(levels.size() == 1);
    CHECK(levels[0].generic_rank == 1);
}
