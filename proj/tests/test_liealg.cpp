#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "orbitq/rootsystem.hpp"

#include <nlohmann/json.hpp>

using namespace orbitq;

namespace {

// Bracket of two sparse basis vectors through the structure-constant table.
std::vector<long> bracket_vec(const ChevalleyBasis& cb, const std::vector<long>& x,
                              const std::vector<long>& y) {
    std::vector<long> out(cb.dim(), 0);
    for (int i = 0; i < cb.dim(); ++i) {
        if (x[i] == 0) continue;
        for (int j = 0; j < cb.dim(); ++j) {
            if (y[j] == 0 || i == j) continue;
            for (const auto& [k, c] : cb.bracket(i, j)) out[k] += x[i] * y[j] * c;
        }
    }
    return out;
}

std::vector<long> unit_vec(const ChevalleyBasis& cb, int idx) {
    std::vector<long> v(cb.dim(), 0);
    v[idx] = 1;
    return v;
}

void check_jacobi_all_triples(const ChevalleyBasis& cb) {
    int n = cb.dim();
    for (int i = 0; i < n; ++i) {
        auto vi = unit_vec(cb, i);
        for (int j = i + 1; j < n; ++j) {
            auto vj = unit_vec(cb, j);
            for (int k = j + 1; k < n; ++k) {
                auto vk = unit_vec(cb, k);
                auto t1 = bracket_vec(cb, vi, bracket_vec(cb, vj, vk));
                auto t2 = bracket_vec(cb, vj, bracket_vec(cb, vk, vi));
                auto t3 = bracket_vec(cb, vk, bracket_vec(cb, vi, vj));
                for (int b = 0; b < n; ++b) REQUIRE(t1[b] + t2[b] + t3[b] == 0);
            }
        }
    }
}

}  // namespace

TEST_CASE("root system A1") {
    RootSystem rs = build_root_system('A', 1);
    CHECK(rs.cartan == std::vector<std::vector<int>>{{2}});
    CHECK(rs.num_positive() == 1);
    CHECK(rs.d == std::vector<int>{1});
}

TEST_CASE("root system A2") {
    RootSystem rs = build_root_system('A', 2);
    CHECK(rs.num_positive() == 3);
    CHECK(rs.positive_roots == std::vector<Root>{{0, 1}, {1, 0}, {1, 1}});
}

TEST_CASE("root system B2") {
    RootSystem rs = build_root_system('B', 2);
    CHECK(rs.num_positive() == 4);
    CHECK(rs.d == std::vector<int>{2, 1});
    // d_i a_ij symmetric
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) CHECK(rs.d[i] * rs.cartan[i][j] == rs.d[j] * rs.cartan[j][i]);
    // roots: alpha1, alpha2, alpha1+alpha2, alpha1+2 alpha2
    CHECK(rs.positive_roots == std::vector<Root>{{0, 1}, {1, 0}, {1, 1}, {1, 2}});
}

TEST_CASE("root system A3 and unsupported types") {
    RootSystem rs = build_root_system('A', 3);
    CHECK(rs.num_positive() == 6);
    CHECK_THROWS_AS(build_root_system('E', 8), std::invalid_argument);
    CHECK_THROWS_AS(build_root_system('B', 3), std::invalid_argument);
}

TEST_CASE("cartan matrix sanity for all supported types") {
    for (auto [l, r] : {std::pair<char, int>{'A', 1}, {'A', 2}, {'B', 2}, {'A', 3}}) {
        RootSystem rs = build_root_system(l, r);
        for (int i = 0; i < rs.rank; ++i) {
            CHECK(rs.cartan[i][i] == 2);
            for (int j = 0; j < rs.rank; ++j) {
                if (i != j) CHECK(rs.cartan[i][j] <= 0);
                CHECK(rs.d[i] * rs.cartan[i][j] == rs.d[j] * rs.cartan[j][i]);
            }
        }
        // fundamental weights: <omega_j, alpha_i^vee> = delta_ij
        for (int j = 0; j < rs.rank; ++j)
            for (int i = 0; i < rs.rank; ++i)
                CHECK(rs.pairing_coroot(rs.fundamental_weights[j], i) ==
                      Rational(i == j ? 1 : 0));
    }
}

TEST_CASE("sl2 chevalley relations") {
    ChevalleyBasis cb = chevalley_constants(build_root_system('A', 1));
    // [e, f] = h, [h, e] = 2e, [h, f] = -2f
    CHECK(cb.bracket(cb.e_index(0), cb.f_index(0)) ==
          std::vector<std::pair<int, long>>{{cb.h_index(0), 1}});
    CHECK(cb.bracket(cb.h_index(0), cb.e_index(0)) ==
          std::vector<std::pair<int, long>>{{cb.e_index(0), 2}});
    CHECK(cb.bracket(cb.h_index(0), cb.f_index(0)) ==
          std::vector<std::pair<int, long>>{{cb.f_index(0), -2}});
}

TEST_CASE("A2 chevalley constants are +-1 on the extremal pair") {
    RootSystem rs = build_root_system('A', 2);
    ChevalleyBasis cb = chevalley_constants(rs);
    int a1 = rs.root_index({1, 0}), a2 = rs.root_index({0, 1}), a12 = rs.root_index({1, 1});
    auto br = cb.bracket(cb.e_index(a1), cb.e_index(a2));
    REQUIRE(br.size() == 1);
    CHECK(br[0].first == cb.e_index(a12));
    CHECK((br[0].second == 1 || br[0].second == -1));
}

TEST_CASE("jacobi identity on all basis triples, all types") {
    for (auto [l, r] : {std::pair<char, int>{'A', 1}, {'A', 2}, {'B', 2}, {'A', 3}}) {
        CAPTURE(l);
        CAPTURE(r);
        check_jacobi_all_triples(chevalley_constants(build_root_system(l, r)));
    }
}

TEST_CASE("h-actions, coroot brackets, antisymmetry, integrality") {
    for (auto [l, r] : {std::pair<char, int>{'A', 2}, {'B', 2}}) {
        RootSystem rs = build_root_system(l, r);
        ChevalleyBasis cb = chevalley_constants(rs);
        for (int i = 0; i < rs.rank; ++i) {
            for (int a = 0; a < rs.num_positive(); ++a) {
                // [h_i, e_alpha] = alpha(h_i) e_alpha
                int expected = 0;
                for (int j = 0; j < rs.rank; ++j)
                    expected += rs.positive_roots[a][j] * rs.cartan[i][j];
                auto br = cb.bracket(cb.h_index(i), cb.e_index(a));
                if (expected == 0) {
                    CHECK(br.empty());
                } else {
                    REQUIRE(br.size() == 1);
                    CHECK(br[0] == std::pair<int, long>{cb.e_index(a), expected});
                }
            }
        }
        // [e_alpha, f_alpha] lies in the Cartan with integer coordinates
        for (int a = 0; a < rs.num_positive(); ++a) {
            for (const auto& [k, c] : cb.bracket(cb.e_index(a), cb.f_index(a)))
                CHECK(cb.is_h(k));
        }
        // antisymmetry
        for (int i = 0; i < cb.dim(); ++i)
            for (int j = 0; j < cb.dim(); ++j) {
                if (i == j) continue;
                auto ij = cb.bracket(i, j);
                auto ji = cb.bracket(j, i);
                REQUIRE(ij.size() == ji.size());
                for (size_t k = 0; k < ij.size(); ++k) {
                    CHECK(ij[k].first == ji[k].first);
                    CHECK(ij[k].second == -ji[k].second);
                }
            }
    }
}

TEST_CASE("structure constants satisfy |N| = p+1") {
    for (auto [l, r] : {std::pair<char, int>{'A', 2}, {'B', 2}, {'A', 3}}) {
        RootSystem rs = build_root_system(l, r);
        ChevalleyBasis cb = chevalley_constants(rs);
        for (int a = 0; a < rs.num_positive(); ++a) {
            for (int b = 0; b < rs.num_positive(); ++b) {
                if (a == b) continue;
                Root sum = rs.positive_roots[a];
                for (int i = 0; i < rs.rank; ++i) sum[i] += rs.positive_roots[b][i];
                int target = rs.root_index(sum);
                auto br = cb.bracket(cb.e_index(a), cb.e_index(b));
                if (target < 0) {
                    CHECK(br.empty());
                } else {
                    REQUIRE(br.size() == 1);
                    CHECK(br[0].first == cb.e_index(target));
                    int p = cb.root_string_p(rs.positive_roots[a], rs.positive_roots[b]);
                    CHECK(std::abs(br[0].second) == p + 1);
                }
            }
        }
    }
}

TEST_CASE("parabolic splits") {
    RootSystem a1 = build_root_system('A', 1);
    ParabolicDatum p1 = parabolic_split(a1, LeviDatum::make(a1, {}));
    CHECK(p1.size() == 1);

    RootSystem a2 = build_root_system('A', 2);
    ParabolicDatum p2 = parabolic_split(a2, LeviDatum::make(a2, {0}));
    CHECK(p2.size() == 2);
    // roots containing alpha_2 (index 1): {0,1} and {1,1}
    CHECK(a2.positive_roots[p2.nminus_roots[0]] == Root{0, 1});
    CHECK(a2.positive_roots[p2.nminus_roots[1]] == Root{1, 1});

    ParabolicDatum p3 = parabolic_split(a2, LeviDatum::make(a2, {}));
    CHECK(p3.size() == 3);

    // counts: |nminus| + |levi positives| = |positives| for every Levi choice
    for (auto [l, r] : {std::pair<char, int>{'A', 2}, {'B', 2}, {'A', 3}}) {
        RootSystem rs = build_root_system(l, r);
        for (int mask = 0; mask < (1 << rs.rank) - 1; ++mask) {
            std::vector<int> simples;
            for (int i = 0; i < rs.rank; ++i)
                if (mask & (1 << i)) simples.push_back(i);
            ParabolicDatum pd = parabolic_split(rs, LeviDatum::make(rs, simples));
            CHECK(pd.size() + static_cast<int>(pd.levi_roots.size()) == rs.num_positive());
        }
    }
}

TEST_CASE("levi datum validation and lambda naming") {
    RootSystem a3 = build_root_system('A', 3);
    CHECK_THROWS_AS(LeviDatum::make(a3, {3}), std::invalid_argument);
    CHECK_THROWS_AS(LeviDatum::make(a3, {0, 0}), std::invalid_argument);
    CHECK_THROWS_AS(LeviDatum::make(a3, {0, 1, 2}), std::invalid_argument);
    LeviDatum l = LeviDatum::make(a3, {1});
    CHECK(l.orbit_params == std::vector<int>{0, 2});
    CHECK(l.lambda_index(0) == 0);
    CHECK(l.lambda_index(1) == -1);
    CHECK(l.lambda_index(2) == 1);
}

TEST_CASE("root data export as json") {
    RootSystem rs = build_root_system('A', 2);
    nlohmann::json j = rs.to_json();
    CHECK(j["type"] == "A2");
    CHECK(j["cartan"][0][1] == -1);
    CHECK(j["positive_roots"].size() == 3);
}
