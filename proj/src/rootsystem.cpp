#include "orbitq/rootsystem.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <map>
#include <set>

namespace orbitq {

namespace {

bool height_lex_less(const Root& a, const Root& b) {
    int ha = root_height(a), hb = root_height(b);
    if (ha != hb) return ha < hb;
    return a < b;
}

std::vector<std::vector<int>> cartan_for(char letter, int rank) {
    if (letter == 'A') {
        std::vector<std::vector<int>> a(rank, std::vector<int>(rank, 0));
        for (int i = 0; i < rank; ++i) {
            a[i][i] = 2;
            if (i + 1 < rank) {
                a[i][i + 1] = -1;
                a[i + 1][i] = -1;
            }
        }
        return a;
    }
    if (letter == 'B' && rank == 2) {
        // alpha_1 long, alpha_2 short: a[i][j] = <alpha_j, alpha_i^vee>.
        return {{2, -1}, {-2, 2}};
    }
    throw std::invalid_argument("build_root_system: unsupported type " + std::string(1, letter) +
                                std::to_string(rank));
}

std::vector<int> symmetrizers_for(char letter, int rank) {
    if (letter == 'A') return std::vector<int>(rank, 1);
    if (letter == 'B' && rank == 2) return {2, 1};
    throw std::invalid_argument("symmetrizers_for: unsupported type");
}

}  // namespace

int RootSystem::root_index(const Root& r) const {
    for (size_t i = 0; i < positive_roots.size(); ++i)
        if (positive_roots[i] == r) return static_cast<int>(i);
    return -1;
}

Rational RootSystem::pairing_coroot(const std::vector<Rational>& mu_simple, int i) const {
    // <sum c_j alpha_j, alpha_i^vee> = sum c_j a[i][j]
    Rational acc(0);
    for (int j = 0; j < rank; ++j) acc += mu_simple[j] * Rational(cartan[i][j]);
    return acc;
}

Rational RootSystem::bilinear_roots(const std::vector<Rational>& a, const std::vector<Rational>& b) const {
    Rational acc(0);
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j) acc += a[i] * b[j] * Rational(d[i] * cartan[i][j]);
    return acc;
}

nlohmann::json RootSystem::to_json() const {
    nlohmann::ordered_json j;
    j["type"] = type_name();
    j["cartan"] = cartan;
    j["symmetrizers"] = d;
    j["positive_roots"] = positive_roots;
    std::vector<std::vector<std::string>> fw;
    for (const auto& w : fundamental_weights) {
        std::vector<std::string> row;
        for (const auto& c : w) row.push_back(c.str());
        fw.push_back(row);
    }
    j["fundamental_weights"] = fw;
    return j;
}

RootSystem build_root_system(char letter, int rank) {
    if (!((letter == 'A' && rank >= 1 && rank <= 3) || (letter == 'B' && rank == 2)))
        throw std::invalid_argument("build_root_system: unsupported type " + std::string(1, letter) +
                                    std::to_string(rank));
    RootSystem rs;
    rs.letter = letter;
    rs.rank = rank;
    rs.cartan = cartan_for(letter, rank);
    rs.d = symmetrizers_for(letter, rank);

    // Enumerate positive roots from the Cartan matrix: gamma + alpha_i is a
    // root iff q = p - <gamma, alpha_i^vee> > 0, where p is the largest k
    // with gamma - k alpha_i a root.
    std::set<Root> roots;
    for (int i = 0; i < rank; ++i) {
        Root a(rank, 0);
        a[i] = 1;
        roots.insert(a);
    }
    bool grew = true;
    while (grew) {
        grew = false;
        std::vector<Root> snapshot(roots.begin(), roots.end());
        for (const Root& g : snapshot) {
            for (int i = 0; i < rank; ++i) {
                int p = 0;
                Root down = g;
                while (true) {
                    down[i] -= 1;
                    bool is_root = roots.count(down) > 0;
                    bool is_zero = std::all_of(down.begin(), down.end(), [](int c) { return c == 0; });
                    if (is_root) {
                        ++p;
                    } else if (is_zero) {
                        // gamma = alpha_i itself: the string through zero does not continue.
                        break;
                    } else {
                        break;
                    }
                }
                int pairing = 0;
                for (int j = 0; j < rank; ++j) pairing += g[j] * rs.cartan[i][j];
                if (p - pairing > 0) {
                    Root up = g;
                    up[i] += 1;
                    if (!roots.count(up)) {
                        roots.insert(up);
                        grew = true;
                    }
                }
            }
        }
    }
    rs.positive_roots.assign(roots.begin(), roots.end());
    std::sort(rs.positive_roots.begin(), rs.positive_roots.end(), height_lex_less);

    // Fundamental weights: solve cartan * c = e_j.
    RatMatrix cm(rank, rank, Rational(0));
    for (int i = 0; i < rank; ++i)
        for (int j = 0; j < rank; ++j) cm.at(i, j) = Rational(rs.cartan[i][j]);
    for (int j = 0; j < rank; ++j) {
        std::vector<Rational> rhs(rank, Rational(0)), x;
        rhs[j] = Rational(1);
        if (!solve(cm, rhs, x)) throw std::logic_error("build_root_system: singular Cartan matrix");
        rs.fundamental_weights.push_back(x);
    }
    return rs;
}

namespace {

RatMatrix unit_matrix(int n, int r, int c, long v = 1) {
    RatMatrix m(n, n, Rational(0));
    m.at(r, c) = Rational(v);
    return m;
}

RatMatrix commutator(const RatMatrix& a, const RatMatrix& b) { return a * b - b * a; }

/// Defining-representation matrices for the Chevalley basis, per type.
/// Type A_n: sl(n+1) with e_{alpha_i+...+alpha_j} = E_{i,j+1}.
/// Type B2: sp_4 in the index order (1, 2, -2, -1) with the long simple root
/// alpha_1 = 2*eps_2 and the short simple root alpha_2 = eps_1 - eps_2.
std::vector<RatMatrix> realize(const RootSystem& rs, int& dim_out) {
    int npos = rs.num_positive();
    std::vector<RatMatrix> rep(2 * npos + rs.rank, RatMatrix());
    if (rs.letter == 'A') {
        int n = rs.rank + 1;
        dim_out = n;
        for (int a = 0; a < npos; ++a) {
            const Root& r = rs.positive_roots[a];
            int lo = -1, hi = -1;
            for (int i = 0; i < rs.rank; ++i) {
                if (r[i] != 0) {
                    if (lo < 0) lo = i;
                    hi = i;
                }
            }
            rep[a] = unit_matrix(n, lo, hi + 1);
            rep[npos + a] = unit_matrix(n, hi + 1, lo);
        }
        for (int i = 0; i < rs.rank; ++i) {
            RatMatrix h(n, n, Rational(0));
            h.at(i, i) = Rational(1);
            h.at(i + 1, i + 1) = Rational(-1);
            rep[2 * npos + i] = h;
        }
        return rep;
    }
    // B2 via sp_4. Index positions: 1 -> 0, 2 -> 1, -2 -> 2, -1 -> 3.
    dim_out = 4;
    auto E = [&](int r, int c, long v = 1) { return unit_matrix(4, r, c, v); };
    std::map<Root, std::pair<RatMatrix, RatMatrix>> table;  // root -> (e, f)
    table[{1, 0}] = {E(1, 2), E(2, 1)};                       // 2*eps_2
    table[{0, 1}] = {E(0, 1) - E(2, 3), E(1, 0) - E(3, 2)};   // eps_1 - eps_2
    table[{1, 1}] = {E(0, 2) + E(1, 3), E(2, 0) + E(3, 1)};   // eps_1 + eps_2
    table[{1, 2}] = {E(0, 3), E(3, 0)};                       // 2*eps_1
    for (int a = 0; a < npos; ++a) {
        auto it = table.find(rs.positive_roots[a]);
        if (it == table.end()) throw std::logic_error("realize: missing B2 root");
        rep[a] = it->second.first;
        rep[npos + a] = it->second.second;
    }
    // Coroots: h_1 = H_{eps_2} = E_22 - E_{-2,-2}; h_2 = H_{eps_1} - H_{eps_2}.
    RatMatrix He1 = E(0, 0) - E(3, 3);
    RatMatrix He2 = E(1, 1) - E(2, 2);
    rep[2 * npos + 0] = He2;
    rep[2 * npos + 1] = He1 - He2;
    return rep;
}

}  // namespace

std::string ChevalleyBasis::basis_name(int idx) const {
    auto root_str = [&](const Root& r) {
        std::string s;
        for (size_t i = 0; i < r.size(); ++i) {
            if (i) s += ",";
            s += std::to_string(r[i]);
        }
        return s;
    };
    if (is_e(idx)) return "e[" + root_str(rs.positive_roots[idx]) + "]";
    if (is_f(idx)) return "f[" + root_str(rs.positive_roots[idx - npos()]) + "]";
    return "h" + std::to_string(idx - 2 * npos() + 1);
}

Root ChevalleyBasis::weight_of(int idx) const {
    if (is_e(idx)) return rs.positive_roots[idx];
    if (is_f(idx)) {
        Root r = rs.positive_roots[idx - npos()];
        for (auto& c : r) c = -c;
        return r;
    }
    return Root(rs.rank, 0);
}

int ChevalleyBasis::root_string_p(const Root& alpha, const Root& beta) const {
    // Largest k with beta - k*alpha a root (positive or negative).
    auto is_root = [&](const Root& r) {
        if (std::all_of(r.begin(), r.end(), [](int c) { return c == 0; })) return false;
        Root pos = r, neg = r;
        for (auto& c : neg) c = -c;
        return rs.root_index(pos) >= 0 || rs.root_index(neg) >= 0;
    };
    int p = 0;
    Root cur = beta;
    while (true) {
        for (int i = 0; i < rs.rank; ++i) cur[i] -= alpha[i];
        if (!is_root(cur)) break;
        ++p;
    }
    return p;
}

ChevalleyBasis chevalley_constants(const RootSystem& rs) {
    ChevalleyBasis cb;
    cb.rs = rs;
    cb.sign_convention =
        rs.letter == 'A' ? "matrix realization sl(n+1), e=E_ij" : "matrix realization sp(4)";
    cb.rep = realize(rs, cb.rep_dim);

    int dim = cb.dim();
    int n = cb.rep_dim;
    // Decompose commutators over the basis: flatten basis matrices into the
    // columns of an (n^2 x dim) system solved per commutator.
    RatMatrix sys(n * n, dim, Rational(0));
    for (int b = 0; b < dim; ++b)
        for (int r = 0; r < n; ++r)
            for (int c = 0; c < n; ++c) sys.at(r * n + c, b) = cb.rep[b].at(r, c);

    cb.table_.assign(dim, std::vector<std::vector<std::pair<int, long>>>(dim));
    for (int i = 0; i < dim; ++i) {
        for (int j = 0; j < dim; ++j) {
            if (i == j) continue;
            RatMatrix com = commutator(cb.rep[i], cb.rep[j]);
            std::vector<Rational> rhs(n * n), x;
            for (int r = 0; r < n; ++r)
                for (int c = 0; c < n; ++c) rhs[r * n + c] = com.at(r, c);
            if (!solve(sys, rhs, x))
                throw std::logic_error("chevalley_constants: commutator outside span");
            std::vector<std::pair<int, long>> entry;
            for (int b = 0; b < dim; ++b) {
                if (x[b].is_zero()) continue;
                if (!x[b].is_integer())
                    throw std::logic_error("chevalley_constants: non-integral structure constant");
                entry.emplace_back(b, x[b].to_long());
            }
            cb.table_[i][j] = std::move(entry);
        }
    }
    return cb;
}

LeviDatum LeviDatum::make(const RootSystem& rs, std::vector<int> simples) {
    std::sort(simples.begin(), simples.end());
    for (int s : simples)
        if (s < 0 || s >= rs.rank) throw std::invalid_argument("LeviDatum: simple index out of range");
    for (size_t k = 1; k < simples.size(); ++k)
        if (simples[k] == simples[k - 1]) throw std::invalid_argument("LeviDatum: duplicate simple index");
    LeviDatum l;
    l.levi_simples = simples;
    for (int i = 0; i < rs.rank; ++i)
        if (!std::count(simples.begin(), simples.end(), i)) l.orbit_params.push_back(i);
    if (l.orbit_params.empty())
        throw std::invalid_argument("LeviDatum: Levi equals the whole algebra (no orbit parameters)");
    return l;
}

int LeviDatum::lambda_index(int simple) const {
    for (size_t j = 0; j < orbit_params.size(); ++j)
        if (orbit_params[j] == simple) return static_cast<int>(j);
    return -1;
}

int ParabolicDatum::max_height() const {
    int h = 0;
    for (int k = 0; k < size(); ++k) h = std::max(h, height(k));
    return h;
}

ParabolicDatum parabolic_split(const RootSystem& rs, const LeviDatum& levi) {
    ParabolicDatum pd;
    pd.rs = rs;
    pd.levi = levi;
    for (int a = 0; a < rs.num_positive(); ++a) {
        const Root& r = rs.positive_roots[a];
        bool inside_levi = true;
        for (int i = 0; i < rs.rank; ++i) {
            if (r[i] != 0 && levi.lambda_index(i) >= 0) inside_levi = false;
        }
        if (inside_levi)
            pd.levi_roots.push_back(a);
        else
            pd.nminus_roots.push_back(a);
    }
    // rs.positive_roots is already height-then-lex, so the induced order is too.
    return pd;
}

}  // namespace orbitq
