#include "orbitq/classical.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace orbitq {

namespace {

std::vector<Rational> omega_to_alpha(const RootSystem& rs, const std::vector<Rational>& w) {
    // mu = sum_j w_j omega_j; fundamental_weights[j] holds omega_j in
    // simple-root coordinates.
    std::vector<Rational> a(rs.rank, Rational(0));
    for (int j = 0; j < rs.rank; ++j)
        for (int i = 0; i < rs.rank; ++i) a[i] += Rational(0) + w[j] * rs.fundamental_weights[j][i];
    return a;
}

std::vector<Rational> to_rat(const std::vector<int>& v) {
    std::vector<Rational> r(v.size());
    for (size_t i = 0; i < v.size(); ++i) r[i] = Rational(v[i]);
    return r;
}

// (w, w') for weights in omega-coordinates: (w, alpha_j) = d_j w_j, so
// (w, w') = sum_j d_j w_j (w'_alpha)_j.
Rational form_omega(const RootSystem& rs, const std::vector<Rational>& w,
                    const std::vector<Rational>& w2) {
    std::vector<Rational> a = omega_to_alpha(rs, w2);
    Rational acc(0);
    for (int j = 0; j < rs.rank; ++j) acc += Rational(rs.d[j]) * w[j] * a[j];
    return acc;
}

// (w, alpha) for w in omega-coordinates and alpha in simple-root coordinates.
Rational form_omega_root(const RootSystem& rs, const std::vector<Rational>& w, const Root& alpha) {
    Rational acc(0);
    for (int j = 0; j < rs.rank; ++j) acc += Rational(rs.d[j] * alpha[j]) * w[j];
    return acc;
}

Weight dominant_rep(const RootSystem& rs, Weight w) {
    bool changed = true;
    while (changed) {
        changed = false;
        for (int i = 0; i < rs.rank; ++i) {
            if (w[i] < 0) {
                int wi = w[i];
                for (int k = 0; k < rs.rank; ++k) w[k] -= wi * rs.cartan[k][i];
                changed = true;
            }
        }
    }
    return w;
}

Weight root_in_omega(const RootSystem& rs, const Root& r) {
    Weight w(rs.rank, 0);
    for (int i = 0; i < rs.rank; ++i)
        for (int j = 0; j < rs.rank; ++j) w[i] += r[j] * rs.cartan[i][j];
    return w;
}

}  // namespace

SymAlgebra::SymAlgebra(const ChevalleyBasis& cb) : cb_(cb) {
    std::vector<std::string> names;
    for (int i = 0; i < cb.dim(); ++i) names.push_back("x" + std::to_string(i));
    ring_ = VarSet::make(names);
}

MultiPoly SymAlgebra::kks_bracket(const MultiPoly& f, const MultiPoly& g) const {
    MultiPoly out(ring_);
    int n = cb_.dim();
    for (int a = 0; a < n; ++a) {
        MultiPoly fa = f.derivative(a);
        if (fa.is_zero()) continue;
        for (int b = 0; b < n; ++b) {
            if (a == b) continue;
            MultiPoly gb = g.derivative(b);
            if (gb.is_zero()) continue;
            MultiPoly pab(ring_);
            for (const auto& [k, c] : cb_.bracket(a, b))
                pab += coordinate(k) * Rational(c);
            if (pab.is_zero()) continue;
            out += fa * gb * pab;
        }
    }
    return out;
}

MultiPoly SymAlgebra::bivector_bracket_linear(int a, int b, int x, int y) const {
    auto lin = [&](int u, int v) {
        MultiPoly p(ring_);
        for (const auto& [k, c] : cb_.bracket(u, v)) p += coordinate(k) * Rational(c);
        return p;
    };
    return lin(a, x) * lin(b, y) - lin(b, x) * lin(a, y);
}

MultiPoly SymAlgebra::evaluate_at_base_point(const MultiPoly& f, const LeviDatum& levi,
                                             VarSetPtr lambda_ring) const {
    MultiPoly out(lambda_ring);
    int npos = cb_.npos();
    for (const auto& [e, c] : f.terms()) {
        MultiPoly term = MultiPoly::constant(lambda_ring, c);
        bool dead = false;
        for (size_t v = 0; v < e.size() && !dead; ++v) {
            if (e[v] == 0) continue;
            if (static_cast<int>(v) < 2 * npos) {
                dead = true;  // e- and f-coordinates vanish at the base point
            } else {
                int i = static_cast<int>(v) - 2 * npos;
                int j = levi.lambda_index(i);
                if (j < 0) {
                    dead = true;  // lambda vanishes on the Levi's Cartan directions
                } else {
                    term = term * MultiPoly::variable(lambda_ring, j).pow(e[v]);
                }
            }
        }
        if (!dead) out += term;
    }
    return out;
}

std::vector<Rational> char_poly(const RatMatrix& m) {
    size_t n = m.rows();
    if (m.cols() != n) throw std::invalid_argument("char_poly: not square");
    // Faddeev-LeVerrier: c_0 = 1; M_1 = A; c_k = -tr(A M_k)/k ... iteratively.
    std::vector<Rational> coeffs{Rational(1)};
    RatMatrix M = RatMatrix::identity(n, Rational(0), Rational(1));
    RatMatrix A = m;
    for (size_t k = 1; k <= n; ++k) {
        M = A * M;
        Rational tr(0);
        for (size_t i = 0; i < n; ++i) tr += M.at(i, i);
        Rational ck = -(tr / Rational(static_cast<long>(k)));
        coeffs.push_back(ck);
        for (size_t i = 0; i < n; ++i) M.at(i, i) += ck;
    }
    return coeffs;
}

OrbitSample make_orbit_sample(const std::vector<Rational>& eigenvalues, int count, uint64_t seed) {
    OrbitSample s;
    s.n = static_cast<int>(eigenvalues.size());
    if (s.n < 2) throw std::invalid_argument("make_orbit_sample: need n >= 2");
    Rational tr(0);
    for (const auto& e : eigenvalues) tr += e;
    if (!tr.is_zero()) throw std::invalid_argument("make_orbit_sample: eigenvalues must sum to zero");
    s.eigenvalues = eigenvalues;
    s.seed = seed;
    Rng rng(seed);
    int n = s.n;
    RatMatrix lam0(n, n, Rational(0));
    for (int i = 0; i < n; ++i) lam0.at(i, i) = eigenvalues[i];
    for (int p = 0; p < count; ++p) {
        RatMatrix g = RatMatrix::identity(n, Rational(0), Rational(1));
        RatMatrix ginv = g;
        int shears = 2 * n * n;
        for (int srep = 0; srep < shears; ++srep) {
            int i = static_cast<int>(rng.uniform(0, n - 1));
            int j = static_cast<int>(rng.uniform(0, n - 2));
            if (j >= i) ++j;
            Rational c(rng.nonzero(3));
            RatMatrix sh = RatMatrix::identity(n, Rational(0), Rational(1));
            sh.at(i, j) = c;
            RatMatrix shInv = RatMatrix::identity(n, Rational(0), Rational(1));
            shInv.at(i, j) = -c;
            g = g * sh;
            ginv = shInv * ginv;
        }
        s.points.push_back(g * lam0 * ginv);
    }
    return s;
}

size_t monomial_count(int vars, int d) {
    // C(vars + d, d)
    mpz_class num(1), den(1);
    for (int k = 1; k <= d; ++k) {
        num *= vars + k;
        den *= k;
    }
    mpz_class c = num / den;
    return static_cast<size_t>(c.get_ui());
}

namespace {

void enumerate_degree_monomials(int vars, int d, int pos, std::vector<int>& cur,
                                std::vector<std::vector<int>>& out) {
    if (pos == vars) {
        out.push_back(cur);
        return;
    }
    for (int k = 0; k <= d; ++k) {
        cur[pos] = k;
        enumerate_degree_monomials(vars, d - k, pos + 1, cur, out);
    }
    cur[pos] = 0;
}

}  // namespace

size_t orbit_filtered_dim(const ChevalleyBasis& cb, const OrbitSample& sample, int d) {
    if (cb.rs.letter != 'A')
        throw std::invalid_argument("orbit_filtered_dim: evaluation oracle covers sl_n only");
    if (cb.rep_dim != sample.n)
        throw std::invalid_argument("orbit_filtered_dim: sample size does not match the algebra");
    int dim = cb.dim();
    std::vector<std::vector<int>> monos;
    std::vector<int> cur(dim, 0);
    enumerate_degree_monomials(dim, d, 0, cur, monos);
    if (sample.points.size() < monos.size())
        throw std::invalid_argument("orbit_filtered_dim: insufficient points (" +
                                    std::to_string(sample.points.size()) + " < " +
                                    std::to_string(monos.size()) + " monomials)");
    // Coordinates of each point: x_b(P) = tr(P * rep_b).
    std::vector<std::vector<Rational>> coords;
    for (const auto& P : sample.points) {
        std::vector<Rational> v(dim, Rational(0));
        for (int b = 0; b < dim; ++b) {
            Rational tr(0);
            for (int i = 0; i < sample.n; ++i)
                for (int k = 0; k < sample.n; ++k) tr += P.at(i, k) * cb.rep[b].at(k, i);
            v[b] = tr;
        }
        coords.push_back(std::move(v));
    }
    RatMatrix eval(monos.size(), sample.points.size(), Rational(0));
    for (size_t mi = 0; mi < monos.size(); ++mi) {
        for (size_t pi = 0; pi < sample.points.size(); ++pi) {
            Rational v(1);
            for (int b = 0; b < dim; ++b) {
                for (int rep = 0; rep < monos[mi][b]; ++rep) v *= coords[pi][b];
            }
            eval.at(mi, pi) = v;
        }
    }
    return rank(eval);
}

long WeightMultTable::multiplicity(const RootSystem& rs, const Weight& w) const {
    Weight d = dominant_rep(rs, w);
    auto it = mult.find(d);
    return it == mult.end() ? 0 : it->second;
}

long WeightMultTable::zero_weight_multiplicity() const {
    Weight zero(mu.size(), 0);
    auto it = mult.find(zero);
    return it == mult.end() ? 0 : it->second;
}

WeightMultTable weight_multiplicities(const RootSystem& rs, const Weight& mu) {
    for (int c : mu)
        if (c < 0) throw std::invalid_argument("weight_multiplicities: mu must be dominant");
    WeightMultTable tbl;
    tbl.mu = mu;

    std::vector<Rational> rho(rs.rank, Rational(1));  // omega-coords of rho
    std::vector<Rational> mu_r = to_rat(mu);
    std::vector<Rational> mu_rho = mu_r;
    for (int i = 0; i < rs.rank; ++i) mu_rho[i] += rho[i];
    Rational top_norm = form_omega(rs, mu_rho, mu_rho);

    // Weyl dimension formula.
    Rational dim(1);
    for (const Root& a : rs.positive_roots) {
        dim *= form_omega_root(rs, mu_rho, a) / form_omega_root(rs, rho, a);
    }
    if (!dim.is_integer()) throw std::logic_error("weight_multiplicities: non-integral Weyl dimension");
    tbl.dim = dim.to_long();

    // Dominant weights nu = mu - sum c_j alpha_j within the norm ball.
    std::vector<std::pair<int, Weight>> dominants;  // (sum c, nu)
    int bound = 0;
    for (int i = 0; i < rs.rank; ++i) bound += mu[i] * 4 + 4;
    std::vector<int> c(rs.rank, 0);
    std::function<void(int)> dfs = [&](int pos) {
        if (pos == rs.rank) {
            Weight nu = mu;
            int total = 0;
            for (int j = 0; j < rs.rank; ++j) {
                total += c[j];
                for (int i = 0; i < rs.rank; ++i) nu[i] -= c[j] * rs.cartan[i][j];
            }
            for (int i = 0; i < rs.rank; ++i)
                if (nu[i] < 0) return;
            std::vector<Rational> nu_rho = to_rat(nu);
            for (int i = 0; i < rs.rank; ++i) nu_rho[i] += rho[i];
            if (form_omega(rs, nu_rho, nu_rho) > top_norm) return;
            dominants.emplace_back(total, nu);
            return;
        }
        for (int k = 0; k <= bound; ++k) {
            c[pos] = k;
            dfs(pos + 1);
        }
        c[pos] = 0;
    };
    dfs(0);
    std::sort(dominants.begin(), dominants.end());

    tbl.mult[mu] = 1;
    for (const auto& [total, nu] : dominants) {
        if (total == 0) continue;  // mu itself
        std::vector<Rational> nu_rho = to_rat(nu);
        for (int i = 0; i < rs.rank; ++i) nu_rho[i] += rho[i];
        Rational denom = top_norm - form_omega(rs, nu_rho, nu_rho);
        if (denom.is_zero())
            throw std::logic_error("weight_multiplicities: vanishing Freudenthal denominator");
        Rational acc(0);
        for (const Root& a : rs.positive_roots) {
            Weight a_om = root_in_omega(rs, a);
            for (int k = 1;; ++k) {
                Weight up = nu;
                for (int i = 0; i < rs.rank; ++i) up[i] += k * a_om[i];
                long m = tbl.multiplicity(rs, up);
                if (m == 0) {
                    // Stop when clearly past the ball.
                    std::vector<Rational> up_rho = to_rat(up);
                    for (int i = 0; i < rs.rank; ++i) up_rho[i] += rho[i];
                    if (form_omega(rs, up_rho, up_rho) > top_norm) break;
                    continue;
                }
                std::vector<Rational> up_r = to_rat(up);
                acc += Rational(2 * m) * form_omega_root(rs, up_r, a);
            }
        }
        Rational m = acc / denom;
        if (!m.is_integer() || m.sign() < 0)
            throw std::logic_error("weight_multiplicities: non-integral multiplicity");
        if (!m.is_zero()) tbl.mult[nu] = m.to_long();
    }
    // Cross-check: sum over Weyl orbits of dominant multiplicities = dim.
    // (Orbit sizes counted by expanding each dominant weight's orbit.)
    long total = 0;
    for (const auto& [nu, m] : tbl.mult) {
        std::set<Weight> orbit;
        std::vector<Weight> frontier{nu};
        orbit.insert(nu);
        while (!frontier.empty()) {
            std::vector<Weight> next;
            for (const Weight& w : frontier) {
                for (int i = 0; i < rs.rank; ++i) {
                    Weight r = w;
                    int wi = r[i];
                    for (int k = 0; k < rs.rank; ++k) r[k] -= wi * rs.cartan[k][i];
                    if (orbit.insert(r).second) next.push_back(r);
                }
            }
            frontier = std::move(next);
        }
        total += m * static_cast<long>(orbit.size());
    }
    if (total != tbl.dim)
        throw std::logic_error("weight_multiplicities: multiplicities inconsistent with Weyl dimension");
    return tbl;
}

long levi_invariant_dim(const RootSystem& rs, const LeviDatum& levi, const Weight& mu) {
    WeightMultTable tbl = weight_multiplicities(rs, mu);

    // Enumerate W_L as integer matrices on omega-coordinates with parity.
    int n = rs.rank;
    using Mat = std::vector<std::vector<int>>;
    auto mat_id = [&]() {
        Mat m(n, std::vector<int>(n, 0));
        for (int i = 0; i < n; ++i) m[i][i] = 1;
        return m;
    };
    auto mat_mul = [&](const Mat& a, const Mat& b) {
        Mat r(n, std::vector<int>(n, 0));
        for (int i = 0; i < n; ++i)
            for (int k = 0; k < n; ++k)
                for (int j = 0; j < n; ++j) r[i][j] += a[i][k] * b[k][j];
        return r;
    };
    std::vector<Mat> gens;
    for (int s : levi.levi_simples) {
        Mat m = mat_id();
        // s_i(w)_k = w_k - w_i * cartan[k][i]
        for (int k = 0; k < n; ++k) m[k][s] -= rs.cartan[k][s];
        gens.push_back(m);
    }
    std::map<Mat, int> group;  // element -> parity sign
    group[mat_id()] = 1;
    bool grew = true;
    while (grew) {
        grew = false;
        auto snapshot = group;
        for (const auto& [m, sign] : snapshot) {
            for (const Mat& g : gens) {
                Mat p = mat_mul(g, m);
                if (!group.count(p)) {
                    group[p] = -sign;
                    grew = true;
                }
            }
        }
    }

    // rho_L: half the sum of the Levi's positive roots, in omega-coordinates.
    std::vector<Rational> rho_l(n, Rational(0));
    for (const Root& r : rs.positive_roots) {
        bool inside = true;
        for (int i = 0; i < n; ++i)
            if (r[i] != 0 && levi.lambda_index(i) >= 0) inside = false;
        if (!inside) continue;
        Weight w = root_in_omega(rs, r);
        for (int i = 0; i < n; ++i) rho_l[i] += Rational(w[i], 2);
    }

    long acc = 0;
    for (const auto& [m, sign] : group) {
        std::vector<Rational> img(n, Rational(0));
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) img[i] += Rational(m[i][j]) * rho_l[j];
        Weight shift(n, 0);
        for (int i = 0; i < n; ++i) {
            Rational diff = img[i] - rho_l[i];
            if (!diff.is_integer()) throw std::logic_error("levi_invariant_dim: non-integral shift");
            shift[i] = static_cast<int>(diff.to_long());
        }
        acc += sign * tbl.multiplicity(rs, shift);
    }
    return acc;
}

std::vector<Weight> dominant_weights_up_to(const RootSystem& rs, long dim_cap) {
    std::vector<std::pair<long, Weight>> found;
    int coord_cap = 8;
    std::vector<int> c(rs.rank, 0);
    std::function<void(int)> dfs = [&](int pos) {
        if (pos == rs.rank) {
            long dim = weight_multiplicities(rs, c).dim;
            if (dim <= dim_cap) found.emplace_back(dim, c);
            return;
        }
        for (int k = 0; k <= coord_cap; ++k) {
            c[pos] = k;
            dfs(pos + 1);
        }
        c[pos] = 0;
    };
    dfs(0);
    std::sort(found.begin(), found.end());
    std::vector<Weight> out;
    for (auto& [d, w] : found) out.push_back(std::move(w));
    return out;
}

}  // namespace orbitq
