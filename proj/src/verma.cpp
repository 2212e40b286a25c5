#include "orbitq/verma.hpp"

#include <algorithm>
#include <functional>

namespace orbitq {

namespace {

void enumerate_monomials(const ParabolicDatum& pd, int depth_cap, size_t slot, int depth_left,
                         std::vector<int>& cur, std::vector<std::vector<int>>& out) {
    if (slot == pd.nminus_roots.size()) {
        out.push_back(cur);
        return;
    }
    int h = pd.height(static_cast<int>(slot));
    for (int k = 0; k * h <= depth_left; ++k) {
        cur[slot] = k;
        enumerate_monomials(pd, depth_cap, slot + 1, depth_left - k * h, cur, out);
    }
    cur[slot] = 0;
}

}  // namespace

int TruncatedVerma::count_depth_at_most(int d) const {
    int n = 0;
    while (n < dim() && depth[n] <= d) ++n;
    return n;
}

TruncatedVerma verma_basis(const ParabolicDatum& pd, int depth_cap) {
    if (depth_cap < 0) throw std::invalid_argument("verma_basis: negative depth cap");
    TruncatedVerma tv;
    tv.pd = pd;
    tv.depth_cap = depth_cap;
    std::vector<std::vector<int>> raw;
    std::vector<int> cur(pd.nminus_roots.size(), 0);
    enumerate_monomials(pd, depth_cap, 0, depth_cap, cur, raw);
    auto depth_of = [&](const std::vector<int>& e) {
        int d = 0;
        for (size_t k = 0; k < e.size(); ++k) d += e[k] * pd.height(static_cast<int>(k));
        return d;
    };
    std::sort(raw.begin(), raw.end(), [&](const auto& a, const auto& b) {
        int da = depth_of(a), db = depth_of(b);
        if (da != db) return da < db;
        return a < b;
    });
    for (const auto& e : raw) {
        int idx = tv.dim();
        tv.basis.push_back(PBWMonomial{e});
        tv.index_of[e] = idx;
        tv.depth.push_back(depth_of(e));
        Root w(pd.rs.rank, 0);
        for (size_t k = 0; k < e.size(); ++k) {
            const Root& r = pd.rs.positive_roots[pd.nminus_roots[k]];
            for (int i = 0; i < pd.rs.rank; ++i) w[i] -= e[k] * r[i];
        }
        tv.weight.push_back(std::move(w));
    }
    return tv;
}

Matrix<MultiPoly> GeneratorAction::dense(int dim, VarSetPtr ring) const {
    Matrix<MultiPoly> m(dim, dim, MultiPoly::zero(ring));
    for (const auto& [r, c, p] : triplets) m.at(r, c) += p;
    return m;
}

VermaActions::VermaActions(const ChevalleyBasis& cb, const TruncatedVerma& tv, VarSetPtr ring)
    : cb_(cb), tv_(tv), ring_(std::move(ring)) {
    fslot_of_basis_.assign(cb_.dim(), -1);
    for (size_t k = 0; k < tv_.pd.nminus_roots.size(); ++k)
        fslot_of_basis_[cb_.f_index(tv_.pd.nminus_roots[k])] = static_cast<int>(k);
}

MultiPoly VermaActions::lambda_of_cartan(int i) const {
    int j = tv_.pd.levi.lambda_index(i);
    if (j < 0) return MultiPoly::zero(ring_);
    return MultiPoly::variable(ring_, static_cast<size_t>(j));
}

int VermaActions::depth_of_exps(const std::vector<int>& exps) const {
    int d = 0;
    for (size_t k = 0; k < exps.size(); ++k) d += exps[k] * tv_.pd.height(static_cast<int>(k));
    return d;
}

void VermaActions::add_scaled(Element& into, const Element& from, const MultiPoly& c) {
    if (c.is_zero()) return;
    for (const auto& [mono, coeff] : from) {
        MultiPoly t = coeff * c;
        auto it = into.find(mono);
        if (it == into.end()) {
            if (!t.is_zero()) into.emplace(mono, std::move(t));
        } else {
            it->second += t;
            if (it->second.is_zero()) into.erase(it);
        }
    }
}

VermaActions::Element VermaActions::left_mul_f_mono(int slot, const std::vector<int>& mono) {
    auto key = std::make_pair(slot, mono);
    auto hit = lmul_memo_.find(key);
    if (hit != lmul_memo_.end()) return hit->second;

    Element out;
    int first = -1;
    for (size_t k = 0; k < mono.size(); ++k) {
        if (mono[k] > 0) {
            first = static_cast<int>(k);
            break;
        }
    }
    if (first < 0 || slot <= first) {
        std::vector<int> e = mono;
        e[slot] += 1;
        if (depth_of_exps(e) <= tv_.depth_cap)
            out.emplace(std::move(e), MultiPoly::constant(ring_, Rational(1)));
    } else {
        // f_slot * f_first * rest = f_first * (f_slot * rest) + [f_slot, f_first] * rest
        std::vector<int> rest = mono;
        rest[first] -= 1;
        Element inner = left_mul_f_mono(slot, rest);
        out = left_mul_f(first, inner);
        int fi = cb_.f_index(tv_.pd.nminus_roots[slot]);
        int fj = cb_.f_index(tv_.pd.nminus_roots[first]);
        for (const auto& [b, c] : cb_.bracket(fi, fj)) {
            int bslot = fslot_of_basis_.at(b);
            if (bslot < 0) throw std::logic_error("left_mul_f_mono: bracket left N^-_P");
            Element br = left_mul_f_mono(bslot, rest);
            add_scaled(out, br, MultiPoly::constant(ring_, Rational(c)));
        }
    }
    lmul_memo_.emplace(std::move(key), out);
    return out;
}

VermaActions::Element VermaActions::left_mul_f(int slot, const Element& elt) {
    Element out;
    for (const auto& [mono, coeff] : elt) {
        Element part = left_mul_f_mono(slot, mono);
        add_scaled(out, part, coeff);
    }
    return out;
}

VermaActions::Element VermaActions::act_basis(int x, const std::vector<int>& mono) {
    auto key = std::make_pair(x, mono);
    auto hit = act_memo_.find(key);
    if (hit != act_memo_.end()) return hit->second;

    Element out;
    int first = -1;
    for (size_t k = 0; k < mono.size(); ++k) {
        if (mono[k] > 0) {
            first = static_cast<int>(k);
            break;
        }
    }
    if (first < 0) {
        // Action on v_0: N^+ and the Levi's lowering part annihilate, the
        // Cartan reads off lambda, N^-_P letters append.
        if (cb_.is_h(x)) {
            MultiPoly lam = lambda_of_cartan(x - 2 * cb_.npos());
            if (!lam.is_zero()) out.emplace(mono, lam);
        } else if (cb_.is_f(x)) {
            int slot = fslot_of_basis_.at(x);
            if (slot >= 0) {
                std::vector<int> e = mono;
                e[slot] += 1;
                if (depth_of_exps(e) <= tv_.depth_cap)
                    out.emplace(std::move(e), MultiPoly::constant(ring_, Rational(1)));
            }
            // f inside the Levi: acts as zero on the one-dimensional module.
        }
        // e-type: zero.
    } else {
        std::vector<int> rest = mono;
        rest[first] -= 1;
        Element inner = act_basis(x, rest);
        out = left_mul_f(first, inner);
        int fj = cb_.f_index(tv_.pd.nminus_roots[first]);
        for (const auto& [b, c] : cb_.bracket(x, fj)) {
            Element br = act_basis(b, rest);
            add_scaled(out, br, MultiPoly::constant(ring_, Rational(c)));
        }
    }
    act_memo_.emplace(std::move(key), out);
    return out;
}

std::map<std::vector<int>, MultiPoly> VermaActions::apply(
    int basis_index, const std::map<std::vector<int>, MultiPoly>& elt) {
    Element out;
    for (const auto& [mono, coeff] : elt) {
        Element part = act_basis(basis_index, mono);
        add_scaled(out, part, coeff);
    }
    return out;
}

GeneratorAction VermaActions::generator_action(int basis_index) {
    GeneratorAction ga;
    ga.generator = basis_index;
    ga.climb = 0;
    if (cb_.is_f(basis_index)) ga.climb = root_height(cb_.rs.positive_roots[basis_index - cb_.npos()]);
    ga.overflow_depth = tv_.depth_cap - ga.climb;
    for (int col = 0; col < tv_.dim(); ++col) {
        Element res = act_basis(basis_index, tv_.basis[col].exps);
        for (const auto& [mono, coeff] : res) {
            auto it = tv_.index_of.find(mono);
            if (it == tv_.index_of.end())
                throw std::logic_error("generator_action: result outside truncated basis");
            ga.triplets.emplace_back(it->second, col, coeff);
        }
    }
    return ga;
}

GeneratorAction VermaActions::rescaled_action(int basis_index, int h_var) {
    GeneratorAction ga = generator_action(basis_index);
    size_t m = tv_.pd.levi.orbit_params.size();
    for (auto& [r, c, p] : ga.triplets) {
        MultiPoly q(ring_);
        for (const auto& [e, coeff] : p.terms()) {
            int lam_deg = 0;
            for (size_t j = 0; j < m; ++j) lam_deg += e[j];
            if (lam_deg > 1)
                throw std::logic_error(
                    "rescaled_action: entry of lambda-degree > 1; h phi_{lambda/h} not polynomial");
            MultiPoly::Expo e2 = e;
            e2[static_cast<size_t>(h_var)] += 1 - lam_deg;
            q += MultiPoly::monomial(ring_, e2, coeff);
        }
        p = q;
    }
    return ga;
}

namespace {

// Rational linear factors of a polynomial in the single variable `var`:
// returns (root, multiplicity) pairs and divides them out of `p`.
std::vector<std::pair<Rational, int>> strip_rational_roots(MultiPoly& p, size_t var) {
    std::vector<std::pair<Rational, int>> out;
    if (p.is_zero() || p.is_constant()) return out;
    auto degree_in = [&](const MultiPoly& q) {
        int d = 0;
        for (const auto& [e, c] : q.terms()) d = std::max(d, e[var]);
        return d;
    };
    auto coeff_of = [&](const MultiPoly& q, int k) {
        for (const auto& [e, c] : q.terms())
            if (e[var] == k) return c;
        return Rational(0);
    };
    // Work only when p is genuinely univariate in var.
    for (const auto& [e, c] : p.terms())
        for (size_t v = 0; v < e.size(); ++v)
            if (v != var && e[v] != 0) return out;

    VarSetPtr ring = p.vars();
    bool progress = true;
    while (progress && !p.is_constant()) {
        progress = false;
        int deg = degree_in(p);
        // trailing coefficient: lowest k with nonzero coefficient
        int low = deg;
        for (const auto& [e, c] : p.terms()) low = std::min(low, e[var]);
        if (low > 0) {
            // factor lambda^low
            MultiPoly lv = MultiPoly::variable(ring, var, low);
            p = p.exact_div(lv);
            if (!out.empty() && out.front().first.is_zero())
                out.front().second += low;
            else
                out.insert(out.begin(), {Rational(0), low});
            progress = true;
            continue;
        }
        Rational a0 = coeff_of(p, 0);
        Rational an = coeff_of(p, deg);
        // Candidate roots r = +-u/w with u | num(a0)*den-cleared, w | lead.
        // Clear denominators first.
        Rational content = p.content();
        mpz_class n0 = (a0 / content).numerator();
        mpz_class nn = (an / content).numerator();
        std::vector<Rational> candidates;
        for (mpz_class u(1); u <= abs(n0); ++u) {
            if (abs(n0) % u != 0) continue;
            for (mpz_class w(1); w <= abs(nn); ++w) {
                if (abs(nn) % w != 0) continue;
                candidates.push_back(Rational(u, w));
                candidates.push_back(Rational(-u, w));
            }
        }
        for (const Rational& r : candidates) {
            // Try dividing by (var - r) while it divides evenly.
            std::vector<Rational> vals(ring->size(), Rational(0));
            vals[var] = r;
            if (!p.evaluate(vals).is_zero()) continue;
            MultiPoly lin = MultiPoly::variable(ring, var) - MultiPoly::constant(ring, r);
            int mult = 0;
            while (p.evaluate(vals).is_zero() && !p.is_constant()) {
                p = p.exact_div(lin);
                ++mult;
            }
            out.emplace_back(r, mult);
            progress = true;
            break;
        }
    }
    return out;
}

}  // namespace

std::vector<ShapovalovLevel> shapovalov_rank(const ChevalleyBasis& cb, const ParabolicDatum& pd,
                                             int depth_cap) {
    if (depth_cap < 0) throw std::invalid_argument("shapovalov_rank: negative depth cap");
    TruncatedVerma tv = verma_basis(pd, depth_cap);
    std::vector<std::string> names;
    for (size_t j = 0; j < pd.levi.orbit_params.size(); ++j)
        names.push_back("l" + std::to_string(j + 1));
    VarSetPtr ring = VarSet::make(names);
    VermaActions act(cb, tv, ring);

    std::vector<ShapovalovLevel> levels;
    for (int k = 0; k <= depth_cap; ++k) {
        ShapovalovLevel lv;
        lv.depth = k;
        std::vector<int> idx;
        for (int i = 0; i < tv.dim(); ++i)
            if (tv.depth[i] == k) idx.push_back(i);
        for (int i : idx) {
            lv.f_words.push_back(tv.basis[i]);
            lv.e_words.push_back(tv.basis[i]);  // mirrored exponents over the e's
        }
        size_t n = idx.size();
        lv.pairing = Matrix<MultiPoly>(n, n, MultiPoly::zero(ring));
        for (size_t row = 0; row < n; ++row) {
            const auto& eword = lv.e_words[row].exps;
            for (size_t col = 0; col < n; ++col) {
                if (tv.weight[idx[row]] != tv.weight[idx[col]]) continue;  // weight-matched only
                std::map<std::vector<int>, MultiPoly> elt;
                elt.emplace(lv.f_words[col].exps, MultiPoly::constant(ring, Rational(1)));
                // Apply the E-word right-to-left: e_{gamma_r}^{a_r} ... acts first.
                for (int slot = static_cast<int>(eword.size()) - 1; slot >= 0; --slot) {
                    for (int rep = 0; rep < eword[slot]; ++rep)
                        elt = act.apply(cb.e_index(pd.nminus_roots[slot]), elt);
                }
                std::vector<int> v0(pd.nminus_roots.size(), 0);
                auto it = elt.find(v0);
                if (it != elt.end()) lv.pairing.at(row, col) = it->second;
            }
        }
        PolyMatrix frac = lv.pairing.map(FractionElement::zero(ring),
                                         [](const MultiPoly& p) { return FractionElement(p); });
        lv.generic_rank = rank_over_fractions(frac);
        lv.full = lv.generic_rank == n;

        // Square blocks by weight.
        std::map<Root, std::vector<size_t>> by_weight;
        for (size_t i = 0; i < n; ++i) by_weight[tv.weight[idx[i]]].push_back(i);
        for (const auto& [w, rows] : by_weight) {
            Matrix<MultiPoly> block(rows.size(), rows.size(), MultiPoly::zero(ring));
            for (size_t a = 0; a < rows.size(); ++a)
                for (size_t b = 0; b < rows.size(); ++b) block.at(a, b) = lv.pairing.at(rows[a], rows[b]);
            ShapovalovLevel::BlockDet bd;
            bd.weight = w;
            bd.det = bareiss_det(block);
            bd.cofactor = bd.det;
            if (pd.levi.orbit_params.size() == 1)
                bd.rational_roots = strip_rational_roots(bd.cofactor, 0);
            lv.block_dets.push_back(std::move(bd));
        }
        levels.push_back(std::move(lv));
    }
    return levels;
}

}  // namespace orbitq
