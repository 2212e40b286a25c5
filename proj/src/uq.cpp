#include "orbitq/uq.hpp"

#include "orbitq/rng.hpp"

#include <algorithm>
#include <functional>

namespace orbitq {

namespace {

std::vector<std::string> coeff_names(int mL) {
    std::vector<std::string> names{"q"};
    for (int j = 0; j < mL; ++j) names.push_back("L" + std::to_string(j + 1));
    return names;
}

int first_slot(const std::vector<int>& mono) {
    for (size_t k = 0; k < mono.size(); ++k)
        if (mono[k] > 0) return static_cast<int>(k);
    return -1;
}

}  // namespace

UqAlgebra::UqAlgebra(const RootSystem& rs, int num_L_symbols)
    : rs_(rs), mL_(num_L_symbols),
      ring_(VarSet::make(coeff_names(num_L_symbols),
                         std::vector<bool>(1 + num_L_symbols, true))) {
    if (rs.letter == 'A' && rs.rank == 1) {
        pbw_roots_ = {{1}};
        simple_slot_ = {0};
    } else if (rs.letter == 'A' && rs.rank == 2) {
        // convex order alpha1 < alpha1+alpha2 < alpha2
        pbw_roots_ = {{1, 0}, {1, 1}, {0, 1}};
        simple_slot_ = {0, 2};
    } else {
        throw std::invalid_argument("UqAlgebra: quantum layer supports A1 and A2 only");
    }
    qi_power_ = rs.d;

    if (rs.rank == 2) {
        // Straightening rules onto the PBW order, from
        // E12 := E1 E2 - q^-1 E2 E1 and the q-Serre relations; the F-side is
        // the image under the antiautomorphism E_i -> F_i.
        auto qp = [&](long n) { return q_power(n); };
        // E2*E1 -> q E1E2 - q E12
        rules_[{true, 2, 0}] = {{qp(1), {0, 2}}, {FractionElement::zero(ring_) - qp(1), {1}}};
        // E12*E1 -> q^-1 E1 E12
        rules_[{true, 1, 0}] = {{qp(-1), {0, 1}}};
        // E2*E12 -> q^-1 E12 E2
        rules_[{true, 2, 1}] = {{qp(-1), {1, 2}}};
        // F2*F1 -> F12 + q^-1 F1F2
        rules_[{false, 2, 0}] = {{coeff_one(), {1}}, {qp(-1), {0, 2}}};
        // F12*F1 -> q F1 F12
        rules_[{false, 1, 0}] = {{qp(1), {0, 1}}};
        // F2*F12 -> q F12 F2
        rules_[{false, 2, 1}] = {{qp(1), {1, 2}}};
    }
}

FractionElement UqAlgebra::q_power(long n) const {
    return FractionElement(MultiPoly::variable(ring_, 0, static_cast<int>(n)));
}

UqElement UqAlgebra::one() const {
    UqElement x;
    UqMono m{std::vector<int>(pbw_roots_.size(), 0), std::vector<int>(rs_.rank, 0),
             std::vector<int>(pbw_roots_.size(), 0)};
    x.terms.emplace(std::move(m), coeff_one());
    return x;
}

UqElement UqAlgebra::E(int i) const {
    UqElement x = one();
    UqMono m = x.terms.begin()->first;
    x.terms.clear();
    m.eexp[simple_slot_[i]] = 1;
    x.terms.emplace(std::move(m), coeff_one());
    return x;
}

UqElement UqAlgebra::F(int i) const {
    UqElement x = one();
    UqMono m = x.terms.begin()->first;
    x.terms.clear();
    m.fexp[simple_slot_[i]] = 1;
    x.terms.emplace(std::move(m), coeff_one());
    return x;
}

UqElement UqAlgebra::K(const std::vector<int>& lattice) const {
    UqElement x = one();
    UqMono m = x.terms.begin()->first;
    x.terms.clear();
    m.kvec = lattice;
    x.terms.emplace(std::move(m), coeff_one());
    return x;
}

UqElement UqAlgebra::Ki(int i, int power) const {
    std::vector<int> v(rs_.rank, 0);
    v[i] = power;
    return K(v);
}

UqElement UqAlgebra::add(const UqElement& a, const UqElement& b) const {
    UqElement r = a;
    for (const auto& [m, c] : b.terms) {
        auto it = r.terms.find(m);
        if (it == r.terms.end()) {
            if (!c.is_zero()) r.terms.emplace(m, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) r.terms.erase(it);
        }
    }
    return r;
}

UqElement UqAlgebra::sub(const UqElement& a, const UqElement& b) const {
    return add(a, scale(b, FractionElement::constant(ring_, Rational(-1))));
}

UqElement UqAlgebra::scale(const UqElement& a, const FractionElement& c) const {
    UqElement r;
    if (c.is_zero()) return r;
    for (const auto& [m, cc] : a.terms) r.terms.emplace(m, cc * c);
    return r;
}

Root UqAlgebra::weight_of(const UqMono& m) const {
    Root w(rs_.rank, 0);
    for (size_t s = 0; s < pbw_roots_.size(); ++s) {
        for (int i = 0; i < rs_.rank; ++i)
            w[i] += (m.eexp[s] - m.fexp[s]) * pbw_roots_[s][i];
    }
    return w;
}

bool UqAlgebra::weight_homogeneous(const UqElement& x, Root* w) const {
    bool first = true;
    Root w0;
    for (const auto& [m, c] : x.terms) {
        Root wm = weight_of(m);
        if (first) {
            w0 = wm;
            first = false;
        } else if (wm != w0) {
            return false;
        }
    }
    if (w) *w = first ? Root(rs_.rank, 0) : w0;
    return true;
}

long UqAlgebra::k_commute_power(const std::vector<int>& lattice, const Root& wt) const {
    // (sum u_i alpha_i, sum w_j alpha_j) with (alpha_i, alpha_j) = d_i a_ij.
    long acc = 0;
    for (int i = 0; i < rs_.rank; ++i)
        for (int j = 0; j < rs_.rank; ++j)
            acc += static_cast<long>(lattice[i]) * wt[j] * rs_.d[i] * rs_.cartan[i][j];
    return acc;
}

std::map<std::vector<int>, FractionElement> UqAlgebra::insert_letter(bool eside, int slot,
                                                                     const std::vector<int>& mono) {
    auto key = std::make_tuple(eside, slot, mono);
    auto hit = insert_memo_.find(key);
    if (hit != insert_memo_.end()) return hit->second;

    std::map<std::vector<int>, FractionElement> out;
    int j = first_slot(mono);
    if (j < 0 || slot <= j) {
        std::vector<int> e = mono;
        e[slot] += 1;
        out.emplace(std::move(e), coeff_one());
    } else {
        auto rule = rules_.find({eside, slot, j});
        if (rule == rules_.end()) throw std::logic_error("insert_letter: missing rewrite rule");
        std::vector<int> rest = mono;
        rest[j] -= 1;
        for (const auto& [c, word] : rule->second) {
            // multiply `word` (slot letters, left to right) onto `rest`
            std::map<std::vector<int>, FractionElement> acc;
            acc.emplace(rest, c);
            for (int p = static_cast<int>(word.size()) - 1; p >= 0; --p) {
                std::map<std::vector<int>, FractionElement> nxt;
                for (const auto& [m, cc] : acc) {
                    for (const auto& [m2, c2] : insert_letter(eside, word[p], m)) {
                        auto it = nxt.find(m2);
                        FractionElement v = cc * c2;
                        if (it == nxt.end()) {
                            if (!v.is_zero()) nxt.emplace(m2, v);
                        } else {
                            it->second += v;
                            if (it->second.is_zero()) nxt.erase(it);
                        }
                    }
                }
                acc = std::move(nxt);
            }
            for (const auto& [m, cc] : acc) {
                auto it = out.find(m);
                if (it == out.end()) {
                    if (!cc.is_zero()) out.emplace(m, cc);
                } else {
                    it->second += cc;
                    if (it->second.is_zero()) out.erase(it);
                }
            }
        }
    }
    insert_memo_.emplace(std::move(key), out);
    return out;
}

std::vector<std::pair<FractionElement, UqAlgebra::SimpleWord>> UqAlgebra::expand_word(
    bool eside, const std::vector<int>& pbw) const {
    // Expansion of each PBW slot into simple-generator words:
    // slot of a simple root -> the single letter; the A2 middle root expands
    // by its definition (E12 = E1E2 - q^-1 E2E1, F12 = F2F1 - q^-1 F1F2).
    std::vector<std::pair<FractionElement, SimpleWord>> acc{{coeff_one(), {}}};
    for (size_t s = 0; s < pbw.size(); ++s) {
        for (int rep = 0; rep < pbw[s]; ++rep) {
            std::vector<std::pair<FractionElement, SimpleWord>> slot_exp;
            if (rs_.rank == 1 || s == 0 || s == 2) {
                int simple = (rs_.rank == 1) ? 0 : (s == 0 ? 0 : 1);
                slot_exp = {{coeff_one(), {simple}}};
            } else {
                if (eside)
                    slot_exp = {{coeff_one(), {0, 1}},
                                {FractionElement::zero(ring_) - q_power(-1), {1, 0}}};
                else
                    slot_exp = {{coeff_one(), {1, 0}},
                                {FractionElement::zero(ring_) - q_power(-1), {0, 1}}};
            }
            std::vector<std::pair<FractionElement, SimpleWord>> nxt;
            for (const auto& [c1, w1] : acc) {
                for (const auto& [c2, w2] : slot_exp) {
                    SimpleWord w = w1;
                    w.insert(w.end(), w2.begin(), w2.end());
                    nxt.emplace_back(c1 * c2, std::move(w));
                }
            }
            acc = std::move(nxt);
        }
    }
    return acc;
}

UqElement UqAlgebra::push_e_through(int ei, const SimpleWord& fword) {
    auto key = std::make_pair(ei, fword);
    auto hit = push_memo_.find(key);
    if (hit != push_memo_.end()) return hit->second;

    UqElement out;
    if (fword.empty()) {
        out = E(ei);
    } else {
        int fj = fword.front();
        SimpleWord rest(fword.begin() + 1, fword.end());
        // part 1: F_j * (E_i * rest)
        UqElement inner = push_e_through(ei, rest);
        out = leftmul_f_slot(simple_slot_[fj], inner);
        // part 2: the commutator term (K_i - K_i^-1)/(q_i - q_i^-1) * rest
        if (ei == fj) {
            FractionElement denom =
                FractionElement(MultiPoly::variable(ring_, 0, qi_power_[ei]) -
                                MultiPoly::variable(ring_, 0, -qi_power_[ei]));
            // compress `rest` into PBW monomials
            std::map<std::vector<int>, FractionElement> monos;
            monos.emplace(std::vector<int>(pbw_roots_.size(), 0), coeff_one());
            for (int p = static_cast<int>(rest.size()) - 1; p >= 0; --p) {
                std::map<std::vector<int>, FractionElement> nxt;
                for (const auto& [m, cc] : monos) {
                    for (const auto& [m2, c2] : insert_letter(false, simple_slot_[rest[p]], m)) {
                        auto it = nxt.find(m2);
                        FractionElement v = cc * c2;
                        if (it == nxt.end())
                            nxt.emplace(m2, v);
                        else
                            it->second += v;
                    }
                }
                monos = std::move(nxt);
            }
            for (const auto& [fm, cc] : monos) {
                Root wt(rs_.rank, 0);
                for (size_t s = 0; s < fm.size(); ++s)
                    for (int t = 0; t < rs_.rank; ++t) wt[t] -= fm[s] * pbw_roots_[s][t];
                std::vector<int> ei_lat(rs_.rank, 0);
                ei_lat[ei] = 1;
                long pw = k_commute_power(ei_lat, wt);
                UqMono plus{fm, ei_lat, std::vector<int>(pbw_roots_.size(), 0)};
                std::vector<int> mi_lat(rs_.rank, 0);
                mi_lat[ei] = -1;
                UqMono minus{fm, mi_lat, std::vector<int>(pbw_roots_.size(), 0)};
                FractionElement cp = cc * q_power(pw) / denom;
                FractionElement cm = cc * q_power(-pw) / denom;
                UqElement term;
                term.terms.emplace(std::move(plus), cp);
                out = add(out, term);
                UqElement term2;
                term2.terms.emplace(std::move(minus), FractionElement::zero(ring_) - cm);
                out = add(out, term2);
            }
        }
    }
    push_memo_.emplace(std::move(key), out);
    return out;
}

UqElement UqAlgebra::leftmul_f_slot(int slot, const UqElement& x) {
    UqElement out;
    for (const auto& [m, c] : x.terms) {
        for (const auto& [f2, c2] : insert_letter(false, slot, m.fexp)) {
            UqMono m2{f2, m.kvec, m.eexp};
            FractionElement v = c * c2;
            auto it = out.terms.find(m2);
            if (it == out.terms.end()) {
                if (!v.is_zero()) out.terms.emplace(std::move(m2), v);
            } else {
                it->second += v;
                if (it->second.is_zero()) out.terms.erase(it);
            }
        }
    }
    return out;
}

UqElement UqAlgebra::leftmul_e_letter(int ei, const UqElement& x) {
    UqElement out;
    for (const auto& [m, c] : x.terms) {
        // E_i * F^f K^k E^e
        for (const auto& [cf, sfw] : expand_word(false, m.fexp)) {
            UqElement pushed = push_e_through(ei, sfw);
            for (const auto& [pm, pc] : pushed.terms) {
                // combine (F^{pf} K^{pk} E^{pe}) * K^{mk} E^{me}
                Root wt_pe(rs_.rank, 0);
                for (size_t s = 0; s < pm.eexp.size(); ++s)
                    for (int t = 0; t < rs_.rank; ++t) wt_pe[t] += pm.eexp[s] * pbw_roots_[s][t];
                long pw = -k_commute_power(m.kvec, wt_pe);
                FractionElement coeff = c * cf * pc * q_power(pw);
                std::vector<int> kv = pm.kvec;
                for (int t = 0; t < rs_.rank; ++t) kv[t] += m.kvec[t];
                // E^{pe} * E^{me}: pe is a single letter or empty
                int pe_slot = first_slot(pm.eexp);
                if (pe_slot < 0) {
                    UqMono m2{pm.fexp, kv, m.eexp};
                    UqElement term;
                    term.terms.emplace(std::move(m2), coeff);
                    out = add(out, term);
                } else {
                    for (const auto& [e2, c2] : insert_letter(true, pe_slot, m.eexp)) {
                        UqMono m2{pm.fexp, kv, e2};
                        UqElement term;
                        term.terms.emplace(std::move(m2), coeff * c2);
                        out = add(out, term);
                    }
                }
            }
        }
    }
    return out;
}

UqElement UqAlgebra::mul_mono(const UqMono& a, const UqMono& b) {
    auto key = std::make_pair(a, b);
    auto hit = mul_memo_.find(key);
    if (hit != mul_memo_.end()) return hit->second;

    // Start from E^{ae} * F^{bf}, crossing E letters right to left.
    UqElement cross;
    {
        UqMono base{b.fexp, std::vector<int>(rs_.rank, 0), std::vector<int>(pbw_roots_.size(), 0)};
        UqElement start;
        start.terms.emplace(std::move(base), coeff_one());
        for (const auto& [ce, sew] : expand_word(true, a.eexp)) {
            UqElement part = start;
            for (int p = static_cast<int>(sew.size()) - 1; p >= 0; --p)
                part = leftmul_e_letter(sew[p], part);
            cross = add(cross, scale(part, ce));
        }
    }

    // Attach the right factors K^{bk} E^{be} and the left factors F^{af} K^{ak}.
    UqElement out;
    for (const auto& [m, c] : cross.terms) {
        Root wt_e(rs_.rank, 0);
        for (size_t s = 0; s < m.eexp.size(); ++s)
            for (int t = 0; t < rs_.rank; ++t) wt_e[t] += m.eexp[s] * pbw_roots_[s][t];
        long pw_right = -k_commute_power(b.kvec, wt_e);
        std::vector<int> kv = m.kvec;
        for (int t = 0; t < rs_.rank; ++t) kv[t] += b.kvec[t];

        // E^{me} * E^{be}
        std::map<std::vector<int>, FractionElement> eprod;
        eprod.emplace(b.eexp, coeff_one());
        for (int s = static_cast<int>(pbw_roots_.size()) - 1; s >= 0; --s) {
            for (int rep = 0; rep < m.eexp[s]; ++rep) {
                std::map<std::vector<int>, FractionElement> nxt;
                for (const auto& [em, ec] : eprod) {
                    for (const auto& [e2, c2] : insert_letter(true, s, em)) {
                        auto it = nxt.find(e2);
                        FractionElement v = ec * c2;
                        if (it == nxt.end())
                            nxt.emplace(e2, v);
                        else
                            it->second += v;
                    }
                }
                eprod = std::move(nxt);
            }
        }

        // left: F^{af} K^{ak} * F^{mf} ...
        Root wt_f(rs_.rank, 0);
        for (size_t s = 0; s < m.fexp.size(); ++s)
            for (int t = 0; t < rs_.rank; ++t) wt_f[t] -= m.fexp[s] * pbw_roots_[s][t];
        long pw_left = k_commute_power(a.kvec, wt_f);
        for (int t = 0; t < rs_.rank; ++t) kv[t] += a.kvec[t];

        std::map<std::vector<int>, FractionElement> fprod;
        fprod.emplace(m.fexp, coeff_one());
        for (int s = static_cast<int>(pbw_roots_.size()) - 1; s >= 0; --s) {
            for (int rep = 0; rep < a.fexp[s]; ++rep) {
                std::map<std::vector<int>, FractionElement> nxt;
                for (const auto& [fm, fc] : fprod) {
                    for (const auto& [f2, c2] : insert_letter(false, s, fm)) {
                        auto it = nxt.find(f2);
                        FractionElement v = fc * c2;
                        if (it == nxt.end())
                            nxt.emplace(f2, v);
                        else
                            it->second += v;
                    }
                }
                fprod = std::move(nxt);
            }
        }

        FractionElement cc = c * q_power(pw_right + pw_left);
        for (const auto& [fm, fc] : fprod) {
            for (const auto& [em, ec] : eprod) {
                UqMono m2{fm, kv, em};
                FractionElement v = cc * fc * ec;
                auto it = out.terms.find(m2);
                if (it == out.terms.end()) {
                    if (!v.is_zero()) out.terms.emplace(std::move(m2), v);
                } else {
                    it->second += v;
                    if (it->second.is_zero()) out.terms.erase(it);
                }
            }
        }
    }
    mul_memo_.emplace(std::move(key), out);
    return out;
}

UqElement UqAlgebra::mul(const UqElement& a, const UqElement& b) const {
    UqElement out;
    auto* self = const_cast<UqAlgebra*>(this);
    for (const auto& [ma, ca] : a.terms) {
        for (const auto& [mb, cb] : b.terms) {
            UqElement part = self->mul_mono(ma, mb);
            FractionElement c = ca * cb;
            for (const auto& [m, cc] : part.terms) {
                FractionElement v = cc * c;
                auto it = out.terms.find(m);
                if (it == out.terms.end()) {
                    if (!v.is_zero()) out.terms.emplace(m, v);
                } else {
                    it->second += v;
                    if (it->second.is_zero()) out.terms.erase(it);
                }
            }
        }
    }
    return out;
}

// --- Hopf structure ---------------------------------------------------------

UqAlgebra::Tensor UqAlgebra::tensor_mul(const Tensor& a, const Tensor& b) const {
    Tensor out;
    for (const auto& [pa, ca] : a) {
        for (const auto& [pb, cb] : b) {
            UqElement left = mul(UqElement{{{pa.first, coeff_one()}}},
                                 UqElement{{{pb.first, coeff_one()}}});
            UqElement right = mul(UqElement{{{pa.second, coeff_one()}}},
                                  UqElement{{{pb.second, coeff_one()}}});
            FractionElement c = ca * cb;
            for (const auto& [ml, cl] : left.terms) {
                for (const auto& [mr, cr] : right.terms) {
                    auto key = std::make_pair(ml, mr);
                    FractionElement v = c * cl * cr;
                    auto it = out.find(key);
                    if (it == out.end()) {
                        if (!v.is_zero()) out.emplace(std::move(key), v);
                    } else {
                        it->second += v;
                        if (it->second.is_zero()) out.erase(it);
                    }
                }
            }
        }
    }
    return out;
}

UqAlgebra::Tensor UqAlgebra::tensor_sub(const Tensor& a, const Tensor& b) const {
    Tensor out = a;
    for (const auto& [p, c] : b) {
        auto it = out.find(p);
        FractionElement v = FractionElement::zero(ring_) - c;
        if (it == out.end()) {
            if (!v.is_zero()) out.emplace(p, v);
        } else {
            it->second += v;
            if (it->second.is_zero()) out.erase(it);
        }
    }
    return out;
}

UqAlgebra::Tensor UqAlgebra::coproduct(const UqElement& x) const {
    // Delta is an algebra map: expand every monomial into generator letters.
    Tensor out;
    UqMono unit{std::vector<int>(pbw_roots_.size(), 0), std::vector<int>(rs_.rank, 0),
                std::vector<int>(pbw_roots_.size(), 0)};
    for (const auto& [m, c] : x.terms) {
        // Delta(F-part) * Delta(K) * Delta(E-part)
        Tensor acc;
        acc.emplace(std::make_pair(unit, unit), c);
        auto letter_tensor = [&](bool eside, int simple) {
            Tensor t;
            if (eside) {
                // Delta(E_i) = E_i x 1 + K_i x E_i
                UqMono e = unit;
                e.eexp[simple_slot_[simple]] = 1;
                UqMono k = unit;
                k.kvec[simple] = 1;
                t.emplace(std::make_pair(e, unit), coeff_one());
                t.emplace(std::make_pair(k, e), coeff_one());
            } else {
                // Delta(F_i) = F_i x K_i^-1 + 1 x F_i
                UqMono f = unit;
                f.fexp[simple_slot_[simple]] = 1;
                UqMono ki = unit;
                ki.kvec[simple] = -1;
                t.emplace(std::make_pair(f, ki), coeff_one());
                t.emplace(std::make_pair(unit, f), coeff_one());
            }
            return t;
        };
        for (const auto& [cf, fw] : expand_word(false, m.fexp)) {
            Tensor facc;
            facc.emplace(std::make_pair(unit, unit), cf);
            for (int letter : fw) facc = tensor_mul(facc, letter_tensor(false, letter));
            // K-part: grouplike
            UqMono kk = unit;
            kk.kvec = m.kvec;
            Tensor kt;
            kt.emplace(std::make_pair(kk, kk), coeff_one());
            facc = tensor_mul(facc, kt);
            for (const auto& [ce, ew] : expand_word(true, m.eexp)) {
                Tensor eacc;
                eacc.emplace(std::make_pair(unit, unit), ce);
                for (int letter : ew) eacc = tensor_mul(eacc, letter_tensor(true, letter));
                Tensor prod = tensor_mul(facc, eacc);
                for (const auto& [p, cc] : prod) {
                    FractionElement v = cc * c;
                    auto it = out.find(p);
                    if (it == out.end()) {
                        if (!v.is_zero()) out.emplace(p, v);
                    } else {
                        it->second += v;
                        if (it->second.is_zero()) out.erase(it);
                    }
                }
            }
        }
    }
    return out;
}

UqElement UqAlgebra::antipode(const UqElement& x) const {
    UqElement out;
    for (const auto& [m, c] : x.terms) {
        // S(F^f K^k E^e) = S(E^e) K^{-k} S(F^f), with S anti-multiplicative:
        // S of a word is the reversed product of S(E_i) = -K_i^-1 E_i and
        // S(F_i) = -F_i K_i.
        UqElement se;
        for (const auto& [ce, ew] : expand_word(true, m.eexp)) {
            UqElement acc = scale(one(), ce);
            for (auto it = ew.rbegin(); it != ew.rend(); ++it) {
                UqElement sletter = scale(mul(Ki(*it, -1), E(*it)),
                                          FractionElement::constant(ring_, Rational(-1)));
                acc = mul(acc, sletter);
            }
            se = add(se, acc);
        }
        std::vector<int> mk(rs_.rank);
        for (int t = 0; t < rs_.rank; ++t) mk[t] = -m.kvec[t];
        UqElement sf;
        for (const auto& [cf, fw] : expand_word(false, m.fexp)) {
            UqElement acc = scale(one(), cf);
            for (auto it = fw.rbegin(); it != fw.rend(); ++it) {
                // S(F_i) = -F_i K_i
                UqElement sletter = scale(mul(F(*it), Ki(*it, 1)),
                                          FractionElement::constant(ring_, Rational(-1)));
                acc = mul(acc, sletter);
            }
            sf = add(sf, acc);
        }
        UqElement term = mul(mul(se, K(mk)), sf);
        out = add(out, scale(term, c));
    }
    return out;
}

FractionElement UqAlgebra::counit(const UqElement& x) const {
    FractionElement acc = FractionElement::zero(ring_);
    std::vector<int> zero(pbw_roots_.size(), 0);
    for (const auto& [m, c] : x.terms) {
        if (m.fexp == zero && m.eexp == zero) acc += c;
    }
    return acc;
}

UqElement UqAlgebra::ad_generator(int gen, const UqElement& x) const {
    int r = rs_.rank;
    if (gen < r) {
        // ad(E_i) x = E_i x - K_i x K_i^-1 E_i
        int i = gen;
        UqElement t1 = mul(E(i), x);
        UqElement t2 = mul(Ki(i, 1), mul(x, mul(Ki(i, -1), E(i))));
        return sub(t1, t2);
    }
    // ad(F_i) x = F_i x K_i - x F_i K_i
    int i = gen - r;
    UqElement fk = mul(F(i), Ki(i, 1));
    return sub(mul(F(i), mul(x, Ki(i, 1))), mul(x, fk));
}

UqElement UqAlgebra::ad(const UqElement& u, const UqElement& x) const {
    UqElement out;
    Tensor cop = coproduct(u);
    for (const auto& [p, c] : cop) {
        UqElement u1{{{p.first, coeff_one()}}};
        UqElement u2{{{p.second, coeff_one()}}};
        UqElement term = mul(mul(u1, x), antipode(u2));
        out = add(out, scale(term, c));
    }
    return out;
}

UqElement UqAlgebra::shift_valuation(const UqElement& x, int k) const {
    if (k == 0) return x;
    FractionElement qq = FractionElement(MultiPoly::variable(ring_, 0, 1) -
                                         MultiPoly::variable(ring_, 0, -1));
    FractionElement f = coeff_one();
    for (int i = 0; i < std::abs(k); ++i) f = k > 0 ? f / qq : f * qq;
    return scale(x, f);
}

ClassicalUElement UqAlgebra::classical_limit(const UqElement& x) const {
    // Group by (fexp, eexp); expand coefficients and K-powers in t, demand a
    // pole-free sum, and read the t^0 layer as an H-polynomial.
    std::vector<std::string> hn;
    for (int i = 0; i < rs_.rank; ++i) hn.push_back("Hc" + std::to_string(i + 1));
    VarSetPtr hring = VarSet::make(hn);
    QSeriesSpec spec;
    spec.source = ring_;
    spec.target = hring;
    spec.q_index = 0;  // q = e^t
    // no L symbols allowed here

    int order = 4;
    std::map<std::pair<std::vector<int>, std::vector<int>>, TSeries> groups;
    for (const auto& [m, c] : x.terms) {
        for (const auto& [e, cc] : c.num().terms())
            for (int j = 0; j < mL_; ++j)
                if (e[1 + j] != 0)
                    throw std::domain_error("classical_limit: coefficient involves L symbols");
        TSeries cs = q_series_expand(c, spec, order);
        MultiPoly expo = MultiPoly::zero(hring);
        for (int i = 0; i < rs_.rank; ++i)
            if (m.kvec[i] != 0)
                expo += MultiPoly::variable(hring, i) * Rational(m.kvec[i] * rs_.d[i]);
        TSeries ks = exp_series(expo, order);
        TSeries term = cs * ks;
        auto key = std::make_pair(m.fexp, m.eexp);
        auto it = groups.find(key);
        if (it == groups.end())
            groups.emplace(key, term);
        else
            it->second += term;
    }
    ClassicalUElement out;
    for (const auto& [key, series] : groups) {
        if (series.has_negative_part())
            throw std::domain_error("classical_limit: t-pole, no finite q->1 limit");
        MultiPoly h0 = series.coeff(0);
        for (const auto& [he, hc] : h0.terms()) {
            std::vector<int> full = key.first;
            for (int i = 0; i < rs_.rank; ++i) full.push_back(he[i]);
            full.insert(full.end(), key.second.begin(), key.second.end());
            auto it = out.terms.find(full);
            if (it == out.terms.end()) {
                if (!hc.is_zero()) out.terms.emplace(std::move(full), hc);
            } else {
                it->second += hc;
                if (it->second.is_zero()) out.terms.erase(it);
            }
        }
    }
    return out;
}

// --- quantized Verma module --------------------------------------------------

QVerma::QVerma(UqAlgebra& alg, int depth_cap) : alg_(alg), depth_cap_(depth_cap) {
    int ns = static_cast<int>(alg.pbw_roots().size());
    std::vector<int> heights(ns);
    for (int s = 0; s < ns; ++s) heights[s] = root_height(alg.pbw_roots()[s]);
    std::vector<int> cur(ns, 0);
    std::function<void(int, int)> rec = [&](int slot, int left) {
        if (slot == ns) {
            basis_.push_back(cur);
            return;
        }
        for (int k = 0; k * heights[slot] <= left; ++k) {
            cur[slot] = k;
            rec(slot + 1, left - k * heights[slot]);
        }
        cur[slot] = 0;
    };
    rec(0, depth_cap);
    auto depth_of = [&](const std::vector<int>& e) {
        int d = 0;
        for (int s = 0; s < ns; ++s) d += e[s] * heights[s];
        return d;
    };
    std::sort(basis_.begin(), basis_.end(), [&](const auto& a, const auto& b) {
        int da = depth_of(a), db = depth_of(b);
        if (da != db) return da < db;
        return a < b;
    });
    for (size_t i = 0; i < basis_.size(); ++i) {
        index_[basis_[i]] = static_cast<int>(i);
        depth_.push_back(depth_of(basis_[i]));
    }
}

int QVerma::count_depth_at_most(int d) const {
    int n = 0;
    while (n < dim() && depth_[n] <= d) ++n;
    return n;
}

QVerma::ActionMatrix QVerma::action(const UqElement& x) const {
    ActionMatrix am;
    am.mat = Matrix<FractionElement>(dim(), dim(), FractionElement::zero(alg_.coeff_ring()));
    int climb = 0;
    int ns = static_cast<int>(alg_.pbw_roots().size());
    std::vector<int> heights(ns);
    for (int s = 0; s < ns; ++s) heights[s] = root_height(alg_.pbw_roots()[s]);
    for (const auto& [m, c] : x.terms) {
        int d = 0;
        for (int s = 0; s < ns; ++s) d += m.fexp[s] * heights[s];
        climb = std::max(climb, d);
    }
    am.climb = climb;
    am.trust = depth_cap_ - climb;

    std::vector<int> zero(ns, 0);
    for (int col = 0; col < dim(); ++col) {
        UqMono vm{basis_[col], std::vector<int>(alg_.rs().rank, 0), zero};
        UqElement v{{{vm, alg_.coeff_one()}}};
        UqElement res = alg_.mul(x, v);
        for (const auto& [m, c] : res.terms) {
            if (m.eexp != zero) continue;  // E part annihilates v_0
            // K^k v0 = prod_j L_j^{d_j k_j} v0
            MultiPoly::Expo le(alg_.coeff_ring()->size(), 0);
            for (int j = 0; j < alg_.rs().rank; ++j) le[1 + j] = m.kvec[j] * alg_.rs().d[j];
            FractionElement eig(MultiPoly::monomial(alg_.coeff_ring(), le, Rational(1)));
            auto it = index_.find(m.fexp);
            if (it == index_.end()) continue;  // beyond the depth cap
            am.mat.at(it->second, col) += c * eig;
        }
    }
    return am;
}

// --- G_q ----------------------------------------------------------------------

namespace {

/// Sparse row reduction over the coefficient field Q(q): rows keyed by
/// UqMono, pivot at the smallest monomial, deterministic.
class FieldReducer {
public:
    explicit FieldReducer(const UqAlgebra& alg) : alg_(alg) {}

    std::map<UqMono, FractionElement> reduce(UqElement x) const {
        std::map<UqMono, FractionElement> row(x.terms.begin(), x.terms.end());
        for (size_t k = 0; k < rows_.size(); ++k) {
            auto it = row.find(pivots_[k]);
            if (it == row.end()) continue;
            FractionElement f = it->second;
            for (const auto& [m, c] : rows_[k]) {
                auto jt = row.find(m);
                FractionElement v = f * c;
                if (jt == row.end()) {
                    v = FractionElement::zero(alg_.coeff_ring()) - v;
                    if (!v.is_zero()) row.emplace(m, v);
                } else {
                    jt->second -= v;
                    if (jt->second.is_zero()) row.erase(jt);
                }
            }
        }
        return row;
    }

    bool add(const UqElement& x) {
        auto row = reduce(x);
        if (row.empty()) return false;
        FractionElement inv = row.begin()->second.inverse();
        for (auto& [m, c] : row) c = c * inv;
        pivots_.push_back(row.begin()->first);
        rows_.push_back(std::move(row));
        return true;
    }

    bool in_span(const UqElement& x) const { return reduce(x).empty(); }
    size_t rank() const { return rows_.size(); }

private:
    const UqAlgebra& alg_;
    std::vector<std::map<UqMono, FractionElement>> rows_;
    std::vector<UqMono> pivots_;
};

// Limit normalization: rescale by powers of (q - q^-1) until the q->1 limit
// is finite and nonzero.
bool normalize_limit(UqAlgebra& alg, UqElement& x, ClassicalUElement& lim) {
    for (int attempt = 0; attempt < 10; ++attempt) {
        try {
            lim = alg.classical_limit(x);
        } catch (const std::domain_error&) {
            x = alg.shift_valuation(x, -1);  // multiply by (q - q^-1)
            continue;
        }
        if (lim.is_zero()) {
            x = alg.shift_valuation(x, 1);  // divide by (q - q^-1)
            continue;
        }
        return true;
    }
    return false;
}

}  // namespace

GqBasis find_Gq(UqAlgebra& alg, const GqOptions& opts) {
    const RootSystem& rs = alg.rs();
    // Smallest nonzero dominant weight with scale*mu in the root lattice:
    // A1: omega (so scale * omega = (scale/2) alpha); A2: rho.
    std::vector<int> anchor(rs.rank, 0);
    if (rs.rank == 1) {
        if (opts.lattice_scale % 2 != 0)
            throw std::invalid_argument("find_Gq: scale * omega must lie in the root lattice");
        anchor[0] = opts.lattice_scale / 2;
    } else {
        for (int i = 0; i < rs.rank; ++i) anchor[i] = opts.lattice_scale;
    }

    GqBasis out;
    out.lattice_anchor = anchor;

    UqElement seed = alg.K(anchor);
    FieldReducer closure(alg);
    closure.add(seed);
    std::vector<UqElement> elems{seed};
    std::vector<Root> weights{Root(rs.rank, 0)};
    size_t frontier = 0;
    int rounds = 0;
    while (frontier < elems.size()) {
        if (++rounds > opts.max_rounds)
            throw Inconclusive("find_Gq: ad-closure not reached within the iteration cap");
        size_t end = elems.size();
        for (size_t k = frontier; k < end; ++k) {
            for (int g = 0; g < 2 * rs.rank; ++g) {
                UqElement y = alg.ad_generator(g, elems[k]);
                if (y.is_zero()) continue;
                if (closure.add(y)) {
                    Root w = weights[k];
                    int i = g < rs.rank ? g : g - rs.rank;
                    int sgn = g < rs.rank ? 1 : -1;
                    w[i] += sgn;
                    elems.push_back(y);
                    weights.push_back(w);
                }
            }
        }
        frontier = end;
    }
    out.closure_dim = closure.rank();

    // Highest-weight candidates at the highest root theta.
    Root theta = rs.positive_roots.back();
    std::vector<size_t> theta_idx;
    for (size_t k = 0; k < elems.size(); ++k)
        if (weights[k] == theta) theta_idx.push_back(k);
    if (theta_idx.empty()) throw std::logic_error("find_Gq: no weight-theta vectors in the closure");

    // Solve ad(E_i) (sum c_k b_k) = 0 over Q(q): coordinates of ad(E_i) b_k on
    // the monomial basis.
    std::map<UqMono, size_t> coords;
    std::vector<std::vector<UqElement>> ad_e(theta_idx.size());
    for (size_t kk = 0; kk < theta_idx.size(); ++kk) {
        for (int i = 0; i < rs.rank; ++i) {
            UqElement y = alg.ad_generator(i, elems[theta_idx[kk]]);
            for (const auto& [m, c] : y.terms) coords.emplace(m, 0);
            ad_e[kk].push_back(std::move(y));
        }
    }
    size_t nrow = 0;
    for (auto& [m, idx] : coords) idx = nrow++;
    Matrix<FractionElement> sys(nrow * rs.rank, theta_idx.size(),
                                FractionElement::zero(alg.coeff_ring()));
    for (size_t kk = 0; kk < theta_idx.size(); ++kk)
        for (int i = 0; i < rs.rank; ++i)
            for (const auto& [m, c] : ad_e[kk][i].terms)
                sys.at(static_cast<size_t>(i) * nrow + coords.at(m), kk) = c;
    auto hw = kernel_basis_field(sys, FractionElement::zero(alg.coeff_ring()), alg.coeff_one());
    if (hw.empty()) throw std::logic_error("find_Gq: no ad-highest-weight vector at theta");

    // Candidate selection: fewest monomials, then first; the limit must be a
    // nonzero multiple of the classical root vector.
    int dim_g = 2 * rs.num_positive() + rs.rank;
    struct Candidate {
        std::vector<UqElement> basis;
        std::vector<Root> ws;
        size_t hw_terms = 0;
    };
    std::vector<Candidate> cands;
    for (const auto& kv : hw) {
        UqElement v;
        for (size_t kk = 0; kk < theta_idx.size(); ++kk)
            v = alg.add(v, alg.scale(elems[theta_idx[kk]], kv[kk]));
        if (v.is_zero()) continue;
        // Generate the copy: closure of v under all ad-generators.
        FieldReducer span(alg);
        span.add(v);
        std::vector<UqElement> bas{v};
        std::vector<Root> ws{theta};
        size_t fr = 0;
        bool ok = true;
        while (fr < bas.size()) {
            if (bas.size() > static_cast<size_t>(dim_g)) {
                ok = false;
                break;
            }
            size_t end = bas.size();
            for (size_t k = fr; k < end; ++k) {
                for (int g = 0; g < 2 * rs.rank; ++g) {
                    UqElement y = alg.ad_generator(g, bas[k]);
                    if (y.is_zero()) continue;
                    if (span.add(y)) {
                        Root w = ws[k];
                        int i = g < rs.rank ? g : g - rs.rank;
                        w[i] += g < rs.rank ? 1 : -1;
                        bas.push_back(y);
                        ws.push_back(w);
                    }
                }
            }
            fr = end;
        }
        if (!ok || bas.size() != static_cast<size_t>(dim_g)) continue;
        cands.push_back(Candidate{std::move(bas), std::move(ws), v.terms.size()});
    }
    if (cands.empty())
        throw std::logic_error("find_Gq: no ad-closed copy of the right dimension");
    std::stable_sort(cands.begin(), cands.end(),
                     [](const Candidate& a, const Candidate& b) { return a.hw_terms < b.hw_terms; });

    for (auto& cand : cands) {
        // Normalize limits against the classical Chevalley basis: the copy's
        // weight-alpha members must limit to multiples of the root vectors,
        // and its Cartan members must combine to the coroots.
        std::vector<ClassicalUElement> lims(cand.basis.size());
        bool fine = true;
        for (size_t k = 0; k < cand.basis.size() && fine; ++k)
            fine = normalize_limit(alg, cand.basis[k], lims[k]);
        if (!fine) continue;

        // Expected classical coordinates.
        int ns = static_cast<int>(alg.pbw_roots().size());
        auto unit_key = [&](bool eside, int slot) {
            std::vector<int> key(ns, 0);
            key[slot] = 1;
            std::vector<int> full;
            if (eside) {
                full.assign(ns, 0);
                std::vector<int> h(rs.rank, 0);
                full.insert(full.end(), h.begin(), h.end());
                full.insert(full.end(), key.begin(), key.end());
            } else {
                full = key;
                std::vector<int> h(rs.rank, 0);
                full.insert(full.end(), h.begin(), h.end());
                std::vector<int> e(ns, 0);
                full.insert(full.end(), e.begin(), e.end());
            }
            return full;
        };
        auto h_key = [&](int i) {
            std::vector<int> full(ns, 0);
            std::vector<int> h(rs.rank, 0);
            h[i] = 1;
            full.insert(full.end(), h.begin(), h.end());
            std::vector<int> e(ns, 0);
            full.insert(full.end(), e.begin(), e.end());
            return full;
        };
        auto const_key = [&]() {
            std::vector<int> full(ns, 0);
            std::vector<int> h(rs.rank, 0);
            full.insert(full.end(), h.begin(), h.end());
            std::vector<int> e(ns, 0);
            full.insert(full.end(), e.begin(), e.end());
            return full;
        };

        // Root-direction elements: rescale so the limit is exactly the unit
        // coordinate on the corresponding root vector slot.
        bool good = true;
        std::vector<UqElement> final_basis(cand.basis.size());
        std::vector<ClassicalUElement> final_lims(cand.basis.size());
        std::vector<size_t> cartan_members;
        for (size_t k = 0; k < cand.basis.size(); ++k) {
            Root w = cand.ws[k];
            bool zero_w = std::all_of(w.begin(), w.end(), [](int c) { return c == 0; });
            if (zero_w) {
                cartan_members.push_back(k);
                continue;
            }
            bool negative = false;
            Root pos = w;
            if (std::any_of(w.begin(), w.end(), [](int c) { return c < 0; })) {
                negative = true;
                for (auto& c : pos) c = -c;
            }
            int slot = -1;
            for (int s = 0; s < ns; ++s)
                if (alg.pbw_roots()[s] == pos) slot = s;
            if (slot < 0) {
                good = false;
                break;
            }
            auto key = unit_key(!negative, slot);
            auto it = lims[k].terms.find(key);
            if (it == lims[k].terms.end() || lims[k].terms.size() != 1) {
                good = false;
                break;
            }
            Rational c = it->second;
            final_basis[k] =
                alg.scale(cand.basis[k], FractionElement::constant(alg.coeff_ring(), c.inverse()));
            ClassicalUElement lim;
            lim.terms.emplace(key, Rational(1));
            final_lims[k] = lim;
        }
        if (!good) continue;

        // Cartan directions: subtract the scalar part, then solve for the
        // rational combination with limit exactly the coroot H_i.
        size_t nc = cartan_members.size();
        if (nc != static_cast<size_t>(rs.rank)) continue;
        RatMatrix hm(rs.rank, nc, Rational(0));
        std::vector<Rational> consts(nc, Rational(0));
        for (size_t j = 0; j < nc; ++j) {
            const ClassicalUElement& lim = lims[cartan_members[j]];
            for (const auto& [key, c] : lim.terms) {
                if (key == const_key()) {
                    consts[j] = c;
                    continue;
                }
                bool matched = false;
                for (int i = 0; i < rs.rank; ++i)
                    if (key == h_key(i)) {
                        hm.at(i, j) = c;
                        matched = true;
                    }
                if (!matched) {
                    good = false;
                }
            }
        }
        if (!good) continue;
        for (int i = 0; i < rs.rank && good; ++i) {
            std::vector<Rational> rhs(rs.rank, Rational(0)), sol;
            rhs[i] = Rational(1);
            if (!solve(hm, rhs, sol)) {
                good = false;
                break;
            }
            UqElement combo;
            Rational cshift(0);
            for (size_t j = 0; j < nc; ++j) {
                combo = alg.add(combo, alg.scale(cand.basis[cartan_members[j]],
                                                 FractionElement::constant(alg.coeff_ring(), sol[j])));
                cshift += sol[j] * consts[j];
            }
            // subtract the identity component
            combo = alg.sub(combo, alg.scale(alg.one(),
                                             FractionElement::constant(alg.coeff_ring(), cshift)));
            final_basis[cartan_members[static_cast<size_t>(i)]] = combo;
            ClassicalUElement lim;
            lim.terms.emplace(h_key(i), Rational(1));
            final_lims[cartan_members[static_cast<size_t>(i)]] = lim;
            cand.ws[cartan_members[static_cast<size_t>(i)]] = Root(rs.rank, 0);
        }
        if (!good) continue;

        out.elements = std::move(final_basis);
        out.weights = cand.ws;
        out.limits = std::move(final_lims);
        return out;
    }
    throw std::logic_error("find_Gq: no candidate with the correct classical limit");
}

// --- t-series slices ----------------------------------------------------------

QSliceBuilder::QSliceBuilder(UqAlgebra& alg, const GqBasis& gq, int depth_cap, int t_order)
    : alg_(alg), gq_(gq), qv_(alg, depth_cap), t_order_(t_order) {
    int m = static_cast<int>(alg.coeff_ring()->size()) - 1;
    std::vector<std::string> nn;
    for (int j = 0; j < m; ++j) nn.push_back("n" + std::to_string(j + 1));
    nu_ring_ = VarSet::make(nn);
    spec_.source = alg.coeff_ring();
    spec_.target = nu_ring_;
    spec_.q_index = 0;
    for (int j = 0; j < m; ++j) {
        spec_.L_index.push_back(1 + j);
        spec_.L_exponent_var.push_back(j);
    }
    for (const auto& x : gq.elements) {
        QVerma::ActionMatrix am = qv_.action(x);
        q_gens_.push_back(am);
        TOp top = expand_action(am);
        // degree-one elements: the t^0 layer must be (lambda, h)-polynomial,
        // i.e. of nu-degree <= 1
        for (size_t i = 0; i < top.orders[0].rows(); ++i)
            for (size_t j = 0; j < top.orders[0].cols(); ++j)
                if (top.orders[0].at(i, j).total_degree() > 1)
                    throw std::logic_error(
                        "QSliceBuilder: generator t^0 layer not polynomial in (lambda, h)");
        gen_ops_.push_back(std::move(top));
    }
}

TOp QSliceBuilder::expand_action(const QVerma::ActionMatrix& am) const {
    TOp top;
    top.climb = am.climb;
    top.trust = am.trust;
    top.orders.assign(t_order_ + 1,
                      Matrix<MultiPoly>(am.mat.rows(), am.mat.cols(), MultiPoly::zero(nu_ring_)));
    for (size_t i = 0; i < am.mat.rows(); ++i) {
        for (size_t j = 0; j < am.mat.cols(); ++j) {
            const FractionElement& f = am.mat.at(i, j);
            if (f.is_zero()) continue;
            TSeries s = q_series_expand(f, spec_, t_order_);
            TSeries reg = s.regular_part_checked(t_order_);
            for (int k = 0; k <= reg.order(); ++k) top.orders[k].at(i, j) = reg.coeff(k);
        }
    }
    return top;
}

TOp QSliceBuilder::mul_tops(const TOp& a, const TOp& b) const {
    TOp r;
    r.climb = a.climb + b.climb;
    r.trust = std::min(b.trust, a.trust - b.climb);
    size_t n = a.orders[0].rows();
    r.orders.assign(t_order_ + 1, Matrix<MultiPoly>(n, n, MultiPoly::zero(nu_ring_)));
    for (int i = 0; i <= t_order_; ++i)
        for (int j = 0; i + j <= t_order_; ++j)
            r.orders[i + j] = r.orders[i + j] + a.orders[i] * b.orders[j];
    return r;
}

std::vector<QSlice> QSliceBuilder::build_slices(int d_max) {
    std::vector<QSlice> slices;
    int D = qv_.depth_cap();
    int m = static_cast<int>(nu_ring_->size());

    QSlice s0;
    s0.degree = 0;
    TOp id;
    id.climb = 0;
    id.trust = D;
    id.orders.assign(t_order_ + 1, Matrix<MultiPoly>(qv_.dim(), qv_.dim(), MultiPoly::zero(nu_ring_)));
    id.orders[0] = Matrix<MultiPoly>::identity(qv_.dim(), MultiPoly::zero(nu_ring_),
                                               MultiPoly::constant(nu_ring_, Rational(1)));
    s0.spanning.push_back(std::move(id));
    s0.basis_indices = {0};
    s0.ranks_per_order.assign(t_order_ + 1, 1);
    s0.window = D;
    slices.push_back(std::move(s0));

    for (int d = 1; d <= d_max; ++d) {
        QSlice s;
        s.degree = d;
        const QSlice& prev = slices.back();
        for (int bi : prev.basis_indices) {
            const TOp& b = prev.spanning[bi];
            for (const TOp& g : gen_ops_) s.spanning.push_back(mul_tops(g, b));
            for (int j = 0; j < m; ++j) {
                TOp op = b;
                MultiPoly nu = MultiPoly::variable(nu_ring_, j);
                for (auto& mat : op.orders) mat = mat.scaled(nu);
                s.spanning.push_back(std::move(op));
            }
            s.spanning.push_back(b);  // multiplication by h: identity on nu-data
        }
        int window = D;
        for (const auto& op : s.spanning) window = std::min(window, op.trust);
        if (window < 0) throw Inconclusive("QSliceBuilder: depth budget exhausted");
        s.window = window;
        int cols = qv_.count_depth_at_most(window);

        // order-agnostic key space shared by all layers
        std::map<std::tuple<size_t, size_t, std::vector<int>>, size_t> pos_index;
        for (const auto& op : s.spanning)
            for (int k = 0; k <= t_order_; ++k)
                for (size_t i = 0; i < op.orders[k].rows(); ++i)
                    for (size_t j = 0; j < static_cast<size_t>(cols); ++j)
                        for (const auto& [e, c] : op.orders[k].at(i, j).terms())
                            pos_index.emplace(std::make_tuple(i, j, e), 0);
        size_t pos_n = 0;
        for (auto& [key, v] : pos_index) v = pos_n++;
        auto flatten_layer = [&](const TOp& op, int k) {
            std::vector<Rational> row(pos_n, Rational(0));
            for (size_t i = 0; i < op.orders[k].rows(); ++i)
                for (size_t j = 0; j < static_cast<size_t>(cols); ++j)
                    for (const auto& [e, c] : op.orders[k].at(i, j).terms())
                        row[pos_index.at(std::make_tuple(i, j, e))] = c;
            return row;
        };

        // rank of the flattened data truncated at each t-order
        for (int ord = 0; ord <= t_order_; ++ord) {
            RowReducer rr;
            std::vector<int> indep;
            for (size_t r = 0; r < s.spanning.size(); ++r) {
                std::vector<Rational> row;
                for (int k = 0; k <= ord; ++k) {
                    auto layer = flatten_layer(s.spanning[r], k);
                    row.insert(row.end(), layer.begin(), layer.end());
                }
                if (rr.add(std::move(row)) && ord == t_order_)
                    indep.push_back(static_cast<int>(r));
            }
            s.ranks_per_order.push_back(rr.rank());
            if (ord == t_order_) s.basis_indices = indep;
        }

        // t-saturation (freeness shadow): a combination vanishing through
        // order j is t^{j+1} times a module element, so its next layer must
        // sit inside the span of the t^0 layers.
        RowReducer span0;
        for (const auto& op : s.spanning) span0.add(flatten_layer(op, 0));
        s.t_saturated = true;
        for (int j = 0; j + 1 <= t_order_ && s.t_saturated; ++j) {
            // kernel of the cumulative order-<=j flattening
            size_t nops = s.spanning.size();
            RatMatrix sys(pos_n * (j + 1), nops, Rational(0));
            for (size_t r = 0; r < nops; ++r)
                for (int k = 0; k <= j; ++k) {
                    auto layer = flatten_layer(s.spanning[r], k);
                    for (size_t p = 0; p < pos_n; ++p)
                        sys.at(static_cast<size_t>(k) * pos_n + p, r) = layer[p];
                }
            for (const auto& kv : kernel_basis(sys)) {
                std::vector<Rational> next(pos_n, Rational(0));
                for (size_t r = 0; r < nops; ++r) {
                    if (kv[r].is_zero()) continue;
                    auto layer = flatten_layer(s.spanning[r], j + 1);
                    for (size_t p = 0; p < pos_n; ++p) next[p] += kv[r] * layer[p];
                }
                if (!span0.in_span(next)) {
                    s.t_saturated = false;
                    break;
                }
            }
        }
        slices.push_back(std::move(s));
    }
    return slices;
}

QSliceBuilder::BracketTable QSliceBuilder::second_bracket_sl2(const Quantizer& classical) const {
    if (alg_.rs().rank != 1)
        throw std::invalid_argument("second_bracket_sl2: sl2 only");
    if (t_order_ < 2) throw std::invalid_argument("second_bracket_sl2: t-order must be >= 2");
    size_t n = gen_ops_.size();
    BracketTable tbl;
    tbl.t_part.assign(n, std::vector<RatMatrix>(n));
    tbl.kks_ok.assign(n, std::vector<bool>(n, false));

    // classical rescaled generators in nu-form (substitute h = 1, lambda = nu),
    // aligned with the G_q basis through the classical limits.
    std::vector<Matrix<MultiPoly>> classical_nu;
    std::vector<int> climbs;
    for (size_t k = 0; k < n; ++k) {
        int cb_index = -1;
        const auto& lim = gq_.limits[k];
        // the limit is a unit coordinate: find which basis element
        for (const auto& [key, c] : lim.terms) {
            // key = fexp ++ hexp ++ eexp over a single slot
            int ns = 1;
            if (key[0] == 1) cb_index = classical.chevalley().f_index(0);
            if (key[ns] == 1) cb_index = classical.chevalley().h_index(0);
            if (key[ns + 1] == 1) cb_index = classical.chevalley().e_index(0);
        }
        if (cb_index < 0) throw std::logic_error("second_bracket_sl2: unaligned G_q limit");
        const SliceOp& op = classical.generator_op(cb_index);
        climbs.push_back(op.climb);
        // substitute lambda -> nu, h -> 1
        Matrix<MultiPoly> mm(op.mat.rows(), op.mat.cols(), MultiPoly::zero(nu_ring_));
        for (size_t i = 0; i < op.mat.rows(); ++i)
            for (size_t j = 0; j < op.mat.cols(); ++j) {
                MultiPoly p(nu_ring_);
                for (const auto& [e, c] : op.mat.at(i, j).terms()) {
                    MultiPoly::Expo e2(nu_ring_->size(), 0);
                    e2[0] = e[0];  // lambda exponent; h exponent dropped
                    p += MultiPoly::monomial(nu_ring_, e2, c);
                }
                mm.at(i, j) = p;
            }
        classical_nu.push_back(std::move(mm));
    }

    int max_climb = 0;
    for (const auto& g : gen_ops_) max_climb = std::max(max_climb, g.climb);
    int window = qv_.depth_cap() - 2 * max_climb;
    int cols = std::min(qv_.count_depth_at_most(window),
                        classical.verma().count_depth_at_most(window));
    tbl.window_cols = cols;
    int rows = std::min(qv_.dim(), classical.verma().dim());

    // map classical basis index -> G_q generator index (for the bracket image)
    std::map<int, size_t> gq_of_cls;
    std::vector<int> cls_of_gq(n);
    for (size_t k = 0; k < n; ++k) {
        const auto& key = gq_.limits[k].terms.begin()->first;
        int idx = key[0] == 1 ? classical.chevalley().f_index(0)
                              : (key[1] == 1 ? classical.chevalley().h_index(0)
                                             : classical.chevalley().e_index(0));
        gq_of_cls[idx] = k;
        cls_of_gq[k] = idx;
    }

    for (size_t a = 0; a < n; ++a) {
        for (size_t b = 0; b < n; ++b) {
            TOp comm = mul_tops(gen_ops_[a], gen_ops_[b]);
            TOp rev = mul_tops(gen_ops_[b], gen_ops_[a]);
            for (int k = 0; k <= t_order_; ++k) comm.orders[k] = comm.orders[k] - rev.orders[k];
            // t^0 layer must equal the classical commutator
            Matrix<MultiPoly> cl = classical_nu[a] * classical_nu[b] - classical_nu[b] * classical_nu[a];
            bool ok = true;
            for (int i = 0; i < rows && ok; ++i)
                for (int j = 0; j < cols && ok; ++j)
                    if (!(comm.orders[0].at(i, j) == cl.at(i, j))) ok = false;
            tbl.kks_ok[a][b] = ok;
            // The commutator splits as h * (quantum image of [X,Y]) + t * v;
            // the second bracket is the class of v. Subtract the bracket
            // image before reading the t^1 layer, then take the nu^2 part
            // (the h = 0 coefficient of the degree-2 element).
            Matrix<MultiPoly> t1m = comm.orders[1];
            for (const auto& [cidx, coeff] :
                 classical.chevalley().bracket(cls_of_gq[a], cls_of_gq[b])) {
                auto it = gq_of_cls.find(cidx);
                if (it == gq_of_cls.end())
                    throw std::logic_error("second_bracket_sl2: bracket outside the G_q span");
                t1m = t1m - gen_ops_[it->second].orders[1].scaled(
                                MultiPoly::constant(nu_ring_, Rational(coeff)));
            }
            RatMatrix t1(rows, cols, Rational(0));
            for (int i = 0; i < rows; ++i)
                for (int j = 0; j < cols; ++j) {
                    const MultiPoly& p = t1m.at(i, j);
                    if (p.total_degree() > 2)
                        throw std::logic_error(
                            "second_bracket_sl2: t^1 layer has nu-degree > 2; h = 0 part undefined");
                    for (const auto& [e, c] : p.terms())
                        if (e[0] == 2) t1.at(i, j) = c;
                }
            tbl.t_part[a][b] = std::move(t1);
        }
    }
    return tbl;
}

EquivarianceReport equivariance_check(UqAlgebra& alg, const QSliceBuilder& builder, int pairs,
                                      uint64_t seed) {
    EquivarianceReport rep;
    const QVerma& qv = builder.module();
    const auto& gq = builder.q_generators();
    using QMat = Matrix<FractionElement>;
    FractionElement zero = FractionElement::zero(alg.coeff_ring());
    FractionElement one = alg.coeff_one();

    int r = alg.rs().rank;
    std::vector<QMat> phiE, phiF, phiK, phiKi;
    for (int i = 0; i < r; ++i) {
        phiE.push_back(qv.action(alg.E(i)).mat);
        phiF.push_back(qv.action(alg.F(i)).mat);
        phiK.push_back(qv.action(alg.Ki(i, 1)).mat);
        phiKi.push_back(qv.action(alg.Ki(i, -1)).mat);
    }

    // pool: G_q actions and their pairwise products (degree-1 and 2 slices)
    std::vector<QMat> pool;
    std::vector<int> pool_climb;
    for (const auto& g : gq) {
        pool.push_back(g.mat);
        pool_climb.push_back(g.climb);
    }
    size_t n1 = pool.size();
    for (size_t a = 0; a < n1; ++a)
        for (size_t b = 0; b < n1; ++b) {
            pool.push_back(pool[a] * pool[b]);
            pool_climb.push_back(pool_climb[a] + pool_climb[b]);
        }

    Rng rng(seed);
    auto random_op = [&](int& climb) {
        QMat acc(qv.dim(), qv.dim(), zero);
        climb = 0;
        for (int t = 0; t < 2; ++t) {
            size_t idx = static_cast<size_t>(rng.uniform(0, static_cast<long>(pool.size()) - 1));
            FractionElement c = FractionElement::constant(alg.coeff_ring(), Rational(rng.nonzero(5)));
            acc = acc + pool[idx].scaled(c);
            climb = std::max(climb, pool_climb[idx]);
        }
        return acc;
    };

    auto adE = [&](int i, const QMat& A) { return phiE[i] * A - phiK[i] * A * phiKi[i] * phiE[i]; };
    auto adF = [&](int i, const QMat& A) { return phiF[i] * A * phiK[i] - A * phiF[i] * phiK[i]; };
    auto adK = [&](int i, const QMat& A) { return phiK[i] * A * phiKi[i]; };
    auto adKinv = [&](int i, const QMat& A) { return phiKi[i] * A * phiK[i]; };

    auto equal_on = [&](const QMat& x, const QMat& y, int cols) {
        for (size_t i = 0; i < x.rows(); ++i)
            for (int j = 0; j < cols; ++j)
                if (!(x.at(i, j) == y.at(i, j))) return false;
        return true;
    };

    int maxh = 0;
    for (const Root& rt : alg.rs().positive_roots) maxh = std::max(maxh, root_height(rt));

    for (int p = 0; p < pairs; ++p) {
        int ca = 0, cb = 0;
        QMat A = random_op(ca);
        QMat B = random_op(cb);
        int window = qv.depth_cap() - ca - cb - 2 * maxh;
        int cols = qv.count_depth_at_most(std::max(window, 0));
        QMat AB = A * B;
        for (int i = 0; i < r; ++i) {
            // u = K_i: ad(K)(AB) = ad(K)(A) ad(K)(B)
            ++rep.checks;
            if (!equal_on(adK(i, AB), adK(i, A) * adK(i, B), cols)) ++rep.failures;
            // u = E_i: ad(E)(AB) = ad(E)(A) B + ad(K)(A) ad(E)(B)
            ++rep.checks;
            if (!equal_on(adE(i, AB), adE(i, A) * B + adK(i, A) * adE(i, B), cols)) ++rep.failures;
            // u = F_i: ad(F)(AB) = ad(F)(A) ad(K^-1)(B) + A ad(F)(B)
            ++rep.checks;
            if (!equal_on(adF(i, AB), adF(i, A) * adKinv(i, B) + A * adF(i, B), cols)) ++rep.failures;
        }
    }
    return rep;
}

}  // namespace orbitq
