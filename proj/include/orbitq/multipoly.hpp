#pragma once

#include "orbitq/rational.hpp"

#include <algorithm>
#include <map>
#include <memory>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace orbitq {

/// Ordered set of commuting indeterminates. Variables flagged `laurent` may
/// carry negative exponents (q, q^-1 and the L_i = q^{lambda_i} symbols);
/// the rest are ordinary polynomial variables.
class VarSet {
public:
    static std::shared_ptr<const VarSet> make(std::vector<std::string> names,
                                              std::vector<bool> laurent = {}) {
        if (laurent.empty()) laurent.assign(names.size(), false);
        if (laurent.size() != names.size())
            throw std::invalid_argument("VarSet: laurent flag count mismatch");
        return std::shared_ptr<const VarSet>(new VarSet(std::move(names), std::move(laurent)));
    }

    size_t size() const { return names_.size(); }
    const std::string& name(size_t i) const { return names_.at(i); }
    bool laurent(size_t i) const { return laurent_.at(i); }
    const std::vector<std::string>& names() const { return names_; }

    int index_of(const std::string& n) const {
        for (size_t i = 0; i < names_.size(); ++i)
            if (names_[i] == n) return static_cast<int>(i);
        return -1;
    }

    bool same_as(const VarSet& o) const {
        return names_ == o.names_ && laurent_ == o.laurent_;
    }

private:
    VarSet(std::vector<std::string> names, std::vector<bool> laurent)
        : names_(std::move(names)), laurent_(std::move(laurent)) {}
    std::vector<std::string> names_;
    std::vector<bool> laurent_;
};

using VarSetPtr = std::shared_ptr<const VarSet>;

/// Multivariate polynomial with Rational coefficients, Laurent in the
/// flagged variables. Terms are kept in a sorted map keyed by exponent
/// vector; zero coefficients are never stored.
class MultiPoly {
public:
    using Expo = std::vector<int>;

    MultiPoly() = default;
    explicit MultiPoly(VarSetPtr vars) : vars_(std::move(vars)) {}

    static MultiPoly zero(VarSetPtr vars) { return MultiPoly(std::move(vars)); }

    static MultiPoly constant(VarSetPtr vars, const Rational& c) {
        MultiPoly p(std::move(vars));
        if (!c.is_zero()) p.terms_[Expo(p.vars_->size(), 0)] = c;
        return p;
    }

    static MultiPoly variable(VarSetPtr vars, size_t idx, int exp = 1) {
        MultiPoly p(vars);
        if (idx >= vars->size()) throw std::invalid_argument("MultiPoly: bad variable index");
        if (exp < 0 && !vars->laurent(idx))
            throw std::invalid_argument("MultiPoly: negative exponent on non-Laurent variable");
        Expo e(vars->size(), 0);
        e[idx] = exp;
        p.terms_[std::move(e)] = Rational(1);
        return p;
    }

    static MultiPoly monomial(VarSetPtr vars, Expo e, const Rational& c) {
        MultiPoly p(std::move(vars));
        if (!c.is_zero()) p.terms_[std::move(e)] = c;
        return p;
    }

    const VarSetPtr& vars() const { return vars_; }
    const std::map<Expo, Rational>& terms() const { return terms_; }
    size_t term_count() const { return terms_.size(); }

    bool is_zero() const { return terms_.empty(); }
    bool is_constant() const {
        if (terms_.empty()) return true;
        if (terms_.size() != 1) return false;
        const auto& e = terms_.begin()->first;
        return std::all_of(e.begin(), e.end(), [](int x) { return x == 0; });
    }
    Rational constant_value() const {
        if (terms_.empty()) return Rational(0);
        if (!is_constant()) throw std::domain_error("MultiPoly: not a constant");
        return terms_.begin()->second;
    }

    /// Coefficient of an exponent vector (0 if absent).
    Rational coeff(const Expo& e) const {
        auto it = terms_.find(e);
        return it == terms_.end() ? Rational(0) : it->second;
    }

    MultiPoly operator-() const {
        MultiPoly r(vars_);
        for (const auto& [e, c] : terms_) r.terms_[e] = -c;
        return r;
    }

    MultiPoly operator+(const MultiPoly& o) const {
        check_ring(o);
        MultiPoly r = *this;
        for (const auto& [e, c] : o.terms_) r.add_term(e, c);
        return r;
    }
    MultiPoly operator-(const MultiPoly& o) const {
        check_ring(o);
        MultiPoly r = *this;
        for (const auto& [e, c] : o.terms_) r.add_term(e, -c);
        return r;
    }
    MultiPoly& operator+=(const MultiPoly& o) {
        check_ring(o);
        for (const auto& [e, c] : o.terms_) add_term(e, c);
        return *this;
    }
    MultiPoly& operator-=(const MultiPoly& o) {
        check_ring(o);
        for (const auto& [e, c] : o.terms_) add_term(e, -c);
        return *this;
    }

    MultiPoly operator*(const MultiPoly& o) const {
        check_ring(o);
        MultiPoly r(vars_);
        Expo e(vars_ ? vars_->size() : 0, 0);
        for (const auto& [e1, c1] : terms_) {
            for (const auto& [e2, c2] : o.terms_) {
                for (size_t i = 0; i < e.size(); ++i) e[i] = e1[i] + e2[i];
                r.add_term(e, c1 * c2);
            }
        }
        return r;
    }

    MultiPoly operator*(const Rational& c) const {
        MultiPoly r(vars_);
        if (c.is_zero()) return r;
        for (const auto& [e, cc] : terms_) r.terms_[e] = cc * c;
        return r;
    }

    MultiPoly pow(int n) const {
        if (n < 0) throw std::invalid_argument("MultiPoly: negative power");
        MultiPoly r = constant(vars_, Rational(1));
        MultiPoly b = *this;
        while (n > 0) {
            if (n & 1) r = r * b;
            b = b * b;
            n >>= 1;
        }
        return r;
    }

    bool operator==(const MultiPoly& o) const { return terms_ == o.terms_; }
    bool operator!=(const MultiPoly& o) const { return !(*this == o); }

    /// Weighted degree: max over terms of sum(exp_i * weight_i). Zero poly
    /// reports INT_MIN-ish sentinel via `deg_neg_infinity`.
    static constexpr int deg_neg_infinity = -1000000000;
    int degree(const std::vector<int>& weights) const {
        int best = deg_neg_infinity;
        for (const auto& [e, c] : terms_) {
            int d = 0;
            for (size_t i = 0; i < e.size(); ++i) d += e[i] * weights[i];
            best = std::max(best, d);
        }
        return best;
    }
    int total_degree() const {
        return degree(std::vector<int>(vars_ ? vars_->size() : 0, 1));
    }
    bool homogeneous(const std::vector<int>& weights, int* deg_out = nullptr) const {
        bool first = true;
        int d0 = 0;
        for (const auto& [e, c] : terms_) {
            int d = 0;
            for (size_t i = 0; i < e.size(); ++i) d += e[i] * weights[i];
            if (first) {
                d0 = d;
                first = false;
            } else if (d != d0) {
                return false;
            }
        }
        if (deg_out) *deg_out = first ? 0 : d0;
        return true;
    }

    /// Keeps only terms whose weighted degree equals d.
    MultiPoly weighted_part(const std::vector<int>& weights, int d) const {
        MultiPoly r(vars_);
        for (const auto& [e, c] : terms_) {
            int deg = 0;
            for (size_t i = 0; i < e.size(); ++i) deg += e[i] * weights[i];
            if (deg == d) r.terms_[e] = c;
        }
        return r;
    }

    /// Full evaluation. Values for Laurent variables must be nonzero when a
    /// negative exponent occurs.
    Rational evaluate(const std::vector<Rational>& values) const {
        if (vars_ && values.size() != vars_->size())
            throw std::invalid_argument("MultiPoly: evaluation arity mismatch");
        Rational acc(0);
        for (const auto& [e, c] : terms_) {
            Rational t = c;
            for (size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (values[i].is_zero() && e[i] < 0)
                    throw std::domain_error("MultiPoly: zero raised to negative power");
                t *= values[i].pow(e[i]);
            }
            acc += t;
        }
        return acc;
    }

    /// Substitutes rational values for a subset of variables (mask true =
    /// substitute); the result still lives in the same ring.
    MultiPoly substitute(const std::vector<bool>& mask, const std::vector<Rational>& values) const {
        MultiPoly r(vars_);
        Expo e2;
        for (const auto& [e, c] : terms_) {
            Rational coeff = c;
            e2 = e;
            for (size_t i = 0; i < e.size(); ++i) {
                if (!mask[i] || e[i] == 0) continue;
                if (values[i].is_zero() && e[i] < 0)
                    throw std::domain_error("MultiPoly: zero raised to negative power");
                coeff *= values[i].pow(e[i]);
                e2[i] = 0;
            }
            r.add_term(e2, coeff);
        }
        return r;
    }

    /// Substitutes another polynomial for variable idx (nonnegative exponents
    /// on idx only).
    MultiPoly substitute_poly(size_t idx, const MultiPoly& value) const {
        MultiPoly r(vars_);
        for (const auto& [e, c] : terms_) {
            if (e[idx] < 0) throw std::domain_error("MultiPoly: negative exponent in poly substitution");
            Expo e2 = e;
            e2[idx] = 0;
            MultiPoly t = monomial(vars_, e2, c) * value.pow(e[idx]);
            r += t;
        }
        return r;
    }

    /// gcd of all coefficients (nonnegative rational); 0 for the zero poly.
    Rational content() const {
        Rational g(0);
        for (const auto& [e, c] : terms_) g = Rational::gcd(g, c);
        return g;
    }

    /// Leading term under lex order on exponent vectors (largest key).
    std::pair<Expo, Rational> leading_term() const {
        if (terms_.empty()) throw std::domain_error("MultiPoly: leading term of zero");
        auto it = std::prev(terms_.end());
        return {it->first, it->second};
    }

    /// Exact division: *this = q * d must hold; throws otherwise.
    MultiPoly exact_div(const MultiPoly& d) const {
        check_ring(d);
        if (d.is_zero()) throw std::domain_error("MultiPoly: division by zero polynomial");
        if (is_zero()) return MultiPoly(vars_);
        // Shift both operands so all exponents are nonnegative, divide in the
        // ordinary polynomial ring, then shift back.
        size_t n = vars_->size();
        Expo shift_p = min_exponents(), shift_d = d.min_exponents();
        MultiPoly p = shifted(negate(shift_p));
        MultiPoly dd = d.shifted(negate(shift_d));
        MultiPoly q(vars_);
        auto [de, dc] = dd.leading_term();
        while (!p.is_zero()) {
            auto [pe, pc] = p.leading_term();
            Expo qe(n);
            for (size_t i = 0; i < n; ++i) {
                qe[i] = pe[i] - de[i];
                if (qe[i] < 0) throw std::domain_error("MultiPoly: division not exact");
            }
            Rational qc = pc / dc;
            MultiPoly qt = monomial(vars_, qe, qc);
            q += qt;
            p -= qt * dd;
        }
        // q satisfies shifted(p) = q * shifted(d); undo shifts.
        Expo back(n);
        for (size_t i = 0; i < n; ++i) back[i] = shift_p[i] - shift_d[i];
        return q.shifted(back);
    }

    /// True iff *this == q * d for some polynomial q (sets q if non-null).
    bool try_exact_div(const MultiPoly& d, MultiPoly* q_out) const {
        try {
            MultiPoly q = exact_div(d);
            if (q_out) *q_out = q;
            return true;
        } catch (const std::domain_error&) {
            return false;
        }
    }

    MultiPoly derivative(size_t idx) const {
        MultiPoly r(vars_);
        for (const auto& [e, c] : terms_) {
            if (e[idx] == 0) continue;
            Expo e2 = e;
            e2[idx] -= 1;
            r.add_term(e2, c * Rational(e[idx]));
        }
        return r;
    }

    /// Moves the polynomial into a larger ring; `map[i]` is the index of this
    /// ring's variable i in the new ring.
    MultiPoly lift(VarSetPtr new_vars, const std::vector<int>& map) const {
        MultiPoly r(new_vars);
        for (const auto& [e, c] : terms_) {
            Expo e2(new_vars->size(), 0);
            for (size_t i = 0; i < e.size(); ++i) e2.at(map[i]) = e[i];
            r.terms_[std::move(e2)] = c;
        }
        return r;
    }

    std::string str() const {
        if (terms_.empty()) return "0";
        std::ostringstream os;
        bool first = true;
        // Print highest term first for readability.
        for (auto it = terms_.rbegin(); it != terms_.rend(); ++it) {
            const auto& [e, c] = *it;
            Rational a = c;
            if (first) {
                if (a.sign() < 0) {
                    os << "-";
                    a = -a;
                }
                first = false;
            } else {
                os << (a.sign() < 0 ? " - " : " + ");
                if (a.sign() < 0) a = -a;
            }
            bool unit = a.is_one();
            bool any_var = std::any_of(e.begin(), e.end(), [](int x) { return x != 0; });
            if (!unit || !any_var) os << a.str();
            bool star = !unit || !any_var ? any_var : false;
            if (star) os << "*";
            bool printed = false;
            for (size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (printed) os << "*";
                os << vars_->name(i);
                if (e[i] != 1) os << "^" << e[i];
                printed = true;
            }
        }
        return os.str();
    }

private:
    void check_ring(const MultiPoly& o) const {
        if (vars_ == o.vars_) return;
        if (vars_ && o.vars_ && vars_->same_as(*o.vars_)) return;
        throw std::invalid_argument("MultiPoly: mixed variable sets");
    }
    void add_term(const Expo& e, const Rational& c) {
        if (c.is_zero()) return;
        auto it = terms_.find(e);
        if (it == terms_.end()) {
            terms_.emplace(e, c);
        } else {
            it->second += c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }
    Expo min_exponents() const {
        size_t n = vars_->size();
        Expo m(n, 0);
        for (const auto& [e, c] : terms_)
            for (size_t i = 0; i < n; ++i) m[i] = std::min(m[i], e[i]);
        return m;
    }
    static Expo negate(const Expo& e) {
        Expo r = e;
        for (auto& x : r) x = -x;
        return r;
    }
    MultiPoly shifted(const Expo& by) const {
        MultiPoly r(vars_);
        for (const auto& [e, c] : terms_) {
            Expo e2 = e;
            for (size_t i = 0; i < e2.size(); ++i) e2[i] += by[i];
            r.terms_[std::move(e2)] = c;
        }
        return r;
    }

    VarSetPtr vars_;
    std::map<Expo, Rational> terms_;
};

inline MultiPoly operator*(const Rational& c, const MultiPoly& p) { return p * c; }

}  // namespace orbitq
