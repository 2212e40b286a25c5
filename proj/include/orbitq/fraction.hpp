#pragma once

#include "orbitq/multipoly.hpp"

#include <optional>

namespace orbitq {

namespace detail {

/// Euclidean gcd in Q[v] for polynomials that involve only variable v.
/// Inputs are given as dense coefficient vectors. Result is monic (or the
/// nonzero input, or empty for gcd(0,0)).
inline std::vector<Rational> univariate_gcd(std::vector<Rational> a, std::vector<Rational> b) {
    auto trim = [](std::vector<Rational>& p) {
        while (!p.empty() && p.back().is_zero()) p.pop_back();
    };
    trim(a);
    trim(b);
    while (!b.empty()) {
        // a mod b
        while (a.size() >= b.size() && !a.empty()) {
            Rational f = a.back() / b.back();
            size_t off = a.size() - b.size();
            for (size_t i = 0; i < b.size(); ++i) a[off + i] -= f * b[i];
            trim(a);
        }
        std::swap(a, b);
    }
    if (!a.empty()) {
        Rational lead = a.back();
        for (auto& c : a) c /= lead;
    }
    return a;
}

}  // namespace detail

/// Element of the fraction field over MultiPoly. Denominators are reduced by
/// rational content; when the denominator involves a single variable the
/// common univariate factor with the numerator is cancelled as well (this is
/// the case that actually occurs: q-only denominators in the quantum layer,
/// and plain polynomials elsewhere).
class FractionElement {
public:
    FractionElement() = default;
    explicit FractionElement(MultiPoly num)
        : num_(std::move(num)), den_(MultiPoly::constant(num_.vars(), Rational(1))) {}
    FractionElement(MultiPoly num, MultiPoly den) : num_(std::move(num)), den_(std::move(den)) {
        if (den_.is_zero()) throw std::domain_error("FractionElement: zero denominator");
        reduce();
    }

    static FractionElement zero(VarSetPtr vars) {
        return FractionElement(MultiPoly::zero(vars));
    }
    static FractionElement constant(VarSetPtr vars, const Rational& c) {
        return FractionElement(MultiPoly::constant(std::move(vars), c));
    }
    static FractionElement variable(VarSetPtr vars, size_t idx, int exp = 1) {
        return FractionElement(MultiPoly::variable(std::move(vars), idx, exp));
    }

    const MultiPoly& num() const { return num_; }
    const MultiPoly& den() const { return den_; }
    const VarSetPtr& vars() const { return num_.vars(); }

    bool is_zero() const { return num_.is_zero(); }
    bool is_polynomial() const { return den_.is_constant(); }

    /// The numerator after clearing a constant denominator; throws if the
    /// denominator is a genuine polynomial.
    MultiPoly as_polynomial() const {
        if (!den_.is_constant()) throw std::domain_error("FractionElement: not a polynomial");
        return num_ * den_.constant_value().inverse();
    }

    FractionElement operator-() const { return FractionElement(-num_, den_, no_reduce{}); }

    FractionElement operator+(const FractionElement& o) const {
        if (den_ == o.den_) return FractionElement(num_ + o.num_, den_);
        return FractionElement(num_ * o.den_ + o.num_ * den_, den_ * o.den_);
    }
    FractionElement operator-(const FractionElement& o) const {
        if (den_ == o.den_) return FractionElement(num_ - o.num_, den_);
        return FractionElement(num_ * o.den_ - o.num_ * den_, den_ * o.den_);
    }
    FractionElement operator*(const FractionElement& o) const {
        return FractionElement(num_ * o.num_, den_ * o.den_);
    }
    FractionElement operator/(const FractionElement& o) const {
        if (o.is_zero()) throw std::domain_error("FractionElement: division by zero");
        return FractionElement(num_ * o.den_, den_ * o.num_);
    }
    FractionElement& operator+=(const FractionElement& o) { return *this = *this + o; }
    FractionElement& operator-=(const FractionElement& o) { return *this = *this - o; }
    FractionElement& operator*=(const FractionElement& o) { return *this = *this * o; }

    FractionElement inverse() const {
        if (is_zero()) throw std::domain_error("FractionElement: inverse of zero");
        return FractionElement(den_, num_);
    }

    bool operator==(const FractionElement& o) const {
        return (num_ * o.den_) == (o.num_ * den_);
    }
    bool operator!=(const FractionElement& o) const { return !(*this == o); }

    /// Evaluates at rational values; throws std::domain_error when the
    /// denominator vanishes.
    Rational evaluate(const std::vector<Rational>& values) const {
        Rational d = den_.evaluate(values);
        if (d.is_zero()) throw std::domain_error("FractionElement: denominator vanishes");
        return num_.evaluate(values) / d;
    }

    std::string str() const {
        if (den_.is_constant() && den_.constant_value().is_one()) return num_.str();
        return "(" + num_.str() + ")/(" + den_.str() + ")";
    }

private:
    struct no_reduce {};
    FractionElement(MultiPoly num, MultiPoly den, no_reduce)
        : num_(std::move(num)), den_(std::move(den)) {}

    // Index of the single variable den_ depends on, or nullopt.
    std::optional<size_t> den_single_variable() const {
        std::optional<size_t> found;
        for (const auto& [e, c] : den_.terms()) {
            for (size_t i = 0; i < e.size(); ++i) {
                if (e[i] == 0) continue;
                if (found && *found != i) return std::nullopt;
                found = i;
            }
        }
        return found;
    }

    void reduce() {
        if (num_.is_zero()) {
            den_ = MultiPoly::constant(den_.vars(), Rational(1));
            return;
        }
        // Monomial denominators cancel exponent-wise into Laurent variables
        // and leave a constant otherwise-shifted denominator when possible.
        if (den_.term_count() == 1) {
            auto [de, dc] = den_.leading_term();
            bool all_laurent = true;
            for (size_t i = 0; i < de.size(); ++i)
                if (de[i] != 0 && !den_.vars()->laurent(i)) all_laurent = false;
            if (all_laurent) {
                MultiPoly::Expo shift = de;
                for (auto& x : shift) x = -x;
                MultiPoly m = MultiPoly::monomial(num_.vars(), shift, dc.inverse());
                num_ = num_ * m;
                den_ = MultiPoly::constant(den_.vars(), Rational(1));
                return;
            }
        }
        if (auto v = den_single_variable()) {
            cancel_univariate(*v);
        }
        // Normalize by the denominator's content and leading sign.
        Rational c = den_.content();
        auto [le, lc] = den_.leading_term();
        if (lc.sign() < 0) c = -c;
        if (!c.is_one()) {
            Rational inv = c.inverse();
            num_ = num_ * inv;
            den_ = den_ * inv;
        }
    }

    // Cancels gcd over Q[v] of the denominator with every v-slice of the
    // numerator. Laurent shifts are normalized first.
    void cancel_univariate(size_t v) {
        int num_shift = 0, den_shift = 0;
        for (const auto& [e, c] : num_.terms()) num_shift = std::min(num_shift, e[v]);
        for (const auto& [e, c] : den_.terms()) den_shift = std::min(den_shift, e[v]);

        auto to_dense = [&](const MultiPoly& p, int shift) {
            // Slices: for each monomial in the other variables, the dense
            // coefficient vector in v.
            std::map<MultiPoly::Expo, std::vector<Rational>> slices;
            for (const auto& [e, c] : p.terms()) {
                MultiPoly::Expo rest = e;
                int k = e[v] - shift;
                rest[v] = 0;
                auto& vec = slices[rest];
                if (static_cast<int>(vec.size()) <= k) vec.resize(k + 1, Rational(0));
                vec[k] = c;
            }
            return slices;
        };
        auto den_slices = to_dense(den_, den_shift);
        if (den_slices.size() != 1) return;  // denominator mixes other variables: leave as-is
        std::vector<Rational> g = den_slices.begin()->second;
        if (!den_slices.begin()->first.empty()) {
            for (size_t i = 0; i < den_slices.begin()->first.size(); ++i)
                if (den_slices.begin()->first[i] != 0) return;
        }
        auto num_slices = to_dense(num_, num_shift);
        for (const auto& [rest, vec] : num_slices) {
            g = detail::univariate_gcd(g, vec);
            if (g.size() <= 1) break;  // gcd is a constant already
        }
        if (g.size() > 1) {
            // Divide both by g(v).
            MultiPoly gp(num_.vars());
            for (size_t k = 0; k < g.size(); ++k) {
                if (g[k].is_zero()) continue;
                MultiPoly::Expo e(num_.vars()->size(), 0);
                e[v] = static_cast<int>(k);
                gp += MultiPoly::monomial(num_.vars(), e, g[k]);
            }
            MultiPoly sn = shift_var(num_, v, -num_shift);
            MultiPoly sd = shift_var(den_, v, -den_shift);
            num_ = shift_var(sn.exact_div(gp), v, num_shift);
            den_ = shift_var(sd.exact_div(gp), v, den_shift);
        }
        if (num_.vars()->laurent(v)) {
            // Absorb the denominator's pure v-shift into the numerator (the
            // fraction is unchanged; den gets minimal v-exponent 0).
            int ds = 0;
            bool first = true;
            for (const auto& [e, c] : den_.terms()) {
                ds = first ? e[v] : std::min(ds, e[v]);
                first = false;
            }
            if (ds != 0) {
                den_ = shift_var(den_, v, -ds);
                num_ = shift_var(num_, v, -ds);
            }
        }
    }

    static MultiPoly shift_var(const MultiPoly& p, size_t v, int by) {
        if (by == 0) return p;
        MultiPoly r(p.vars());
        for (const auto& [e, c] : p.terms()) {
            MultiPoly::Expo e2 = e;
            e2[v] += by;
            r += MultiPoly::monomial(p.vars(), e2, c);
        }
        return r;
    }

    MultiPoly num_, den_;
};

}  // namespace orbitq
