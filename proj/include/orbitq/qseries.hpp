#pragma once

#include "orbitq/fraction.hpp"
#include "orbitq/multipoly.hpp"

#include <vector>

namespace orbitq {

/// Truncated Laurent series in t with MultiPoly coefficients. Stores the
/// coefficients of t^k for val <= k <= order; everything above `order` is
/// unknown (truncated), everything below `val` is zero.
class TSeries {
public:
    TSeries() : val_(0), order_(-1) {}
    TSeries(VarSetPtr coeff_vars, int order)
        : coeff_vars_(std::move(coeff_vars)), val_(0), order_(order),
          coeffs_(static_cast<size_t>(order + 1), MultiPoly::zero(coeff_vars_)) {}

    static TSeries constant(VarSetPtr vars, const MultiPoly& c, int order) {
        TSeries s(vars, order);
        if (order >= 0) s.coeffs_[0] = c;
        return s;
    }

    int order() const { return order_; }
    int valuation_floor() const { return val_; }
    const VarSetPtr& coeff_vars() const { return coeff_vars_; }

    /// Coefficient of t^k (zero below the floor; throws above the order).
    MultiPoly coeff(int k) const {
        if (k > order_) throw std::domain_error("TSeries: coefficient beyond truncation order");
        if (k < val_) return MultiPoly::zero(coeff_vars_);
        return coeffs_[static_cast<size_t>(k - val_)];
    }

    void set_coeff(int k, const MultiPoly& c) {
        ensure_floor(k);
        coeffs_[static_cast<size_t>(k - val_)] = c;
    }

    bool is_zero() const {
        for (const auto& c : coeffs_)
            if (!c.is_zero()) return false;
        return true;
    }

    /// Smallest k with nonzero coefficient; order_+1 when the series is zero
    /// up to truncation.
    int valuation() const {
        for (int k = val_; k <= order_; ++k)
            if (!coeff(k).is_zero()) return k;
        return order_ + 1;
    }

    bool has_negative_part() const { return valuation() < 0; }

    TSeries operator+(const TSeries& o) const {
        TSeries r = shape_like(o);
        for (int k = r.val_; k <= r.order_; ++k) r.set_coeff(k, safe_coeff(k) + o.safe_coeff(k));
        return r;
    }
    TSeries operator-(const TSeries& o) const {
        TSeries r = shape_like(o);
        for (int k = r.val_; k <= r.order_; ++k) r.set_coeff(k, safe_coeff(k) - o.safe_coeff(k));
        return r;
    }
    TSeries& operator+=(const TSeries& o) { return *this = *this + o; }
    TSeries& operator-=(const TSeries& o) { return *this = *this - o; }

    TSeries operator*(const TSeries& o) const {
        int rv = val_ + o.val_;
        int ro = std::min(order_ + o.val_, o.order_ + val_);
        TSeries r(coeff_vars_, 0);
        r.val_ = rv;
        r.order_ = ro;
        r.coeffs_.assign(static_cast<size_t>(ro - rv + 1), MultiPoly::zero(coeff_vars_));
        for (int i = val_; i <= order_; ++i) {
            const MultiPoly& a = coeff(i);
            if (a.is_zero()) continue;
            for (int j = o.val_; j <= o.order_ && i + j <= ro; ++j) {
                const MultiPoly& b = o.coeff(j);
                if (b.is_zero()) continue;
                r.coeffs_[static_cast<size_t>(i + j - rv)] += a * b;
            }
        }
        return r;
    }

    TSeries scaled(const MultiPoly& c) const {
        TSeries r = *this;
        for (auto& x : r.coeffs_) x = x * c;
        return r;
    }
    TSeries scaled(const Rational& c) const {
        TSeries r = *this;
        for (auto& x : r.coeffs_) x = x * c;
        return r;
    }

    /// Division by a series whose leading coefficient is a nonzero rational
    /// constant (the only case needed: denominators carry no parameters).
    TSeries divided_by(const TSeries& d) const {
        int dv = d.valuation();
        if (dv > d.order_) throw std::domain_error("TSeries: division by zero series");
        MultiPoly lead = d.coeff(dv);
        if (!lead.is_constant())
            throw std::domain_error("TSeries: divisor leading coefficient not constant");
        Rational linv = lead.constant_value().inverse();
        int rv = val_ - dv;
        int ro = order_ - dv;
        TSeries r(coeff_vars_, 0);
        r.val_ = rv;
        r.order_ = ro;
        r.coeffs_.assign(static_cast<size_t>(ro - rv + 1), MultiPoly::zero(coeff_vars_));
        // Long division: num = q * d  =>  q_k determined from lowest order up.
        for (int k = rv; k <= ro; ++k) {
            MultiPoly acc = safe_coeff(k + dv);
            for (int j = rv; j < k; ++j) {
                int di = k + dv - j;
                if (di < d.val_ || di > d.order_) continue;
                const MultiPoly& dc = d.coeff(di);
                if (dc.is_zero()) continue;
                acc -= r.coeffs_[static_cast<size_t>(j - rv)] * dc;
            }
            r.coeffs_[static_cast<size_t>(k - rv)] = acc * linv;
        }
        return r;
    }

    /// Truncates (or re-floors) to orders [0, new_order]; throws when a
    /// nonzero coefficient sits below t^0.
    TSeries regular_part_checked(int new_order) const {
        if (has_negative_part())
            throw std::domain_error("TSeries: negative t-order present (pole)");
        TSeries r(coeff_vars_, std::min(new_order, order_));
        for (int k = 0; k <= r.order_; ++k) r.set_coeff(k, coeff(k));
        return r;
    }

    bool operator==(const TSeries& o) const {
        int lo = std::min(val_, o.val_);
        int hi = std::min(order_, o.order_);
        for (int k = lo; k <= hi; ++k)
            if (!(safe_coeff(k) == o.safe_coeff(k))) return false;
        return true;
    }

    std::string str() const {
        std::string s;
        bool first = true;
        for (int k = val_; k <= order_; ++k) {
            if (coeff(k).is_zero()) continue;
            if (!first) s += " + ";
            s += "(" + coeff(k).str() + ")*t^" + std::to_string(k);
            first = false;
        }
        if (first) s = "0";
        s += " + O(t^" + std::to_string(order_ + 1) + ")";
        return s;
    }

private:
    MultiPoly safe_coeff(int k) const {
        if (k < val_ || k > order_) return MultiPoly::zero(coeff_vars_);
        return coeffs_[static_cast<size_t>(k - val_)];
    }
    void ensure_floor(int k) {
        if (k > order_) throw std::domain_error("TSeries: set beyond truncation order");
        if (k >= val_) return;
        coeffs_.insert(coeffs_.begin(), static_cast<size_t>(val_ - k), MultiPoly::zero(coeff_vars_));
        val_ = k;
    }
    TSeries shape_like(const TSeries& o) const {
        TSeries r(coeff_vars_, 0);
        r.val_ = std::min(val_, o.val_);
        r.order_ = std::min(order_, o.order_);
        r.coeffs_.assign(static_cast<size_t>(r.order_ - r.val_ + 1), MultiPoly::zero(coeff_vars_));
        return r;
    }

    VarSetPtr coeff_vars_;
    int val_;
    int order_;
    std::vector<MultiPoly> coeffs_;  // coeff of t^(val_ + i)
};

/// exp(c * t) truncated: coefficients c^k / k! with c a polynomial.
inline TSeries exp_series(const MultiPoly& c, int order) {
    TSeries s(c.vars(), order);
    MultiPoly pw = MultiPoly::constant(c.vars(), Rational(1));
    Rational fact(1);
    for (int k = 0; k <= order; ++k) {
        if (k > 0) {
            pw = pw * c;
            fact *= Rational(k);
        }
        s.set_coeff(k, pw * fact.inverse());
    }
    return s;
}

struct QSeriesSpec {
    VarSetPtr source;        ///< ring containing q and L_i (Laurent)
    VarSetPtr target;        ///< ring containing the series coefficients' variables
    int q_index = -1;        ///< index of q in source
    std::vector<int> L_index;        ///< indices of L_i in source
    std::vector<int> L_exponent_var; ///< for each L_i, index in target of the exponent symbol
    std::vector<int> passthrough_src;  ///< other source vars carried through
    std::vector<int> passthrough_dst;
};

/// Substitutes q = e^t and L_i = e^{lambda_i t} into a Laurent polynomial and
/// expands to the requested t-order. The result records its truncation order.
inline TSeries q_series_expand(const MultiPoly& p, const QSeriesSpec& spec, int order) {
    TSeries acc(spec.target, order);
    for (const auto& [e, c] : p.terms()) {
        // exponent of t inside exp(): q^a * prod L_i^{b_i} = e^{(a + sum b_i lambda_i) t}
        MultiPoly expo = MultiPoly::zero(spec.target);
        if (spec.q_index >= 0 && e[spec.q_index] != 0)
            expo += MultiPoly::constant(spec.target, Rational(e[spec.q_index]));
        for (size_t i = 0; i < spec.L_index.size(); ++i) {
            int b = e[spec.L_index[i]];
            if (b != 0)
                expo += MultiPoly::variable(spec.target, spec.L_exponent_var[i]) * Rational(b);
        }
        MultiPoly rest = MultiPoly::constant(spec.target, c);
        for (size_t k = 0; k < spec.passthrough_src.size(); ++k) {
            int ee = e[spec.passthrough_src[k]];
            if (ee != 0)
                rest = rest * MultiPoly::variable(spec.target, spec.passthrough_dst[k], ee);
        }
        acc += exp_series(expo, order).scaled(rest);
    }
    return acc;
}

/// Expansion of a fraction: numerator and denominator expanded separately,
/// then series-divided (the denominator must have constant-rational leading
/// coefficient, true for q-only denominators).
inline TSeries q_series_expand(const FractionElement& f, const QSeriesSpec& spec, int order) {
    // Guard terms: the denominator's valuation shifts everything down.
    TSeries den = q_series_expand(f.den(), spec, order);
    int dv = den.valuation();
    if (dv > den.order()) throw std::domain_error("q_series_expand: denominator expands to zero");
    TSeries num = q_series_expand(f.num(), spec, order + dv);
    TSeries den2 = q_series_expand(f.den(), spec, order + dv);
    return num.divided_by(den2);
}

}  // namespace orbitq
