#pragma once

#include <gmpxx.h>

#include <cstdint>
#include <stdexcept>
#include <string>

namespace orbitq {

/// Arbitrary-precision rational number. Always canonical: gcd(|num|, den) = 1,
/// den > 0, zero is 0/1. Thin wrapper over GMP's mpq_class.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(static_cast<signed long>(n)) {}
    Rational(int n) : v_(n) {}
    Rational(long n, long d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        v_ = mpq_class(n, d);
        v_.canonicalize();
    }
    explicit Rational(const mpq_class& q) : v_(q) { v_.canonicalize(); }
    explicit Rational(const mpz_class& n) : v_(n) {}
    Rational(const mpz_class& n, const mpz_class& d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        v_ = mpq_class(n, d);
        v_.canonicalize();
    }

    /// Parses "a/b" or "a".
    static Rational from_string(const std::string& s) {
        mpq_class q;
        if (q.set_str(s, 10) != 0) throw std::invalid_argument("Rational: cannot parse '" + s + "'");
        q.canonicalize();
        return Rational(q);
    }

    mpz_class numerator() const { return v_.get_num(); }
    mpz_class denominator() const { return v_.get_den(); }

    bool is_zero() const { return v_ == 0; }
    bool is_one() const { return v_ == 1; }
    bool is_integer() const { return v_.get_den() == 1; }
    int sign() const { return sgn(v_); }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational operator+(const Rational& o) const { return Rational(mpq_class(v_ + o.v_)); }
    Rational operator-(const Rational& o) const { return Rational(mpq_class(v_ - o.v_)); }
    Rational operator*(const Rational& o) const { return Rational(mpq_class(v_ * o.v_)); }
    Rational operator/(const Rational& o) const {
        if (o.is_zero()) throw std::domain_error("Rational: division by zero");
        return Rational(mpq_class(v_ / o.v_));
    }
    Rational& operator+=(const Rational& o) { v_ += o.v_; return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; return *this; }
    Rational& operator/=(const Rational& o) {
        if (o.is_zero()) throw std::domain_error("Rational: division by zero");
        v_ /= o.v_;
        return *this;
    }

    Rational inverse() const {
        if (is_zero()) throw std::domain_error("Rational: inverse of zero");
        return Rational(mpq_class(1 / v_));
    }

    Rational abs() const { return Rational(mpq_class(::abs(v_))); }

    /// Integer power; negative exponents invert.
    Rational pow(long e) const {
        if (e == 0) return Rational(1);
        Rational base = e > 0 ? *this : inverse();
        unsigned long n = e > 0 ? static_cast<unsigned long>(e) : static_cast<unsigned long>(-e);
        mpz_class np, dp;
        mpz_pow_ui(np.get_mpz_t(), base.v_.get_num().get_mpz_t(), n);
        mpz_pow_ui(dp.get_mpz_t(), base.v_.get_den().get_mpz_t(), n);
        Rational r;
        r.v_ = mpq_class(np, dp);
        return r;
    }

    bool operator==(const Rational& o) const { return v_ == o.v_; }
    bool operator!=(const Rational& o) const { return v_ != o.v_; }
    bool operator<(const Rational& o) const { return v_ < o.v_; }
    bool operator<=(const Rational& o) const { return v_ <= o.v_; }
    bool operator>(const Rational& o) const { return v_ > o.v_; }
    bool operator>=(const Rational& o) const { return v_ >= o.v_; }

    /// gcd of absolute values, as a nonnegative rational: gcd(a/b, c/d) = gcd(a,c)/lcm(b,d).
    static Rational gcd(const Rational& a, const Rational& b) {
        if (a.is_zero()) return b.abs();
        if (b.is_zero()) return a.abs();
        mpz_class gn, gl;
        mpz_gcd(gn.get_mpz_t(), a.v_.get_num().get_mpz_t(), b.v_.get_num().get_mpz_t());
        mpz_lcm(gl.get_mpz_t(), a.v_.get_den().get_mpz_t(), b.v_.get_den().get_mpz_t());
        return Rational(gn, gl);
    }

    long to_long() const {
        if (!is_integer()) throw std::domain_error("Rational: not an integer");
        if (!v_.get_num().fits_slong_p()) throw std::overflow_error("Rational: integer too large");
        return v_.get_num().get_si();
    }

    std::string str() const { return v_.get_str(); }

private:
    mpq_class v_;
};

inline Rational operator*(long n, const Rational& r) { return Rational(n) * r; }

}  // namespace orbitq
