#pragma once

#include <gmpxx.h>

#include <compare>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>

namespace carrousel {

/// Exact rational number, always in lowest terms with positive denominator.
/// Thin value wrapper over GMP so exponent/rate arithmetic never overflows.
class Rational {
public:
    Rational() : v_(0) {}
    Rational(long n) : v_(n) {}
    Rational(long n, long d) : v_(n, d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        v_.canonicalize();
    }
    explicit Rational(const mpz_class& n) : v_(n) {}
    Rational(const mpz_class& n, const mpz_class& d) : v_(n, d) {
        if (d == 0) throw std::domain_error("Rational: zero denominator");
        v_.canonicalize();
    }
    explicit Rational(mpq_class q) : v_(std::move(q)) { v_.canonicalize(); }

    /// Parses "n", "-n", or "n/d". Throws std::invalid_argument on junk.
    static Rational parse(const std::string& s) {
        if (s.empty()) throw std::invalid_argument("Rational::parse: empty string");
        mpq_class q;
        if (q.set_str(s, 10) != 0)
            throw std::invalid_argument("Rational::parse: bad rational '" + s + "'");
        q.canonicalize();
        return Rational(std::move(q));
    }

    const mpz_class& num() const { return v_.get_num(); }
    const mpz_class& den() const { return v_.get_den(); }

    bool is_zero() const { return sgn(v_) == 0; }
    bool is_integer() const { return v_.get_den() == 1; }
    bool is_nonnegative() const { return sgn(v_) >= 0; }
    int sign() const { return sgn(v_); }

    /// Integer value; requires is_integer().
    mpz_class as_integer() const {
        if (!is_integer()) throw std::domain_error("Rational: not an integer: " + str());
        return v_.get_num();
    }

    long as_long() const {
        mpz_class z = as_integer();
        if (!z.fits_slong_p()) throw std::overflow_error("Rational: out of long range");
        return z.get_si();
    }

    Rational operator-() const { return Rational(mpq_class(-v_)); }
    Rational operator+(const Rational& o) const { return Rational(mpq_class(v_ + o.v_)); }
    Rational operator-(const Rational& o) const { return Rational(mpq_class(v_ - o.v_)); }
    Rational operator*(const Rational& o) const { return Rational(mpq_class(v_ * o.v_)); }
    Rational operator/(const Rational& o) const {
        if (o.is_zero()) throw std::domain_error("Rational: division by zero");
        return Rational(mpq_class(v_ / o.v_));
    }
    Rational& operator+=(const Rational& o) { v_ += o.v_; v_.canonicalize(); return *this; }
    Rational& operator-=(const Rational& o) { v_ -= o.v_; v_.canonicalize(); return *this; }
    Rational& operator*=(const Rational& o) { v_ *= o.v_; v_.canonicalize(); return *this; }

    bool operator==(const Rational& o) const { return v_ == o.v_; }
    std::strong_ordering operator<=>(const Rational& o) const {
        int c = cmp(v_, o.v_);
        return c < 0 ? std::strong_ordering::less
             : c > 0 ? std::strong_ordering::greater
                     : std::strong_ordering::equal;
    }

    /// floor(n/d) as big integer.
    mpz_class floor() const {
        mpz_class q;
        mpz_fdiv_q(q.get_mpz_t(), num().get_mpz_t(), den().get_mpz_t());
        return q;
    }

    std::string str() const { return v_.get_str(); }

    double to_double() const { return v_.get_d(); }

    const mpq_class& raw() const { return v_; }

private:
    mpq_class v_;
};

inline Rational abs(const Rational& r) { return r.sign() < 0 ? -r : r; }

inline Rational min(const Rational& a, const Rational& b) { return a < b ? a : b; }
inline Rational max(const Rational& a, const Rational& b) { return a < b ? b : a; }

/// gcd of numerators over lcm of denominators; gcd(0, x) = |x|.
inline Rational rational_gcd(const Rational& a, const Rational& b) {
    mpz_class n, d;
    mpz_gcd(n.get_mpz_t(), a.num().get_mpz_t(), b.num().get_mpz_t());
    mpz_lcm(d.get_mpz_t(), a.den().get_mpz_t(), b.den().get_mpz_t());
    return Rational(n, d);
}

/// Exact r-th root when q is a perfect r-th power of a rational; returns false otherwise.
/// For even r, q must be nonnegative and the nonnegative root is returned.
inline bool rational_root(const Rational& q, unsigned long r, Rational& out) {
    if (r == 0) throw std::domain_error("rational_root: zeroth root");
    if (q.sign() < 0 && r % 2 == 0) return false;
    mpz_class n, d;
    bool neg = q.sign() < 0;
    mpz_class an = neg ? mpz_class(-q.num()) : q.num();
    if (mpz_root(n.get_mpz_t(), an.get_mpz_t(), r) == 0) return false;
    if (mpz_root(d.get_mpz_t(), q.den().get_mpz_t(), r) == 0) return false;
    out = Rational(neg ? mpz_class(-n) : n, d);
    return true;
}

inline std::size_t hash_value(const Rational& r) {
    std::size_t h = std::hash<std::string>{}(r.str());
    return h;
}

}  // namespace carrousel
