#pragma once

#include "carrousel/rational.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <tuple>
#include <utility>
#include <vector>

namespace carrousel {

struct DivisionByZero : std::domain_error {
    DivisionByZero() : std::domain_error("division by zero in cyclotomic field") {}
};

namespace detail {

/// Dense univariate polynomial over Q, coefficient of t^i at index i.
/// Trailing zeros are trimmed; the zero polynomial is the empty vector.
using QPoly = std::vector<Rational>;

inline void qp_trim(QPoly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

inline int qp_deg(const QPoly& p) { return static_cast<int>(p.size()) - 1; }

inline QPoly qp_mul(const QPoly& a, const QPoly& b) {
    if (a.empty() || b.empty()) return {};
    QPoly r(a.size() + b.size() - 1, Rational(0));
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] += a[i] * b[j];
    qp_trim(r);
    return r;
}

inline QPoly qp_sub(QPoly a, const QPoly& b) {
    if (a.size() < b.size()) a.resize(b.size(), Rational(0));
    for (std::size_t i = 0; i < b.size(); ++i) a[i] -= b[i];
    qp_trim(a);
    return a;
}

/// Euclidean division a = q*b + r, deg r < deg b. b must be nonzero.
inline void qp_divmod(QPoly a, const QPoly& b, QPoly& q, QPoly& r) {
    if (b.empty()) throw std::domain_error("qp_divmod: division by zero polynomial");
    q.assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Rational(0));
    const Rational& lc = b.back();
    while (qp_deg(a) >= qp_deg(b)) {
        std::size_t shift = a.size() - b.size();
        Rational c = a.back() / lc;
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] -= c * b[i];
        qp_trim(a);
        if (a.empty()) break;
    }
    qp_trim(q);
    r = std::move(a);
}

inline QPoly qp_mod(const QPoly& a, const QPoly& b) {
    QPoly q, r;
    qp_divmod(a, b, q, r);
    return r;
}

/// Substitute t -> t^k (k >= 1).
inline QPoly qp_inflate(const QPoly& p, unsigned k) {
    if (p.empty()) return {};
    QPoly r((p.size() - 1) * k + 1, Rational(0));
    for (std::size_t i = 0; i < p.size(); ++i) r[i * k] = p[i];
    return r;
}

inline unsigned long euler_phi(unsigned long n) {
    unsigned long result = n;
    for (unsigned long p = 2; p * p <= n; ++p) {
        if (n % p == 0) {
            while (n % p == 0) n /= p;
            result -= result / p;
        }
    }
    if (n > 1) result -= result / n;
    return result;
}

/// L-th cyclotomic polynomial, cached. Phi_L = (t^L - 1) / prod_{d|L, d<L} Phi_d.
inline const QPoly& cyclotomic_poly(unsigned long L) {
    static std::map<unsigned long, QPoly> cache;
    auto it = cache.find(L);
    if (it != cache.end()) return it->second;
    QPoly result;
    if (L == 1) {
        result = {Rational(-1), Rational(1)};
    } else {
        QPoly num(L + 1, Rational(0));
        num[0] = Rational(-1);
        num[L] = Rational(1);
        for (unsigned long d = 1; d < L; ++d) {
            if (L % d != 0) continue;
            QPoly q, r;
            qp_divmod(num, cyclotomic_poly(d), q, r);
            if (!r.empty()) throw std::logic_error("cyclotomic_poly: non-exact division");
            num = std::move(q);
        }
        result = std::move(num);
    }
    return cache.emplace(L, std::move(result)).first->second;
}

}  // namespace detail

/// Element of the cyclotomic field Q(zeta_L), stored as the canonical
/// representative of a residue mod Phi_L: a coefficient vector of length
/// phi(L) over Q. Immutable value type; all comparisons are exact.
class Cyclo {
public:
    Cyclo() : order_(1), coeffs_{} {}

    static Cyclo zero(unsigned long L = 1) { return Cyclo(L, {}); }

    static Cyclo from_rational(const Rational& r, unsigned long L = 1) {
        if (r.is_zero()) return zero(L);
        detail::QPoly p{r};
        return Cyclo(L, std::move(p));
    }

    static Cyclo from_int(long n) { return from_rational(Rational(n)); }

    /// zeta_L^k in canonical form; depends only on k mod L.
    static Cyclo root_of_unity(unsigned long L, long k) {
        if (L == 0) throw std::domain_error("root_of_unity: order must be positive");
        long m = k % static_cast<long>(L);
        if (m < 0) m += static_cast<long>(L);
        detail::QPoly p(static_cast<std::size_t>(m) + 1, Rational(0));
        p[static_cast<std::size_t>(m)] = Rational(1);
        return Cyclo(L, std::move(p));
    }

    unsigned long order() const { return order_; }
    const std::vector<Rational>& coeffs() const { return coeffs_; }

    bool is_zero() const { return coeffs_.empty(); }

    bool is_rational() const { return coeffs_.size() <= 1; }

    /// The rational value; requires is_rational().
    Rational as_rational() const {
        if (coeffs_.empty()) return Rational(0);
        if (coeffs_.size() != 1) throw std::domain_error("Cyclo: not rational");
        return coeffs_[0];
    }

    /// Re-expresses this element in Q(zeta_M); requires order() | M.
    Cyclo lifted(unsigned long M) const {
        if (M % order_ != 0) throw std::domain_error("Cyclo::lifted: target order not a multiple");
        if (M == order_) return *this;
        detail::QPoly p = detail::qp_inflate(coeffs_, static_cast<unsigned>(M / order_));
        return Cyclo(M, std::move(p));
    }

    /// Minimal-order copy: the smallest divisor M of order() with this in Q(zeta_M).
    Cyclo reduced() const;

    Cyclo operator-() const {
        detail::QPoly p = coeffs_;
        for (auto& c : p) c = -c;
        return Cyclo(order_, std::move(p));
    }

    friend Cyclo operator+(const Cyclo& a, const Cyclo& b) {
        auto [x, y, L] = Cyclo::aligned(a, b);
        detail::QPoly p = x.coeffs_;
        if (p.size() < y.coeffs_.size()) p.resize(y.coeffs_.size(), Rational(0));
        for (std::size_t i = 0; i < y.coeffs_.size(); ++i) p[i] += y.coeffs_[i];
        detail::qp_trim(p);
        return Cyclo(L, std::move(p));
    }

    friend Cyclo operator-(const Cyclo& a, const Cyclo& b) { return a + (-b); }

    friend Cyclo operator*(const Cyclo& a, const Cyclo& b) {
        auto [x, y, L] = Cyclo::aligned(a, b);
        detail::QPoly p = detail::qp_mod(detail::qp_mul(x.coeffs_, y.coeffs_),
                                         detail::cyclotomic_poly(L));
        return Cyclo(L, std::move(p));
    }

    /// Multiplicative inverse via extended Euclid mod Phi_L.
    Cyclo inverse() const {
        if (is_zero()) throw DivisionByZero();
        const detail::QPoly& m = detail::cyclotomic_poly(order_);
        // Extended Euclid on (coeffs_, Phi_L): u*coeffs_ + v*Phi_L = g.
        detail::QPoly r0 = coeffs_, r1 = m;
        detail::QPoly u0{Rational(1)}, u1{};
        while (!r1.empty()) {
            detail::QPoly q, r;
            detail::qp_divmod(r0, r1, q, r);
            detail::QPoly u = detail::qp_sub(u0, detail::qp_mul(q, u1));
            r0 = std::move(r1); r1 = std::move(r);
            u0 = std::move(u1); u1 = std::move(u);
        }
        if (detail::qp_deg(r0) != 0)
            throw std::logic_error("Cyclo::inverse: gcd with Phi_L not constant");
        Rational g = r0[0];
        for (auto& c : u0) c = c / g;
        detail::QPoly p = detail::qp_mod(u0, m);
        return Cyclo(order_, std::move(p));
    }

    friend Cyclo operator/(const Cyclo& a, const Cyclo& b) { return a * b.inverse(); }

    Cyclo pow(long e) const {
        if (e < 0) return inverse().pow(-e);
        Cyclo base = *this, acc = Cyclo::from_int(1);
        unsigned long k = static_cast<unsigned long>(e);
        while (k) {
            if (k & 1) acc = acc * base;
            base = base * base;
            k >>= 1;
        }
        return acc;
    }

    friend bool operator==(const Cyclo& a, const Cyclo& b) {
        auto [x, y, L] = Cyclo::aligned(a, b);
        (void)L;
        return x.coeffs_ == y.coeffs_;
    }

    /// Galois twist zeta_L -> zeta_L^t; requires gcd(t, L) = 1.
    Cyclo galois(unsigned long t) const {
        unsigned long L = order_;
        t %= L;
        if (std::gcd(t, L) != 1) throw std::domain_error("Cyclo::galois: exponent not coprime");
        detail::QPoly p;
        for (std::size_t i = 0; i < coeffs_.size(); ++i) {
            if (coeffs_[i].is_zero()) continue;
            std::size_t e = (i * t) % L;
            if (p.size() <= e) p.resize(e + 1, Rational(0));
            p[e] += coeffs_[i];
        }
        p = detail::qp_mod(p, detail::cyclotomic_poly(L));
        return Cyclo(L, std::move(p));
    }

    /// Deterministic total order for canonical sorting (not an algebraic order).
    std::strong_ordering operator<=>(const Cyclo& b) const {
        auto [x, y, L] = Cyclo::aligned(*this, b);
        (void)L;
        if (auto c = x.coeffs_.size() <=> y.coeffs_.size(); c != 0) return c;
        for (std::size_t i = 0; i < x.coeffs_.size(); ++i)
            if (auto c = x.coeffs_[i] <=> y.coeffs_[i]; c != 0) return c;
        return std::strong_ordering::equal;
    }

    /// Numeric value of the standard embedding zeta_L = exp(2*pi*i/L);
    /// only for rendering and diagnostics, never for topology decisions.
    std::pair<double, double> to_complex() const;

private:
    Cyclo(unsigned long L, detail::QPoly p) : order_(L), coeffs_(std::move(p)) {
        if (order_ == 0) throw std::domain_error("Cyclo: order must be positive");
        const detail::QPoly& m = detail::cyclotomic_poly(order_);
        if (detail::qp_deg(coeffs_) >= detail::qp_deg(m))
            coeffs_ = detail::qp_mod(coeffs_, m);
        detail::qp_trim(coeffs_);
    }

    static std::tuple<Cyclo, Cyclo, unsigned long> aligned(const Cyclo& a, const Cyclo& b) {
        unsigned long L = std::lcm(a.order_, b.order_);
        return {a.lifted(L), b.lifted(L), L};
    }

    unsigned long order_;
    std::vector<Rational> coeffs_;

    friend class CycloBuilder;
};

inline Cyclo Cyclo::reduced() const {
    if (coeffs_.empty()) return Cyclo();
    if (coeffs_.size() == 1) { Cyclo r; r.order_ = 1; r.coeffs_ = coeffs_; return r; }
    for (unsigned long M = 1; M < order_; ++M) {
        if (order_ % M != 0) continue;
        unsigned long k = order_ / M;
        // Member of Q(zeta_M) iff expressible as p(t^k) mod Phi_L with deg p < phi(M).
        // Solve the linear system over Q by Gaussian elimination on the basis images.
        std::size_t cols = detail::euler_phi(M);
        std::size_t rows = detail::euler_phi(order_);
        std::vector<std::vector<Rational>> A(rows, std::vector<Rational>(cols + 1, Rational(0)));
        for (std::size_t j = 0; j < cols; ++j) {
            detail::QPoly tj(j * k + 1, Rational(0));
            tj[j * k] = Rational(1);
            tj = detail::qp_mod(tj, detail::cyclotomic_poly(order_));
            for (std::size_t i = 0; i < tj.size(); ++i) A[i][j] = tj[i];
        }
        for (std::size_t i = 0; i < coeffs_.size(); ++i) A[i][cols] = coeffs_[i];
        // Forward elimination.
        std::size_t rank = 0;
        std::vector<std::size_t> pivot_col;
        for (std::size_t c = 0; c < cols && rank < rows; ++c) {
            std::size_t piv = rank;
            while (piv < rows && A[piv][c].is_zero()) ++piv;
            if (piv == rows) continue;
            std::swap(A[rank], A[piv]);
            for (std::size_t r = 0; r < rows; ++r) {
                if (r == rank || A[r][c].is_zero()) continue;
                Rational f = A[r][c] / A[rank][c];
                for (std::size_t cc = c; cc <= cols; ++cc) A[r][cc] -= f * A[rank][cc];
            }
            pivot_col.push_back(c);
            ++rank;
        }
        bool consistent = true;
        for (std::size_t r = rank; r < rows; ++r)
            if (!A[r][cols].is_zero()) { consistent = false; break; }
        if (!consistent) continue;
        detail::QPoly p(cols, Rational(0));
        for (std::size_t r = 0; r < rank; ++r)
            p[pivot_col[r]] = A[r][cols] / A[r][pivot_col[r]];
        detail::qp_trim(p);
        Cyclo out(M, std::move(p));
        return out;
    }
    return *this;
}

inline std::pair<double, double> Cyclo::to_complex() const {
    constexpr double tau = 6.283185307179586476925286766559;
    double re = 0.0, im = 0.0;
    for (std::size_t i = 0; i < coeffs_.size(); ++i) {
        if (coeffs_[i].is_zero()) continue;
        double c = coeffs_[i].to_double();
        double ang = tau * static_cast<double>(i) / static_cast<double>(order_);
        re += c * std::cos(ang);
        im += c * std::sin(ang);
    }
    return {re, im};
}

/// Convenience spellings used throughout the library and tests.
inline Cyclo cyclo_make(unsigned long L, long k) { return Cyclo::root_of_unity(L, k); }
inline Cyclo cyclo_add(const Cyclo& a, const Cyclo& b) { return a + b; }
inline Cyclo cyclo_mul(const Cyclo& a, const Cyclo& b) { return a * b; }
inline Cyclo cyclo_neg(const Cyclo& a) { return -a; }
inline Cyclo cyclo_inv(const Cyclo& a) { return a.inverse(); }
inline bool cyclo_is_zero(const Cyclo& a) { return a.is_zero(); }

}  // namespace carrousel
