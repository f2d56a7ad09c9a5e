#pragma once

#include "carrousel/cyclotomic.hpp"
#include "carrousel/rational.hpp"

#include <algorithm>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

namespace carrousel {

struct IndistinguishableAtTruncation : std::runtime_error {
    IndistinguishableAtTruncation()
        : std::runtime_error("series agree through the certified truncation order") {}
};

/// Finite fractional-exponent series with a certified truncation order:
/// all terms with exponent < trunc are present and exact. trunc == nullopt
/// means the series is exact (no hidden tail).
struct PSeries {
    std::vector<std::pair<Rational, Cyclo>> terms;  // sorted by exponent, coeffs nonzero
    std::optional<Rational> trunc;

    static PSeries zero() { return {}; }

    static PSeries monomial(const Rational& e, Cyclo c) {
        PSeries s;
        if (!c.is_zero()) s.terms.emplace_back(e, std::move(c));
        return s;
    }

    bool is_zero() const { return terms.empty(); }

    /// Lower bound for the valuation: first exponent, or the truncation
    /// order when no term is known (exact zero has unbounded valuation).
    std::optional<Rational> valuation_lb() const {
        if (!terms.empty()) return terms.front().first;
        return trunc;  // nullopt = exact zero = +infinity
    }

    void normalize() {
        std::sort(terms.begin(), terms.end(),
                  [](const auto& a, const auto& b) { return a.first < b.first; });
        std::vector<std::pair<Rational, Cyclo>> out;
        for (auto& [e, c] : terms) {
            if (trunc && !(e < *trunc)) break;
            if (!out.empty() && out.back().first == e)
                out.back().second = out.back().second + c;
            else
                out.emplace_back(e, c);
            if (out.back().second.is_zero()) out.pop_back();
        }
        terms = std::move(out);
    }

    PSeries truncated(const Rational& t) const {
        PSeries r = *this;
        r.trunc = r.trunc ? min(*r.trunc, t) : t;
        r.normalize();
        return r;
    }

    Cyclo coeff_at(const Rational& e) const {
        for (const auto& [ee, c] : terms) {
            if (ee == e) return c;
            if (e < ee) break;
        }
        return Cyclo();
    }
};

inline std::optional<Rational> trunc_min(const std::optional<Rational>& a,
                                         const std::optional<Rational>& b) {
    if (!a) return b;
    if (!b) return a;
    return min(*a, *b);
}

inline PSeries series_add(const PSeries& a, const PSeries& b) {
    PSeries r;
    r.terms = a.terms;
    r.terms.insert(r.terms.end(), b.terms.begin(), b.terms.end());
    r.trunc = trunc_min(a.trunc, b.trunc);
    r.normalize();
    return r;
}

inline PSeries series_neg(const PSeries& a) {
    PSeries r = a;
    for (auto& [e, c] : r.terms) c = -c;
    return r;
}

inline PSeries series_sub(const PSeries& a, const PSeries& b) { return series_add(a, series_neg(b)); }

inline PSeries series_mul(const PSeries& a, const PSeries& b) {
    PSeries r;
    // Certified order of the product: a's unknown tail enters at val(b) and
    // vice versa.
    std::optional<Rational> t;
    if (a.trunc) {
        auto vb = b.valuation_lb();
        if (vb) t = trunc_min(t, *a.trunc + *vb);
        // b exact zero: product exact zero, no constraint
        else if (!b.terms.empty()) t = a.trunc;
    }
    if (b.trunc) {
        auto va = a.valuation_lb();
        if (va) t = trunc_min(t, *b.trunc + *va);
        else if (!a.terms.empty()) t = b.trunc;
    }
    r.trunc = t;
    for (const auto& [ea, ca] : a.terms)
        for (const auto& [eb, cb] : b.terms)
            r.terms.emplace_back(ea + eb, ca * cb);
    r.normalize();
    return r;
}

inline PSeries series_scale(const PSeries& a, const Cyclo& c) {
    PSeries r = a;
    if (c.is_zero()) { r.terms.clear(); return r; }
    for (auto& [e, cc] : r.terms) cc = cc * c;
    r.normalize();
    return r;
}

/// Substitute x -> x^k (multiplies every exponent, including trunc, by k > 0).
inline PSeries series_inflate(const PSeries& a, const Rational& k) {
    if (k.sign() <= 0) throw std::domain_error("series_inflate: factor must be positive");
    PSeries r;
    for (const auto& [e, c] : a.terms) r.terms.emplace_back(e * k, c);
    if (a.trunc) r.trunc = *a.trunc * k;
    r.normalize();
    return r;
}

inline PSeries series_pow(const PSeries& a, unsigned long e) {
    PSeries acc = PSeries::monomial(Rational(0), Cyclo::from_int(1));
    PSeries base = a;
    while (e) {
        if (e & 1) acc = series_mul(acc, base);
        base = series_mul(base, base);
        e >>= 1;
    }
    return acc;
}

/// A curve branch y = sum a_i x^{p_i}: finite truncated Puiseux series with
/// minimal ramification index N (lcm of the exponent denominators).
struct PuiseuxBranch {
    unsigned long ram = 1;
    PSeries series;

    static PuiseuxBranch from_series(PSeries s) {
        PuiseuxBranch b;
        b.series = std::move(s);
        b.series.normalize();
        mpz_class n = 1;
        for (const auto& [e, c] : b.series.terms)
            mpz_lcm(n.get_mpz_t(), n.get_mpz_t(), e.den().get_mpz_t());
        if (!n.fits_ulong_p()) throw std::overflow_error("PuiseuxBranch: ramification too large");
        b.ram = n.get_ui();
        return b;
    }

    std::optional<Rational> trunc() const { return series.trunc; }
};

/// The N conjugate sheets of a branch: sheet k has coefficients
/// a_i * zeta_N^{k * (p_i * N)}.
inline std::vector<PSeries> conjugates(const PuiseuxBranch& b) {
    std::vector<PSeries> sheets;
    unsigned long N = b.ram;
    for (unsigned long k = 0; k < N; ++k) {
        PSeries s;
        s.trunc = b.series.trunc;
        for (const auto& [e, c] : b.series.terms) {
            Rational scaled = e * Rational(static_cast<long>(N));
            long a = scaled.as_long();  // integral by the denominator invariant
            Cyclo tw = Cyclo::root_of_unity(N, static_cast<long>(k) * a);
            s.terms.emplace_back(e, c * tw);
        }
        s.normalize();
        sheets.push_back(std::move(s));
    }
    return sheets;
}

/// First exponent at which two sheets differ (absent terms count as zero).
/// Throws IndistinguishableAtTruncation when they agree through the common
/// certified order.
inline Rational contact_exponent(const PSeries& s1, const PSeries& s2) {
    PSeries d = series_sub(s1, s2);
    if (!d.terms.empty()) return d.terms.front().first;
    if (!d.trunc) throw IndistinguishableAtTruncation();  // exactly equal series
    throw IndistinguishableAtTruncation();
}

/// Characteristic (essential) exponents: those whose denominator does not
/// divide the lcm of the previous ones.
inline std::vector<Rational> characteristic_exponents(const PuiseuxBranch& b) {
    std::vector<Rational> out;
    mpz_class L = 1;  // lcm of denominators seen so far
    for (const auto& [e, c] : b.series.terms) {
        if (!mpz_divisible_p(L.get_mpz_t(), e.den().get_mpz_t())) {
            out.push_back(e);
            mpz_lcm(L.get_mpz_t(), L.get_mpz_t(), e.den().get_mpz_t());
        }
    }
    return out;
}

/// Symmetric matrix of pairwise sheet contacts q_{jk}; sheet_labels maps a row
/// to (branch index, conjugate index).
struct ContactMatrix {
    std::size_t mu = 0;
    std::vector<std::vector<Rational>> q;  // mu x mu, diagonal unused (zero)
    std::vector<std::pair<std::size_t, std::size_t>> sheet_labels;

    const Rational& at(std::size_t j, std::size_t k) const { return q[j][k]; }
};

inline ContactMatrix contact_matrix(const std::vector<PuiseuxBranch>& branches) {
    ContactMatrix m;
    std::vector<PSeries> sheets;
    for (std::size_t b = 0; b < branches.size(); ++b) {
        auto cs = conjugates(branches[b]);
        for (std::size_t k = 0; k < cs.size(); ++k) {
            sheets.push_back(std::move(cs[k]));
            m.sheet_labels.emplace_back(b, k);
        }
    }
    m.mu = sheets.size();
    m.q.assign(m.mu, std::vector<Rational>(m.mu, Rational(0)));
    for (std::size_t j = 0; j < m.mu; ++j)
        for (std::size_t k = j + 1; k < m.mu; ++k) {
            Rational c = contact_exponent(sheets[j], sheets[k]);
            m.q[j][k] = c;
            m.q[k][j] = c;
        }
    return m;
}

/// Ultrametric check: in every triple the minimum is attained at least twice.
inline bool is_ultrametric(const ContactMatrix& m) {
    for (std::size_t i = 0; i < m.mu; ++i)
        for (std::size_t j = i + 1; j < m.mu; ++j)
            for (std::size_t k = j + 1; k < m.mu; ++k) {
                const Rational& a = m.q[i][j];
                const Rational& b = m.q[j][k];
                const Rational& c = m.q[i][k];
                Rational lo = min(a, min(b, c));
                int hits = (a == lo) + (b == lo) + (c == lo);
                if (hits < 2) return false;
            }
    return true;
}

}  // namespace carrousel
