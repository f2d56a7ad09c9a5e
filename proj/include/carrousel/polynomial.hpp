#pragma once

#include "carrousel/cyclotomic.hpp"
#include "carrousel/puiseux.hpp"

#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace carrousel {

struct TruncationTooShort : std::runtime_error {
    TruncationTooShort()
        : std::runtime_error("leading term not certified below the truncation order") {}
};

struct NotSquarefree : std::runtime_error {
    NotSquarefree() : std::runtime_error("polynomial has a repeated factor") {}
};

/// Bivariate polynomial over a cyclotomic field; no zero coefficients stored.
class BiPoly {
public:
    using Key = std::pair<unsigned, unsigned>;  // (deg_x, deg_y)

    BiPoly() = default;

    static BiPoly zero() { return {}; }

    static BiPoly term(unsigned dx, unsigned dy, Cyclo c) {
        BiPoly p;
        p.set(dx, dy, std::move(c));
        return p;
    }

    void set(unsigned dx, unsigned dy, Cyclo c) {
        if (c.is_zero())
            terms_.erase({dx, dy});
        else
            terms_[{dx, dy}] = std::move(c);
    }

    void add_term(unsigned dx, unsigned dy, const Cyclo& c) {
        auto key = Key{dx, dy};
        auto it = terms_.find(key);
        if (it == terms_.end()) {
            if (!c.is_zero()) terms_[key] = c;
        } else {
            it->second = it->second + c;
            if (it->second.is_zero()) terms_.erase(it);
        }
    }

    Cyclo coeff(unsigned dx, unsigned dy) const {
        auto it = terms_.find({dx, dy});
        return it == terms_.end() ? Cyclo() : it->second;
    }

    const std::map<Key, Cyclo>& terms() const { return terms_; }

    bool is_zero() const { return terms_.empty(); }

    unsigned deg_x() const {
        unsigned d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, k.first);
        return d;
    }

    unsigned deg_y() const {
        unsigned d = 0;
        for (const auto& [k, c] : terms_) d = std::max(d, k.second);
        return d;
    }

    friend BiPoly operator+(const BiPoly& a, const BiPoly& b) {
        BiPoly r = a;
        for (const auto& [k, c] : b.terms_) r.add_term(k.first, k.second, c);
        return r;
    }

    friend BiPoly operator-(const BiPoly& a, const BiPoly& b) {
        BiPoly r = a;
        for (const auto& [k, c] : b.terms_) r.add_term(k.first, k.second, -c);
        return r;
    }

    BiPoly operator-() const {
        BiPoly r;
        for (const auto& [k, c] : terms_) r.terms_[k] = -c;
        return r;
    }

    friend BiPoly operator*(const BiPoly& a, const BiPoly& b) {
        BiPoly r;
        for (const auto& [ka, ca] : a.terms_)
            for (const auto& [kb, cb] : b.terms_)
                r.add_term(ka.first + kb.first, ka.second + kb.second, ca * cb);
        return r;
    }

    BiPoly scaled(const Cyclo& c) const {
        BiPoly r;
        if (c.is_zero()) return r;
        for (const auto& [k, cc] : terms_) r.terms_[k] = cc * c;
        return r;
    }

    BiPoly dx() const {
        BiPoly r;
        for (const auto& [k, c] : terms_)
            if (k.first > 0)
                r.add_term(k.first - 1, k.second, c * Cyclo::from_int(static_cast<long>(k.first)));
        return r;
    }

    BiPoly dy() const {
        BiPoly r;
        for (const auto& [k, c] : terms_)
            if (k.second > 0)
                r.add_term(k.first, k.second - 1, c * Cyclo::from_int(static_cast<long>(k.second)));
        return r;
    }

    /// f(y, x): swaps the variable roles.
    BiPoly transposed() const {
        BiPoly r;
        for (const auto& [k, c] : terms_) r.terms_[{k.second, k.first}] = c;
        return r;
    }

    /// Multiplicity of the x = 0 component: largest k with x^k | f.
    unsigned x_factor_multiplicity() const {
        if (terms_.empty()) return 0;
        unsigned m = ~0u;
        for (const auto& [k, c] : terms_) m = std::min(m, k.first);
        return m;
    }

    unsigned y_factor_multiplicity() const {
        if (terms_.empty()) return 0;
        unsigned m = ~0u;
        for (const auto& [k, c] : terms_) m = std::min(m, k.second);
        return m;
    }

    BiPoly divided_by_x(unsigned k) const {
        BiPoly r;
        for (const auto& [key, c] : terms_) {
            if (key.first < k) throw std::domain_error("divided_by_x: not divisible");
            r.terms_[{key.first - k, key.second}] = c;
        }
        return r;
    }

    BiPoly divided_by_y(unsigned k) const {
        BiPoly r;
        for (const auto& [key, c] : terms_) {
            if (key.second < k) throw std::domain_error("divided_by_y: not divisible");
            r.terms_[{key.first, key.second - k}] = c;
        }
        return r;
    }

    /// Order of vanishing at the origin (degree of the lowest form).
    unsigned multiplicity() const {
        if (terms_.empty()) return 0;
        unsigned m = ~0u;
        for (const auto& [k, c] : terms_) m = std::min(m, k.first + k.second);
        return m;
    }

    /// Substitution (x, y) -> (x + a*y, y + b*x); invertible iff 1 - ab != 0.
    BiPoly linear_change(const Rational& a, const Rational& b) const {
        BiPoly X = BiPoly::term(1, 0, Cyclo::from_int(1)) +
                   BiPoly::term(0, 1, Cyclo::from_rational(a));
        BiPoly Y = BiPoly::term(0, 1, Cyclo::from_int(1)) +
                   BiPoly::term(1, 0, Cyclo::from_rational(b));
        BiPoly r;
        for (const auto& [k, c] : terms_) {
            BiPoly t = BiPoly::term(0, 0, c);
            for (unsigned i = 0; i < k.first; ++i) t = t * X;
            for (unsigned j = 0; j < k.second; ++j) t = t * Y;
            r = r + t;
        }
        return r;
    }

    bool operator==(const BiPoly& o) const { return terms_ == o.terms_; }

private:
    std::map<Key, Cyclo> terms_;
};

/// f(x(w), y(w)) as a series in w, with truncation tracked through the
/// arithmetic. Throws TruncationTooShort when no leading term can be
/// certified (a possibly nonzero result with an empty certified window).
inline PSeries poly_eval_on_branch(const BiPoly& f, const PSeries& x_of_w, const PSeries& y_of_w) {
    // Horner in y: f = sum_j c_j(x) y^j.
    unsigned dy = f.deg_y();
    PSeries acc = PSeries::zero();
    for (unsigned jj = 0; jj <= dy; ++jj) {
        unsigned j = dy - jj;
        PSeries cj = PSeries::zero();
        for (const auto& [k, c] : f.terms()) {
            if (k.second != j) continue;
            cj = series_add(cj, series_scale(series_pow(x_of_w, k.first), c));
        }
        acc = series_add(series_mul(acc, y_of_w), cj);
    }
    if (acc.terms.empty() && acc.trunc) throw TruncationTooShort();
    return acc;
}

namespace detail {

/// Univariate polynomial over the cyclotomic field (index = degree).
using CPoly = std::vector<Cyclo>;

inline void cp_trim(CPoly& p) {
    while (!p.empty() && p.back().is_zero()) p.pop_back();
}

inline int cp_deg(const CPoly& p) { return static_cast<int>(p.size()) - 1; }

inline CPoly cp_mul(const CPoly& a, const CPoly& b) {
    if (a.empty() || b.empty()) return {};
    CPoly r(a.size() + b.size() - 1);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < b.size(); ++j)
            r[i + j] = r[i + j] + a[i] * b[j];
    cp_trim(r);
    return r;
}

inline void cp_divmod(CPoly a, const CPoly& b, CPoly& q, CPoly& r) {
    if (b.empty()) throw std::domain_error("cp_divmod: zero divisor");
    q.assign(a.size() >= b.size() ? a.size() - b.size() + 1 : 0, Cyclo());
    Cyclo lcinv = b.back().inverse();
    while (cp_deg(a) >= cp_deg(b)) {
        std::size_t shift = a.size() - b.size();
        Cyclo c = a.back() * lcinv;
        q[shift] = c;
        for (std::size_t i = 0; i < b.size(); ++i) a[shift + i] = a[shift + i] - c * b[i];
        cp_trim(a);
        if (a.empty()) break;
    }
    cp_trim(q);
    r = std::move(a);
}

inline CPoly cp_gcd(CPoly a, CPoly b) {
    cp_trim(a);
    cp_trim(b);
    while (!b.empty()) {
        CPoly q, r;
        cp_divmod(a, b, q, r);
        a = std::move(b);
        b = std::move(r);
    }
    if (!a.empty()) {
        Cyclo lcinv = a.back().inverse();
        for (auto& c : a) c = c * lcinv;
    }
    return a;
}

inline CPoly cp_derivative(const CPoly& p) {
    CPoly r;
    for (std::size_t i = 1; i < p.size(); ++i)
        r.push_back(p[i] * Cyclo::from_int(static_cast<long>(i)));
    cp_trim(r);
    return r;
}

/// f as a polynomial in y whose coefficients are univariate polys in x.
inline std::vector<CPoly> y_recursive(const BiPoly& f) {
    std::vector<CPoly> out(f.deg_y() + 1);
    for (const auto& [k, c] : f.terms()) {
        auto& cx = out[k.second];
        if (cx.size() <= k.first) cx.resize(k.first + 1);
        cx[k.first] = c;
    }
    for (auto& cx : out) cp_trim(cx);
    return out;
}

/// gcd of all x-coefficients: the content of f in (zeta)[x].
inline CPoly bipoly_content_x(const BiPoly& f) {
    CPoly g;
    for (const auto& cx : y_recursive(f)) {
        if (cx.empty()) continue;
        g = g.empty() ? cx : cp_gcd(g, cx);
        if (cp_deg(g) == 0) break;
    }
    return g;
}

}  // namespace detail

/// Exact squarefreeness test: content in x squarefree, and gcd_y(f, f_y)
/// trivial over the rational-function field (subresultant pseudo-remainders).
inline bool is_squarefree(const BiPoly& f) {
    if (f.is_zero()) return false;
    using namespace detail;
    // Pure x-part: repeated x-factors show up in the content.
    CPoly cont = bipoly_content_x(f);
    if (cp_deg(cont) > 0) {
        CPoly g = cp_gcd(cont, cp_derivative(cont));
        if (cp_deg(g) > 0) return false;
    }
    if (f.deg_y() == 0) return true;

    // Pseudo-remainder Euclid on (f, df/dy) viewed in Q(zeta)(x)[y],
    // with content stripping to keep coefficients small.
    auto strip = [](std::vector<CPoly>& p) {
        CPoly g;
        for (const auto& c : p)
            if (!c.empty()) g = g.empty() ? c : cp_gcd(g, c);
        if (cp_deg(g) > 0) {
            for (auto& c : p) {
                if (c.empty()) continue;
                CPoly q, r;
                cp_divmod(c, g, q, r);
                c = std::move(q);
            }
        }
    };
    auto ydeg = [](const std::vector<CPoly>& p) {
        int d = static_cast<int>(p.size()) - 1;
        while (d >= 0 && p[static_cast<std::size_t>(d)].empty()) --d;
        return d;
    };
    std::vector<CPoly> a = detail::y_recursive(f);
    std::vector<CPoly> b = detail::y_recursive(f.dy());
    strip(a);
    strip(b);
    while (true) {
        int da = ydeg(a), db = ydeg(b);
        if (db < 0) break;
        if (da < db) { std::swap(a, b); continue; }
        // pseudo-remainder: lc(b)^(da-db+1) * a mod b
        CPoly lcb = b[static_cast<std::size_t>(db)];
        for (int step = 0; step <= da - db; ++step) {
            int dda = ydeg(a);
            if (dda < db) break;
            CPoly lca = a[static_cast<std::size_t>(dda)];
            // a := lcb * a - lca * y^(dda-db) * b
            std::vector<CPoly> na(std::max<std::size_t>(a.size(), b.size() + (dda - db)));
            for (std::size_t i = 0; i < a.size(); ++i)
                if (!a[i].empty()) na[i] = cp_mul(lcb, a[i]);
            for (std::size_t i = 0; i < b.size(); ++i) {
                if (b[i].empty()) continue;
                CPoly t = cp_mul(lca, b[i]);
                std::size_t idx = i + (dda - db);
                // subtract
                CPoly& dst = na[idx];
                if (dst.size() < t.size()) dst.resize(t.size());
                for (std::size_t j = 0; j < t.size(); ++j) dst[j] = dst[j] - t[j];
                cp_trim(dst);
            }
            a = std::move(na);
        }
        strip(a);
        std::swap(a, b);
    }
    return ydeg(a) <= 0;
}

struct GenericityFailed : std::runtime_error {
    GenericityFailed() : std::runtime_error("no generic linear change found") {}
};

}  // namespace carrousel
