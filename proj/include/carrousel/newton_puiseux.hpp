#pragma once

#include "carrousel/polynomial.hpp"
#include "carrousel/puiseux.hpp"

#include <cstdint>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace carrousel {

/// Raised when a Newton-polygon step needs an algebraic number outside the
/// supported coefficient set (rational multiples of roots of unity).
struct FieldExtensionRequired : std::runtime_error {
    std::string minimal_polynomial;
    explicit FieldExtensionRequired(std::string minpoly)
        : std::runtime_error("field extension required, minimal polynomial: " + minpoly),
          minimal_polynomial(std::move(minpoly)) {}
};

namespace detail {

inline std::string cp_to_string(const CPoly& p) {
    std::ostringstream os;
    bool first = true;
    for (std::size_t i = p.size(); i-- > 0;) {
        if (p[i].is_zero()) continue;
        if (!first) os << " + ";
        first = false;
        if (p[i].is_rational()) {
            os << p[i].as_rational().str();
        } else {
            os << "(zeta_" << p[i].order() << " expr)";
        }
        if (i >= 1) os << "*c" << (i > 1 ? "^" + std::to_string(i) : "");
    }
    if (first) os << "0";
    return os.str();
}

/// Trial-division factorization with a cap; returns all positive divisors.
/// Gives up (empty result) if a composite cofactor survives the cap.
inline bool all_divisors(const mpz_class& n_in, std::vector<mpz_class>& out) {
    mpz_class n = ::abs(n_in);
    if (n == 0) return false;
    std::vector<std::pair<mpz_class, unsigned>> fac;
    mpz_class p = 2;
    mpz_class cap = 1000000;
    while (p * p <= n && p <= cap) {
        if (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
            unsigned e = 0;
            while (mpz_divisible_p(n.get_mpz_t(), p.get_mpz_t())) {
                n /= p;
                ++e;
            }
            fac.emplace_back(p, e);
        }
        p += (p == 2 ? 1 : 2);
    }
    if (n > 1) {
        if (mpz_probab_prime_p(n.get_mpz_t(), 25) == 0 && n > cap * cap) return false;
        fac.emplace_back(n, 1);
    }
    out = {mpz_class(1)};
    for (const auto& [q, e] : fac) {
        std::size_t base = out.size();
        mpz_class pw = 1;
        for (unsigned k = 1; k <= e; ++k) {
            pw *= q;
            for (std::size_t i = 0; i < base; ++i) out.push_back(out[i] * pw);
        }
    }
    return true;
}

inline CPoly cp_from_qpoly(const QPoly& p) {
    CPoly r;
    r.reserve(p.size());
    for (const auto& c : p) r.push_back(Cyclo::from_rational(c));
    return r;
}

inline Cyclo cp_eval(const CPoly& p, const Cyclo& x) {
    Cyclo acc;
    for (std::size_t i = p.size(); i-- > 0;) acc = acc * x + p[i];
    return acc;
}

/// All roots of p (over the supported set rho * zeta_M) with multiplicities.
/// Throws FieldExtensionRequired if any root lies outside the set.
inline std::vector<std::pair<Cyclo, unsigned>> cyclotomic_roots(const CPoly& p_in) {
    CPoly p = p_in;
    cp_trim(p);
    if (cp_deg(p) < 1) return {};

    // Squarefree part.
    CPoly sf;
    {
        CPoly g = cp_gcd(p, cp_derivative(p));
        if (cp_deg(g) > 0) {
            CPoly q, r;
            cp_divmod(p, g, q, r);
            sf = std::move(q);
        } else {
            sf = p;
        }
    }

    // Strip c = 0 roots (callers never pass them, but be safe).
    std::size_t zshift = 0;
    while (!sf.empty() && sf.front().is_zero()) {
        sf.erase(sf.begin());
        ++zshift;
    }

    unsigned long L = 1;
    for (const auto& c : sf) L = std::lcm(L, c.order());

    // Galois-closure product over Q, integerized, for divisor bounds.
    QPoly P;
    {
        CPoly prod{Cyclo::from_int(1)};
        for (unsigned long t = 1; t <= L; ++t) {
            if (std::gcd(t, L) != 1) continue;
            CPoly conj;
            conj.reserve(sf.size());
            for (const auto& c : sf) conj.push_back(c.lifted(L).galois(t));
            prod = cp_mul(prod, conj);
        }
        P.reserve(prod.size());
        for (const auto& c : prod) {
            if (!c.is_rational())
                throw std::logic_error("cyclotomic_roots: Galois product not rational");
            P.push_back(c.as_rational());
        }
        qp_trim(P);
    }
    mpz_class denlcm = 1;
    for (const auto& c : P) mpz_lcm(denlcm.get_mpz_t(), denlcm.get_mpz_t(), c.den().get_mpz_t());
    mpz_class content = 0;
    for (const auto& c : P) {
        mpz_class z = (c * Rational(denlcm)).as_integer();
        mpz_gcd(content.get_mpz_t(), content.get_mpz_t(), z.get_mpz_t());
    }
    if (content == 0) content = 1;
    mpz_class A = (P.front() * Rational(denlcm)).as_integer() / content;
    mpz_class B = (P.back() * Rational(denlcm)).as_integer() / content;

    std::vector<mpz_class> divA, divB;
    bool okA = all_divisors(A, divA);
    bool okB = all_divisors(B, divB);

    int d = cp_deg(sf);
    std::vector<Cyclo> roots;
    auto try_root = [&](const Cyclo& cand) {
        if (cp_eval(sf, cand).is_zero()) {
            for (const auto& r : roots)
                if (r == cand) return;
            roots.push_back(cand);
        }
    };

    if (okA && okB) {
        // Candidate rational magnitudes rho with rho^k = a/b for some k <= d.
        std::vector<Rational> rhos;
        for (int k = 1; k <= d; ++k) {
            for (const auto& a : divA)
                for (const auto& b : divB) {
                    Rational q(a, b);
                    Rational rho;
                    if (!rational_root(q, static_cast<unsigned long>(k), rho)) continue;
                    bool seen = false;
                    for (const auto& r : rhos)
                        if (r == rho) { seen = true; break; }
                    if (!seen) rhos.push_back(rho);
                }
        }
        // Roots of unity of every order M subject to the degree bound over the
        // coefficient field: [Q(zeta_lcm(L,M)) : Q(zeta_L)] <= d.
        unsigned long degQ = static_cast<unsigned long>(d) * euler_phi(L);
        unsigned long Mbound = 2 * degQ * degQ + 4;
        for (unsigned long M = 1; M <= Mbound && static_cast<int>(roots.size()) < d; ++M) {
            if (euler_phi(std::lcm(M, L)) > degQ) continue;
            for (unsigned long j = (M == 1 ? 0 : 1); j < std::max(M, 1ul); ++j) {
                if (M > 1 && std::gcd(j, M) != 1) continue;
                Cyclo zeta = Cyclo::root_of_unity(M, static_cast<long>(j));
                for (const auto& rho : rhos) {
                    if (static_cast<int>(roots.size()) >= d) break;
                    try_root(Cyclo::from_rational(rho) * zeta);
                }
                if (M == 1) break;
            }
        }
    }

    // Completeness check: divide out the found roots.
    CPoly rem = sf;
    for (const auto& r : roots) {
        CPoly lin{-r, Cyclo::from_int(1)};
        CPoly q, rr;
        cp_divmod(rem, lin, q, rr);
        if (!rr.empty()) throw std::logic_error("cyclotomic_roots: division by root failed");
        rem = std::move(q);
    }
    if (cp_deg(rem) > 0) throw FieldExtensionRequired(cp_to_string(rem));

    // Multiplicities from the original polynomial.
    std::vector<std::pair<Cyclo, unsigned>> out;
    CPoly whole = p;
    for (const auto& r : roots) {
        unsigned m = 0;
        while (true) {
            CPoly lin{-r, Cyclo::from_int(1)};
            CPoly q, rr;
            cp_divmod(whole, lin, q, rr);
            if (!rr.empty()) break;
            whole = std::move(q);
            ++m;
        }
        out.emplace_back(r, m);
    }
    (void)zshift;
    return out;
}

/// Polynomial in y with fractional x-exponents; the working object of the
/// Newton-polygon iteration.
struct FracPoly {
    std::map<std::pair<Rational, unsigned>, Cyclo> terms;  // (x-exp, y-deg) -> coeff

    static FracPoly from_bipoly(const BiPoly& f) {
        FracPoly r;
        for (const auto& [k, c] : f.terms())
            r.terms[{Rational(static_cast<long>(k.first)), k.second}] = c;
        return r;
    }

    bool empty() const { return terms.empty(); }

    unsigned min_ydeg() const {
        unsigned m = ~0u;
        for (const auto& [k, c] : terms) m = std::min(m, k.second);
        return m;
    }

    unsigned max_ydeg() const {
        unsigned m = 0;
        for (const auto& [k, c] : terms) m = std::max(m, k.second);
        return m;
    }

    void shift_ydeg_down(unsigned k) {
        std::map<std::pair<Rational, unsigned>, Cyclo> nt;
        for (auto& [key, c] : terms) nt[{key.first, key.second - k}] = std::move(c);
        terms = std::move(nt);
    }

    /// Minimal x-exponent for each y-degree present.
    std::map<unsigned, Rational> support_floor() const {
        std::map<unsigned, Rational> m;
        for (const auto& [k, c] : terms) {
            auto it = m.find(k.second);
            if (it == m.end() || k.first < it->second) m[k.second] = k.first;
        }
        return m;
    }

    /// F(x, x^mu * (c0 + y)), renormalized by the edge height x^h.
    FracPoly substitute(const Rational& mu, const Cyclo& c0) const {
        FracPoly r;
        // binomial expansion per term
        for (const auto& [k, coeff] : terms) {
            const Rational xe = k.first + mu * Rational(static_cast<long>(k.second));
            unsigned j = k.second;
            // coeff * (c0 + y)^j
            Cyclo binom = Cyclo::from_int(1);
            // term i: C(j, i) c0^{j-i} y^i
            std::vector<Cyclo> pows(j + 1);
            pows[0] = Cyclo::from_int(1);
            for (unsigned i = 1; i <= j; ++i) pows[i] = pows[i - 1] * c0;
            mpz_class cji = 1;
            for (unsigned i = 0; i <= j; ++i) {
                if (i > 0) {
                    cji *= (j - i + 1);
                    cji /= i;
                }
                Cyclo t = coeff * pows[j - i] * Cyclo::from_rational(Rational(cji));
                if (t.is_zero()) continue;
                auto key = std::make_pair(xe, i);
                auto it = r.terms.find(key);
                if (it == r.terms.end())
                    r.terms[key] = t;
                else {
                    it->second = it->second + t;
                    if (it->second.is_zero()) r.terms.erase(it);
                }
            }
            (void)binom;
        }
        // renormalize: subtract the minimal exponent
        if (!r.terms.empty()) {
            Rational h = r.terms.begin()->first.first;
            for (const auto& [k, c] : r.terms) h = min(h, k.first);
            if (!h.is_zero()) {
                std::map<std::pair<Rational, unsigned>, Cyclo> nt;
                for (auto& [k, c] : r.terms) nt[{k.first - h, k.second}] = std::move(c);
                r.terms = std::move(nt);
            }
        }
        return r;
    }
};

struct NPEdge {
    Rational mu;      // branch exponent (positive)
    CPoly phi;        // edge polynomial in c, phi(0) != 0
};

/// Edges of the Newton polygon with positive branch exponent.
inline std::vector<NPEdge> polygon_edges(const FracPoly& F) {
    auto floor_map = F.support_floor();
    std::vector<std::pair<unsigned, Rational>> pts(floor_map.begin(), floor_map.end());
    // Lower convex hull in (j, e), j ascending.
    std::vector<std::pair<unsigned, Rational>> hull;
    for (const auto& p : pts) {
        while (hull.size() >= 2) {
            const auto& a = hull[hull.size() - 2];
            const auto& b = hull[hull.size() - 1];
            // remove b if it is above segment a-p: cross product test
            Rational lhs = (b.second - a.second) * Rational(static_cast<long>(p.first - a.first));
            Rational rhs = (p.second - a.second) * Rational(static_cast<long>(b.first - a.first));
            if (lhs >= rhs)
                hull.pop_back();
            else
                break;
        }
        hull.push_back(p);
    }
    std::vector<NPEdge> edges;
    for (std::size_t i = 0; i + 1 < hull.size(); ++i) {
        const auto& a = hull[i];
        const auto& b = hull[i + 1];
        if (!(a.second > b.second)) continue;  // needs e strictly decreasing: mu > 0
        Rational mu = (a.second - b.second) / Rational(static_cast<long>(b.first - a.first));
        CPoly phi(b.first - a.first + 1);
        for (const auto& [k, c] : F.terms) {
            if (k.second < a.first || k.second > b.first) continue;
            // on the segment: e == a.e - mu*(j - a.j)
            Rational expected = a.second - mu * Rational(static_cast<long>(k.second - a.first));
            if (k.first == expected) phi[k.second - a.first] = c;
        }
        cp_trim(phi);
        edges.push_back({mu, std::move(phi)});
    }
    return edges;
}

}  // namespace detail

/// Options and results of the branch expansion.
struct NewtonPuiseuxResult {
    std::vector<PuiseuxBranch> branches;
};

namespace detail {

struct SheetAccum {
    std::vector<std::pair<Rational, Cyclo>> terms;
    std::optional<Rational> trunc;  // nullopt: exact (tail identically zero)
};

inline void np_explore(FracPoly F, Rational base, std::vector<std::pair<Rational, Cyclo>> prefix,
                       const Rational& T, std::vector<SheetAccum>& out, int depth) {
    if (depth > 512) throw std::logic_error("newton_puiseux: runaway recursion");
    for (;;) {
        if (F.empty()) return;
        unsigned jmin = F.min_ydeg();
        if (jmin > 0) {
            // y^jmin divides: the current prefix is an exact solution.
            out.push_back({prefix, std::nullopt});
            F.shift_ydeg_down(jmin);
            if (F.max_ydeg() == 0) return;
            // remaining solutions of the cofactor continue below
        }
        if (F.max_ydeg() == 0) return;
        auto edges = polygon_edges(F);
        if (edges.empty()) return;
        // Single simple-root fast path keeps the loop flat.
        if (edges.size() == 1 && cp_deg(edges[0].phi) == 1) {
            const auto& e = edges[0];
            Cyclo c0 = -(e.phi[0] * e.phi[1].inverse());
            Rational eterm = base + e.mu;
            if (!(eterm < T)) {
                out.push_back({prefix, eterm});
                return;
            }
            F = F.substitute(e.mu, c0);
            prefix.emplace_back(eterm, c0);
            base = eterm;
            continue;
        }
        for (const auto& e : edges) {
            std::vector<std::pair<Cyclo, unsigned>> roots;
            if (cp_deg(e.phi) == 1) {
                roots.emplace_back(-(e.phi[0] * e.phi[1].inverse()), 1u);
            } else {
                roots = cyclotomic_roots(e.phi);
            }
            Rational eterm = base + e.mu;
            for (const auto& [c0, mult] : roots) {
                if (mult == 1 && !(eterm < T)) {
                    out.push_back({prefix, eterm});
                    continue;
                }
                auto pre = prefix;
                pre.emplace_back(eterm, c0);
                np_explore(F.substitute(e.mu, c0), eterm, std::move(pre), T, out, depth + 1);
            }
        }
        return;
    }
}

/// Conjugate sheet k of a term list whose exponent denominators divide N.
inline std::vector<std::pair<Rational, Cyclo>> twiddle(
    const std::vector<std::pair<Rational, Cyclo>>& terms, unsigned long N, unsigned long k) {
    std::vector<std::pair<Rational, Cyclo>> r;
    r.reserve(terms.size());
    for (const auto& [e, c] : terms) {
        long a = (e * Rational(static_cast<long>(N))).as_long();
        r.emplace_back(e, c * Cyclo::root_of_unity(N, static_cast<long>(k) * a));
    }
    return r;
}

inline bool terms_equal(const std::vector<std::pair<Rational, Cyclo>>& a,
                        const std::vector<std::pair<Rational, Cyclo>>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i)
        if (a[i].first != b[i].first || !(a[i].second == b[i].second)) return false;
    return true;
}

}  // namespace detail

/// One representative branch per analytic branch (Galois orbit over the
/// Puiseux field) of f(x, y) = 0, each truncated at order >= T.
/// Components along x = 0 are dropped; f must be squarefree.
inline std::vector<PuiseuxBranch> newton_puiseux(const BiPoly& f_in, const Rational& T) {
    if (f_in.is_zero()) throw std::domain_error("newton_puiseux: zero polynomial");
    if (!is_squarefree(f_in)) throw NotSquarefree();
    std::vector<PuiseuxBranch> branches;
    BiPoly f = f_in;
    unsigned ym = f.y_factor_multiplicity();
    if (ym > 0) {
        PuiseuxBranch b;
        b.ram = 1;
        b.series = PSeries::zero();  // exact: the branch y = 0
        branches.push_back(std::move(b));
        f = f.divided_by_y(ym);
    }
    unsigned xm = f.x_factor_multiplicity();
    if (xm > 0) f = f.divided_by_x(xm);
    if (f.deg_y() == 0) return branches;

    std::vector<detail::SheetAccum> sheets;
    detail::np_explore(detail::FracPoly::from_bipoly(f), Rational(0), {}, T, sheets, 0);

    // Group the sheets into analytic branches via zeta_N conjugation.
    std::vector<bool> used(sheets.size(), false);
    for (std::size_t i = 0; i < sheets.size(); ++i) {
        if (used[i]) continue;
        mpz_class nz = 1;
        for (const auto& [e, c] : sheets[i].terms)
            mpz_lcm(nz.get_mpz_t(), nz.get_mpz_t(), e.den().get_mpz_t());
        unsigned long N = nz.get_ui();
        std::vector<std::size_t> group{i};
        std::optional<Rational> trunc = sheets[i].trunc;
        for (unsigned long k = 1; k < N; ++k) {
            auto tw = detail::twiddle(sheets[i].terms, N, k);
            for (std::size_t j = 0; j < sheets.size(); ++j) {
                if (used[j] || j == i) continue;
                if (detail::terms_equal(tw, sheets[j].terms)) {
                    group.push_back(j);
                    trunc = trunc_min(trunc, sheets[j].trunc);
                    used[j] = true;
                    break;
                }
            }
        }
        used[i] = true;
        // Canonical representative: smallest twiddle of sheet i.
        std::vector<std::pair<Rational, Cyclo>> best = sheets[i].terms;
        for (unsigned long k = 1; k < N; ++k) {
            auto tw = detail::twiddle(sheets[i].terms, N, k);
            bool smaller = false;
            for (std::size_t t = 0; t < tw.size(); ++t) {
                auto c = tw[t].second <=> best[t].second;
                if (c == std::strong_ordering::less) { smaller = true; break; }
                if (c == std::strong_ordering::greater) break;
            }
            if (smaller) best = std::move(tw);
        }
        PSeries s;
        for (auto& [e, c] : best) s.terms.emplace_back(e, c.reduced());
        s.trunc = trunc;
        s.normalize();
        branches.push_back(PuiseuxBranch::from_series(std::move(s)));
    }

    std::sort(branches.begin(), branches.end(), [](const PuiseuxBranch& a, const PuiseuxBranch& b) {
        if (a.series.terms.empty() != b.series.terms.empty())
            return a.series.terms.empty();
        if (a.series.terms.empty()) return false;
        if (a.series.terms.front().first != b.series.terms.front().first)
            return a.series.terms.front().first < b.series.terms.front().first;
        if (a.ram != b.ram) return a.ram < b.ram;
        return (a.series.terms.front().second <=> b.series.terms.front().second) ==
               std::strong_ordering::less;
    });
    return branches;
}

/// Invertible linear change making every branch transverse to the y-axis
/// (lowest homogeneous form has a full y-power) while keeping the branch
/// coefficients inside the cyclotomic class. Tries the identity, then a
/// fixed ladder of simple shears, then seeded random ones; a candidate is
/// accepted only if a trial expansion succeeds, since a shear of a ramified
/// branch can drag in radicals of the shear parameter. Deterministic in seed.
inline BiPoly genericize(const BiPoly& f, std::uint64_t seed) {
    if (f.is_zero()) throw std::domain_error("genericize: zero polynomial");
    std::vector<std::pair<Rational, Rational>> cand = {
        {Rational(0), Rational(0)}, {Rational(1), Rational(0)},  {Rational(-1), Rational(0)},
        {Rational(0), Rational(1)}, {Rational(0), Rational(-1)}, {Rational(1), Rational(-1)},
        {Rational(-1), Rational(1)}, {Rational(4), Rational(0)}, {Rational(1, 4), Rational(0)},
        {Rational(-4), Rational(0)}, {Rational(1), Rational(1, 2)}};
    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<int> num(1, 3);
    std::uniform_int_distribution<int> den(1, 2);
    std::uniform_int_distribution<int> sign(0, 1);
    for (int i = 0; i < 48; ++i) {
        // Perfect powers keep root extraction of the shear parameter rational.
        Rational r(num(rng), den(rng));
        Rational a = r * r * r * r * r * r * Rational(sign(rng) ? 1 : -1);
        Rational r2(num(rng), den(rng));
        Rational b = r2 * r2 * r2 * r2 * r2 * r2 * Rational(sign(rng) ? 1 : -1);
        cand.emplace_back(a, b);
    }
    for (const auto& [a, b] : cand) {
        if ((Rational(1) - a * b).is_zero()) continue;
        BiPoly g = (a.is_zero() && b.is_zero()) ? f : f.linear_change(a, b);
        unsigned m = g.multiplicity();
        if (g.coeff(0, m).is_zero()) continue;
        try {
            newton_puiseux(g, Rational(1));  // any order fully resolves the splitting
        } catch (const FieldExtensionRequired&) {
            continue;
        }
        return g;
    }
    throw GenericityFailed();
}

}  // namespace carrousel
