#pragma once

#include "carrousel/newton_puiseux.hpp"
#include "carrousel/polynomial.hpp"
#include "carrousel/puiseux.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <stdexcept>
#include <vector>

namespace carrousel {

struct PreconditionViolated : std::domain_error {
    explicit PreconditionViolated(const std::string& what) : std::domain_error(what) {}
};

struct UnstableLeadingTerm : std::runtime_error {
    UnstableLeadingTerm()
        : std::runtime_error("leading exponent depends on the probe order; r' too small") {}
};

struct CancellationDetected : std::runtime_error {
    CancellationDetected()
        : std::runtime_error("perturbation coefficient hit a cancellation; rates disagree") {}
};

struct ArcInsideDiscriminant : std::runtime_error {
    ArcInsideDiscriminant() : std::runtime_error("arc lies inside the discriminant curve") {}
};

/// Double-cover surface germ z^2 = f(x, y) with f exact and squarefree.
struct SurfacePresentation {
    BiPoly f;
    std::optional<unsigned> multiplicity_hint;

    static SurfacePresentation make(BiPoly poly) {
        if (poly.is_zero()) throw std::domain_error("surface: zero polynomial");
        if (!is_squarefree(poly)) throw NotSquarefree();
        SurfacePresentation s;
        s.f = std::move(poly);
        return s;
    }
};

/// Branches of the discriminant curve f = 0 of the projection (x, y).
inline std::vector<PuiseuxBranch> discriminant_branches(const SurfacePresentation& X,
                                                        const Rational& T) {
    return newton_puiseux(X.f, T);
}

struct PolarRateReport {
    std::size_t branch = 0;
    unsigned long m = 1;          // ramification of the parametrized branch
    mpz_class b_prime = 0;        // leading gap: z^2 ~ a w^(r' + b')
    Rational s{1};                // polar rate b'/m
    mpz_class r_prime_used = 0;
    bool stable = false;
    bool swapped = false;         // used the x(y) convention
};

namespace detail {

/// Leading exponent of f(x(w) [+ w^r' on the dependent side], y(w)).
inline Rational spread_leading_exponent(const BiPoly& f, const PSeries& base,
                                        const PSeries& dep, bool swapped,
                                        const mpz_class& rp, const Rational& lambda) {
    PSeries pert = dep;
    pert.terms.emplace_back(Rational(rp), Cyclo::from_rational(lambda));
    pert.normalize();
    PSeries out = swapped ? poly_eval_on_branch(f, pert, base)
                          : poly_eval_on_branch(f, base, pert);
    if (out.is_zero()) throw CancellationDetected();
    return out.terms.front().first;
}

}  // namespace detail

/// Polar rate of the polar piece over one discriminant branch, by the
/// perturbed-parametrization substitution: parametrize the branch, add
/// lambda*w^r' to the dependent coordinate, read the leading exponent
/// r' + b' of f along the arc, and return s = b'/m. Branches tangent to the
/// y-axis are re-extracted from f(y, x) automatically.
inline PolarRateReport polar_rate(const SurfacePresentation& X, const PuiseuxBranch& branch,
                                  std::optional<mpz_class> r_prime = std::nullopt,
                                  std::uint64_t seed = 1) {
    PolarRateReport rep;
    PuiseuxBranch param = branch;
    bool swapped = false;
    if (!branch.series.terms.empty() && branch.series.terms.front().first < Rational(1)) {
        // x(y) convention: match the branch among the transposed expansions.
        swapped = true;
        const Rational p1 = branch.series.terms.front().first;
        Rational target = Rational(1) / p1;
        Rational T = Rational(1);
        for (const auto& [e, c] : branch.series.terms) T = max(T, e);
        T = T * target + Rational(2);
        auto cands = newton_puiseux(X.f.transposed(), T);
        bool found = false;
        for (const auto& cand : cands) {
            if (cand.series.terms.empty()) continue;
            if (cand.series.terms.front().first != target) continue;
            // verify: (x, y) = (cand(w), w^N) lies on f = 0
            PSeries yw = PSeries::monomial(Rational(static_cast<long>(cand.ram)),
                                           Cyclo::from_int(1));
            PSeries xw = series_inflate(cand.series, Rational(static_cast<long>(cand.ram)));
            PSeries chk = poly_eval_on_branch(X.f, xw, yw);
            if (!chk.is_zero()) continue;
            param = cand;
            found = true;
            break;
        }
        if (!found)
            throw std::domain_error("no transposed expansion matches the y-axis-tangent branch");
    }

    unsigned long N = param.ram;
    rep.m = N;
    rep.swapped = swapped;

    // base = w^N on the independent side, dep = the branch series in w.
    PSeries base = PSeries::monomial(Rational(static_cast<long>(N)), Cyclo::from_int(1));
    PSeries dep = series_inflate(param.series, Rational(static_cast<long>(N)));

    mpz_class rp;
    if (r_prime) {
        rp = *r_prime;
    } else {
        Rational top{1};
        for (const auto& [e, c] : param.series.terms) top = max(top, e);
        Rational bound = Rational(static_cast<long>(N)) * top +
                         Rational(static_cast<long>(N)) *
                             Rational(static_cast<long>(X.f.deg_x() + X.f.deg_y()));
        rp = bound.floor() + 2;
    }

    std::mt19937_64 rng(seed);
    std::uniform_int_distribution<long> pick(2, 97);
    Rational lambda2(pick(rng), 1);

    auto gap = [&](const mpz_class& r, const Rational& lam) {
        Rational e = detail::spread_leading_exponent(X.f, base, dep, swapped, r, lam);
        return e - Rational(r);
    };
    Rational b1 = gap(rp, Rational(1));
    Rational b1b = gap(rp + 1, Rational(1));
    if (!(b1 == b1b)) throw UnstableLeadingTerm();
    Rational b2 = gap(rp, lambda2);
    if (!(b1 == b2)) throw CancellationDetected();

    if (!b1.is_integer()) throw std::logic_error("polar_rate: non-integral exponent gap");
    rep.b_prime = b1.as_integer();
    rep.s = b1 / Rational(static_cast<long>(N));
    rep.r_prime_used = rp;
    rep.stable = true;
    return rep;
}

/// Polar rates for every discriminant component, including an x = 0
/// component (invisible to y(x) expansions), which is handled through the
/// transposed surface.
inline std::vector<PolarRateReport> all_polar_rates(const SurfacePresentation& X,
                                                    const Rational& T,
                                                    std::uint64_t seed = 1) {
    std::vector<PolarRateReport> out;
    auto branches = discriminant_branches(X, T);
    for (std::size_t i = 0; i < branches.size(); ++i) {
        PolarRateReport rep = polar_rate(X, branches[i], std::nullopt, seed);
        rep.branch = i;
        out.push_back(std::move(rep));
    }
    if (X.f.x_factor_multiplicity() > 0) {
        SurfacePresentation Xt;
        Xt.f = X.f.transposed();
        PuiseuxBranch axis;  // the x = 0 component, as y = 0 of f(y, x)
        PolarRateReport rep = polar_rate(Xt, axis, std::nullopt, seed);
        rep.branch = branches.size();
        rep.swapped = true;
        out.push_back(std::move(rep));
    }
    return out;
}

/// Contact-to-rate relation q(r) = (s + r)/2, valid for r >= s.
inline Rational q_of_r(const Rational& s, const Rational& r) {
    if (r < s) throw PreconditionViolated("q_of_r requires r >= s");
    if (s < Rational(1)) throw PreconditionViolated("q_of_r requires s >= 1");
    return (s + r) / Rational(2);
}

/// Inverts the relation at a probe r0 with q(r0) <= r0: s = 2 q(r0) - r0.
/// (The relation q(r0) = (r0 + s)/2 forces the minus sign.)
inline Rational polar_rate_from_probe(const Rational& r0, const Rational& q_r0) {
    if (r0 < q_r0) throw PreconditionViolated("polar_rate_from_probe requires q(r0) <= r0");
    return Rational(2) * q_r0 - r0;
}

/// Milnor number of the spreading z^2 = f(x(w), y(w)) via the restriction
/// formula: ord_w(f o arc) - mult + 1 with mult = 2 for a double cover.
inline mpz_class milnor_spreading(const SurfacePresentation& X, const PSeries& x_of_w,
                                  const PSeries& y_of_w) {
    PSeries out = poly_eval_on_branch(X.f, x_of_w, y_of_w);
    if (out.is_zero()) throw ArcInsideDiscriminant();
    Rational ord = out.terms.front().first;
    if (!ord.is_integer()) throw PreconditionViolated("arc exponents must be integral in w");
    return ord.as_integer() - 2 + 1;
}

/// Hurwitz count for a general cover of a disk: branch points = n - chi.
inline long hurwitz_branch_points(long n, long chi) { return n - chi; }

/// Nested variant: m(1 - s) - chi + sum_j (m - m_j) for s inner boundary
/// circles covered with degrees m_j.
inline long hurwitz_branch_points_nested(long m, long s, long chi, const std::vector<long>& m_js) {
    if (static_cast<long>(m_js.size()) != s)
        throw PreconditionViolated("need exactly s cover degrees");
    long acc = m * (1 - s) - chi;
    for (long mj : m_js) {
        if (mj > m || mj < 1) throw PreconditionViolated("cover degrees must satisfy 1 <= m_j <= m");
        acc += m - mj;
    }
    return acc;
}

}  // namespace carrousel
