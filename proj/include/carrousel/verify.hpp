#pragma once

#include "carrousel/carrousel_tree.hpp"
#include "carrousel/fixtures.hpp"
#include "carrousel/newton_puiseux.hpp"
#include "carrousel/resolution.hpp"
#include "carrousel/surface.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

namespace carrousel::verify {

/// Random truncated-branch families for the reconstruction oracle:
/// at most `max_branches` branches, exponents <= 4, denominators <= 6,
/// generic position (leading exponents >= 1), pairwise distinct.
inline std::vector<PuiseuxBranch> random_branch_family(std::mt19937_64& rng,
                                                       std::size_t max_branches) {
    std::uniform_int_distribution<int> nb(1, static_cast<int>(max_branches));
    std::uniform_int_distribution<int> nterms(1, 3);
    std::uniform_int_distribution<int> den(1, 6);
    std::uniform_int_distribution<int> coeff(1, 3);
    std::uniform_int_distribution<int> zorder(0, 3);
    const unsigned long zords[] = {1, 2, 3, 4};
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<PuiseuxBranch> out;
        int n = nb(rng);
        for (int b = 0; b < n; ++b) {
            PSeries s;
            Rational e(1);
            int k = nterms(rng);
            for (int t = 0; t < k; ++t) {
                long d = den(rng);
                // strictly increasing exponents on the 1/d grid, <= 4
                mpz_class lo = (e * Rational(d)).floor() + 1;
                if (Rational(lo, d) > Rational(4)) break;
                std::uniform_int_distribution<long> num(static_cast<long>(lo.get_si()), 4 * d);
                e = Rational(num(rng), d);
                unsigned long zo = zords[static_cast<std::size_t>(zorder(rng))];
                std::uniform_int_distribution<long> zk(0, static_cast<long>(zo) - 1);
                Cyclo c = Cyclo::from_int(coeff(rng)) *
                          Cyclo::root_of_unity(zo, zo > 1 ? zk(rng) : 0);
                s.terms.emplace_back(e, c);
            }
            if (s.terms.empty()) s.terms.emplace_back(Rational(1), Cyclo::from_int(coeff(rng)));
            s.normalize();
            out.push_back(PuiseuxBranch::from_series(std::move(s)));
        }
        try {
            contact_matrix(out);  // rejects coincident sheets loudly
            return out;
        } catch (const IndistinguishableAtTruncation&) {
            continue;
        }
    }
    throw std::logic_error("random_branch_family: generation kept colliding");
}

/// Monic-in-y squarefree polynomial assembled as the product of (y - sheet)
/// over all conjugate sheets of a random exact branch family. Independent of
/// the Newton-polygon code path it is used to test.
inline BiPoly random_solvable_poly(std::mt19937_64& rng, unsigned max_deg_y) {
    for (int attempt = 0; attempt < 64; ++attempt) {
        std::vector<PuiseuxBranch> family;
        unsigned total = 0;
        std::uniform_int_distribution<int> more(0, 1);
        std::mt19937_64 sub(rng());
        while (total < max_deg_y) {
            auto fam = random_branch_family(sub, 1);
            if (fam[0].ram + total > max_deg_y) break;
            total += static_cast<unsigned>(fam[0].ram);
            family.push_back(fam[0]);
            if (total >= 2 && more(sub)) break;
        }
        if (family.empty()) continue;
        try {
            contact_matrix(family);
        } catch (const IndistinguishableAtTruncation&) {
            continue;
        }
        // product of (y - sheet(x)) over every sheet, as poly in y with
        // Puiseux-series coefficients
        std::vector<PSeries> coeffs{PSeries::monomial(Rational(0), Cyclo::from_int(1))};
        for (const auto& b : family) {
            for (const auto& sheet : conjugates(b)) {
                std::vector<PSeries> next(coeffs.size() + 1);
                for (std::size_t i = 0; i < coeffs.size(); ++i) {
                    next[i + 1] = series_add(next[i + 1], coeffs[i]);
                    next[i] = series_sub(next[i], series_mul(coeffs[i], sheet));
                }
                coeffs = std::move(next);
            }
        }
        BiPoly f;
        bool ok = true;
        for (std::size_t j = 0; j < coeffs.size() && ok; ++j) {
            for (const auto& [e, c] : coeffs[j].terms) {
                if (!e.is_integer() || e.sign() < 0) { ok = false; break; }
                f.add_term(static_cast<unsigned>(e.as_long()), static_cast<unsigned>(j), c);
            }
        }
        if (!ok || f.is_zero()) continue;
        return f;
    }
    throw std::logic_error("random_solvable_poly: generation failed");
}

/// Newton-polygon Milnor number of a convenient nondegenerate suspension
/// z^2 - g(w): Kouchnirenko's 2A - a - b + 1 on the diagram of z^2 and the
/// leading w-term. Test-only oracle, independent of milnor_spreading.
inline mpz_class kouchnirenko_suspension_mu(const PSeries& g) {
    if (g.is_zero() || !g.terms.front().first.is_integer())
        throw std::domain_error("suspension oracle needs a nonzero integral-order series");
    mpz_class a = g.terms.front().first.as_integer();  // w-intercept
    mpz_class b = 2;                                   // z-intercept
    // 2 * area(triangle) - a - b + 1
    return a * b - a - b + 1;
}

struct Criterion {
    int id;
    std::string name;
    std::function<bool(std::ostringstream&, std::uint64_t)> run;
};

inline std::vector<Criterion> criteria();

struct VerifyResult {
    bool pass = true;
    std::string report;
};

inline VerifyResult run_criteria(const std::vector<Criterion>& cs, std::uint64_t seed) {
    VerifyResult res;
    std::ostringstream out;
    for (const auto& c : cs) {
        std::ostringstream detail;
        bool ok = false;
        std::string err;
        try {
            ok = c.run(detail, seed);
        } catch (const std::exception& e) {
            err = e.what();
        }
        out << (ok ? "[PASS] " : "[FAIL] ") << "criterion " << c.id << ": " << c.name;
        if (!detail.str().empty()) out << " (" << detail.str() << ")";
        if (!err.empty()) out << " [error: " << err << "]";
        out << "\n";
        res.pass = res.pass && ok;
    }
    res.report = out.str();
    return res;
}

inline VerifyResult run_verification(std::uint64_t seed) {
    VerifyResult res = run_criteria(criteria(), seed);
    res.report += res.pass ? "all criteria passed\n" : "FAILURES present\n";
    return res;
}

namespace detail_v {

inline CNode expected_fig1_skeleton() {
    CNode root = CNode::cone();
    root.contains_curve = true;
    CNode b43 = CNode::b(Rational(4, 3));
    b43.contains_curve = true;
    for (int i = 0; i < 3; ++i) {
        CNode b = CNode::b(Rational(13, 6));
        b.contains_curve = true;
        for (int j = 0; j < 2; ++j) {
            CNode d = CNode::d(Rational(13, 6));
            d.contains_curve = true;
            b.children.push_back(std::move(d));
        }
        b43.children.push_back(std::move(b));
    }
    CNode b74 = CNode::b(Rational(7, 4));
    b74.contains_curve = true;
    for (int j = 0; j < 4; ++j) {
        CNode d = CNode::d(Rational(7, 4));
        d.contains_curve = true;
        b74.children.push_back(std::move(d));
    }
    b43.children.push_back(std::move(b74));
    root.children.push_back(std::move(b43));
    return root;
}

inline CNode expected_d5_amalgamated_complete() {
    CNode root = CNode::cone();
    root.contains_curve = true;
    {
        CNode a = CNode::a(Rational(1), Rational(2));
        CNode d = CNode::d(Rational(2));
        d.contains_curve = true;
        d.is_delta = true;
        a.children.push_back(std::move(d));
        root.children.push_back(std::move(a));
    }
    {
        CNode a = CNode::a(Rational(1), Rational(3, 2));
        CNode b = CNode::b(Rational(3, 2));
        b.contains_curve = true;
        for (int i = 0; i < 2; ++i) {
            CNode aa = CNode::a(Rational(3, 2), Rational(5, 2));
            CNode d = CNode::d(Rational(5, 2));
            d.contains_curve = true;
            d.is_delta = true;
            aa.children.push_back(std::move(d));
            b.children.push_back(std::move(aa));
        }
        a.children.push_back(std::move(b));
        root.children.push_back(std::move(a));
    }
    return root;
}

inline CNode expected_fig3_complete() {
    CNode root = CNode::cone();
    root.contains_curve = true;
    for (int i = 0; i < 6; ++i) {
        CNode d = CNode::d(Rational(1));
        d.contains_curve = true;
        d.is_delta = true;
        root.children.push_back(std::move(d));
    }
    for (int i = 0; i < 5; ++i) {
        CNode b = CNode::b(Rational(3, 2));
        b.contains_curve = true;
        for (int j = 0; j < 2; ++j) {
            CNode d = CNode::d(Rational(3, 2));
            d.contains_curve = true;
            d.is_delta = true;
            b.children.push_back(std::move(d));
        }
        root.children.push_back(std::move(b));
    }
    CNode b65 = CNode::b(Rational(6, 5));
    b65.contains_curve = true;
    for (int i = 0; i < 10; ++i) {
        CNode d = CNode::d(Rational(7, 5));
        d.contains_curve = true;
        d.is_delta = true;
        b65.children.push_back(std::move(d));
    }
    CNode b54 = CNode::b(Rational(5, 4));
    b54.contains_curve = true;
    for (int j = 0; j < 4; ++j) {
        CNode d = CNode::d(Rational(5, 4));
        d.contains_curve = true;
        d.is_delta = true;
        b54.children.push_back(std::move(d));
    }
    b65.children.push_back(std::move(b54));
    root.children.push_back(std::move(b65));
    return root;
}

inline std::vector<PuiseuxBranch> genericized_d5_branches(std::uint64_t seed) {
    BiPoly fg = genericize(fixtures::d5_poly(), seed);
    return newton_puiseux(fg, Rational(4));
}

inline std::vector<Rational> d5_rates_by_ramification(const std::vector<PuiseuxBranch>& bs) {
    std::vector<Rational> rates;
    for (const auto& b : bs) rates.push_back(b.ram == 1 ? Rational(2) : Rational(5, 2));
    return rates;
}

}  // namespace detail_v

inline std::vector<Criterion> criteria() {
    using std::ostringstream;
    std::vector<Criterion> cs;

    cs.push_back({1, "D5 polar rates are exactly 2 and 5/2", [](ostringstream& os, std::uint64_t seed) {
        auto X = SurfacePresentation::make(fixtures::d5_poly());
        auto reps = all_polar_rates(X, Rational(4), seed);
        if (reps.size() != 2) return false;
        std::vector<Rational> got{reps[0].s, reps[1].s};
        std::sort(got.begin(), got.end());
        os << "s = " << got[0].str() << ", " << got[1].str();
        return got[0] == Rational(2) && got[1] == Rational(5, 2);
    }});

    cs.push_back({2, "D5 maximal ideal cycle (1,2,2,1,1), multiplicity 2", [](ostringstream& os, std::uint64_t) {
        auto g = fixtures::d5_minimal_graph();
        validate_graph(g);
        auto [cycle, mult] = multiplicity(g, {{2, 1}});
        std::vector<long> want{1, 2, 2, 1, 1};
        for (std::size_t i = 0; i < 5; ++i)
            if (cycle[i] != want[i]) return false;
        os << "mult = " << mult.get_str();
        return mult == 2;
    }});

    cs.push_back({3, "D5 divisors of x,y,z,f_x,f_y,f_z round-trip", [](ostringstream& os, std::uint64_t) {
        auto g = fixtures::d5_minimal_graph();
        auto M = intersection_matrix(g);
        int done = 0;
        for (const auto& [name, mv] : fixtures::d5_divisor_cycles()) {
            std::map<std::size_t, unsigned> a;
            for (std::size_t l = 0; l < g.size(); ++l) {
                mpz_class s = 0;
                for (std::size_t k = 0; k < g.size(); ++k) s += M[l][k] * mv[k];
                if (s > 0) return false;  // arrow vector must be nonnegative
                if (s < 0) {
                    mpz_class neg = -s;
                    a[l] = static_cast<unsigned>(neg.get_ui());
                }
            }
            Cycle sol = solve_total_transform(g, a);
            for (std::size_t i = 0; i < g.size(); ++i)
                if (sol[i] != mv[i]) return false;
            ++done;
        }
        os << done << " divisors";
        return done == 7;
    }});

    cs.push_back({4, "Figure 1 combinatorics of the two-branch example", [](ostringstream&, std::uint64_t) {
        auto tree = plain_carrousel(fixtures::example32_branches());
        if (!tree_invariants_hold(tree)) return false;
        return tree_isomorphic(section_skeleton(tree), detail_v::expected_fig1_skeleton());
    }});

    cs.push_back({5, "contact-matrix reconstruction matches the plain carrousel", [](ostringstream& os, std::uint64_t seed) {
        auto check = [](const std::vector<PuiseuxBranch>& bs) {
            auto M = contact_matrix(bs);
            if (!is_ultrametric(M)) return false;
            CNode rec = reconstruct_from_contacts(M);
            CNode skel = section_skeleton(plain_carrousel(bs));
            return tree_isomorphic(rec, skel);
        };
        if (!check(fixtures::example32_branches())) return false;
        if (!check(detail_v::genericized_d5_branches(seed))) return false;
        std::mt19937_64 rng(seed * 7919 + 1);
        for (int i = 0; i < 200; ++i)
            if (!check(random_branch_family(rng, 4))) {
                os << "failed at family " << i;
                return false;
            }
        os << "202 cases";
        return true;
    }});

    cs.push_back({6, "ultrametric property of every generated contact matrix", [](ostringstream& os, std::uint64_t seed) {
        std::mt19937_64 rng(seed * 7919 + 1);
        for (int i = 0; i < 200; ++i) {
            auto M = contact_matrix(random_branch_family(rng, 4));
            if (!is_ultrametric(M)) return false;
        }
        auto M1 = contact_matrix(fixtures::example32_branches());
        auto M2 = contact_matrix(detail_v::genericized_d5_branches(seed));
        os << "202 matrices";
        return is_ultrametric(M1) && is_ultrametric(M2);
    }});

    cs.push_back({7, "Figure 2: D5 intermediate = complete, delta-wedges 5/2 x2 and 2 x1", [](ostringstream&, std::uint64_t seed) {
        auto bs = detail_v::genericized_d5_branches(seed);
        auto rates = detail_v::d5_rates_by_ramification(bs);
        auto inter = intermediate_carrousel(bs, rates);
        auto comp = complete_carrousel(bs, rates);
        if (!tree_isomorphic(inter, comp)) return false;
        if (!tree_isomorphic(comp, detail_v::expected_d5_amalgamated_complete())) return false;
        return refines(comp, plain_carrousel(bs)) && refines(comp, inter);
    }});

    cs.push_back({8, "Figure 3: complete carrousel of the 14-branch fixture", [](ostringstream& os, std::uint64_t) {
        auto [bs, rates] = fixtures::example63_branches();
        auto comp = complete_carrousel(bs, rates);
        if (!tree_isomorphic(comp, detail_v::expected_fig3_complete())) return false;
        // named counts: five B(3/2) x2 wedges, one B(5/4) x4 wedges, two
        // groups of five D(7/5) under the 6/5 disk, six D(1) under the root
        auto skel = section_skeleton(comp);
        int b32 = 0, d1 = 0;
        const CNode* b65 = nullptr;
        for (const auto& c : skel.children) {
            if (c.kind == PieceKind::B && c.rate == Rational(3, 2) && c.children.size() == 2) ++b32;
            if (c.kind == PieceKind::D && c.rate == Rational(1) && c.is_delta) ++d1;
            if (c.kind == PieceKind::B && c.rate == Rational(6, 5)) b65 = &c;
        }
        if (b32 != 5 || d1 != 6 || !b65) return false;
        std::map<std::size_t, int> wedges75_by_branch;
        int b54 = 0;
        for (const auto& c : b65->children) {
            if (c.kind == PieceKind::D && c.rate == Rational(7, 5))
                ++wedges75_by_branch[c.sheets.begin()->first];
            if (c.kind == PieceKind::B && c.rate == Rational(5, 4) && c.children.size() == 4) ++b54;
        }
        std::set<std::size_t> b65_branches;
        for (const auto& s : b65->sheets) b65_branches.insert(s.first);
        os << "7/5 groups: " << wedges75_by_branch.size() << ", 6/5 substructures: "
           << b65_branches.size();
        if (wedges75_by_branch.size() != 2) return false;
        for (const auto& [b, k] : wedges75_by_branch)
            if (k != 5) return false;
        return b54 == 1 && b65_branches.size() == 3;
    }});

    cs.push_back({9, "Hurwitz counts: beta = n - chi and the nested formula", [](ostringstream&, std::uint64_t seed) {
        if (hurwitz_branch_points(2, 1) != 1) return false;
        if (hurwitz_branch_points(1, 1) != 0) return false;
        if (hurwitz_branch_points(3, -1) != 4) return false;
        std::mt19937_64 rng(seed + 9);
        std::uniform_int_distribution<long> mm(1, 30), cc(-10, 10);
        for (int i = 0; i < 100; ++i) {
            long m = mm(rng), chi = cc(rng);
            if (hurwitz_branch_points_nested(m, 0, chi, {}) != hurwitz_branch_points(m, chi))
                return false;
        }
        return true;
    }});

    cs.push_back({10, "Newton-Puiseux back-substitution on 100 random polynomials", [](ostringstream& os, std::uint64_t seed) {
        std::mt19937_64 rng(seed + 10);
        const Rational T(5);
        for (int i = 0; i < 100; ++i) {
            BiPoly f = random_solvable_poly(rng, 5);
            if (!is_squarefree(f)) return false;
            auto bs = newton_puiseux(f, T);
            unsigned long total = 0;
            for (const auto& b : bs) {
                total += b.ram;
                PSeries xw = PSeries::monomial(Rational(static_cast<long>(b.ram)),
                                               Cyclo::from_int(1));
                PSeries yw = series_inflate(b.series, Rational(static_cast<long>(b.ram)));
                try {
                    PSeries r = poly_eval_on_branch(f, xw, yw);
                    if (!r.is_zero()) {
                        os << "nonzero back-substitution at poly " << i;
                        return false;
                    }
                } catch (const TruncationTooShort&) {
                    // vanishes through the whole certified window
                }
            }
            if (total != f.deg_y()) {
                os << "sheet count mismatch at poly " << i;
                return false;
            }
        }
        try {
            newton_puiseux(fixtures::sqrt2_poly(), T);
            return false;  // must refuse, not approximate
        } catch (const FieldExtensionRequired&) {
        }
        os << "100 polynomials + sqrt(2) refusal";
        return true;
    }});

    cs.push_back({11, "restriction-formula Milnor number against the polygon oracle", [](ostringstream& os, std::uint64_t seed) {
        auto X = SurfacePresentation::make(fixtures::d5_poly());
        std::mt19937_64 rng(seed + 11);
        std::uniform_int_distribution<long> num(1, 9), den(1, 4);
        Rational lambda(num(rng), den(rng));
        PSeries xw = PSeries::monomial(Rational(1), Cyclo::from_int(1));
        PSeries yw = PSeries::monomial(Rational(2), Cyclo::from_rational(lambda));
        mpz_class mu = milnor_spreading(X, xw, yw);
        PSeries g = poly_eval_on_branch(X.f, xw, yw);
        mpz_class oracle = kouchnirenko_suspension_mu(g);
        os << "mu = " << mu.get_str() << ", oracle = " << oracle.get_str();
        return mu == 3 && oracle == mu;
    }});

    cs.push_back({12, "probe round-trip s = probe(r0, q(s, r0)) on 100 random pairs", [](ostringstream&, std::uint64_t seed) {
        std::mt19937_64 rng(seed + 12);
        std::uniform_int_distribution<long> num(1, 40), den(1, 6), extra(0, 30);
        for (int i = 0; i < 100; ++i) {
            Rational s = Rational(num(rng), den(rng)) + Rational(1);
            Rational r0 = s + Rational(extra(rng), den(rng));
            if (!(polar_rate_from_probe(r0, q_of_r(s, r0)) == s)) return false;
        }
        return true;
    }});

    cs.push_back({13, "determinism: two runs produce byte-identical reports", [](ostringstream&, std::uint64_t seed) {
        std::vector<Criterion> sub = criteria();
        sub.pop_back();  // everything except this criterion
        VerifyResult a = run_criteria(sub, seed);
        VerifyResult b = run_criteria(sub, seed);
        return a.report == b.report && a.pass == b.pass;
    }});

    return cs;
}

}  // namespace carrousel::verify
