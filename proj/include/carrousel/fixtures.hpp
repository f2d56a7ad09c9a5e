#pragma once

#include "carrousel/carrousel_tree.hpp"
#include "carrousel/polynomial.hpp"
#include "carrousel/resolution.hpp"

#include <map>
#include <string>
#include <vector>

namespace carrousel::fixtures {

/// z^2 = -(x^2 y + y^4): the D5 surface; the sign of f is immaterial.
inline BiPoly d5_poly() {
    return BiPoly::term(2, 1, Cyclo::from_int(1)) + BiPoly::term(0, 4, Cyclo::from_int(1));
}

/// A1 surface z^2 = xy.
inline BiPoly a1_poly() { return BiPoly::term(1, 1, Cyclo::from_int(1)); }

/// y^2 - 2 x^3: needs sqrt(2), outside the cyclotomic class.
inline BiPoly sqrt2_poly() {
    return BiPoly::term(0, 2, Cyclo::from_int(1)) - BiPoly::term(3, 0, Cyclo::from_int(2));
}

/// The two-branch curve y = a x^{4/3} + b x^{13/6}, y = c x^{7/4}
/// (unit coefficients), truncated past every topological datum.
inline std::vector<PuiseuxBranch> example32_branches() {
    PSeries s1;
    s1.terms = {{Rational(4, 3), Cyclo::from_int(1)}, {Rational(13, 6), Cyclo::from_int(1)}};
    s1.trunc = Rational(3);
    PSeries s2;
    s2.terms = {{Rational(7, 4), Cyclo::from_int(1)}};
    s2.trunc = Rational(3);
    return {PuiseuxBranch::from_series(std::move(s1)), PuiseuxBranch::from_series(std::move(s2))};
}

/// Minimal resolution graph of D5: chain v1-v2-v3-v4 with v5 on v2,
/// all Euler weights -2, plus the h-arrow at v3.
inline ResolutionGraph d5_minimal_graph() {
    ResolutionGraph g;
    g.vertices.assign(5, {});
    g.edges = {{0, 1}, {1, 2}, {2, 3}, {1, 4}};
    g.arrows["h"] = {{2, 1}};
    return g;
}

/// The divisor cycles of Example-scale D5 data: exceptional multiplicities of
/// h, x, y, z, f_x, f_y, f_z on the minimal graph.
inline std::map<std::string, std::vector<long>> d5_divisor_cycles() {
    return {
        {"h", {1, 2, 2, 1, 1}},  {"x", {2, 3, 2, 1, 2}},  {"y", {1, 2, 2, 2, 1}},
        {"z", {2, 4, 3, 2, 2}},  {"fx", {3, 5, 4, 3, 3}}, {"fy", {3, 6, 4, 2, 3}},
        {"fz", {2, 4, 3, 2, 2}},
    };
}

/// D5 graph after the extra blow-up resolving the polar family: v6 attached
/// to v2 with Euler -1, v2 becomes -3; polar arrows at v4 and v6.
inline ResolutionGraph d5_resolved_graph() {
    ResolutionGraph g;
    g.vertices.assign(6, {});
    g.vertices[1].euler = -3;
    g.vertices[5].euler = -1;
    g.edges = {{0, 1}, {1, 2}, {2, 3}, {1, 4}, {1, 5}};
    g.arrows["h"] = {{2, 1}};
    g.arrows["polar"] = {{3, 1}, {5, 1}};
    return g;
}

/// Node rates of the D5 geometric decomposition.
inline std::map<std::size_t, Rational> d5_rates() {
    return {{1, Rational(3, 2)}, {2, Rational(1)}, {3, Rational(2)}, {5, Rational(5, 2)}};
}

/// Fourteen discriminant branches of (zx^2+y^3)(x^3+zy^2)+z^7 = 0 with the
/// published exponents, plus their polar rates, as fixture inputs:
///  - six smooth branches with distinct tangents, rate 1;
///  - five branches a_i v + v^{3/2}, rate 3/2;
///  - delta, delta', delta'' sharing the tangent 12v with second exponents
///    6/5, 6/5, 5/4 and rates 7/5, 7/5, 5/4.
inline std::pair<std::vector<PuiseuxBranch>, std::vector<Rational>> example63_branches() {
    std::vector<PuiseuxBranch> br;
    std::vector<Rational> rates;
    for (long i = 1; i <= 6; ++i) {
        PSeries s;
        s.terms = {{Rational(1), Cyclo::from_int(i)}};
        br.push_back(PuiseuxBranch::from_series(std::move(s)));
        rates.push_back(Rational(1));
    }
    for (long i = 7; i <= 11; ++i) {
        PSeries s;
        s.terms = {{Rational(1), Cyclo::from_int(i)}, {Rational(3, 2), Cyclo::from_int(1)}};
        br.push_back(PuiseuxBranch::from_series(std::move(s)));
        rates.push_back(Rational(3, 2));
    }
    auto tangent = Cyclo::from_int(12);
    {
        PSeries s;
        s.terms = {{Rational(1), tangent}, {Rational(6, 5), Cyclo::from_int(1)}};
        br.push_back(PuiseuxBranch::from_series(std::move(s)));
        rates.push_back(Rational(7, 5));
    }
    {
        PSeries s;
        s.terms = {{Rational(1), tangent}, {Rational(6, 5), Cyclo::from_int(2)}};
        br.push_back(PuiseuxBranch::from_series(std::move(s)));
        rates.push_back(Rational(7, 5));
    }
    {
        PSeries s;
        s.terms = {{Rational(1), tangent}, {Rational(5, 4), Cyclo::from_int(1)}};
        br.push_back(PuiseuxBranch::from_series(std::move(s)));
        rates.push_back(Rational(5, 4));
    }
    return {std::move(br), std::move(rates)};
}

/// Hyperplane-section resolution graph of (zx^2+y^3)(x^3+zy^2)+z^7 = 0:
/// twelve vertices; F and G are the two -23 curves carrying three h-arrows
/// each, H1..H5 the -1 chain curves between them.
/// Index map: 0:A(-2) 1:B(-5) 2:C(-2) 3:D(-1) 4:E(-1) 5:F(-23) 6:G(-23)
/// 7..11:H1..H5(-1).
inline ResolutionGraph example75_graph() {
    ResolutionGraph g;
    g.vertices.assign(12, {});
    g.vertices[0].euler = -2;
    g.vertices[1].euler = -5;
    g.vertices[2].euler = -2;
    g.vertices[3].euler = -1;
    g.vertices[4].euler = -1;
    g.vertices[5].euler = -23;
    g.vertices[6].euler = -23;
    for (std::size_t h = 7; h < 12; ++h) g.vertices[h].euler = -1;
    g.edges = {{0, 3}, {1, 3}, {1, 4}, {2, 4}, {3, 5}, {4, 6}};
    for (std::size_t h = 7; h < 12; ++h) {
        g.edges.emplace_back(5, h);
        g.edges.emplace_back(h, 6);
    }
    g.arrows["h"] = {{5, 3}, {6, 3}};
    g.arrows["polar"] = {{0, 1}, {1, 1}, {2, 1}, {5, 3}, {6, 3},
                         {7, 1}, {8, 1}, {9, 1}, {10, 1}, {11, 1}};
    return g;
}

/// Generic-linear-form multiplicities on the Example 7.5 graph.
inline std::vector<long> example75_h_cycle() { return {5, 4, 5, 10, 10, 1, 1, 2, 2, 2, 2, 2}; }

/// Generic-polar multiplicities on the Example 7.5 graph.
inline std::vector<long> example75_polar_cycle() {
    return {29, 23, 29, 57, 57, 5, 5, 11, 11, 11, 11, 11};
}

/// Node rates of the Example 7.5 geometric decomposition.
inline std::map<std::size_t, Rational> example75_rates() {
    return {{0, Rational(7, 5)}, {1, Rational(5, 4)}, {2, Rational(7, 5)},
            {3, Rational(6, 5)}, {4, Rational(6, 5)}, {5, Rational(1)},
            {6, Rational(1)},    {7, Rational(3, 2)}, {8, Rational(3, 2)},
            {9, Rational(3, 2)}, {10, Rational(3, 2)}, {11, Rational(3, 2)}};
}

}  // namespace carrousel::fixtures
