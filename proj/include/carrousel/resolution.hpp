#pragma once

#include "carrousel/rational.hpp"

#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <vector>

namespace carrousel {

struct NotNegativeDefinite : std::runtime_error {
    NotNegativeDefinite() : std::runtime_error("intersection matrix is not negative definite") {}
};

struct NotConnected : std::runtime_error {
    NotConnected() : std::runtime_error("resolution graph is not connected") {}
};

struct NonIntegralSolution : std::runtime_error {
    NonIntegralSolution() : std::runtime_error("total-transform system has no integral solution") {}
};

struct NonEffectiveSolution : std::runtime_error {
    NonEffectiveSolution() : std::runtime_error("total-transform cycle is not effective") {}
};

struct MissingRate : std::runtime_error {
    explicit MissingRate(std::size_t v)
        : std::runtime_error("no rate supplied for node vertex " + std::to_string(v)) {}
};

/// Decorated dual resolution graph: Euler weights, genera, and named arrow
/// families (counts of strict-transform intersections per vertex).
struct ResolutionGraph {
    struct Vertex {
        long euler = -2;
        unsigned genus = 0;
        bool synthetic = false;  // string vertex inserted between adjacent nodes
    };
    std::vector<Vertex> vertices;
    std::vector<std::pair<std::size_t, std::size_t>> edges;  // multiset, unordered pairs
    std::map<std::string, std::map<std::size_t, unsigned>> arrows;

    std::size_t size() const { return vertices.size(); }

    unsigned valency(std::size_t v) const {
        unsigned d = 0;
        for (const auto& [a, b] : edges) {
            if (a == v) ++d;
            if (b == v) ++d;  // loops count twice
        }
        return d;
    }

    unsigned arrow_count(const std::string& name, std::size_t v) const {
        auto it = arrows.find(name);
        if (it == arrows.end()) return 0;
        auto jt = it->second.find(v);
        return jt == it->second.end() ? 0 : jt->second;
    }
};

using Cycle = std::vector<mpz_class>;

inline std::vector<std::vector<mpz_class>> intersection_matrix(const ResolutionGraph& g) {
    std::size_t n = g.size();
    std::vector<std::vector<mpz_class>> m(n, std::vector<mpz_class>(n, 0));
    for (std::size_t v = 0; v < n; ++v) m[v][v] = g.vertices[v].euler;
    for (const auto& [a, b] : g.edges) {
        if (a == b) continue;  // self-intersections live on the diagonal already
        m[a][b] += 1;
        m[b][a] += 1;
    }
    return m;
}

namespace detail {

/// Determinant of an integer matrix, Bareiss fraction-free elimination.
inline mpz_class int_determinant(std::vector<std::vector<mpz_class>> m) {
    std::size_t n = m.size();
    if (n == 0) return 1;
    mpz_class prev = 1;
    int sign = 1;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        if (m[k][k] == 0) {
            std::size_t p = k + 1;
            while (p < n && m[p][k] == 0) ++p;
            if (p == n) return 0;
            std::swap(m[p], m[k]);
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < n; ++i)
            for (std::size_t j = k + 1; j < n; ++j) {
                mpz_class num = m[i][j] * m[k][k] - m[i][k] * m[k][j];
                mpz_class q;
                mpz_divexact(q.get_mpz_t(), num.get_mpz_t(), prev.get_mpz_t());
                m[i][j] = q;
            }
        prev = m[k][k];
    }
    return sign * m[n - 1][n - 1];
}

}  // namespace detail

/// Exact test via leading principal minors of -M.
inline bool is_negative_definite(const std::vector<std::vector<mpz_class>>& m) {
    std::size_t n = m.size();
    for (std::size_t k = 1; k <= n; ++k) {
        std::vector<std::vector<mpz_class>> sub(k, std::vector<mpz_class>(k));
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = 0; j < k; ++j) sub[i][j] = -m[i][j];
        if (detail::int_determinant(std::move(sub)) <= 0) return false;
    }
    return true;
}

inline bool is_connected(const ResolutionGraph& g) {
    if (g.size() == 0) return true;
    std::vector<bool> seen(g.size(), false);
    std::vector<std::size_t> stack{0};
    seen[0] = true;
    while (!stack.empty()) {
        std::size_t v = stack.back();
        stack.pop_back();
        for (const auto& [a, b] : g.edges) {
            if (a == v && !seen[b]) { seen[b] = true; stack.push_back(b); }
            if (b == v && !seen[a]) { seen[a] = true; stack.push_back(a); }
        }
    }
    for (bool s : seen)
        if (!s) return false;
    return true;
}

/// Constructor-time checks: connectivity and negative definiteness.
inline void validate_graph(const ResolutionGraph& g) {
    for (const auto& [a, b] : g.edges)
        if (a >= g.size() || b >= g.size())
            throw std::out_of_range("resolution graph edge endpoint out of range");
    for (const auto& [name, am] : g.arrows)
        for (const auto& [v, c] : am)
            if (v >= g.size()) throw std::out_of_range("arrow vertex out of range");
    if (!is_connected(g)) throw NotConnected();
    if (!is_negative_definite(intersection_matrix(g))) throw NotNegativeDefinite();
}

/// Unique solution m of M*m = -a: the exceptional part of the total
/// transform of a function whose strict transform meets E_v in a(v) points.
inline Cycle solve_total_transform(const ResolutionGraph& g,
                                   const std::map<std::size_t, unsigned>& arrow_counts) {
    std::size_t n = g.size();
    auto mi = intersection_matrix(g);
    // Gaussian elimination over Q on [M | -a].
    std::vector<std::vector<Rational>> aug(n, std::vector<Rational>(n + 1, Rational(0)));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) aug[i][j] = Rational(mi[i][j]);
    for (const auto& [v, c] : arrow_counts) {
        if (v >= n) throw std::out_of_range("arrow vertex out of range");
        aug[v][n] = Rational(-static_cast<long>(c));
    }
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t piv = col;
        while (piv < n && aug[piv][col].is_zero()) ++piv;
        if (piv == n) throw std::domain_error("singular intersection matrix");
        std::swap(aug[piv], aug[col]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col || aug[r][col].is_zero()) continue;
            Rational f = aug[r][col] / aug[col][col];
            for (std::size_t cc = col; cc <= n; ++cc) aug[r][cc] -= f * aug[col][cc];
        }
    }
    Cycle m(n);
    for (std::size_t i = 0; i < n; ++i) {
        Rational x = aug[i][n] / aug[i][i];
        if (!x.is_integer()) throw NonIntegralSolution();
        if (x.sign() < 0) throw NonEffectiveSolution();
        m[i] = x.as_integer();
    }
    return m;
}

/// Maximal ideal cycle and multiplicity: mult = sum_v a(v) * m(v).
inline std::pair<Cycle, mpz_class> multiplicity(const ResolutionGraph& g,
                                                const std::map<std::size_t, unsigned>& h_arrows) {
    Cycle m = solve_total_transform(g, h_arrows);
    mpz_class total = 0;
    for (const auto& [v, c] : h_arrows) total += mpz_class(c) * m[v];
    return {std::move(m), std::move(total)};
}

enum class VertexTag { LNode, PNode, Node, StringVertex, BambooVertex };

struct NodeClassification {
    std::vector<VertexTag> tags;
    std::vector<bool> is_l, is_p, is_node;
    std::vector<std::vector<std::size_t>> strings;  // maximal strings between nodes
    std::vector<std::vector<std::size_t>> bamboos;  // paths ending in valency-1 non-nodes
};

/// Definition-driven tags: L iff the "h" family meets the vertex, P iff the
/// "polar" family does, node if L, P, valency >= 3 or positive genus. When a
/// vertex is both L and P (a conical polar piece) the L tag wins.
inline NodeClassification classify_nodes(const ResolutionGraph& g) {
    std::size_t n = g.size();
    NodeClassification c;
    c.tags.assign(n, VertexTag::StringVertex);
    c.is_l.assign(n, false);
    c.is_p.assign(n, false);
    c.is_node.assign(n, false);
    for (std::size_t v = 0; v < n; ++v) {
        c.is_l[v] = g.arrow_count("h", v) > 0;
        c.is_p[v] = g.arrow_count("polar", v) > 0;
        c.is_node[v] =
            c.is_l[v] || c.is_p[v] || g.valency(v) >= 3 || g.vertices[v].genus > 0;
        if (c.is_l[v])
            c.tags[v] = VertexTag::LNode;
        else if (c.is_p[v])
            c.tags[v] = VertexTag::PNode;
        else if (c.is_node[v])
            c.tags[v] = VertexTag::Node;
    }
    // Non-node subgraph splits into paths; a path is a bamboo when it has a
    // free (valency <= 1) end, a string when both ends attach to nodes.
    std::vector<bool> seen(n, false);
    for (std::size_t v = 0; v < n; ++v) {
        if (c.is_node[v] || seen[v]) continue;
        // Collect the component of non-nodes containing v.
        std::vector<std::size_t> comp;
        std::vector<std::size_t> stack{v};
        seen[v] = true;
        while (!stack.empty()) {
            std::size_t u = stack.back();
            stack.pop_back();
            comp.push_back(u);
            for (const auto& [a, b] : g.edges) {
                std::size_t w = n;
                if (a == u) w = b;
                else if (b == u) w = a;
                if (w < n && !c.is_node[w] && !seen[w]) {
                    seen[w] = true;
                    stack.push_back(w);
                }
            }
        }
        // Order the component as a path and decide bamboo vs string.
        bool has_free_end = false;
        for (std::size_t u : comp)
            if (g.valency(u) <= 1) has_free_end = true;
        // path order: start from an endpoint (valency within component <= 1)
        auto comp_neighbors = [&](std::size_t u) {
            std::vector<std::size_t> r;
            for (const auto& [a, b] : g.edges) {
                std::size_t w = n;
                if (a == u) w = b;
                else if (b == u) w = a;
                if (w < n && !c.is_node[w]) r.push_back(w);
            }
            return r;
        };
        std::size_t start = comp.front();
        for (std::size_t u : comp)
            if (comp_neighbors(u).size() <= 1) { start = u; break; }
        std::vector<std::size_t> path;
        std::set<std::size_t> used;
        std::size_t cur = start;
        while (true) {
            path.push_back(cur);
            used.insert(cur);
            std::size_t next = n;
            for (std::size_t w : comp_neighbors(cur))
                if (!used.count(w)) { next = w; break; }
            if (next == n) break;
            cur = next;
        }
        for (std::size_t u : path)
            c.tags[u] = has_free_end ? VertexTag::BambooVertex : VertexTag::StringVertex;
        if (has_free_end)
            c.bamboos.push_back(std::move(path));
        else
            c.strings.push_back(std::move(path));
    }
    return c;
}

struct GeoPiece {
    bool is_annular = false;  // B(q) piece at a node, or A(q,q') along a string
    Rational q{1};
    Rational q2{1};                    // A only
    bool polar = false;
    bool conical = false;              // L-node piece (rate 1)
    std::vector<std::size_t> vertices; // node + absorbed bamboos, or the string
    std::pair<std::size_t, std::size_t> between{0, 0};  // A: the two node vertices
};

/// Insert a synthetic string vertex on every edge joining two nodes, so that
/// strings separate all pieces ("no adjacent nodes").
inline ResolutionGraph subdivide_adjacent_nodes(const ResolutionGraph& g) {
    NodeClassification c = classify_nodes(g);
    ResolutionGraph out = g;
    std::vector<std::pair<std::size_t, std::size_t>> edges;
    for (const auto& [a, b] : out.edges) {
        if (c.is_node[a] && c.is_node[b]) {
            ResolutionGraph::Vertex v;
            v.euler = 0;  // sentinel; never used numerically
            v.synthetic = true;
            out.vertices.push_back(v);
            std::size_t mid = out.vertices.size() - 1;
            edges.emplace_back(a, mid);
            edges.emplace_back(mid, b);
        } else {
            edges.emplace_back(a, b);
        }
    }
    out.edges = std::move(edges);
    return out;
}

/// Geometric decomposition read off the resolution graph: one B(q) piece per
/// node (bamboos absorbed), one A(q,q') piece per maximal string between
/// nodes. Rates are supplied per node vertex; L-nodes must carry rate 1.
inline std::vector<GeoPiece> geometric_decomposition(const ResolutionGraph& g_in,
                                                     const std::map<std::size_t, Rational>& rates) {
    ResolutionGraph g = subdivide_adjacent_nodes(g_in);
    NodeClassification c = classify_nodes(g);
    auto rate_of = [&](std::size_t v) -> Rational {
        auto it = rates.find(v);
        if (it == rates.end()) throw MissingRate(v);
        return it->second;
    };
    std::vector<GeoPiece> pieces;
    for (std::size_t v = 0; v < g.size(); ++v) {
        if (!c.is_node[v]) continue;
        GeoPiece p;
        p.q = rate_of(v);
        p.polar = c.is_p[v];
        p.conical = c.is_l[v];
        if (p.conical && !(p.q == Rational(1)))
            throw std::domain_error("L-node rate must be 1");
        p.vertices.push_back(v);
        pieces.push_back(std::move(p));
    }
    // absorb bamboos into the adjacent node's piece
    for (const auto& bam : c.bamboos) {
        std::size_t attach = g.size();
        for (std::size_t u : bam)
            for (const auto& [a, b] : g.edges) {
                if (a == u && c.is_node[b]) attach = b;
                if (b == u && c.is_node[a]) attach = a;
            }
        if (attach == g.size()) continue;  // isolated chain, nothing to absorb into
        for (auto& p : pieces)
            if (!p.is_annular && p.vertices.front() == attach)
                for (std::size_t u : bam) p.vertices.push_back(u);
    }
    auto node_neighbors = [&](std::size_t u) {
        std::vector<std::size_t> r;
        for (const auto& [a, b] : g.edges) {
            if (a == u && c.is_node[b]) r.push_back(b);
            if (b == u && c.is_node[a]) r.push_back(a);
        }
        return r;
    };
    for (const auto& str : c.strings) {
        // endpoints: the node vertices adjacent to the two ends
        std::size_t na = g.size(), nb = g.size();
        if (str.size() == 1) {
            auto nn = node_neighbors(str.front());
            if (nn.size() == 2) { na = nn[0]; nb = nn[1]; }
        } else {
            auto n1 = node_neighbors(str.front());
            auto n2 = node_neighbors(str.back());
            if (n1.size() == 1 && n2.size() == 1) { na = n1[0]; nb = n2[0]; }
        }
        if (na == g.size() || nb == g.size()) continue;  // dangling string
        GeoPiece p;
        p.is_annular = true;
        Rational qa = rate_of(na), qb = rate_of(nb);
        p.q = min(qa, qb);
        p.q2 = max(qa, qb);
        p.vertices = str;
        p.between = {na, nb};
        pieces.push_back(std::move(p));
    }
    return pieces;
}

}  // namespace carrousel
