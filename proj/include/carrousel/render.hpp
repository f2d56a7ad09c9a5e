#pragma once

#include "carrousel/carrousel_tree.hpp"
#include "carrousel/resolution.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

namespace carrousel {

/// Circle layout of a carrousel section: nested disks, children on a
/// concentric ring inside the parent. A-pieces are the annular gaps between
/// a circle and its children, so only Cone/B/D nodes draw circles.
struct SectionLayout {
    struct Piece {
        double cx = 0, cy = 0, r = 1;
        PieceKind kind = PieceKind::Cone;
        Rational rate{1};
        bool curve = false, delta = false, polar = false;
        int depth = 0;
        int parent = -1;  // index into pieces
    };
    std::vector<Piece> pieces;
};

namespace detail {

inline void layout_node(const CNode& n, double cx, double cy, double r, int depth, int parent,
                        SectionLayout& out) {
    if (n.kind == PieceKind::A) {
        // annulus: draw nothing, place the single child within
        if (!n.children.empty()) layout_node(n.children.front(), cx, cy, r, depth, parent, out);
        return;
    }
    SectionLayout::Piece p;
    p.cx = cx;
    p.cy = cy;
    p.r = r;
    p.kind = n.kind;
    p.rate = n.rate;
    p.curve = n.contains_curve;
    p.delta = n.is_delta;
    p.polar = n.is_polar;
    p.depth = depth;
    p.parent = parent;
    out.pieces.push_back(p);
    int self = static_cast<int>(out.pieces.size()) - 1;

    // gather drawable children (splicing through A-collars)
    std::vector<const CNode*> kids;
    std::function<void(const CNode&)> collect = [&](const CNode& m) {
        for (const auto& c : m.children) {
            if (c.kind == PieceKind::A) {
                collect(c);
            } else {
                kids.push_back(&c);
            }
        }
    };
    collect(n);
    std::size_t k = kids.size();
    if (k == 0) return;
    double rc = r / (1.0 + static_cast<double>(k));
    if (k == 1) {
        layout_node(*kids[0], cx, cy, rc, depth + 1, self, out);
        return;
    }
    double ring = 0.75 * r * static_cast<double>(k) / (static_cast<double>(k) + 1.0);
    constexpr double tau = 6.283185307179586476925286766559;
    for (std::size_t i = 0; i < k; ++i) {
        double ang = tau * static_cast<double>(i) / static_cast<double>(k);
        layout_node(*kids[i], cx + ring * std::cos(ang), cy + ring * std::sin(ang), rc,
                    depth + 1, self, out);
    }
}

inline std::string fmt(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.6f", x);
    return buf;
}

}  // namespace detail

inline SectionLayout layout_section(const CarrouselTree& t) {
    SectionLayout out;
    detail::layout_node(t, 0.0, 0.0, 1.0, 0, -1, out);
    return out;
}

/// Containment/disjointness sanity for a layout (tests use this).
inline bool layout_well_nested(const SectionLayout& l) {
    for (std::size_t i = 0; i < l.pieces.size(); ++i) {
        const auto& p = l.pieces[i];
        if (p.parent >= 0) {
            const auto& q = l.pieces[static_cast<std::size_t>(p.parent)];
            double d = std::hypot(p.cx - q.cx, p.cy - q.cy);
            if (!(d + p.r < q.r)) return false;
        }
        for (std::size_t j = i + 1; j < l.pieces.size(); ++j) {
            const auto& q = l.pieces[j];
            if (q.parent != p.parent || p.parent < 0) continue;
            double d = std::hypot(p.cx - q.cx, p.cy - q.cy);
            if (!(d > p.r + q.r)) return false;
        }
    }
    return true;
}

struct SvgOptions {
    bool fill_delta = true;
    bool labels = false;
};

inline std::string emit_svg(const SectionLayout& l, const SvgOptions& opt = {}) {
    std::ostringstream os;
    os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
       << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" "
          "viewBox=\"-1.1 -1.1 2.2 2.2\">\n";
    for (const auto& p : l.pieces) {
        std::string fill = "none";
        if (opt.fill_delta && p.kind == PieceKind::D) {
            if (p.polar)
                fill = "#555555";
            else if (p.delta)
                fill = "#bbbbbb";
            else if (p.curve)
                fill = "#dddddd";
        }
        os << "  <circle cx=\"" << detail::fmt(p.cx) << "\" cy=\"" << detail::fmt(p.cy)
           << "\" r=\"" << detail::fmt(p.r) << "\" fill=\"" << fill
           << "\" stroke=\"black\" stroke-width=\"0.004\"/>\n";
        if (opt.labels) {
            os << "  <text x=\"" << detail::fmt(p.cx) << "\" y=\""
               << detail::fmt(p.cy - p.r * 0.82) << "\" font-size=\""
               << detail::fmt(p.r * 0.25) << "\" text-anchor=\"middle\">" << p.rate.str()
               << "</text>\n";
        }
    }
    os << "</svg>\n";
    return os.str();
}

/// Resolution graph in DOT, Euler/genus decorations on vertices, arrows as
/// arrowhead edges to phantom targets.
inline std::string emit_dot(const ResolutionGraph& g) {
    std::ostringstream os;
    os << "graph resolution {\n  node [shape=circle];\n";
    for (std::size_t v = 0; v < g.size(); ++v) {
        os << "  v" << v << " [label=\"v" << v + 1 << "\\n" << g.vertices[v].euler;
        if (g.vertices[v].genus > 0) os << " [" << g.vertices[v].genus << "]";
        os << "\"];\n";
    }
    for (const auto& [a, b] : g.edges) os << "  v" << a << " -- v" << b << ";\n";
    std::size_t phantom = 0;
    for (const auto& [name, am] : g.arrows)
        for (const auto& [v, cnt] : am)
            for (unsigned i = 0; i < cnt; ++i) {
                os << "  a" << phantom << " [shape=none,label=\"" << name << "\"];\n";
                os << "  v" << v << " -- a" << phantom << " [dir=forward,arrowhead=vee];\n";
                ++phantom;
            }
    os << "}\n";
    return os.str();
}

/// Carrousel tree in DOT with rate labels.
inline std::string emit_dot(const CarrouselTree& t) {
    std::ostringstream os;
    os << "digraph carrousel {\n  node [shape=box];\n";
    std::size_t counter = 0;
    std::function<std::size_t(const CNode&)> walk = [&](const CNode& n) -> std::size_t {
        std::size_t self = counter++;
        os << "  n" << self << " [label=\"";
        switch (n.kind) {
            case PieceKind::Cone: os << "B(1) cone"; break;
            case PieceKind::B: os << "B(" << n.rate.str() << ")"; break;
            case PieceKind::A: os << "A(" << n.rate.str() << "," << n.rate2.str() << ")"; break;
            case PieceKind::D: os << "D(" << n.rate.str() << ")"; break;
        }
        if (n.is_delta) os << " delta";
        if (n.is_polar) os << " polar";
        os << "\"];\n";
        for (const auto& c : n.children) {
            std::size_t ci = walk(c);
            os << "  n" << self << " -> n" << ci << ";\n";
        }
        return self;
    };
    walk(t);
    os << "}\n";
    return os.str();
}

}  // namespace carrousel
