#pragma once

#include "carrousel/carrousel_tree.hpp"
#include "carrousel/polynomial.hpp"
#include "carrousel/puiseux.hpp"
#include "carrousel/resolution.hpp"
#include "carrousel/surface.hpp"

#include <json.hpp>

#include <fstream>
#include <string>

namespace carrousel {

using json = nlohmann::json;

struct BadInput : std::runtime_error {
    explicit BadInput(const std::string& what) : std::runtime_error(what) {}
};

// ---- rationals ----

inline json to_json(const Rational& r) { return r.str(); }

inline Rational rational_from_json(const json& j) {
    if (j.is_number_integer()) return Rational(j.get<long>());
    if (j.is_string()) return Rational::parse(j.get<std::string>());
    throw BadInput("expected a rational as integer or \"n/d\" string");
}

// ---- cyclotomic numbers: {"order": L, "coeffs": ["n/d", ...]} ----

inline json to_json(const Cyclo& c) {
    json coeffs = json::array();
    for (const auto& q : c.coeffs()) coeffs.push_back(q.str());
    return json{{"order", c.order()}, {"coeffs", coeffs}};
}

inline Cyclo cyclo_from_json(const json& j) {
    if (j.is_number_integer()) return Cyclo::from_int(j.get<long>());
    if (j.is_string()) return Cyclo::from_rational(Rational::parse(j.get<std::string>()));
    if (!j.is_object() || !j.contains("order") || !j.contains("coeffs"))
        throw BadInput("cyclotomic number needs {order, coeffs}");
    unsigned long L = j.at("order").get<unsigned long>();
    Cyclo acc = Cyclo::zero(L);
    unsigned long idx = 0;
    for (const auto& cj : j.at("coeffs")) {
        Rational q = rational_from_json(cj);
        if (!q.is_zero())
            acc = acc + Cyclo::from_rational(q) * Cyclo::root_of_unity(L, static_cast<long>(idx));
        ++idx;
    }
    if (idx > detail::euler_phi(L)) throw BadInput("too many cyclotomic coefficients");
    return acc;
}

// ---- branches: {"ramification": N, "trunc": "p/q"|null, "terms": [...]} ----

inline json to_json(const PuiseuxBranch& b) {
    json terms = json::array();
    for (const auto& [e, c] : b.series.terms)
        terms.push_back(json{{"exp", e.str()}, {"coeff", to_json(c)}});
    json j{{"ramification", b.ram}, {"terms", terms}};
    if (b.series.trunc)
        j["trunc"] = b.series.trunc->str();
    else
        j["trunc"] = nullptr;
    return j;
}

inline PuiseuxBranch branch_from_json(const json& j) {
    PSeries s;
    if (!j.is_object() || !j.contains("terms")) throw BadInput("branch needs a terms array");
    for (const auto& t : j.at("terms"))
        s.terms.emplace_back(rational_from_json(t.at("exp")), cyclo_from_json(t.at("coeff")));
    if (j.contains("trunc") && !j.at("trunc").is_null())
        s.trunc = rational_from_json(j.at("trunc"));
    s.normalize();
    PuiseuxBranch b = PuiseuxBranch::from_series(std::move(s));
    if (j.contains("ramification")) {
        unsigned long claimed = j.at("ramification").get<unsigned long>();
        if (claimed != b.ram) throw BadInput("ramification does not match the exponents");
    }
    return b;
}

inline json branches_to_json(const std::vector<PuiseuxBranch>& bs) {
    json a = json::array();
    for (const auto& b : bs) a.push_back(to_json(b));
    return a;
}

inline std::vector<PuiseuxBranch> branches_from_json(const json& j) {
    if (!j.is_array()) throw BadInput("branch file must be a JSON array");
    std::vector<PuiseuxBranch> out;
    for (const auto& bj : j) out.push_back(branch_from_json(bj));
    return out;
}

// ---- polynomials: [{"dx": m, "dy": n, "coeff": ...}, ...] ----

inline json to_json(const BiPoly& f) {
    json a = json::array();
    for (const auto& [k, c] : f.terms())
        a.push_back(json{{"dx", k.first}, {"dy", k.second}, {"coeff", to_json(c)}});
    return a;
}

inline BiPoly bipoly_from_json(const json& j) {
    if (!j.is_array()) throw BadInput("polynomial file must be a JSON array");
    BiPoly f;
    for (const auto& t : j)
        f.add_term(t.at("dx").get<unsigned>(), t.at("dy").get<unsigned>(),
                   cyclo_from_json(t.at("coeff")));
    return f;
}

// ---- carrousel trees ----

inline json to_json(const CNode& n) {
    json rates = json::array();
    rates.push_back(n.rate.str());
    if (n.kind == PieceKind::A) rates.push_back(n.rate2.str());
    json flags = json::array();
    if (n.contains_curve) flags.push_back("curve");
    if (n.is_delta) flags.push_back("delta");
    if (n.is_polar) flags.push_back("polar");
    json branches = json::array();
    {
        std::set<std::size_t> ids;
        for (const auto& s : n.sheets) ids.insert(s.first);
        for (auto b : ids) branches.push_back(b);
    }
    // canonical child order: sort by (canonical key, serialized form)
    std::vector<const CNode*> kids;
    for (const auto& c : n.children) kids.push_back(&c);
    std::sort(kids.begin(), kids.end(), [](const CNode* a, const CNode* b) {
        std::string ka = canonical_key(*a), kb = canonical_key(*b);
        if (ka != kb) return ka < kb;
        return a->sheets < b->sheets;
    });
    json children = json::array();
    for (const CNode* c : kids) children.push_back(to_json(*c));
    const char* kind = n.kind == PieceKind::Cone ? "CONE"
                     : n.kind == PieceKind::B   ? "B"
                     : n.kind == PieceKind::A   ? "A"
                                                : "D";
    return json{{"kind", kind},
                {"rates", rates},
                {"branches", branches},
                {"flags", flags},
                {"children", children}};
}

inline CNode tree_from_json(const json& j) {
    CNode n;
    std::string kind = j.at("kind").get<std::string>();
    n.kind = kind == "CONE" ? PieceKind::Cone
           : kind == "B"    ? PieceKind::B
           : kind == "A"    ? PieceKind::A
           : kind == "D"    ? PieceKind::D
                            : throw BadInput("unknown piece kind " + kind);
    const auto& rates = j.at("rates");
    n.rate = rational_from_json(rates.at(0));
    n.rate2 = rates.size() > 1 ? rational_from_json(rates.at(1)) : n.rate;
    for (const auto& f : j.at("flags")) {
        std::string s = f.get<std::string>();
        if (s == "curve") n.contains_curve = true;
        if (s == "delta") n.is_delta = true;
        if (s == "polar") n.is_polar = true;
    }
    for (const auto& c : j.at("children")) n.children.push_back(tree_from_json(c));
    if (j.contains("sheets"))
        for (const auto& s : j.at("sheets"))
            n.sheets.insert({s.at(0).get<std::size_t>(), s.at(1).get<std::size_t>()});
    return n;
}

// ---- contact matrices ----

inline json to_json(const ContactMatrix& m) {
    json labels = json::array();
    for (const auto& [b, k] : m.sheet_labels) labels.push_back(json::array({b, k}));
    json rows = json::array();
    for (std::size_t i = 0; i < m.mu; ++i) {
        json row = json::array();
        for (std::size_t j2 = 0; j2 < m.mu; ++j2) row.push_back(m.q[i][j2].str());
        rows.push_back(row);
    }
    return json{{"mu", m.mu}, {"labels", labels}, {"q", rows}};
}

inline ContactMatrix contact_matrix_from_json(const json& j) {
    ContactMatrix m;
    m.mu = j.at("mu").get<std::size_t>();
    for (const auto& l : j.at("labels"))
        m.sheet_labels.emplace_back(l.at(0).get<std::size_t>(), l.at(1).get<std::size_t>());
    for (const auto& row : j.at("q")) {
        std::vector<Rational> r;
        for (const auto& x : row) r.push_back(rational_from_json(x));
        m.q.push_back(std::move(r));
    }
    if (m.q.size() != m.mu || m.sheet_labels.size() != m.mu)
        throw BadInput("contact matrix shape mismatch");
    return m;
}

// ---- resolution graphs ----

inline json to_json(const ResolutionGraph& g) {
    json verts = json::array();
    for (const auto& v : g.vertices) {
        json vj{{"euler", v.euler}, {"genus", v.genus}};
        if (v.synthetic) vj["synthetic"] = true;
        verts.push_back(vj);
    }
    json edges = json::array();
    for (const auto& [a, b] : g.edges) edges.push_back(json::array({a, b}));
    json arrows = json::object();
    for (const auto& [name, am] : g.arrows) {
        json m = json::object();
        for (const auto& [v, c] : am) m[std::to_string(v)] = c;
        arrows[name] = m;
    }
    return json{{"vertices", verts}, {"edges", edges}, {"arrows", arrows}};
}

inline ResolutionGraph graph_from_json(const json& j, bool validate = true) {
    ResolutionGraph g;
    for (const auto& vj : j.at("vertices")) {
        ResolutionGraph::Vertex v;
        v.euler = vj.at("euler").get<long>();
        if (vj.contains("genus")) v.genus = vj.at("genus").get<unsigned>();
        if (vj.contains("synthetic")) v.synthetic = vj.at("synthetic").get<bool>();
        g.vertices.push_back(v);
    }
    for (const auto& e : j.at("edges"))
        g.edges.emplace_back(e.at(0).get<std::size_t>(), e.at(1).get<std::size_t>());
    if (j.contains("arrows"))
        for (const auto& [name, m] : j.at("arrows").items())
            for (const auto& [v, c] : m.items())
                g.arrows[name][std::stoul(v)] = c.get<unsigned>();
    if (validate) validate_graph(g);
    return g;
}

// ---- polar rate reports ----

inline json to_json(const PolarRateReport& r) {
    return json{{"branch", r.branch},        {"m", r.m},
                {"b_prime", r.b_prime.get_str()}, {"s", r.s.str()},
                {"r_prime", r.r_prime_used.get_str()}, {"stable", r.stable},
                {"swapped", r.swapped}};
}

// ---- files ----

inline json load_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw BadInput("cannot open " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw BadInput("invalid JSON in " + path + ": " + e.what());
    }
    return j;
}

inline void save_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw BadInput("cannot write " + path);
    out << text;
}

inline void save_json(const std::string& path, const json& j) {
    save_text(path, j.dump(2) + "\n");
}

}  // namespace carrousel
