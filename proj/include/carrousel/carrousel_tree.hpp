#pragma once

#include "carrousel/puiseux.hpp"

#include <cstdint>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

namespace carrousel {

struct NonGenericCoordinates : std::runtime_error {
    NonGenericCoordinates()
        : std::runtime_error("a branch is tangent to the y-axis (leading exponent < 1)") {}
};

struct MissingPolarRate : std::runtime_error {
    explicit MissingPolarRate(std::size_t b)
        : std::runtime_error("no polar rate supplied for branch " + std::to_string(b)) {}
};

struct UltrametricViolation : std::runtime_error {
    UltrametricViolation()
        : std::runtime_error("contact matrix violates the ultrametric property") {}
};

enum class PieceKind { Cone, B, A, D };

/// A sheet of a branch: (branch id, conjugate index).
using SheetId = std::pair<std::size_t, std::size_t>;

/// Node of a carrousel tree. Cone is the root piece (behaves as B(1));
/// A-pieces have exactly one child; D-pieces are leaves.
struct CNode {
    PieceKind kind = PieceKind::Cone;
    Rational rate{1};    // B/D/Cone rate; A: outer rate q
    Rational rate2{1};   // A only: inner rate q' (q <= q')
    bool contains_curve = false;
    bool is_delta = false;   // delta-wedge or amalgamated delta-piece
    bool is_polar = false;   // polar piece (surface side)
    std::set<SheetId> sheets;
    std::vector<CNode> children;

    static CNode cone() { return CNode{}; }
    static CNode b(Rational q) {
        CNode n;
        n.kind = PieceKind::B;
        n.rate = std::move(q);
        return n;
    }
    static CNode a(Rational q, Rational q2) {
        CNode n;
        n.kind = PieceKind::A;
        n.rate = std::move(q);
        n.rate2 = std::move(q2);
        return n;
    }
    static CNode d(Rational q) {
        CNode n;
        n.kind = PieceKind::D;
        n.rate = std::move(q);
        return n;
    }
};

using CarrouselTree = CNode;

enum AmalgRule : unsigned {
    kMergeEmptyD = 1u,
    kCollapseAChains = 2u,
    kMergeDeltaIntoOuter = 4u,
    kMergeConical = 8u,
    kAllPlainRules = kMergeEmptyD,
    kAllRules = kMergeEmptyD | kCollapseAChains | kMergeDeltaIntoOuter | kMergeConical,
};

enum class TruncationMode { Plain, Intermediate, Complete };

struct TruncationSpec {
    TruncationMode mode = TruncationMode::Plain;
    std::vector<Rational> polar_rates;  // per branch id; required unless Plain
};

namespace detail {

struct SheetData {
    SheetId id;
    std::vector<std::pair<Rational, Cyclo>> terms;  // kept terms, ascending
    Rational wedge_rate{1};
    std::size_t next = 0;  // cursor into terms during clustering
};

inline Cyclo sheet_coeff_at(const SheetData& s, const Rational& e) {
    for (const auto& [ee, c] : s.terms)
        if (ee == e) return c;
    return Cyclo();
}

/// Terminal cluster: every sheet's kept terms are exhausted. A wedge leaf,
/// behind an A-collar when the wedge rate exceeds the hole rate.
inline CNode make_wedge(const std::vector<SheetData*>& cluster, const Rational& p,
                        bool delta_mode) {
    Rational r = p;
    std::set<std::size_t> branch_ids;
    for (const auto* s : cluster) {
        r = max(r, s->wedge_rate);
        branch_ids.insert(s->id.first);
    }
    CNode leaf = CNode::d(r);
    leaf.contains_curve = true;
    leaf.is_delta = delta_mode && branch_ids.size() == 1;
    for (const auto* s : cluster) leaf.sheets.insert(s->id);
    if (r > p) {
        CNode collar = CNode::a(p, r);
        collar.children.push_back(std::move(leaf));
        return collar;
    }
    return leaf;
}

inline CNode build_cluster(std::vector<SheetData*> cluster, const Rational& p, bool delta_mode) {
    // Next exponent: the smallest kept exponent > p over the cluster.
    bool any_next = false;
    Rational pnext{0};
    for (const auto* s : cluster) {
        if (s->next < s->terms.size()) {
            const Rational& e = s->terms[s->next].first;
            if (!any_next || e < pnext) pnext = e;
            any_next = true;
        }
    }
    if (!any_next) return make_wedge(cluster, p, delta_mode);

    // B(pnext) with one hole per coefficient value plus the inner hole.
    CNode b = CNode::b(pnext);
    std::vector<std::pair<Cyclo, std::vector<SheetData*>>> groups;
    std::vector<SheetData*> inner;
    for (auto* s : cluster) {
        Cyclo c;
        if (s->next < s->terms.size() && s->terms[s->next].first == pnext) {
            c = s->terms[s->next].second;
            ++s->next;
        }
        if (c.is_zero()) {
            inner.push_back(s);
        } else {
            bool found = false;
            for (auto& [cc, g] : groups)
                if (cc == c) {
                    g.push_back(s);
                    found = true;
                    break;
                }
            if (!found) groups.push_back({c, {s}});
        }
    }
    for (auto& [c, g] : groups) b.children.push_back(build_cluster(g, pnext, delta_mode));
    if (inner.empty()) {
        b.children.push_back(CNode::d(pnext));  // empty inner disk
    } else {
        b.children.push_back(build_cluster(inner, pnext, delta_mode));
    }
    for (const auto* s : cluster) b.sheets.insert(s->id);
    b.contains_curve = true;
    if (pnext > p) {
        CNode collar = CNode::a(p, pnext);
        collar.children.push_back(std::move(b));
        return collar;
    }
    return b;
}

}  // namespace detail

/// Unamalgamated carrousel of the given branches under the chosen truncation.
/// Branches must be in generic coordinates (no leading exponent < 1).
inline CarrouselTree build_unamalgamated(const std::vector<PuiseuxBranch>& branches,
                                         const TruncationSpec& spec) {
    for (const auto& b : branches)
        if (!b.series.terms.empty() && b.series.terms.front().first < Rational(1))
            throw NonGenericCoordinates();
    if (spec.mode != TruncationMode::Plain && spec.polar_rates.size() < branches.size()) {
        throw MissingPolarRate(spec.polar_rates.size());
    }

    // Per-branch topological cut: last characteristic exponent and all
    // pairwise branch contacts (the data plain truncation must keep).
    std::vector<Rational> plain_cut(branches.size(), Rational(1));
    {
        std::vector<std::vector<PSeries>> sheets;
        for (const auto& b : branches) sheets.push_back(conjugates(b));
        for (std::size_t i = 0; i < branches.size(); ++i) {
            for (const auto& e : characteristic_exponents(branches[i]))
                plain_cut[i] = max(plain_cut[i], e);
            for (std::size_t j = 0; j < branches.size(); ++j) {
                if (i == j) continue;
                for (const auto& si : sheets[i])
                    for (const auto& sj : sheets[j])
                        plain_cut[i] = max(plain_cut[i], contact_exponent(si, sj));
            }
        }
    }

    std::vector<detail::SheetData> all;
    for (std::size_t i = 0; i < branches.size(); ++i) {
        Rational cut = plain_cut[i];
        Rational wedge = plain_cut[i];
        if (spec.mode == TruncationMode::Intermediate) {
            cut = spec.polar_rates[i];
            wedge = spec.polar_rates[i];
        } else if (spec.mode == TruncationMode::Complete) {
            cut = max(plain_cut[i], spec.polar_rates[i]);
            wedge = max(plain_cut[i], spec.polar_rates[i]);
        }
        auto cs = conjugates(branches[i]);
        for (std::size_t k = 0; k < cs.size(); ++k) {
            detail::SheetData sd;
            sd.id = {i, k};
            for (const auto& [e, c] : cs[k].terms)
                if (!(e > cut)) sd.terms.emplace_back(e, c);
            sd.wedge_rate = max(wedge, Rational(1));
            all.push_back(std::move(sd));
        }
    }

    const bool delta_mode = spec.mode != TruncationMode::Plain;
    CNode root = CNode::cone();
    root.contains_curve = !all.empty();

    // Tangent clusters: group by the coefficient at exponent 1.
    std::vector<std::pair<Cyclo, std::vector<detail::SheetData*>>> tangent_groups;
    for (auto& s : all) {
        Cyclo c;
        if (!s.terms.empty() && s.terms.front().first == Rational(1)) {
            c = s.terms.front().second;
            s.next = 1;
        }
        bool found = false;
        for (auto& [cc, g] : tangent_groups)
            if (cc == c) {
                g.push_back(&s);
                found = true;
                break;
            }
        if (!found) tangent_groups.push_back({c, {&s}});
    }
    for (auto& [c, g] : tangent_groups)
        root.children.push_back(detail::build_cluster(g, Rational(1), delta_mode));
    for (const auto& s : all) root.sheets.insert(s.id);
    return root;
}

namespace detail {

/// One rewriting pass; returns true if anything changed.
inline bool amalgamate_pass(CNode& n, unsigned rules, bool is_root) {
    bool changed = false;
    for (auto& c : n.children)
        if (amalgamate_pass(c, rules, false)) changed = true;

    std::vector<CNode> nc;
    nc.reserve(n.children.size());
    for (auto& c : n.children) {
        // merge-empty-D: an empty disk is absorbed by the piece it bounds.
        if ((rules & kMergeEmptyD) && c.kind == PieceKind::D && !c.contains_curve) {
            changed = true;
            continue;
        }
        // A-node simplifications.
        if (c.kind == PieceKind::A && c.children.size() == 1) {
            CNode& g = c.children.front();
            if ((rules & kMergeEmptyD) && g.kind == PieceKind::D && !g.contains_curve) {
                // A(q,q') + empty D(q') = empty D(q), then absorbed.
                changed = true;
                continue;
            }
            if ((rules & kCollapseAChains) && g.kind == PieceKind::A) {
                CNode merged = CNode::a(c.rate, g.rate2);
                merged.children = std::move(g.children);
                merged.contains_curve = c.contains_curve || g.contains_curve;
                merged.sheets = c.sheets;
                merged.sheets.insert(g.sheets.begin(), g.sheets.end());
                nc.push_back(std::move(merged));
                changed = true;
                continue;
            }
            if ((rules & kCollapseAChains) && c.rate == c.rate2) {
                // A(q,q) collar: erase.
                nc.push_back(std::move(g));
                changed = true;
                continue;
            }
            if ((rules & kMergeDeltaIntoOuter) && g.kind == PieceKind::D && g.is_delta) {
                // Delta-wedge absorbs the collar outside it; keeps its rate.
                CNode merged = std::move(g);
                nc.push_back(std::move(merged));
                changed = true;
                continue;
            }
        }
        // Annular-fiber B (one hole, nothing retained of its own): a collar.
        if ((rules & kCollapseAChains) && c.kind == PieceKind::B && c.children.size() == 1 &&
            !c.is_delta) {
            nc.push_back(std::move(c.children.front()));
            changed = true;
            continue;
        }
        // merge-conical: a B(1) directly under the cone is part of the cone.
        if ((rules & kMergeConical) && is_root && n.kind == PieceKind::Cone &&
            c.kind == PieceKind::B && c.rate == Rational(1)) {
            for (auto& g : c.children) nc.push_back(std::move(g));
            n.sheets.insert(c.sheets.begin(), c.sheets.end());
            changed = true;
            continue;
        }
        nc.push_back(std::move(c));
    }
    n.children = std::move(nc);

    // Piece degenerations after absorption.
    if (n.kind == PieceKind::B || n.kind == PieceKind::Cone) {
        if ((rules & kMergeDeltaIntoOuter)) {
            // Wedges lying directly in the holes of this piece merge into it.
            bool has_direct_wedge = false;
            for (auto& c : n.children)
                if (c.kind == PieceKind::D && c.is_delta && c.rate == n.rate)
                    has_direct_wedge = true;
            if (has_direct_wedge) {
                std::vector<CNode> kept;
                for (auto& c : n.children) {
                    if (c.kind == PieceKind::D && c.is_delta && c.rate == n.rate) {
                        n.is_delta = true;
                        n.contains_curve = true;
                        changed = true;
                    } else {
                        kept.push_back(std::move(c));
                    }
                }
                n.children = std::move(kept);
            }
        }
        if ((rules & kMergeEmptyD) && n.kind == PieceKind::B && n.children.empty()) {
            // Disk fiber: the piece is a D(q).
            n.kind = PieceKind::D;
            changed = true;
        }
    }
    return changed;
}

}  // namespace detail

/// Fixpoint of the rewrite system restricted to the requested rules.
inline CarrouselTree amalgamate(CarrouselTree tree, unsigned rules) {
    while (detail::amalgamate_pass(tree, rules, true)) {
    }
    return tree;
}

/// Plain carrousel: topology-minimal truncation, empty disks absorbed.
inline CarrouselTree plain_carrousel(const std::vector<PuiseuxBranch>& branches) {
    TruncationSpec spec;
    spec.mode = TruncationMode::Plain;
    return amalgamate(build_unamalgamated(branches, spec), kMergeEmptyD);
}

/// Intermediate carrousel: truncation at the polar rates, delta-wedges merged
/// outward into delta-pieces, then empty disks absorbed iteratively.
inline CarrouselTree intermediate_carrousel(const std::vector<PuiseuxBranch>& branches,
                                            const std::vector<Rational>& polar_rates) {
    TruncationSpec spec;
    spec.mode = TruncationMode::Intermediate;
    spec.polar_rates = polar_rates;
    CarrouselTree t = build_unamalgamated(branches, spec);
    t = amalgamate(std::move(t), kMergeDeltaIntoOuter | kCollapseAChains);
    t = amalgamate(std::move(t), kMergeEmptyD | kCollapseAChains | kMergeConical);
    return t;
}

/// Complete carrousel: polar-rate-and-topology truncation, empty disks
/// absorbed iteratively; delta-wedges stay as leaves.
inline CarrouselTree complete_carrousel(const std::vector<PuiseuxBranch>& branches,
                                        const std::vector<Rational>& polar_rates) {
    TruncationSpec spec;
    spec.mode = TruncationMode::Complete;
    spec.polar_rates = polar_rates;
    CarrouselTree t = build_unamalgamated(branches, spec);
    return amalgamate(std::move(t), kMergeEmptyD | kCollapseAChains | kMergeConical);
}

/// Canonical key; isomorphism-relevant data only (kinds, rates, flags,
/// multiset of child keys). Branch ids are deliberately excluded. A-pieces
/// are spliced out: their rates repeat the neighbouring B-rates, so the
/// section combinatorics live entirely in the B/D nesting.
inline std::string canonical_key(const CNode& n) {
    if (n.kind == PieceKind::A && n.children.size() == 1) return canonical_key(n.children.front());
    std::ostringstream os;
    switch (n.kind) {
        case PieceKind::Cone: os << "C"; break;
        case PieceKind::B: os << "B" << n.rate.str(); break;
        case PieceKind::A: os << "A" << n.rate.str() << "," << n.rate2.str(); break;
        case PieceKind::D: os << "D" << n.rate.str(); break;
    }
    os << (n.contains_curve ? "c" : "") << (n.is_delta ? "d" : "") << (n.is_polar ? "p" : "");
    std::vector<std::string> keys;
    for (const auto& c : n.children) keys.push_back(canonical_key(c));
    std::sort(keys.begin(), keys.end());
    os << "(";
    for (const auto& k : keys) os << k << ";";
    os << ")";
    return os.str();
}

/// Rate-and-flag preserving rooted-tree isomorphism.
inline bool tree_isomorphic(const CNode& a, const CNode& b) {
    return canonical_key(a) == canonical_key(b);
}

/// Section skeleton: A-pieces and empty disks dropped, annular collar B's
/// spliced out. What remains is the nested-disk combinatorics (Cone root,
/// B nodes, curve-carrying D leaves).
inline CNode section_skeleton(const CNode& n) {
    CNode out;
    out.kind = n.kind;
    out.rate = n.rate;
    out.rate2 = n.rate;
    out.contains_curve = n.contains_curve;
    out.is_delta = n.is_delta;
    out.is_polar = n.is_polar;
    out.sheets = n.sheets;
    std::function<void(const CNode&, CNode&)> gather = [&](const CNode& src, CNode& dst) {
        for (const auto& c : src.children) {
            if (c.kind == PieceKind::A) {
                gather(c, dst);  // splice collars
                continue;
            }
            if (c.kind == PieceKind::D && !c.contains_curve) continue;  // empty disk
            CNode sub = section_skeleton(c);
            if (sub.kind == PieceKind::B) {
                // Count effective children after stripping empties.
                if (sub.children.empty()) {
                    sub.kind = PieceKind::D;  // disk fiber
                    dst.children.push_back(std::move(sub));
                    continue;
                }
                if (sub.children.size() == 1) {
                    // Annular fiber: a collar; splice through.
                    dst.children.push_back(std::move(sub.children.front()));
                    continue;
                }
            }
            dst.children.push_back(std::move(sub));
        }
    };
    gather(n, out);
    return out;
}

/// Rebuild of a topological carrousel section from a contact matrix
/// (the inductive innermost-to-outermost gluing).
inline CarrouselTree reconstruct_from_contacts(const ContactMatrix& m) {
    if (!is_ultrametric(m)) throw UltrametricViolation();
    struct Cluster {
        CNode node;
        std::size_t rep;  // representative sheet index
    };
    std::vector<Cluster> clusters;
    for (std::size_t i = 0; i < m.mu; ++i) {
        CNode leaf = CNode::d(Rational(1));
        leaf.contains_curve = true;
        leaf.sheets.insert(m.sheet_labels.empty() ? SheetId{i, 0} : m.sheet_labels[i]);
        clusters.push_back({std::move(leaf), i});
    }
    std::vector<Rational> qs;
    for (std::size_t j = 0; j < m.mu; ++j)
        for (std::size_t k = j + 1; k < m.mu; ++k)
            if (std::find(qs.begin(), qs.end(), m.q[j][k]) == qs.end()) qs.push_back(m.q[j][k]);
    std::sort(qs.begin(), qs.end(), [](const Rational& a, const Rational& b) { return b < a; });

    for (const Rational& q : qs) {
        // Union clusters whose representatives have contact exactly q.
        std::vector<int> comp(clusters.size(), -1);
        int ncomp = 0;
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            if (comp[i] >= 0) continue;
            comp[i] = ncomp;
            // BFS over the "contact == q" relation
            std::vector<std::size_t> stack{i};
            while (!stack.empty()) {
                std::size_t u = stack.back();
                stack.pop_back();
                for (std::size_t v = 0; v < clusters.size(); ++v) {
                    if (comp[v] >= 0) continue;
                    if (m.q[clusters[u].rep][clusters[v].rep] == q) {
                        comp[v] = ncomp;
                        stack.push_back(v);
                    }
                }
            }
            ++ncomp;
        }
        std::vector<Cluster> next(static_cast<std::size_t>(ncomp));
        std::vector<int> size(static_cast<std::size_t>(ncomp), 0);
        for (std::size_t i = 0; i < clusters.size(); ++i) ++size[static_cast<std::size_t>(comp[i])];
        std::vector<bool> init(static_cast<std::size_t>(ncomp), false);
        for (std::size_t i = 0; i < clusters.size(); ++i) {
            auto ci = static_cast<std::size_t>(comp[i]);
            if (size[ci] == 1) {
                next[ci] = std::move(clusters[i]);
                init[ci] = true;
                continue;
            }
            if (!init[ci]) {
                CNode b = CNode::b(q);
                b.contains_curve = true;
                next[ci] = {std::move(b), clusters[i].rep};
                init[ci] = true;
            }
            // Leaves joined at rate q sit in D(q) holes of the new disk.
            if (clusters[i].node.kind == PieceKind::D) clusters[i].node.rate = q;
            next[ci].node.sheets.insert(clusters[i].node.sheets.begin(),
                                        clusters[i].node.sheets.end());
            next[ci].node.children.push_back(std::move(clusters[i].node));
        }
        clusters = std::move(next);
    }

    CNode root = CNode::cone();
    root.contains_curve = m.mu > 0;
    if (clusters.size() == 1 && clusters[0].node.kind == PieceKind::B &&
        clusters[0].node.rate == Rational(1)) {
        root.children = std::move(clusters[0].node.children);
        root.sheets = std::move(clusters[0].node.sheets);
    } else {
        for (auto& c : clusters) {
            root.sheets.insert(c.node.sheets.begin(), c.node.sheets.end());
            root.children.push_back(std::move(c.node));
        }
    }
    return root;
}

namespace detail {

inline void collect_rates(const CNode& n, std::set<Rational>& out) {
    out.insert(n.rate);
    if (n.kind == PieceKind::A) out.insert(n.rate2);
    for (const auto& c : n.children) collect_rates(c, out);
}

struct ClusterInfo {
    std::set<SheetId> sheets;
    Rational rate;
    bool internal;
};

inline void collect_clusters(const CNode& n, const CNode* parent,
                             const std::set<Rational>* keep,
                             Rational effective_parent_rate,
                             std::vector<ClusterInfo>& out) {
    Rational eff = n.rate;
    if (keep && keep->find(eff) == keep->end()) eff = effective_parent_rate;
    if (n.kind != PieceKind::A && n.contains_curve) {
        out.push_back({n.sheets, eff, !n.children.empty() || n.kind != PieceKind::D});
    }
    for (const auto& c : n.children)
        collect_clusters(c, &n, keep, n.kind == PieceKind::A ? effective_parent_rate : eff, out);
    (void)parent;
}

}  // namespace detail

/// True iff `fine` refines `coarse`: every cluster of the coarse tree occurs
/// in the fine tree, carrying the same rate once rates absent from the coarse
/// tree are forgotten (walked up to the enclosing kept piece).
inline bool refines(const CNode& fine, const CNode& coarse) {
    CNode fs = section_skeleton(fine);
    CNode cs = section_skeleton(coarse);
    if (fs.sheets != cs.sheets) return false;
    std::set<Rational> keep;
    detail::collect_rates(cs, keep);
    std::vector<detail::ClusterInfo> fine_clusters, coarse_clusters;
    detail::collect_clusters(fs, nullptr, &keep, Rational(1), fine_clusters);
    detail::collect_clusters(cs, nullptr, nullptr, Rational(1), coarse_clusters);
    for (const auto& cc : coarse_clusters) {
        bool found = false;
        for (const auto& fc : fine_clusters) {
            if (fc.sheets == cc.sheets && fc.rate == cc.rate) {
                found = true;
                break;
            }
        }
        if (!found) return false;
    }
    return true;
}

/// Structural sanity: rates never decrease from parent to child, A-pieces
/// have one child, D-pieces are leaves, delta-wedges carry one branch.
inline bool tree_invariants_hold(const CNode& n, const Rational* parent_rate = nullptr) {
    if (parent_rate) {
        if (n.rate < *parent_rate) return false;
    }
    if (n.kind == PieceKind::A) {
        if (n.rate2 < n.rate) return false;
        if (n.children.size() != 1) return false;
    }
    if (n.kind == PieceKind::D && !n.children.empty()) return false;
    if (n.kind == PieceKind::D && n.is_delta) {
        std::set<std::size_t> ids;
        for (const auto& s : n.sheets) ids.insert(s.first);
        if (ids.size() != 1) return false;
    }
    const Rational inner = (n.kind == PieceKind::A) ? n.rate2 : n.rate;
    for (const auto& c : n.children)
        if (!tree_invariants_hold(c, &inner)) return false;
    return true;
}

}  // namespace carrousel
