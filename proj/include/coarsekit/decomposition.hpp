#pragma once

#include <algorithm>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarse.hpp"
#include "complexes.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "length.hpp"
#include "spaces.hpp"

namespace coarsekit {

// ---------------------------------------------------------------------------
// Middle-third edge refinement
// ---------------------------------------------------------------------------

/// Stellar refinement that cuts every edge of a complex into thirds. Fine
/// vertices 0..n-1 are the coarse vertices; each coarse edge [a, b] (a < b)
/// gains a point near a and a point near b.
struct EdgeRefinement {
    ComplexPtr coarse;
    ComplexPtr fine;
    std::vector<std::size_t> vertex_carrier;   ///< per fine vertex: coarse simplex index
    std::vector<std::size_t> simplex_carrier;  ///< per fine simplex: coarse simplex index
    std::map<std::size_t, std::pair<std::size_t, std::size_t>> cut_points;  ///< coarse edge -> (near a, near b)

    /// The subdivision of a coarse subcomplex inside the fine complex.
    Subcomplex lift(const Subcomplex& s) const
    {
        if (s.ambient() != coarse) throw PreconditionError("subcomplex is not taken in the refined complex's base");
        std::vector<char> mask(fine->simplex_count(), 0);
        for (std::size_t i = 0; i < mask.size(); ++i) mask[i] = s.has(simplex_carrier[i]) ? 1 : 0;
        return Subcomplex::from_mask(fine, std::move(mask));
    }

    std::size_t fine_edge(std::size_t a, std::size_t b) const { return *fine->find(make_simplex({a, b})); }
};

namespace detail {

// replaces every generator containing u and w by its two halves through x
inline void stellar_split(std::vector<Simplex>& gens, std::size_t u, std::size_t w, std::size_t x)
{
    std::vector<Simplex> out;
    out.reserve(gens.size() + 8);
    for (auto& g : gens) {
        bool hu = std::binary_search(g.begin(), g.end(), u), hw = std::binary_search(g.begin(), g.end(), w);
        if (!(hu && hw)) {
            out.push_back(std::move(g));
            continue;
        }
        for (auto drop : {u, w}) {
            Simplex h;
            for (auto v : g)
                if (v != drop) h.push_back(v);
            h.push_back(x);
            out.push_back(make_simplex(std::move(h)));
        }
    }
    gens = std::move(out);
}

}  // namespace detail

inline EdgeRefinement refine_edges_in_thirds(const ComplexPtr& k)
{
    EdgeRefinement r;
    r.coarse = k;
    std::vector<std::string> labels = k->labels();
    for (std::size_t v = 0; v < k->vertex_count(); ++v) r.vertex_carrier.push_back(*k->find({v}));
    std::vector<Simplex> gens;
    for (auto i : k->maximal_simplices()) gens.push_back(k->simplex(i));
    for (std::size_t e = 0; e < k->simplex_count(); ++e) {
        const auto& s = k->simplex(e);
        if (s.size() != 2) continue;
        std::size_t near_a = labels.size();
        labels.push_back(k->simplex_label(s) + "@1/3");
        r.vertex_carrier.push_back(e);
        detail::stellar_split(gens, s[0], s[1], near_a);
        std::size_t near_b = labels.size();
        labels.push_back(k->simplex_label(s) + "@2/3");
        r.vertex_carrier.push_back(e);
        detail::stellar_split(gens, near_a, s[1], near_b);
        r.cut_points[e] = {near_a, near_b};
    }
    r.fine = SimplicialComplex::from_generators(std::move(labels), gens);
    for (const auto& s : r.fine->simplices()) {
        Simplex c;
        for (auto v : s) {
            const auto& cv = k->simplex(r.vertex_carrier[v]);
            c.insert(c.end(), cv.begin(), cv.end());
        }
        auto idx = k->find(make_simplex(std::move(c)));
        if (!idx) throw ConstructionFailure("refined simplex has no carrier in the base complex");
        r.simplex_carrier.push_back(*idx);
    }
    return r;
}

// ---------------------------------------------------------------------------
// Binary decomposition trees
// ---------------------------------------------------------------------------

struct TreeNode {
    std::string name;
    Subcomplex label;
    std::vector<std::size_t> children;  ///< empty or two entries

    bool is_leaf() const { return children.empty(); }
};

struct DecompositionTree {
    ComplexPtr ambient;
    std::vector<TreeNode> nodes;
    std::size_t root = 0;

    std::size_t add_leaf(std::string name, Subcomplex label)
    {
        nodes.push_back({std::move(name), std::move(label), {}});
        return nodes.size() - 1;
    }

    std::size_t add_fork(std::string name, std::size_t first, std::size_t second)
    {
        Subcomplex label = nodes.at(first).label | nodes.at(second).label;
        nodes.push_back({std::move(name), std::move(label), {first, second}});
        return nodes.size() - 1;
    }

    std::optional<std::size_t> find(const std::string& name) const
    {
        for (std::size_t i = 0; i < nodes.size(); ++i)
            if (nodes[i].name == name) return i;
        return std::nullopt;
    }

    const TreeNode& node(const std::string& name) const
    {
        auto i = find(name);
        if (!i) throw PreconditionError("no tree node named '" + name + "'");
        return nodes[*i];
    }
};

struct TreeCheck {
    bool ok = true;
    std::optional<std::size_t> node;  ///< first failing node
    std::string reason;
};

/// Shape, root = whole complex, fork = union of its two successors.
inline TreeCheck verify_tree_labels(const DecompositionTree& t)
{
    auto fail = [](std::size_t n, std::string why) { return TreeCheck{false, n, std::move(why)}; };
    if (t.root >= t.nodes.size()) return TreeCheck{false, std::nullopt, "root index out of range"};
    std::vector<int> parents(t.nodes.size(), 0);
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const auto& n = t.nodes[i];
        if (n.label.ambient() != t.ambient) return fail(i, "label lives in a different complex");
        if (n.children.size() != 0 && n.children.size() != 2) return fail(i, "node has one successor or more than two");
        for (auto c : n.children) {
            if (c >= t.nodes.size() || c == i) return fail(i, "successor index out of range");
            ++parents[c];
        }
    }
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        if (i == t.root && parents[i] != 0) return fail(i, "root has a parent");
        if (i != t.root && parents[i] != 1) return fail(i, "node is not reached exactly once from the root");
    }
    std::vector<char> seen(t.nodes.size(), 0);
    std::vector<std::size_t> todo{t.root};
    while (!todo.empty()) {
        auto i = todo.back();
        todo.pop_back();
        if (seen[i]) return fail(i, "tree contains a cycle");
        seen[i] = 1;
        for (auto c : t.nodes[i].children) todo.push_back(c);
    }
    for (std::size_t i = 0; i < t.nodes.size(); ++i)
        if (!seen[i]) return fail(i, "node is not reached from the root");
    if (!(t.nodes[t.root].label == Subcomplex::whole(t.ambient))) return fail(t.root, "root label is not the whole complex");
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const auto& n = t.nodes[i];
        if (n.is_leaf()) continue;
        if (!(n.label == (t.nodes[n.children[0]].label | t.nodes[n.children[1]].label)))
            return fail(i, "fork label differs from the union of its successors");
    }
    return {};
}

// ---------------------------------------------------------------------------
// Canonical construction
// ---------------------------------------------------------------------------

/// Pieces at one simplex dimension k, all inside the refined complex.
struct CanonicalLevel {
    int dimension = 0;
    Subcomplex stars;           ///< closed stars about barycentres of k-simplices
    Subcomplex with_skeleton;   ///< stars plus the 1-skeleton of the second subdivision
    Subcomplex free_edges;      ///< edges of the second subdivision outside the stars
    Subcomplex vertex_stars;    ///< outer thirds of the free edges
    Subcomplex edge_segments;   ///< middle thirds of the free edges
};

struct CanonicalDecomposition {
    StarsDecomposition stars;
    EdgeRefinement refinement;
    std::vector<CanonicalLevel> levels;
    std::vector<Subcomplex> accumulated;  ///< accumulated[k] = union of with_skeleton for 0..k
    std::vector<std::size_t> accumulated_nodes;  ///< tree node holding accumulated[k]
    std::vector<std::size_t> level_nodes;        ///< tree node holding with_skeleton (or the stars leaf)
    DecompositionTree tree;

    const ComplexPtr& complex() const { return refinement.fine; }
};

inline std::string node_name(const std::string& role, int k) { return role + "_" + std::to_string(k); }

/// Canonical binary decomposition of K:
///   accumulated_k  = accumulated_{k-1} ∪ stars_skeleton_k,  accumulated_0 = stars_skeleton_0
///   stars_skeleton_k = stars_k ∪ free_edges_k
///   free_edges_k   = vertex_stars_k ∪ edge_segments_k
/// A level with no free edges contributes the leaf stars_k directly.
inline CanonicalDecomposition build_canonical_tree(const ComplexPtr& k)
{
    if (k->dimension() < 0) throw PreconditionError("cannot decompose an empty complex");
    CanonicalDecomposition out{stars_decomposition(k), {}, {}, {}, {}, {}, {}};
    const auto& k2 = out.stars.subdivision.complex();
    out.refinement = refine_edges_in_thirds(k2);
    const auto& r = out.refinement;
    auto skeleton = r.lift(one_skeleton_of(k2));

    auto& tree = out.tree;
    tree.ambient = r.fine;
    std::optional<std::size_t> acc;
    for (const auto& fam : out.stars.families) {
        CanonicalLevel lv;
        lv.dimension = fam.dimension;
        lv.stars = r.lift(fam.united);
        lv.with_skeleton = lv.stars | skeleton;
        std::vector<std::size_t> free, outer, middle;
        for (std::size_t e = 0; e < k2->simplex_count(); ++e) {
            if (k2->simplex(e).size() != 2 || fam.united.has(e)) continue;
            free.push_back(e);
            const auto& s = k2->simplex(e);
            auto [p, q] = r.cut_points.at(e);
            outer.push_back(r.fine_edge(s[0], p));
            outer.push_back(r.fine_edge(q, s[1]));
            middle.push_back(r.fine_edge(p, q));
        }
        lv.free_edges = r.lift(Subcomplex::closure(k2, free));
        lv.vertex_stars = Subcomplex::closure(r.fine, outer);
        lv.edge_segments = Subcomplex::closure(r.fine, middle);

        const int d = fam.dimension;
        std::size_t stars_leaf = tree.add_leaf(node_name("stars", d), lv.stars);
        std::size_t piece = stars_leaf;
        if (!free.empty()) {
            std::size_t v = tree.add_leaf(node_name("vertex_stars", d), lv.vertex_stars);
            std::size_t e = tree.add_leaf(node_name("edge_segments", d), lv.edge_segments);
            std::size_t g = tree.add_fork(node_name("free_edges", d), v, e);
            piece = tree.add_fork(node_name("stars_skeleton", d), stars_leaf, g);
        }
        acc = acc ? tree.add_fork(node_name("accumulated", d), *acc, piece) : piece;
        out.level_nodes.push_back(piece);
        out.accumulated_nodes.push_back(*acc);
        out.accumulated.push_back(tree.nodes[*acc].label);
        out.levels.push_back(std::move(lv));
    }
    tree.root = *acc;
    auto check = verify_tree_labels(tree);
    if (!check.ok)
        throw ConstructionFailure("canonical tree fails its label laws at node '" + tree.nodes[check.node.value_or(0)].name +
                                  "': " + check.reason);
    return out;
}

// ---------------------------------------------------------------------------
// Admissibility premises
// ---------------------------------------------------------------------------

struct ForkReport {
    std::size_t node = 0;
    std::vector<ExcisiveRow<long>> excisive;  ///< radii and bounds in hops of the ambient complex
    bool excisive_ok = true;
    bool first_relatively_connected = true;
    bool second_relatively_connected = true;
    bool meet_relatively_connected = true;
    std::optional<DistortionReport> first_distortion, second_distortion, meet_distortion;
    int meet_dimension = -1;
};

enum class LeafKind { finite, separated_family };

struct LeafReport {
    std::size_t node = 0;
    LeafKind kind = LeafKind::finite;
    std::size_t members = 0;                                   ///< connected components of the leaf
    SphericalLength separation = SphericalLength::infinity();  ///< min ambient distance between members
};

struct AdmissibilityReport {
    TreeCheck labels;
    std::vector<ForkReport> forks;
    std::vector<LeafReport> leaves;

    const ForkReport* fork(std::size_t node) const
    {
        for (const auto& f : forks)
            if (f.node == node) return &f;
        return nullptr;
    }
    const LeafReport* leaf(std::size_t node) const
    {
        for (const auto& l : leaves)
            if (l.node == node) return &l;
        return nullptr;
    }
};

namespace detail {

// excisive profile of two vertex sets in the hop metric, one ambient component at a time
inline std::vector<ExcisiveRow<long>> excisive_in_components(const std::vector<std::vector<long>>& hops,
                                                             const std::vector<long>& comp, const std::vector<char>& e,
                                                             const std::vector<char>& f, const std::vector<long>& scales)
{
    std::vector<ExcisiveRow<long>> rows;
    for (auto s : scales) rows.push_back({s, true, 0});
    std::map<long, std::vector<std::size_t>> pieces;
    for (std::size_t v = 0; v < e.size(); ++v)
        if (e[v] || f[v]) pieces[comp[v]].push_back(v);
    for (const auto& [c, verts] : pieces) {
        const std::size_t n = verts.size();
        std::vector<std::string> ids;
        std::vector<long> m(n * n);
        PointSet pe, pf;
        for (std::size_t i = 0; i < n; ++i) {
            ids.push_back(std::to_string(verts[i]));
            if (e[verts[i]]) pe.push_back(i);
            if (f[verts[i]]) pf.push_back(i);
            for (std::size_t j = 0; j < n; ++j) m[i * n + j] = hops[verts[i]][verts[j]];
        }
        MetricSpace<long> space(std::move(ids), std::move(m), {}, MetricSpace<long>::Validation::trusted);
        auto part = excisive_profile(space, pe, pf, scales);
        for (std::size_t i = 0; i < rows.size(); ++i) {
            rows[i].ok = rows[i].ok && part[i].ok;
            rows[i].minimal = std::max(rows[i].minimal, part[i].minimal);
        }
    }
    return rows;
}

inline std::optional<DistortionReport> distortion_if_nonempty(const Subcomplex& s)
{
    if (s.empty()) return std::nullopt;
    return distortion(s);
}

}  // namespace detail

/// Checkable premises at every node: excisiveness, relative connectedness,
/// distortion and meet dimension at forks; separation of the pieces at leaves.
/// Scales are hop counts in the ambient complex.
inline AdmissibilityReport admissibility_report(const DecompositionTree& t, const std::vector<long>& scales)
{
    for (auto s : scales)
        if (s < 0) throw PreconditionError("negative excisiveness scale");
    AdmissibilityReport rep;
    rep.labels = verify_tree_labels(t);
    if (!rep.labels.ok) throw PreconditionError("tree labels fail verification: " + rep.labels.reason);
    const auto& adj = t.ambient->one_skeleton();
    auto hops = hop_matrix(adj);
    auto comp = graph::components(adj);
    for (std::size_t i = 0; i < t.nodes.size(); ++i) {
        const auto& n = t.nodes[i];
        if (!n.is_leaf()) {
            const auto& y = t.nodes[n.children[0]].label;
            const auto& z = t.nodes[n.children[1]].label;
            auto meet = y & z;
            ForkReport f;
            f.node = i;
            f.excisive = detail::excisive_in_components(hops, comp, y.vertex_mask(), z.vertex_mask(), scales);
            f.excisive_ok = std::all_of(f.excisive.begin(), f.excisive.end(), [](const auto& r) { return r.ok; });
            f.first_relatively_connected = relatively_connected(y);
            f.second_relatively_connected = relatively_connected(z);
            f.meet_relatively_connected = relatively_connected(meet);
            f.first_distortion = detail::distortion_if_nonempty(y);
            f.second_distortion = detail::distortion_if_nonempty(z);
            f.meet_distortion = detail::distortion_if_nonempty(meet);
            f.meet_dimension = meet.dimension();
            rep.forks.push_back(std::move(f));
            continue;
        }
        LeafReport l;
        l.node = i;
        auto vmask = n.label.vertex_mask();
        auto own = graph::components(n.label.skeleton(), &vmask);
        std::map<long, std::vector<std::size_t>> members;
        for (std::size_t v = 0; v < vmask.size(); ++v)
            if (vmask[v]) members[own[v]].push_back(v);
        l.members = members.size();
        l.kind = l.members <= 1 ? LeafKind::finite : LeafKind::separated_family;
        long best = -1;
        for (const auto& [ca, va] : members)
            for (const auto& [cb, vb] : members) {
                if (cb <= ca) continue;
                for (auto a : va)
                    for (auto b : vb) {
                        long h = hops[a][b];
                        if (h != graph::unreachable && (best < 0 || h < best)) best = h;
                    }
            }
        if (best >= 0) l.separation = SphericalLength::quarter_turns(Rational(best));
        rep.leaves.push_back(l);
    }
    return rep;
}

}  // namespace coarsekit
