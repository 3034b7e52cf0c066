#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <numeric>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "length.hpp"
#include "spaces.hpp"

namespace coarsekit {

/// Sorted vertex indices.
using Simplex = std::vector<std::size_t>;

class SimplicialComplex;
using ComplexPtr = std::shared_ptr<const SimplicialComplex>;

/// Finite abstract simplicial complex. Simplices are stored downward closed
/// and ordered by dimension, then lexicographically.
class SimplicialComplex {
public:
    static constexpr std::size_t max_generator_size = 16;

    /// Closure of the given generating simplices. Every vertex becomes a 0-simplex.
    static ComplexPtr from_generators(std::vector<std::string> labels, const std::vector<Simplex>& generators)
    {
        return std::make_shared<const SimplicialComplex>(std::move(labels), generators);
    }

    SimplicialComplex(std::vector<std::string> labels, const std::vector<Simplex>& generators) : labels_(std::move(labels))
    {
        for (std::size_t v = 0; v < labels_.size(); ++v)
            if (!label_index_.emplace(labels_[v], v).second) throw MalformedInput("duplicate vertex label '" + labels_[v] + "'");
        std::set<Simplex> all;
        for (std::size_t v = 0; v < labels_.size(); ++v) all.insert({v});
        for (Simplex g : generators) {
            std::sort(g.begin(), g.end());
            g.erase(std::unique(g.begin(), g.end()), g.end());
            if (g.empty()) continue;
            if (g.back() >= labels_.size()) throw MalformedInput("simplex references an unknown vertex");
            if (g.size() > max_generator_size)
                throw CapacityError("simplex with " + std::to_string(g.size()) + " vertices exceeds the closure cap");
            if (all.count(g)) continue;
            const std::uint32_t n = static_cast<std::uint32_t>(g.size());
            for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
                Simplex f;
                for (std::uint32_t i = 0; i < n; ++i)
                    if (mask >> i & 1) f.push_back(g[i]);
                all.insert(std::move(f));
            }
        }
        simplices_.assign(all.begin(), all.end());
        std::stable_sort(simplices_.begin(), simplices_.end(),
                         [](const Simplex& a, const Simplex& b) { return a.size() < b.size(); });
        for (std::size_t i = 0; i < simplices_.size(); ++i) index_.emplace(simplices_[i], i);
        skeleton_.assign(labels_.size(), {});
        for (const auto& s : simplices_)
            if (s.size() == 2) {
                skeleton_[s[0]].push_back(s[1]);
                skeleton_[s[1]].push_back(s[0]);
            }
        for (auto& nb : skeleton_) std::sort(nb.begin(), nb.end());
    }

    std::size_t vertex_count() const { return labels_.size(); }
    const std::vector<std::string>& labels() const { return labels_; }
    const std::string& label(std::size_t v) const { return labels_.at(v); }

    std::size_t vertex_index(const std::string& label) const
    {
        auto it = label_index_.find(label);
        if (it == label_index_.end()) throw PreconditionError("unknown vertex '" + label + "'");
        return it->second;
    }

    const std::vector<Simplex>& simplices() const { return simplices_; }
    std::size_t simplex_count() const { return simplices_.size(); }
    const Simplex& simplex(std::size_t i) const { return simplices_.at(i); }

    std::optional<std::size_t> find(const Simplex& s) const
    {
        auto it = index_.find(s);
        if (it == index_.end()) return std::nullopt;
        return it->second;
    }

    bool contains(const Simplex& s) const { return index_.count(s) > 0; }

    int dimension() const { return simplices_.empty() ? -1 : static_cast<int>(simplices_.back().size()) - 1; }

    std::size_t count_of_dimension(int d) const
    {
        std::size_t c = 0;
        for (const auto& s : simplices_)
            if (static_cast<int>(s.size()) == d + 1) ++c;
        return c;
    }

    /// Simplices that are not a proper face of another simplex.
    std::vector<std::size_t> maximal_simplices() const
    {
        std::vector<char> covered(simplices_.size(), 0);
        for (const auto& s : simplices_) {
            if (s.size() < 2) continue;
            for (std::size_t drop = 0; drop < s.size(); ++drop) {
                Simplex f;
                for (std::size_t i = 0; i < s.size(); ++i)
                    if (i != drop) f.push_back(s[i]);
                covered[index_.at(f)] = 1;
            }
        }
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < simplices_.size(); ++i)
            if (!covered[i]) out.push_back(i);
        return out;
    }

    const graph::Adjacency& one_skeleton() const { return skeleton_; }

    std::string simplex_label(const Simplex& s) const
    {
        std::string out = "[";
        for (std::size_t i = 0; i < s.size(); ++i) out += (i ? "," : "") + labels_[s[i]];
        return out + "]";
    }

private:
    std::vector<std::string> labels_;
    std::unordered_map<std::string, std::size_t> label_index_;
    std::vector<Simplex> simplices_;
    std::map<Simplex, std::size_t> index_;
    graph::Adjacency skeleton_;
};

inline Simplex make_simplex(Simplex s)
{
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

inline bool is_face(const Simplex& f, const Simplex& s) { return std::includes(s.begin(), s.end(), f.begin(), f.end()); }

// ---------------------------------------------------------------------------
// Subcomplexes
// ---------------------------------------------------------------------------

/// Downward-closed set of simplices of an ambient complex.
class Subcomplex {
public:
    Subcomplex() = default;
    explicit Subcomplex(ComplexPtr ambient) : ambient_(std::move(ambient)), in_(ambient_->simplex_count(), 0) {}

    /// Closure of the given simplices (by index in the ambient complex).
    static Subcomplex closure(ComplexPtr ambient, const std::vector<std::size_t>& simplices)
    {
        Subcomplex s(std::move(ambient));
        for (auto i : simplices) s.add_closed(i);
        return s;
    }

    static Subcomplex whole(ComplexPtr ambient)
    {
        Subcomplex s(std::move(ambient));
        std::fill(s.in_.begin(), s.in_.end(), 1);
        return s;
    }

    /// Subcomplex from a per-simplex membership mask; the mask must be downward closed.
    static Subcomplex from_mask(ComplexPtr ambient, std::vector<char> mask)
    {
        if (mask.size() != ambient->simplex_count()) throw PreconditionError("mask size does not match the complex");
        Subcomplex s(std::move(ambient));
        s.in_ = std::move(mask);
        if (!s.is_downward_closed()) throw PreconditionError("mask is not downward closed");
        return s;
    }

    const ComplexPtr& ambient() const { return ambient_; }
    bool has(std::size_t simplex_index) const { return in_.at(simplex_index) != 0; }
    bool has_vertex(std::size_t v) const { return in_.at(v) != 0; }  // vertices come first in simplex order
    bool empty() const { return std::none_of(in_.begin(), in_.end(), [](char c) { return c != 0; }); }
    const std::vector<char>& mask() const { return in_; }

    std::vector<std::size_t> simplex_indices() const
    {
        std::vector<std::size_t> out;
        for (std::size_t i = 0; i < in_.size(); ++i)
            if (in_[i]) out.push_back(i);
        return out;
    }

    std::vector<std::size_t> vertices() const
    {
        std::vector<std::size_t> out;
        for (std::size_t v = 0; v < ambient_->vertex_count(); ++v)
            if (in_[v]) out.push_back(v);
        return out;
    }

    std::size_t size() const { return static_cast<std::size_t>(std::count(in_.begin(), in_.end(), 1)); }

    int dimension() const
    {
        int d = -1;
        for (std::size_t i = 0; i < in_.size(); ++i)
            if (in_[i]) d = std::max(d, static_cast<int>(ambient_->simplex(i).size()) - 1);
        return d;
    }

    void add_closed(std::size_t simplex_index)
    {
        const auto& s = ambient_->simplex(simplex_index);
        const std::uint32_t n = static_cast<std::uint32_t>(s.size());
        if (in_[simplex_index]) return;
        for (std::uint32_t mask = 1; mask < (1u << n); ++mask) {
            Simplex f;
            for (std::uint32_t i = 0; i < n; ++i)
                if (mask >> i & 1) f.push_back(s[i]);
            in_[*ambient_->find(f)] = 1;
        }
    }

    Subcomplex& operator|=(const Subcomplex& o)
    {
        same_ambient(o);
        for (std::size_t i = 0; i < in_.size(); ++i) in_[i] = in_[i] || o.in_[i];
        return *this;
    }

    friend Subcomplex operator|(Subcomplex a, const Subcomplex& b) { return a |= b; }

    friend Subcomplex operator&(const Subcomplex& a, const Subcomplex& b)
    {
        a.same_ambient(b);
        Subcomplex out(a.ambient_);
        for (std::size_t i = 0; i < a.in_.size(); ++i) out.in_[i] = a.in_[i] && b.in_[i];
        return out;
    }

    bool subset_of(const Subcomplex& o) const
    {
        same_ambient(o);
        for (std::size_t i = 0; i < in_.size(); ++i)
            if (in_[i] && !o.in_[i]) return false;
        return true;
    }

    friend bool operator==(const Subcomplex& a, const Subcomplex& b) { return a.ambient_ == b.ambient_ && a.in_ == b.in_; }

    bool is_downward_closed() const
    {
        for (std::size_t i = 0; i < in_.size(); ++i) {
            if (!in_[i]) continue;
            const auto& s = ambient_->simplex(i);
            for (std::size_t drop = 0; s.size() > 1 && drop < s.size(); ++drop) {
                Simplex f;
                for (std::size_t k = 0; k < s.size(); ++k)
                    if (k != drop) f.push_back(s[k]);
                if (!in_[*ambient_->find(f)]) return false;
            }
        }
        return true;
    }

    /// 1-skeleton adjacency restricted to this subcomplex (ambient vertex indices).
    graph::Adjacency skeleton() const
    {
        graph::Adjacency adj(ambient_->vertex_count());
        for (std::size_t i = 0; i < in_.size(); ++i) {
            if (!in_[i]) continue;
            const auto& s = ambient_->simplex(i);
            if (s.size() != 2) continue;
            adj[s[0]].push_back(s[1]);
            adj[s[1]].push_back(s[0]);
        }
        return adj;
    }

    std::vector<char> vertex_mask() const
    {
        return std::vector<char>(in_.begin(), in_.begin() + static_cast<long>(ambient_->vertex_count()));
    }

private:
    void same_ambient(const Subcomplex& o) const
    {
        if (ambient_ != o.ambient_) throw PreconditionError("subcomplexes of different complexes");
    }

    ComplexPtr ambient_;
    std::vector<char> in_;
};

/// Closed star: all simplices containing v together with their faces.
inline Subcomplex star(const ComplexPtr& k, std::size_t v)
{
    if (v >= k->vertex_count()) throw PreconditionError("unknown vertex index");
    std::vector<std::size_t> with_v;
    for (std::size_t i = 0; i < k->simplex_count(); ++i) {
        const auto& s = k->simplex(i);
        if (std::binary_search(s.begin(), s.end(), v)) with_v.push_back(i);
    }
    return Subcomplex::closure(k, with_v);
}

inline Subcomplex star(const ComplexPtr& k, const std::string& label) { return star(k, k->vertex_index(label)); }

/// All vertices and edges of the ambient complex.
inline Subcomplex one_skeleton_of(const ComplexPtr& k)
{
    Subcomplex s(k);
    std::vector<std::size_t> low;
    for (std::size_t i = 0; i < k->simplex_count(); ++i)
        if (k->simplex(i).size() <= 2) low.push_back(i);
    return Subcomplex::closure(k, low);
}

/// Y ∪ (1-skeleton of the ambient complex).
inline Subcomplex one_skeleton_union(const Subcomplex& y) { return y | one_skeleton_of(y.ambient()); }

// ---------------------------------------------------------------------------
// Simplicial maps
// ---------------------------------------------------------------------------

struct SimplicialMap {
    ComplexPtr source;
    ComplexPtr target;
    std::vector<std::size_t> vertex_map;

    Simplex image(const Simplex& s) const
    {
        Simplex out;
        for (auto v : s) out.push_back(vertex_map.at(v));
        return make_simplex(std::move(out));
    }

    /// Index in the target of the image of simplex `i` of the source.
    std::size_t image_index(std::size_t i) const
    {
        auto idx = target->find(image(source->simplex(i)));
        if (!idx) throw PreconditionError("vertex map is not simplicial");
        return *idx;
    }

    /// First source simplex whose image is not a simplex, if any.
    std::optional<std::size_t> first_violation() const
    {
        if (vertex_map.size() != source->vertex_count()) return 0;
        for (auto v : vertex_map)
            if (v >= target->vertex_count()) return 0;
        for (auto i : source->maximal_simplices())
            if (!target->contains(image(source->simplex(i)))) return i;
        return std::nullopt;
    }

    bool is_simplicial() const { return !first_violation(); }
};

inline SimplicialMap compose(const SimplicialMap& second, const SimplicialMap& first)
{
    if (first.target != second.source) throw PreconditionError("maps are not composable");
    SimplicialMap out{first.source, second.target, {}};
    for (auto v : first.vertex_map) out.vertex_map.push_back(second.vertex_map[v]);
    return out;
}

// ---------------------------------------------------------------------------
// Nerves
// ---------------------------------------------------------------------------

/// Vertices are member indices; members span a simplex iff they share a point.
template <class D>
ComplexPtr nerve(const Cover<D>& cover)
{
    std::vector<std::string> labels;
    for (std::size_t u = 0; u < cover.size(); ++u) labels.push_back(std::to_string(u));
    std::set<Simplex> gens;
    for (PointId p = 0; p < cover.space().size(); ++p) {
        const auto& c = cover.members_containing(p);
        gens.insert(Simplex(c.begin(), c.end()));
    }
    return SimplicialComplex::from_generators(std::move(labels), std::vector<Simplex>(gens.begin(), gens.end()));
}

/// [V] -> smallest-index member of `coarser` containing V, between prebuilt nerves.
template <class D>
SimplicialMap connecting_map(const Cover<D>& finer, const Cover<D>& coarser, ComplexPtr finer_nerve, ComplexPtr coarser_nerve)
{
    if (finer.space_ptr() != coarser.space_ptr()) throw PreconditionError("covers live on different spaces");
    SimplicialMap f{std::move(finer_nerve), std::move(coarser_nerve), {}};
    for (std::size_t v = 0; v < finer.size(); ++v) {
        const auto& mem = finer.member(v);
        std::optional<std::size_t> target;
        for (auto u : coarser.members_containing(mem.front()))
            if (detail::is_subset(mem, coarser.member(u))) {
                target = u;
                break;
            }
        if (!target) throw PreconditionError("member " + std::to_string(v) + " of the finer cover lies in no coarser member");
        f.vertex_map.push_back(*target);
    }
    if (auto bad = f.first_violation())
        throw PreconditionError("connecting map is not simplicial at " + f.source->simplex_label(f.source->simplex(*bad)));
    return f;
}

template <class D>
SimplicialMap connecting_map(const Cover<D>& finer, const Cover<D>& coarser)
{
    return connecting_map(finer, coarser, nerve(finer), nerve(coarser));
}

enum class TieBreak { least_index, greatest_index };

/// eta: nerve vertex [U] -> a point of U.
template <class D>
std::vector<PointId> nerve_projection(const Cover<D>& cover, TieBreak tie = TieBreak::least_index)
{
    std::vector<PointId> eta;
    for (const auto& m : cover.members()) eta.push_back(tie == TieBreak::least_index ? m.front() : m.back());
    return eta;
}

// ---------------------------------------------------------------------------
// Barycentric subdivision
// ---------------------------------------------------------------------------

/// Sparse barycentric coordinates over the vertices of a base complex.
using Barycentric = std::vector<std::pair<std::size_t, Rational>>;

/// Iterated barycentric subdivision. Vertex i of level j is the barycentre of
/// simplex i of level j-1, so subdivision vertices are indexed by simplices.
struct Subdivision {
    std::vector<ComplexPtr> levels;              ///< levels[0] is the base complex
    std::vector<Simplex> carrier;                ///< per final vertex: smallest base simplex containing it
    std::vector<Barycentric> coordinates;        ///< per final vertex, in base coordinates

    const ComplexPtr& base() const { return levels.front(); }
    const ComplexPtr& complex() const { return levels.back(); }
    int depth() const { return static_cast<int>(levels.size()) - 1; }
};

namespace detail {

inline Barycentric average(const std::vector<const Barycentric*>& pts)
{
    std::map<std::size_t, Rational> acc;
    for (auto p : pts)
        for (const auto& [v, w] : *p) acc[v] += w;
    Barycentric out;
    Rational n(static_cast<long>(pts.size()));
    for (auto& [v, w] : acc) out.emplace_back(v, w / n);
    return out;
}

inline ComplexPtr subdivide_once(const ComplexPtr& k)
{
    std::vector<std::string> labels;
    for (const auto& s : k->simplices()) labels.push_back(k->simplex_label(s));
    std::vector<Simplex> gens;
    for (auto mi : k->maximal_simplices()) {
        Simplex verts = k->simplex(mi);
        do {
            Simplex flag;
            Simplex prefix;
            for (auto v : verts) {
                prefix.push_back(v);
                flag.push_back(*k->find(make_simplex(prefix)));
            }
            gens.push_back(make_simplex(std::move(flag)));
        } while (std::next_permutation(verts.begin(), verts.end()));
    }
    return SimplicialComplex::from_generators(std::move(labels), gens);
}

}  // namespace detail

inline constexpr int max_subdivision_dimension = 4;
inline constexpr std::size_t max_subdivision_simplices = 400000;

inline Subdivision barycentric_subdivision(const ComplexPtr& k, int depth)
{
    if (depth < 1) throw PreconditionError("subdivision depth must be at least 1");
    if (k->dimension() > max_subdivision_dimension)
        throw CapacityError("barycentric subdivision is capped at dimension " + std::to_string(max_subdivision_dimension));
    Subdivision sd;
    sd.levels.push_back(k);
    for (std::size_t v = 0; v < k->vertex_count(); ++v) {
        sd.carrier.push_back({v});
        sd.coordinates.push_back({{v, Rational(1)}});
    }
    for (int j = 0; j < depth; ++j) {
        const auto& prev = sd.levels.back();
        // top simplices multiply by at most (dim+1)! per level
        std::size_t fact = 1;
        for (int i = 2; i <= prev->dimension() + 1; ++i) fact *= static_cast<std::size_t>(i);
        if (prev->simplex_count() * fact > max_subdivision_simplices)
            throw CapacityError("subdivision depth " + std::to_string(depth) + " exceeds the size cap");
        std::vector<Simplex> carrier;
        std::vector<Barycentric> coords;
        for (const auto& s : prev->simplices()) {
            Simplex c;
            std::vector<const Barycentric*> pts;
            for (auto v : s) {
                c.insert(c.end(), sd.carrier[v].begin(), sd.carrier[v].end());
                pts.push_back(&sd.coordinates[v]);
            }
            carrier.push_back(make_simplex(std::move(c)));
            coords.push_back(detail::average(pts));
        }
        sd.levels.push_back(detail::subdivide_once(prev));
        sd.carrier = std::move(carrier);
        sd.coordinates = std::move(coords);
    }
    return sd;
}

/// Map of first subdivisions induced by f: barycentre of s -> barycentre of f(s).
inline SimplicialMap induced_on_subdivision(const SimplicialMap& f, ComplexPtr sd_source, ComplexPtr sd_target)
{
    SimplicialMap out{std::move(sd_source), std::move(sd_target), {}};
    for (std::size_t i = 0; i < f.source->simplex_count(); ++i) out.vertex_map.push_back(f.image_index(i));
    return out;
}

// ---------------------------------------------------------------------------
// Uniform spherical metric
// ---------------------------------------------------------------------------

/// A simplicial complex whose simplices carry the spherical simplex geometry.
struct SphericalComplex {
    ComplexPtr complex;
    Rational separation = 1;  ///< declared lower bound between components when embedded elsewhere
};

/// (pi/2) * hop distance in the 1-skeleton, +inf across components.
inline SphericalLength vertex_distance(const SphericalComplex& sc, std::size_t v, std::size_t w)
{
    if (v >= sc.complex->vertex_count() || w >= sc.complex->vertex_count()) throw PreconditionError("unknown vertex");
    auto d = graph::bfs(sc.complex->one_skeleton(), v);
    if (d[w] == graph::unreachable) return SphericalLength::infinity();
    return SphericalLength::quarter_turns(Rational(d[w]));
}

inline SphericalLength vertex_distance(const SphericalComplex& sc, const std::string& v, const std::string& w)
{
    return vertex_distance(sc, sc.complex->vertex_index(v), sc.complex->vertex_index(w));
}

/// All-pairs vertex distances in hops; graph::unreachable across components.
inline std::vector<std::vector<long>> hop_matrix(const graph::Adjacency& adj, const std::vector<char>* active = nullptr)
{
    std::vector<std::vector<long>> m;
    for (std::size_t v = 0; v < adj.size(); ++v) m.push_back(graph::bfs(adj, v, active));
    return m;
}

/// Point of a complex given by barycentric weights on the vertices of its carrier.
struct BarycentricPoint {
    Barycentric weights;  ///< sorted by vertex, strictly positive weights

    static BarycentricPoint vertex(std::size_t v) { return {{{v, Rational(1)}}}; }

    Simplex support() const
    {
        Simplex s;
        for (const auto& [v, w] : weights) s.push_back(v);
        return s;
    }
};

/// Validates weights (nonnegative, sum 1, support a simplex) and drops zeros.
inline BarycentricPoint make_point(const SimplicialComplex& k, const std::vector<std::pair<std::size_t, Rational>>& weights)
{
    std::map<std::size_t, Rational> acc;
    Rational total = 0;
    for (const auto& [v, w] : weights) {
        if (v >= k.vertex_count()) throw PreconditionError("barycentric weight on an unknown vertex");
        if (w < 0) throw PreconditionError("negative barycentric weight");
        acc[v] += w;
        total += w;
    }
    if (total != 1) throw PreconditionError("barycentric weights must sum to 1");
    BarycentricPoint p;
    for (const auto& [v, w] : acc)
        if (w != 0) p.weights.emplace_back(v, w);
    if (!k.contains(p.support())) throw PreconditionError("barycentric point is not carried by a simplex");
    return p;
}

namespace detail {

inline Rational dot(const Barycentric& a, const Barycentric& b)
{
    Rational s = 0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        if (a[i].first < b[j].first) ++i;
        else if (b[j].first < a[i].first) ++j;
        else s += a[i++].second * b[j++].second;
    }
    return s;
}

/// Angle between the radial projections of two points of one simplex.
inline double spherical_angle(const Barycentric& a, const Barycentric& b)
{
    Rational num = dot(a, b);
    if (num == 0) return M_PI / 2;
    Rational na = dot(a, a), nb = dot(b, b);
    Rational c2 = num * num / (na * nb);
    if (c2 >= 1) return 0.0;
    return std::acos(std::sqrt(c2.get_d()));
}

inline Simplex union_support(const Barycentric& a, const Barycentric& b)
{
    Simplex s;
    for (const auto& [v, w] : a) s.push_back(v);
    for (const auto& [v, w] : b) s.push_back(v);
    return make_simplex(std::move(s));
}

}  // namespace detail

struct DistanceInterval {
    double lo = 0;
    double hi = 0;
    bool exact = false;
};

inline constexpr int max_point_distance_depth = 4;

/// Two-sided estimate of the uniform spherical distance between two points.
inline DistanceInterval point_distance(const SphericalComplex& sc, const BarycentricPoint& p, const BarycentricPoint& q, int depth)
{
    const auto& k = *sc.complex;
    if (depth < 1 || depth > max_point_distance_depth)
        throw CapacityError("point distance depth must lie in [1, " + std::to_string(max_point_distance_depth) + "]");
    if (!k.contains(p.support()) || !k.contains(q.support())) throw PreconditionError("point not carried by the complex");
    constexpr double pad = 1e-12;
    if (p.weights.size() == 1 && q.weights.size() == 1) {
        double d = vertex_distance(sc, p.weights[0].first, q.weights[0].first).to_double();
        return {d, d, true};
    }
    if (k.contains(detail::union_support(p.weights, q.weights))) {
        double d = detail::spherical_angle(p.weights, q.weights);
        return {std::max(0.0, d - pad), d + pad, true};
    }
    auto hops = hop_matrix(k.one_skeleton());
    double lo = 0;
    bool connected = false;
    for (const auto& [v, wv] : p.weights)
        for (const auto& [w, ww] : q.weights) {
            if (hops[v][w] == graph::unreachable) continue;
            connected = true;
            double b = hops[v][w] * (M_PI / 2) - detail::spherical_angle(p.weights, {{v, Rational(1)}}) -
                       detail::spherical_angle(q.weights, {{w, Rational(1)}});
            lo = std::max(lo, b);
        }
    if (!connected) {
        double inf = std::numeric_limits<double>::infinity();
        return {inf, inf, false};
    }
    auto sd = barycentric_subdivision(sc.complex, depth);
    const auto& fine = *sd.complex();
    const std::size_t n = fine.vertex_count();
    graph::WeightedAdjacency<double> adj(n + 2);
    for (const auto& s : fine.simplices()) {
        if (s.size() != 2) continue;
        double w = detail::spherical_angle(sd.coordinates[s[0]], sd.coordinates[s[1]]);
        adj[s[0]].emplace_back(s[1], w);
        adj[s[1]].emplace_back(s[0], w);
    }
    const Simplex ps = p.support(), qs = q.support();
    for (std::size_t v = 0; v < n; ++v) {
        Simplex cp = ps, cq = qs;
        cp.insert(cp.end(), sd.carrier[v].begin(), sd.carrier[v].end());
        cq.insert(cq.end(), sd.carrier[v].begin(), sd.carrier[v].end());
        if (k.contains(make_simplex(cp))) {
            double w = detail::spherical_angle(p.weights, sd.coordinates[v]);
            adj[n].emplace_back(v, w);
            adj[v].emplace_back(n, w);
        }
        if (k.contains(make_simplex(cq))) {
            double w = detail::spherical_angle(q.weights, sd.coordinates[v]);
            adj[n + 1].emplace_back(v, w);
            adj[v].emplace_back(n + 1, w);
        }
    }
    auto dist = graph::dijkstra(adj, n);
    double hi = dist[n + 1] ? *dist[n + 1] : std::numeric_limits<double>::infinity();
    lo = std::max(0.0, lo - pad);
    hi += pad;
    if (lo > hi) lo = hi;
    return {lo, hi, false};
}

// ---------------------------------------------------------------------------
// Distortion and relative connectedness
// ---------------------------------------------------------------------------

struct DistortionReport {
    bool infinite = false;
    Rational value = 1;                      ///< meaningful when !infinite
    std::vector<Rational> per_component;     ///< max ratio inside each ambient component meeting Y
    std::pair<std::size_t, std::size_t> witness{0, 0};
};

/// Max over vertex pairs of Y of (hops inside Y) / (hops inside the ambient complex).
inline DistortionReport distortion(const Subcomplex& y)
{
    if (y.empty()) throw PreconditionError("distortion of an empty subcomplex");
    const auto& k = *y.ambient();
    auto vmask = y.vertex_mask();
    auto yadj = y.skeleton();
    auto amb_comp = graph::components(k.one_skeleton());
    DistortionReport rep;
    rep.per_component.assign(graph::component_count(amb_comp), Rational(0));
    auto verts = y.vertices();
    for (auto a : verts) {
        auto da = graph::bfs(k.one_skeleton(), a);
        auto dy = graph::bfs(yadj, a, &vmask);
        for (auto b : verts) {
            if (b <= a || da[b] == graph::unreachable) continue;
            if (dy[b] == graph::unreachable) {
                if (!rep.infinite) rep.witness = {a, b};
                rep.infinite = true;
                continue;
            }
            Rational r = ratio(dy[b], da[b]);
            auto& pc = rep.per_component[static_cast<std::size_t>(amb_comp[a])];
            if (pc < r) pc = r;
            if (!rep.infinite && rep.value < r) {
                rep.value = r;
                rep.witness = {a, b};
            }
        }
    }
    for (auto a : verts) {
        auto& pc = rep.per_component[static_cast<std::size_t>(amb_comp[a])];
        if (pc == 0) pc = 1;
    }
    return rep;
}

inline DistortionReport distortion(const SphericalComplex&, const Subcomplex& y) { return distortion(y); }

/// Every component of the ambient complex meets at most one component of Y.
inline bool relatively_connected(const Subcomplex& y)
{
    const auto& k = *y.ambient();
    auto vmask = y.vertex_mask();
    auto ycomp = graph::components(y.skeleton(), &vmask);
    auto amb = graph::components(k.one_skeleton());
    std::map<long, long> seen;
    for (std::size_t v = 0; v < k.vertex_count(); ++v) {
        if (!vmask[v]) continue;
        auto [it, fresh] = seen.emplace(amb[v], ycomp[v]);
        if (!fresh && it->second != ycomp[v]) return false;
    }
    return true;
}

// ---------------------------------------------------------------------------
// Star decompositions
// ---------------------------------------------------------------------------

struct StarFamily {
    int dimension = 0;                        ///< k: stars about barycentres of k-simplices
    std::vector<Subcomplex> stars;            ///< one per k-simplex of the base
    Subcomplex united;                        ///< Y_k
    bool pairwise_disjoint = true;
    SphericalLength separation = SphericalLength::infinity();  ///< min distance between distinct stars
};

struct StarsDecomposition {
    Subdivision subdivision;  ///< second subdivision of the base
    std::vector<StarFamily> families;
    bool covers_all = false;
};

inline constexpr int max_stars_dimension = 3;

/// Y_k = union of closed stars in the second subdivision about the
/// barycentres of the k-simplices of K.
inline StarsDecomposition stars_decomposition(const ComplexPtr& k)
{
    if (k->dimension() > max_stars_dimension)
        throw CapacityError("star decompositions are capped at dimension " + std::to_string(max_stars_dimension));
    StarsDecomposition out{barycentric_subdivision(k, 2), {}, false};
    const auto& k2 = out.subdivision.complex();
    const auto& k1 = out.subdivision.levels[1];
    auto hops = hop_matrix(k2->one_skeleton());
    Subcomplex all(k2);
    for (int d = 0; d <= k->dimension(); ++d) {
        StarFamily fam;
        fam.dimension = d;
        fam.united = Subcomplex(k2);
        for (std::size_t s = 0; s < k->simplex_count(); ++s) {
            if (static_cast<int>(k->simplex(s).size()) != d + 1) continue;
            // barycentre of s is vertex s of K', which is vertex (index of {s} in K') of K''
            std::size_t centre = *k1->find({s});
            fam.stars.push_back(star(k2, centre));
            fam.united |= fam.stars.back();
        }
        for (std::size_t a = 0; a < fam.stars.size(); ++a)
            for (std::size_t b = a + 1; b < fam.stars.size(); ++b) {
                long best = -1;
                for (auto va : fam.stars[a].vertices())
                    for (auto vb : fam.stars[b].vertices()) {
                        long h = hops[va][vb];
                        if (h != graph::unreachable && (best < 0 || h < best)) best = h;
                    }
                if (best == 0) fam.pairwise_disjoint = false;
                if (best >= 0) {
                    auto len = SphericalLength::quarter_turns(Rational(best));
                    if (len < fam.separation) fam.separation = len;
                }
            }
        all |= fam.united;
        out.families.push_back(std::move(fam));
    }
    out.covers_all = all == Subcomplex::whole(k2);
    return out;
}

}  // namespace coarsekit
