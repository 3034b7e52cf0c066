#pragma once

#include <algorithm>
#include <cmath>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "complexes.hpp"
#include "errors.hpp"
#include "graph.hpp"
#include "length.hpp"
#include "spaces.hpp"

namespace coarsekit {

using NodeId = std::size_t;
using NodeMap = std::vector<NodeId>;

namespace detail {

/// q * 2^-s quarter turns + u, integers; the shape of every path length in a
/// coarsening graph of subdivision depth s. Compared exactly.
struct GridLength {
    long q = 0;
    long u = 0;
    int s = 0;

    friend GridLength operator+(const GridLength& a, const GridLength& b)
    {
        int s = std::max(a.s, b.s);
        return {(a.q << (s - a.s)) + (b.q << (s - b.s)), a.u + b.u, s};
    }

    SphericalLength exact() const
    {
        return SphericalLength::mixed(ratio(Integer(q), Integer(1) << static_cast<unsigned>(s)), Rational(u));
    }

    double approx() const { return std::ldexp(static_cast<double>(q), -s) * (M_PI / 2) + static_cast<double>(u); }

    friend bool operator==(const GridLength& a, const GridLength& b)
    {
        int s = std::max(a.s, b.s);
        return (a.q << (s - a.s)) == (b.q << (s - b.s)) && a.u == b.u;
    }

    friend bool operator<(const GridLength& a, const GridLength& b)
    {
        if (a == b) return false;
        double diff = b.approx() - a.approx();
        if (std::fabs(diff) > 1e-9) return diff > 0;
        return a.exact() < b.exact();
    }
};

}  // namespace detail

enum class EdgeKind { horizontal, vertical };

struct CoarseningEdge {
    NodeId a = 0, b = 0;
    EdgeKind kind = EdgeKind::horizontal;
    SphericalLength length;
};

/// Layered graph model of a coarsening space: level i carries the depth-s
/// subdivision of the nerve of cover i; vertical unit edges follow the
/// connecting maps; horizontal edges of a depth-s subdivision weigh 2^-s
/// quarter turns, so nerve vertices sit (pi/2)*hops apart within a level.
class CoarseningSpace {
public:
    template <class D>
    CoarseningSpace(const std::vector<Cover<D>>& covers, int depth) : depth_(depth)
    {
        if (covers.empty()) throw PreconditionError("a coarsening space needs at least one cover");
        if (depth < 0 || depth > 3) throw CapacityError("coarsening subdivision depth must lie in [0, 3]");
        for (const auto& c : covers) nerves_.push_back(nerve(c));
        for (std::size_t i = 0; i + 1 < covers.size(); ++i)
            connecting_.push_back(connecting_map(covers[i], covers[i + 1], nerves_[i], nerves_[i + 1]));
        for (std::size_t i = 0; i < covers.size(); ++i) {
            const auto& c = covers[i];
            std::vector<PointId> eta;
            for (const auto& m : c.members()) eta.push_back(m.front());
            eta_.push_back(std::move(eta));
        }
        assemble();
    }

    /// Rebuild from nerves and connecting vertex maps.
    CoarseningSpace(std::vector<ComplexPtr> nerves, std::vector<SimplicialMap> connecting, int depth)
        : depth_(depth), nerves_(std::move(nerves)), connecting_(std::move(connecting))
    {
        if (nerves_.empty()) throw PreconditionError("a coarsening space needs at least one level");
        if (connecting_.size() + 1 != nerves_.size()) throw MalformedInput("need one connecting map per consecutive level pair");
        if (depth < 0 || depth > 3) throw CapacityError("coarsening subdivision depth must lie in [0, 3]");
        for (std::size_t i = 0; i < connecting_.size(); ++i) {
            auto& f = connecting_[i];
            f.source = nerves_[i];
            f.target = nerves_[i + 1];
            if (auto bad = f.first_violation())
                throw PreconditionError("connecting map " + std::to_string(i + 1) + " is not simplicial");
        }
        assemble();
    }

    std::size_t level_count() const { return nerves_.size(); }
    int depth() const { return depth_; }
    const ComplexPtr& nerve_at(std::size_t level) const { return nerves_.at(check_level(level) - 1); }
    const SimplicialMap& connecting(std::size_t level) const { return connecting_.at(check_level(level) - 1); }
    const std::vector<SimplicialMap>& connecting_maps() const { return connecting_; }
    const Subdivision& subdivision_at(std::size_t level) const { return sds_.at(check_level(level) - 1); }

    std::size_t node_count() const { return level_of_.size(); }
    std::size_t level_of(NodeId n) const { return level_of_.at(n); }
    std::size_t local_of(NodeId n) const { return n - offset_[level_of_.at(n) - 1]; }
    NodeId node(std::size_t level, std::size_t local) const { return offset_.at(check_level(level) - 1) + local; }
    std::size_t nodes_at(std::size_t level) const { return sds_.at(check_level(level) - 1).complex()->vertex_count(); }

    /// True for nodes that are vertices of the nerve itself, not subdivision points.
    bool is_nerve_vertex(NodeId n) const { return local_of(n) < nerves_[level_of(n) - 1]->vertex_count(); }

    std::string label(NodeId n) const
    {
        auto lv = level_of(n);
        return "L" + std::to_string(lv) + ":" + sds_[lv - 1].complex()->label(local_of(n));
    }

    const std::vector<CoarseningEdge>& edges() const { return edges_; }

    /// Nodes with level <= i.
    std::vector<NodeId> partial_space(std::size_t i) const
    {
        check_level(i);
        std::vector<NodeId> out;
        for (NodeId n = 0; n < offset_[i]; ++n) out.push_back(n);
        return out;
    }

    /// Phi_t: nodes below level t are pushed up to level t along the connecting maps.
    NodeId collapse(std::size_t t, NodeId p) const
    {
        check_level(t);
        auto lv = level_of(p);
        if (lv >= t) return p;
        std::size_t local = local_of(p);
        for (std::size_t i = lv; i < t; ++i) local = vertical_[i - 1][local];
        return node(t, local);
    }

    /// Least t >= max level of K with Phi_t(K) a single node.
    std::optional<std::size_t> collapse_to_point_level(const std::vector<NodeId>& k) const
    {
        if (k.empty()) throw PreconditionError("collapse of an empty node set");
        std::size_t start = 1;
        for (auto n : k) start = std::max(start, level_of(n));
        for (std::size_t t = start; t <= level_count(); ++t) {
            NodeId first = collapse(t, k.front());
            bool single = std::all_of(k.begin(), k.end(), [&](NodeId n) { return collapse(t, n) == first; });
            if (single) return t;
        }
        return std::nullopt;
    }

    SphericalLength distance(NodeId a, NodeId b) const
    {
        const auto& row = grid_row(a);
        if (!row[b]) return SphericalLength::infinity();
        return row[b]->exact();
    }

    /// Distance using horizontal edges of one level only.
    SphericalLength level_distance(NodeId a, NodeId b) const
    {
        if (level_of(a) != level_of(b)) throw PreconditionError("nodes on different levels");
        auto lv = level_of(a);
        graph::WeightedAdjacency<detail::GridLength> adj(nodes_at(lv));
        for (const auto& e : edges_)
            if (e.kind == EdgeKind::horizontal && level_of(e.a) == lv) {
                adj[local_of(e.a)].emplace_back(local_of(e.b), horizontal_unit());
                adj[local_of(e.b)].emplace_back(local_of(e.a), horizontal_unit());
            }
        auto d = graph::dijkstra(adj, local_of(a));
        if (!d[local_of(b)]) return SphericalLength::infinity();
        return d[local_of(b)]->exact();
    }

    /// Carrier simplex (in the level's nerve) of a node.
    const Simplex& carrier(NodeId n) const { return sds_[level_of(n) - 1].carrier[local_of(n)]; }

    /// eta on level i: node -> least point of the least member in its carrier.
    /// Available when built from covers.
    PointId eta(NodeId n) const
    {
        if (eta_.empty()) throw PreconditionError("space was not built from covers");
        return eta_[level_of(n) - 1][carrier(n).front()];
    }

    /// Node metric as a finite metric space (ids are node labels).
    SpacePtr<SphericalLength> node_space() const
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        if (cache_->space) return cache_->space;
        std::vector<std::string> ids;
        for (NodeId n = 0; n < node_count(); ++n) ids.push_back(label(n));
        std::vector<SphericalLength> m(node_count() * node_count());
        for (NodeId a = 0; a < node_count(); ++a) {
            const auto& row = grid_row_locked(a);
            for (NodeId b = 0; b < node_count(); ++b)
                m[a * node_count() + b] = row[b] ? row[b]->exact() : SphericalLength::infinity();
        }
        cache_->space = std::make_shared<const MetricSpace<SphericalLength>>(
            std::move(ids), std::move(m), std::vector<PointSet>{}, MetricSpace<SphericalLength>::Validation::trusted);
        return cache_->space;
    }

    /// Row of exact grid lengths from `a` (nullopt = unreachable).
    const std::vector<std::optional<detail::GridLength>>& grid_row(NodeId a) const
    {
        std::lock_guard<std::mutex> lock(cache_->mutex);
        return grid_row_locked(a);
    }

private:
    std::size_t check_level(std::size_t level) const
    {
        if (level < 1 || level > nerves_.size())
            throw PreconditionError("level " + std::to_string(level) + " outside [1, " + std::to_string(nerves_.size()) + "]");
        return level;
    }

    detail::GridLength horizontal_unit() const { return {1, 0, depth_}; }

    void assemble()
    {
        for (const auto& k : nerves_) {
            if (depth_ == 0) {
                Subdivision sd;
                sd.levels.push_back(k);
                for (std::size_t v = 0; v < k->vertex_count(); ++v) {
                    sd.carrier.push_back({v});
                    sd.coordinates.push_back({{v, Rational(1)}});
                }
                sds_.push_back(std::move(sd));
            } else {
                sds_.push_back(barycentric_subdivision(k, depth_));
            }
        }
        for (std::size_t i = 0; i < connecting_.size(); ++i) {
            SimplicialMap f = connecting_[i];
            for (int j = 1; j <= depth_; ++j) f = induced_on_subdivision(f, sds_[i].levels[j], sds_[i + 1].levels[j]);
            vertical_.push_back(f.vertex_map);
        }
        std::size_t total = 0;
        for (std::size_t i = 0; i < sds_.size(); ++i) {
            offset_.push_back(total);
            total += sds_[i].complex()->vertex_count();
            level_of_.insert(level_of_.end(), sds_[i].complex()->vertex_count(), i + 1);
        }
        offset_.push_back(total);
        const SphericalLength h = SphericalLength::quarter_turns(ratio(Integer(1), Integer(1) << static_cast<unsigned>(depth_)));
        adj_.assign(total, {});
        for (std::size_t i = 0; i < sds_.size(); ++i)
            for (const auto& s : sds_[i].complex()->simplices())
                if (s.size() == 2) add_edge(offset_[i] + s[0], offset_[i] + s[1], EdgeKind::horizontal, h, horizontal_unit());
        for (std::size_t i = 0; i < vertical_.size(); ++i)
            for (std::size_t v = 0; v < vertical_[i].size(); ++v)
                add_edge(offset_[i] + v, offset_[i + 1] + vertical_[i][v], EdgeKind::vertical, SphericalLength::linear(1),
                         detail::GridLength{0, 1, 0});
        cache_ = std::make_shared<Cache>();
        cache_->rows.resize(total);
    }

    void add_edge(NodeId a, NodeId b, EdgeKind kind, const SphericalLength& len, detail::GridLength g)
    {
        edges_.push_back({a, b, kind, len});
        adj_[a].emplace_back(b, g);
        adj_[b].emplace_back(a, g);
    }

    const std::vector<std::optional<detail::GridLength>>& grid_row_locked(NodeId a) const
    {
        auto& row = cache_->rows.at(a);
        if (!row) row = graph::dijkstra(adj_, a);
        return *row;
    }

    struct Cache {
        std::mutex mutex;
        std::vector<std::optional<std::vector<std::optional<detail::GridLength>>>> rows;
        SpacePtr<SphericalLength> space;
    };

    int depth_ = 1;
    std::vector<ComplexPtr> nerves_;
    std::vector<SimplicialMap> connecting_;
    std::vector<Subdivision> sds_;
    std::vector<std::vector<std::size_t>> vertical_;  ///< local vertex maps level i -> i+1
    std::vector<std::vector<PointId>> eta_;
    std::vector<std::size_t> offset_;
    std::vector<std::size_t> level_of_;
    std::vector<CoarseningEdge> edges_;
    graph::WeightedAdjacency<detail::GridLength> adj_;
    std::shared_ptr<Cache> cache_;
};

template <class D>
CoarseningSpace build_coarsening(const AntiCechSequence<D>& seq, int depth)
{
    return CoarseningSpace(seq.covers, depth);
}

// ---------------------------------------------------------------------------
// Swindle sequences
// ---------------------------------------------------------------------------

/// Level used by alpha_k at distance d from the base point:
/// clamp(ceil(max(ln k - d, 0)), 1, N).
inline std::size_t swindle_level(std::size_t k, double d, std::size_t levels)
{
    double r = std::max(std::log(static_cast<double>(k)) - d, 0.0);
    double c = std::ceil(r);
    if (c < 1) return 1;
    if (c > static_cast<double>(levels)) return levels;
    return static_cast<std::size_t>(c);
}

/// alpha_1 ... alpha_kmax with alpha_k(x) = Phi_{level(k, d(x, x0))}(x).
inline std::vector<NodeMap> swindle_sequence(const CoarseningSpace& x, NodeId x0, std::size_t kmax)
{
    if (x0 >= x.node_count()) throw PreconditionError("base node outside the space");
    if (kmax < 1) throw PreconditionError("kmax must be positive");
    const auto& row = x.grid_row(x0);
    std::vector<NodeMap> maps;
    for (std::size_t k = 1; k <= kmax; ++k) {
        NodeMap m(x.node_count());
        for (NodeId p = 0; p < x.node_count(); ++p) {
            double d = row[p] ? row[p]->approx() : std::numeric_limits<double>::infinity();
            m[p] = x.collapse(swindle_level(k, d, x.level_count()), p);
        }
        maps.push_back(std::move(m));
    }
    return maps;
}

struct EscapeRow {
    SphericalLength radius;
    std::size_t escape_index = 0;  ///< largest k whose range meets the ball; 0 if none
    bool escaped = false;          ///< the ball is left before the last map
};

struct ControlRow {
    SphericalLength radius;
    SphericalLength bound;
};

struct SwindleReport {
    std::vector<EscapeRow> escape;
    std::vector<ControlRow> control;  ///< R -> sup_k sup_{d(x,x')<=R} d(a_k x, a_k x')
    bool control_finite = true;
    SphericalLength step_bound;       ///< sup_{k,x} d(a_k x, a_{k+1} x)
    std::size_t step_k = 0;
    NodeId step_node = 0;
    bool step_finite = true;
};

/// Quantitative form of the three swindle hypotheses on a finite model.
inline SwindleReport check_swindle_hypotheses(const CoarseningSpace& x, const std::vector<NodeMap>& maps, NodeId x0,
                                              const std::vector<SphericalLength>& radii)
{
    const std::size_t n = x.node_count();
    for (const auto& m : maps) {
        if (m.size() != n) throw PreconditionError("node maps must be total");
        for (auto v : m)
            if (v >= n) throw PreconditionError("node map value outside the space");
    }
    SwindleReport rep;
    using detail::GridLength;

    const auto& base = x.grid_row(x0);
    for (const auto& r : radii) {
        EscapeRow row{r, 0, false};
        for (std::size_t k = maps.size(); k >= 1 && row.escape_index == 0; --k) {
            for (auto v : maps[k - 1])
                if (base[v] && !(r < base[v]->exact())) {
                    row.escape_index = k;
                    break;
                }
        }
        row.escaped = row.escape_index < maps.size();
        rep.escape.push_back(row);
    }

    // control table: pairs sorted by distance, running max over each distinct map
    struct PairDist {
        GridLength d;
        NodeId a, b;
    };
    std::vector<PairDist> pairs;
    for (NodeId a = 0; a < n; ++a) {
        const auto& row = x.grid_row(a);
        for (NodeId b = a; b < n; ++b)
            if (row[b]) pairs.push_back({*row[b], a, b});
    }
    std::stable_sort(pairs.begin(), pairs.end(), [](const PairDist& p, const PairDist& q) { return p.d < q.d; });
    std::vector<std::size_t> group_end;  // end index of each distinct-radius group
    for (std::size_t i = 0; i < pairs.size(); ++i)
        if (i + 1 == pairs.size() || !(pairs[i].d == pairs[i + 1].d)) group_end.push_back(i + 1);
    std::vector<std::optional<GridLength>> best(group_end.size());
    std::vector<char> best_inf(group_end.size(), 0);
    std::vector<const NodeMap*> distinct;
    for (const auto& m : maps)
        if (std::none_of(distinct.begin(), distinct.end(), [&](const NodeMap* d) { return *d == m; })) distinct.push_back(&m);
    for (auto m : distinct) {
        std::optional<GridLength> run;
        bool inf = false;
        std::size_t g = 0;
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            const auto& row = x.grid_row((*m)[pairs[i].a]);
            const auto& v = row[(*m)[pairs[i].b]];
            if (!v) inf = true;
            else if (!run || *run < *v) run = *v;
            if (i + 1 == group_end[g]) {
                if (inf) best_inf[g] = 1;
                if (run && (!best[g] || *best[g] < *run)) best[g] = run;
                ++g;
            }
        }
    }
    for (std::size_t g = 0; g < group_end.size(); ++g) {
        ControlRow row{pairs[group_end[g] - 1].d.exact(), best_inf[g] ? SphericalLength::infinity()
                                                                      : (best[g] ? best[g]->exact() : SphericalLength())};
        if (best_inf[g]) rep.control_finite = false;
        rep.control.push_back(row);
    }

    std::optional<GridLength> step;
    for (std::size_t k = 0; k + 1 < maps.size(); ++k)
        for (NodeId p = 0; p < n; ++p) {
            const auto& v = x.grid_row(maps[k][p])[maps[k + 1][p]];
            if (!v) {
                if (rep.step_finite) {
                    rep.step_k = k + 1;
                    rep.step_node = p;
                }
                rep.step_finite = false;
                continue;
            }
            if (!step || *step < *v) {
                step = *v;
                if (rep.step_finite) {
                    rep.step_k = k + 1;
                    rep.step_node = p;
                }
            }
        }
    rep.step_bound = rep.step_finite ? (step ? step->exact() : SphericalLength()) : SphericalLength::infinity();
    return rep;
}

// ---------------------------------------------------------------------------
// Comparison maps between W and a partial space
// ---------------------------------------------------------------------------

/// psi: W -> level-i nerve vertex of the least member containing w.
template <class D>
NodeMap psi_map(const CoarseningSpace& x, const Cover<D>& cover_i, std::size_t level)
{
    NodeMap out;
    for (auto u : vertex_assignment(cover_i)) out.push_back(x.node(level, u));
    return out;
}

/// zeta = eta o Phi_i on X_i, one value per node of X_i.
inline std::vector<PointId> zeta_map(const CoarseningSpace& x, std::size_t level)
{
    std::vector<PointId> out;
    for (auto n : x.partial_space(level)) out.push_back(x.eta(x.collapse(level, n)));
    return out;
}

}  // namespace coarsekit
