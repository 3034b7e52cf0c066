#pragma once

#include <algorithm>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"
#include "length.hpp"
#include "rational.hpp"

namespace coarsekit {

using PointId = std::size_t;
/// Sorted, duplicate-free list of point indices.
using PointSet = std::vector<PointId>;

namespace detail {

inline PointSet normalized(PointSet s)
{
    std::sort(s.begin(), s.end());
    s.erase(std::unique(s.begin(), s.end()), s.end());
    return s;
}

inline bool is_subset(const PointSet& a, const PointSet& b)
{
    return std::includes(b.begin(), b.end(), a.begin(), a.end());
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Metric validation
// ---------------------------------------------------------------------------

/// Outcome of checking the metric axioms on a distance table.
struct MetricReport {
    bool ok = true;
    std::string axiom;                    ///< "symmetry", "identity" or "triangle" on failure
    std::vector<std::string> witness;     ///< offending pair or triple of ids
};

/// Raw distance data as read from user input: a point list and a list of
/// (a, b, d) entries. Each unordered pair must be listed at least once.
template <class D>
struct MetricCandidate {
    std::vector<std::string> ids;
    std::vector<std::tuple<std::string, std::string, D>> pairs;
};

namespace detail {

template <class D>
MetricReport check_matrix(const std::vector<std::string>& ids, const std::vector<D>& m)
{
    const std::size_t n = ids.size();
    auto at = [&](std::size_t i, std::size_t j) -> const D& { return m[i * n + j]; };
    const D zero = DistanceTraits<D>::zero();
    for (std::size_t i = 0; i < n; ++i) {
        if (at(i, i) != zero) return {false, "identity", {ids[i], ids[i]}};
        for (std::size_t j = i + 1; j < n; ++j) {
            if (at(i, j) != at(j, i)) return {false, "symmetry", {ids[i], ids[j]}};
            if (at(i, j) == zero) return {false, "identity", {ids[i], ids[j]}};
        }
    }
    for (std::size_t a = 0; a < n; ++a)
        for (std::size_t b = 0; b < n; ++b) {
            if (b == a) continue;
            for (std::size_t c = 0; c < n; ++c) {
                if (c == a || c == b) continue;
                if (at(a, b) + at(b, c) < at(a, c)) return {false, "triangle", {ids[a], ids[b], ids[c]}};
            }
        }
    return {};
}

}  // namespace detail

/// Checks symmetry, identity of indiscernibles and the triangle inequality.
/// Throws MalformedInput when a pair distance is missing or an id is unknown,
/// PreconditionError on a negative distance.
template <class D>
MetricReport verify_metric(const MetricCandidate<D>& cand)
{
    const std::size_t n = cand.ids.size();
    std::unordered_map<std::string, std::size_t> index;
    for (std::size_t i = 0; i < n; ++i)
        if (!index.emplace(cand.ids[i], i).second) throw MalformedInput("duplicate point id '" + cand.ids[i] + "'");

    std::vector<std::optional<D>> m(n * n);
    for (std::size_t i = 0; i < n; ++i) m[i * n + i] = DistanceTraits<D>::zero();
    const D zero = DistanceTraits<D>::zero();
    for (const auto& [a, b, d] : cand.pairs) {
        auto ia = index.find(a), ib = index.find(b);
        if (ia == index.end() || ib == index.end()) throw MalformedInput("distance references unknown point");
        if (d < zero) throw PreconditionError("negative distance between '" + a + "' and '" + b + "'");
        auto i = ia->second, j = ib->second;
        auto& slot = m[i * n + j];
        if (i == j) {
            if (d != zero) return {false, "identity", {a, a}};
            continue;
        }
        if (slot && *slot != d) return {false, "symmetry", {a, b}};
        slot = d;
        auto& mirror = m[j * n + i];
        if (mirror && *mirror != d) return {false, "symmetry", {b, a}};
    }
    std::vector<D> full(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            const auto& v = m[i * n + j] ? m[i * n + j] : m[j * n + i];
            if (!v) throw MalformedInput("missing distance between '" + cand.ids[i] + "' and '" + cand.ids[j] + "'");
            full[i * n + j] = *v;
        }
    return detail::check_matrix(cand.ids, full);
}

// ---------------------------------------------------------------------------
// Filtered metric spaces
// ---------------------------------------------------------------------------

/// Finite metric space with an exhaustion K_1 ⊆ K_2 ⊆ ... ⊆ K_N = all points.
/// The exhaustion stands in for the compact sets in C0-type conditions.
template <class D>
class MetricSpace {
public:
    using distance_type = D;

    enum class Validation { full, trusted };

    MetricSpace(std::vector<std::string> ids, std::vector<D> matrix, std::vector<PointSet> filtration = {},
                Validation validation = Validation::full)
        : ids_(std::move(ids)), dist_(std::move(matrix))
    {
        const std::size_t n = ids_.size();
        if (n == 0) throw MalformedInput("a metric space needs at least one point");
        if (dist_.size() != n * n) throw MalformedInput("distance matrix has the wrong size");
        for (std::size_t i = 0; i < n; ++i)
            if (!index_.emplace(ids_[i], i).second) throw MalformedInput("duplicate point id '" + ids_[i] + "'");
        if (validation == Validation::full) {
            for (const auto& d : dist_)
                if (d < DistanceTraits<D>::zero()) throw PreconditionError("negative distance in matrix");
            auto rep = detail::check_matrix(ids_, dist_);
            if (!rep.ok) throw PreconditionError("matrix violates the " + rep.axiom + " axiom");
        }
        set_filtration(std::move(filtration));
    }

    std::size_t size() const { return ids_.size(); }
    const std::vector<std::string>& ids() const { return ids_; }
    const std::string& id(PointId p) const { return ids_.at(p); }

    PointId index_of(const std::string& id) const
    {
        auto it = index_.find(id);
        if (it == index_.end()) throw PreconditionError("unknown point id '" + id + "'");
        return it->second;
    }

    const D& distance(PointId a, PointId b) const { return dist_[a * ids_.size() + b]; }
    const std::vector<PointSet>& filtration() const { return filtration_; }

    PointSet all_points() const
    {
        PointSet all(size());
        for (std::size_t i = 0; i < size(); ++i) all[i] = i;
        return all;
    }

    /// Sorted distinct values of d over all pairs, 0 included.
    std::vector<D> realized_distances() const
    {
        std::vector<D> v;
        v.reserve(size() * (size() + 1) / 2);
        for (std::size_t i = 0; i < size(); ++i)
            for (std::size_t j = i; j < size(); ++j) v.push_back(distance(i, j));
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        return v;
    }

    D diameter_of(const PointSet& s) const
    {
        D best = DistanceTraits<D>::zero();
        for (std::size_t i = 0; i < s.size(); ++i)
            for (std::size_t j = i + 1; j < s.size(); ++j)
                if (best < distance(s[i], s[j])) best = distance(s[i], s[j]);
        return best;
    }

    /// d(x, S); S must be nonempty.
    D distance_to_set(PointId x, const PointSet& s) const
    {
        if (s.empty()) throw PreconditionError("distance to an empty set");
        D best = distance(x, s.front());
        for (auto y : s)
            if (distance(x, y) < best) best = distance(x, y);
        return best;
    }

    /// Closed thickening {x : d(x, S) <= r}.
    PointSet thickening(const PointSet& s, const D& r) const
    {
        PointSet out;
        if (s.empty()) return out;
        for (PointId x = 0; x < size(); ++x)
            if (!(r < distance_to_set(x, s))) out.push_back(x);
        return out;
    }

    void set_filtration(std::vector<PointSet> filtration)
    {
        if (filtration.empty()) filtration.push_back(all_points());
        for (auto& k : filtration) {
            k = detail::normalized(std::move(k));
            for (auto p : k)
                if (p >= size()) throw MalformedInput("filtration references an unknown point");
        }
        for (std::size_t i = 1; i < filtration.size(); ++i)
            if (!detail::is_subset(filtration[i - 1], filtration[i]))
                throw PreconditionError("filtration is not a chain under inclusion");
        if (filtration.back().size() != size()) throw PreconditionError("filtration must end at the full point set");
        filtration_ = std::move(filtration);
    }

private:
    std::vector<std::string> ids_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<D> dist_;
    std::vector<PointSet> filtration_;
};

using FilteredMetricSpace = MetricSpace<Rational>;

template <class D>
using SpacePtr = std::shared_ptr<const MetricSpace<D>>;

/// Builds a space from a full symmetric distance matrix.
template <class D>
SpacePtr<D> make_space(std::vector<std::string> ids, std::vector<D> matrix, std::vector<PointSet> filtration = {})
{
    return std::make_shared<const MetricSpace<D>>(std::move(ids), std::move(matrix), std::move(filtration));
}

/// Shortest-path metric of a connected weighted graph with positive weights.
inline SpacePtr<Rational> make_graph_space(std::vector<std::string> ids,
                                           const std::vector<std::tuple<std::size_t, std::size_t, Rational>>& edges,
                                           std::vector<PointSet> filtration = {})
{
    const std::size_t n = ids.size();
    graph::WeightedAdjacency<Rational> adj(n);
    for (const auto& [a, b, w] : edges) {
        if (a >= n || b >= n) throw MalformedInput("edge references an unknown point");
        if (w <= 0) throw PreconditionError("graph edge weights must be positive");
        adj[a].emplace_back(b, w);
        adj[b].emplace_back(a, w);
    }
    std::vector<Rational> m(n * n);
    for (std::size_t s = 0; s < n; ++s) {
        auto d = graph::dijkstra(adj, s);
        for (std::size_t t = 0; t < n; ++t) {
            if (!d[t]) throw PreconditionError("graph metric requires a connected graph");
            m[s * n + t] = *d[t];
        }
    }
    return std::make_shared<const FilteredMetricSpace>(std::move(ids), std::move(m), std::move(filtration),
                                                       FilteredMetricSpace::Validation::trusted);
}

/// Points on the real line at the given rational positions.
inline SpacePtr<Rational> make_line_space(const std::vector<Rational>& positions, std::vector<PointSet> filtration = {})
{
    const std::size_t n = positions.size();
    std::vector<std::string> ids;
    for (const auto& p : positions) ids.push_back(p.get_den() == 1 ? p.get_num().get_str() : p.get_str());
    std::vector<Rational> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m[i * n + j] = abs(Rational(positions[i] - positions[j]));
    return std::make_shared<const FilteredMetricSpace>(std::move(ids), std::move(m), std::move(filtration));
}

/// Truncation of Z^dim to [lo, hi]^dim with the l1 metric. Point ids are the
/// coordinates ("3" in dimension one, "(x,y)" otherwise), in lexicographic
/// order of (x, y, z).
struct IntegerGrid {
    int dim = 1;
    long lo = 0;
    long hi = 0;
    std::vector<std::vector<long>> coords;
    SpacePtr<Rational> space;
};

inline IntegerGrid make_integer_grid(int dim, long lo, long hi)
{
    if (dim < 1 || dim > 3) throw PreconditionError("integer grids are supported in dimensions 1, 2 and 3");
    if (hi < lo) throw PreconditionError("empty integer grid");
    IntegerGrid g;
    g.dim = dim;
    g.lo = lo;
    g.hi = hi;
    std::vector<long> c(dim, lo);
    while (true) {
        g.coords.push_back(c);
        int k = dim - 1;
        while (k >= 0 && c[k] == hi) c[k--] = lo;
        if (k < 0) break;
        ++c[k];
    }
    std::vector<std::string> ids;
    for (const auto& p : g.coords) {
        if (dim == 1) {
            ids.push_back(std::to_string(p[0]));
            continue;
        }
        std::string s = "(";
        for (int k = 0; k < dim; ++k) s += (k ? "," : "") + std::to_string(p[k]);
        ids.push_back(s + ")");
    }
    const std::size_t n = g.coords.size();
    std::vector<Rational> m(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            long s = 0;
            for (int k = 0; k < dim; ++k) s += std::labs(g.coords[i][k] - g.coords[j][k]);
            m[i * n + j] = s;
        }
    g.space = std::make_shared<const FilteredMetricSpace>(std::move(ids), std::move(m), std::vector<PointSet>{},
                                                          FilteredMetricSpace::Validation::trusted);
    return g;
}

inline SpacePtr<Rational> make_integer_interval(long lo, long hi) { return make_integer_grid(1, lo, hi).space; }

// ---------------------------------------------------------------------------
// Balls and geometry statistics
// ---------------------------------------------------------------------------

/// Closed ball {y : d(x, y) <= r}.
template <class D>
PointSet ball(const MetricSpace<D>& space, PointId x, const D& r)
{
    if (x >= space.size()) throw PreconditionError("unknown point index");
    if (r < DistanceTraits<D>::zero()) throw PreconditionError("negative radius");
    PointSet out;
    for (PointId y = 0; y < space.size(); ++y)
        if (!(r < space.distance(x, y))) out.push_back(y);
    return out;
}

template <class D>
PointSet ball(const MetricSpace<D>& space, const std::string& x, const D& r)
{
    return ball(space, space.index_of(x), r);
}

struct CountWitness {
    std::size_t value = 0;
    PointId point = 0;
};

/// max_x |ball(x, r)| with the first point attaining it.
template <class D>
CountWitness bounded_geometry_profile(const MetricSpace<D>& space, const D& r)
{
    CountWitness best;
    for (PointId x = 0; x < space.size(); ++x) {
        auto c = ball(space, x, r).size();
        if (c > best.value) best = {c, x};
    }
    return best;
}

template <class D>
struct GapWitness {
    D gap;
    PointId a = 0, b = 0;
};

/// Minimum distance between distinct points.
template <class D>
GapWitness<D> uniform_discreteness_gap(const MetricSpace<D>& space)
{
    if (space.size() < 2) throw PreconditionError("undefined gap: the space has a single point");
    GapWitness<D> g{space.distance(0, 1), 0, 1};
    for (PointId a = 0; a < space.size(); ++a)
        for (PointId b = a + 1; b < space.size(); ++b)
            if (space.distance(a, b) < g.gap) g = {space.distance(a, b), a, b};
    return g;
}

// ---------------------------------------------------------------------------
// Covers
// ---------------------------------------------------------------------------

/// Indexed family of nonempty point sets whose union is the whole space.
template <class D>
class Cover {
public:
    Cover(SpacePtr<D> space, std::vector<PointSet> members) : space_(std::move(space)), members_(std::move(members))
    {
        if (!space_) throw PreconditionError("cover without a space");
        if (members_.empty()) throw PreconditionError("a cover needs at least one member");
        containing_.assign(space_->size(), {});
        for (std::size_t u = 0; u < members_.size(); ++u) {
            members_[u] = detail::normalized(std::move(members_[u]));
            if (members_[u].empty()) throw PreconditionError("cover member " + std::to_string(u) + " is empty");
            for (auto p : members_[u]) {
                if (p >= space_->size()) throw MalformedInput("cover member references an unknown point");
                containing_[p].push_back(u);
            }
        }
        for (PointId p = 0; p < space_->size(); ++p)
            if (containing_[p].empty()) throw PreconditionError("point '" + space_->id(p) + "' is not covered");
    }

    const MetricSpace<D>& space() const { return *space_; }
    const SpacePtr<D>& space_ptr() const { return space_; }
    std::size_t size() const { return members_.size(); }
    const std::vector<PointSet>& members() const { return members_; }
    const PointSet& member(std::size_t u) const { return members_.at(u); }
    /// Member indices containing p, ascending.
    const std::vector<std::size_t>& members_containing(PointId p) const { return containing_.at(p); }

    bool member_contains(std::size_t u, PointId p) const
    {
        return std::binary_search(members_[u].begin(), members_[u].end(), p);
    }

private:
    SpacePtr<D> space_;
    std::vector<PointSet> members_;
    std::vector<std::vector<std::size_t>> containing_;
};

/// Max over members of the member diameter.
template <class D>
D cover_diameter(const Cover<D>& cover)
{
    D best = DistanceTraits<D>::zero();
    for (const auto& m : cover.members()) {
        D d = cover.space().diameter_of(m);
        if (best < d) best = d;
    }
    return best;
}

/// A Lebesgue-number value together with how it was obtained.
template <class D>
struct LebesgueValue {
    D value;
    std::string method;  ///< "ball_criterion_lower_bound" or "exact_subset_enumeration"
};

/// Largest realized distance R such that every closed R-ball lies in some
/// member. Every set of diameter <= R sits inside a ball of radius R around
/// any of its points, so the value bounds the Lebesgue number from below.
template <class D>
LebesgueValue<D> lebesgue_lower_bound(const Cover<D>& cover)
{
    const auto& space = cover.space();
    const auto values = space.realized_distances();
    // For x and U ∋ x the ball B(x, R) fits in U iff R < d(x, X \ U).
    // The admissible R for x is the largest realized value below the best such gap.
    std::size_t best_rank = values.size() - 1;
    for (PointId x = 0; x < space.size(); ++x) {
        std::optional<D> reach;  // max over U ∋ x of d(x, X \ U); empty = some U is the whole space
        bool unbounded = false;
        for (auto u : cover.members_containing(x)) {
            const auto& mem = cover.member(u);
            if (mem.size() == space.size()) {
                unbounded = true;
                break;
            }
            std::optional<D> gap;
            std::size_t k = 0;
            for (PointId y = 0; y < space.size(); ++y) {
                while (k < mem.size() && mem[k] < y) ++k;
                if (k < mem.size() && mem[k] == y) continue;
                if (!gap || space.distance(x, y) < *gap) gap = space.distance(x, y);
            }
            if (!reach || *reach < *gap) reach = gap;
        }
        if (unbounded) continue;
        auto it = std::lower_bound(values.begin(), values.end(), *reach);  // first value >= reach
        std::size_t rank = static_cast<std::size_t>(it - values.begin()) - 1;  // values[0] = 0 < reach
        best_rank = std::min(best_rank, rank);
    }
    return {values[best_rank], "ball_criterion_lower_bound"};
}

/// Exact Lebesgue number over the realized distances: the largest realized R
/// such that every subset of diameter <= R lies in a member. Enumerates all
/// 2^n subsets, hence the cap.
template <class D>
LebesgueValue<D> lebesgue_exact(const Cover<D>& cover, std::size_t max_points = 20)
{
    const auto& space = cover.space();
    const std::size_t n = space.size();
    if (n > max_points || n > 24)
        throw CapacityError("exact Lebesgue oracle is capped at " + std::to_string(std::min<std::size_t>(max_points, 24)) +
                            " points; use lebesgue_lower_bound for this space");
    const auto values = space.realized_distances();
    std::vector<std::uint16_t> rank(n * n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            rank[i * n + j] = static_cast<std::uint16_t>(
                std::lower_bound(values.begin(), values.end(), space.distance(i, j)) - values.begin());
    std::vector<std::uint32_t> member_masks;
    for (const auto& m : cover.members()) {
        std::uint32_t mask = 0;
        for (auto p : m) mask |= 1u << p;
        member_masks.push_back(mask);
    }
    const std::uint32_t total = 1u << n;
    std::vector<std::uint16_t> diam(total, 0);
    std::size_t min_bad = values.size();  // smallest diameter rank of a set that fits nowhere
    for (std::uint32_t s = 1; s < total; ++s) {
        unsigned top = 31 - static_cast<unsigned>(__builtin_clz(s));
        std::uint32_t rest = s & ~(1u << top);
        std::uint16_t d = diam[rest];
        for (std::uint32_t r = rest; r; r &= r - 1) {
            unsigned b = static_cast<unsigned>(__builtin_ctz(r));
            d = std::max(d, rank[top * n + b]);
        }
        diam[s] = d;
        if (d >= min_bad) continue;
        bool fits = false;
        for (auto m : member_masks)
            if ((s & m) == s) {
                fits = true;
                break;
            }
        if (!fits) min_bad = d;
    }
    if (min_bad == values.size()) return {values.back(), "exact_subset_enumeration"};
    return {values[min_bad - 1], "exact_subset_enumeration"};
}

template <class D>
struct DegreeWitness {
    std::size_t value = 0;
    PointId point = 0;
};

/// sup_w #{U : d(w, U) < r}.
template <class D>
DegreeWitness<D> r_degree(const Cover<D>& cover, const D& r)
{
    if (!(DistanceTraits<D>::zero() < r)) throw PreconditionError("R-degree needs R > 0");
    const auto& space = cover.space();
    DegreeWitness<D> best;
    for (PointId w = 0; w < space.size(); ++w) {
        std::size_t c = 0;
        for (const auto& m : cover.members()) {
            for (auto u : m)
                if (space.distance(w, u) < r) {
                    ++c;
                    break;
                }
        }
        if (c > best.value) best = {c, w};
    }
    return best;
}

/// Maximum number of members containing a single point.
template <class D>
DegreeWitness<D> degree(const Cover<D>& cover)
{
    DegreeWitness<D> best;
    for (PointId p = 0; p < cover.space().size(); ++p) {
        auto c = cover.members_containing(p).size();
        if (c > best.value) best = {c, p};
    }
    return best;
}

/// True iff every member of `finer` is contained in some member of `coarser`.
template <class D>
bool refines(const Cover<D>& finer, const Cover<D>& coarser)
{
    if (finer.space_ptr() != coarser.space_ptr()) throw PreconditionError("covers live on different spaces");
    for (const auto& v : finer.members()) {
        bool found = false;
        for (auto u : coarser.members_containing(v.front()))
            if (detail::is_subset(v, coarser.member(u))) {
                found = true;
                break;
            }
        if (!found) return false;
    }
    return true;
}

/// psi: each point goes to the smallest-index member containing it.
template <class D>
std::vector<std::size_t> vertex_assignment(const Cover<D>& cover)
{
    std::vector<std::size_t> psi(cover.space().size());
    for (PointId p = 0; p < psi.size(); ++p) psi[p] = cover.members_containing(p).front();
    return psi;
}

/// Greedy r-net: scan points by index, keep a point if it is farther than r
/// from every point kept so far.
template <class D>
PointSet greedy_net(const MetricSpace<D>& space, const D& r)
{
    PointSet net;
    for (PointId p = 0; p < space.size(); ++p) {
        bool far = true;
        for (auto c : net)
            if (!(r < space.distance(p, c))) {
                far = false;
                break;
            }
        if (far) net.push_back(p);
    }
    return net;
}

/// Closed r-balls about a greedy r-net.
template <class D>
Cover<D> net_ball_cover(const SpacePtr<D>& space, const D& r)
{
    std::vector<PointSet> members;
    for (auto c : greedy_net(*space, r)) members.push_back(ball(*space, c, r));
    return Cover<D>(space, std::move(members));
}

// ---------------------------------------------------------------------------
// Anti-Čech sequences
// ---------------------------------------------------------------------------

template <class D>
struct ChainInequality {
    std::size_t step = 0;  ///< compares cover `step` with cover `step + 1`
    D diameter;            ///< Diam of cover `step`
    D lebesgue;            ///< ball-criterion lower bound of cover `step + 1`
    bool holds = false;
};

template <class D>
struct AntiCechSequence {
    std::vector<Cover<D>> covers;
    std::vector<D> requested_radii;
    std::vector<D> radii;  ///< radii actually used after retries
    std::vector<ChainInequality<D>> certificate;
    std::size_t retries = 0;
};

/// Builds covers by balls about greedy nets for an increasing radius schedule
/// and certifies Diam(U_i) <= Lebesgue(U_{i+1}) at every step. A failing step
/// doubles its radius and retries, at most `max_retries` times per step.
template <class D>
AntiCechSequence<D> build_anticech(const SpacePtr<D>& space, const std::vector<D>& schedule, std::size_t max_retries = 8)
{
    if (schedule.empty()) throw PreconditionError("empty radius schedule");
    for (std::size_t i = 0; i < schedule.size(); ++i) {
        if (!(DistanceTraits<D>::zero() < schedule[i])) throw PreconditionError("schedule radii must be positive");
        if (i > 0 && !(schedule[i - 1] < schedule[i])) throw PreconditionError("schedule must be strictly increasing");
    }
    AntiCechSequence<D> seq;
    seq.requested_radii = schedule;
    seq.covers.push_back(net_ball_cover(space, schedule[0]));
    seq.radii.push_back(schedule[0]);
    for (std::size_t i = 1; i < schedule.size(); ++i) {
        D r = schedule[i];
        const D diam = cover_diameter(seq.covers.back());
        for (std::size_t attempt = 0;; ++attempt) {
            Cover<D> next = net_ball_cover(space, r);
            D leb = lebesgue_lower_bound(next).value;
            if (!(leb < diam)) {
                seq.certificate.push_back({i - 1, diam, leb, true});
                seq.covers.push_back(std::move(next));
                seq.radii.push_back(r);
                break;
            }
            if (attempt == max_retries)
                throw ConstructionFailure("anti-Čech step " + std::to_string(i) + " failed after " +
                                          std::to_string(max_retries) + " retries: Diam " +
                                          DistanceTraits<D>::to_string(diam) + " > Lebesgue lower bound " +
                                          DistanceTraits<D>::to_string(leb));
            ++seq.retries;
            r = r + r;
        }
    }
    return seq;
}

// ---------------------------------------------------------------------------
// Brick covers of integer grids
// ---------------------------------------------------------------------------

struct BrickCover {
    Cover<Rational> cover;
    std::size_t r_degree = 0;
    PointId attained_at = 0;
    std::size_t bound = 0;  ///< dim + 1
    bool ok = false;        ///< r_degree <= bound
};

namespace detail {

inline long floor_div(long a, long b) { return a >= 0 ? a / b : -((-a + b - 1) / b); }

}  // namespace detail

/// Offset-brick cover of a grid truncation by cubes of the given side.
///
/// Dimension 1 uses consecutive blocks. In dimension 2, row r of bricks is
/// shifted by r*side/2; in dimension 3, slab s carries the two-dimensional
/// pattern shifted by (s*side/4, s*side/2). The postcondition
/// r_degree(cover, r) <= dim + 1 is evaluated and reported, not assumed.
inline BrickCover brick_cover(const IntegerGrid& grid, const Rational& r, long side)
{
    if (grid.dim < 1 || grid.dim > 3) throw PreconditionError("brick covers are supported in dimensions 1, 2 and 3");
    if (r <= 0) throw PreconditionError("brick cover scale must be positive");
    if (side < 1) throw PreconditionError("brick side must be positive");
    using detail::floor_div;
    std::map<std::vector<long>, PointSet> bricks;
    for (PointId p = 0; p < grid.coords.size(); ++p) {
        const auto& c = grid.coords[p];
        std::vector<long> key;
        if (grid.dim == 1) {
            key = {floor_div(c[0], side)};
        } else {
            long x = c[0], y = c[1];
            long slab = 0;
            if (grid.dim == 3) {
                slab = floor_div(c[2], side);
                x -= floor_div(slab * side, 4);
                y -= floor_div(slab * side, 2);
            }
            long row = floor_div(y, side);
            long col = floor_div(x - floor_div(row * side, 2), side);
            key = grid.dim == 3 ? std::vector<long>{slab, row, col} : std::vector<long>{row, col};
        }
        bricks[key].push_back(p);
    }
    std::vector<PointSet> members;
    for (auto& [k, pts] : bricks) members.push_back(std::move(pts));
    Cover<Rational> cover(grid.space, std::move(members));
    auto deg = r_degree(cover, r);
    BrickCover out{std::move(cover), deg.value, deg.point, static_cast<std::size_t>(grid.dim) + 1, false};
    out.ok = out.r_degree <= out.bound;
    return out;
}

}  // namespace coarsekit
