#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "spaces.hpp"

namespace coarsekit {

using PointPair = std::pair<PointId, PointId>;

/// A set of ordered point pairs of one space.
template <class D>
class Entourage {
public:
    Entourage(SpacePtr<D> space, std::vector<PointPair> pairs) : space_(std::move(space)), pairs_(std::move(pairs))
    {
        for (const auto& [a, b] : pairs_)
            if (a >= space_->size() || b >= space_->size()) throw MalformedInput("entourage pair references an unknown point");
        std::sort(pairs_.begin(), pairs_.end());
        pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
    }

    static Entourage diagonal(SpacePtr<D> space)
    {
        std::vector<PointPair> p;
        for (PointId x = 0; x < space->size(); ++x) p.emplace_back(x, x);
        return Entourage(std::move(space), std::move(p));
    }

    /// {(x, y) : d(x, y) <= r}
    static Entourage band(SpacePtr<D> space, const D& r)
    {
        std::vector<PointPair> p;
        for (PointId x = 0; x < space->size(); ++x)
            for (PointId y = 0; y < space->size(); ++y)
                if (!(r < space->distance(x, y))) p.emplace_back(x, y);
        return Entourage(std::move(space), std::move(p));
    }

    const SpacePtr<D>& space() const { return space_; }
    const std::vector<PointPair>& pairs() const { return pairs_; }
    bool contains(PointId a, PointId b) const { return std::binary_search(pairs_.begin(), pairs_.end(), PointPair{a, b}); }
    friend bool operator==(const Entourage& a, const Entourage& b) { return a.space_ == b.space_ && a.pairs_ == b.pairs_; }

private:
    SpacePtr<D> space_;
    std::vector<PointPair> pairs_;
};

namespace detail {

template <class D>
void same_space(const Entourage<D>& e, const Entourage<D>& f)
{
    if (e.space() != f.space()) throw PreconditionError("entourages live on different spaces");
}

}  // namespace detail

template <class D>
Entourage<D> unite(const Entourage<D>& e, const Entourage<D>& f)
{
    detail::same_space(e, f);
    std::vector<PointPair> p = e.pairs();
    p.insert(p.end(), f.pairs().begin(), f.pairs().end());
    return Entourage<D>(e.space(), std::move(p));
}

template <class D>
Entourage<D> inverse(const Entourage<D>& e)
{
    std::vector<PointPair> p;
    for (const auto& [a, b] : e.pairs()) p.emplace_back(b, a);
    return Entourage<D>(e.space(), std::move(p));
}

/// E ∘ F = {(x, y) : (x, z) ∈ E and (z, y) ∈ F for some z}.
template <class D>
Entourage<D> compose(const Entourage<D>& e, const Entourage<D>& f)
{
    detail::same_space(e, f);
    std::vector<std::vector<PointId>> from(e.space()->size());
    for (const auto& [z, y] : f.pairs()) from[z].push_back(y);
    std::vector<PointPair> p;
    for (const auto& [x, z] : e.pairs())
        for (auto y : from[z]) p.emplace_back(x, y);
    return Entourage<D>(e.space(), std::move(p));
}

/// sup of d over the pairs; 0 when empty.
template <class D>
D bounded_bound(const Entourage<D>& e)
{
    D best = DistanceTraits<D>::zero();
    for (const auto& [a, b] : e.pairs())
        if (best < e.space()->distance(a, b)) best = e.space()->distance(a, b);
    return best;
}

template <class D>
struct SupWitness {
    D value;
    std::optional<PointPair> pair;
};

namespace detail {

/// sup d over pairs with at least one end outside `inside`.
template <class D>
SupWitness<D> sup_outside(const Entourage<D>& e, const std::vector<char>& inside)
{
    SupWitness<D> w{DistanceTraits<D>::zero(), std::nullopt};
    for (const auto& [a, b] : e.pairs()) {
        if (inside[a] && inside[b]) continue;
        const auto& d = e.space()->distance(a, b);
        if (!w.pair || w.value < d) w = {d, PointPair{a, b}};
    }
    return w;
}

inline std::vector<char> indicator(std::size_t n, const PointSet& s)
{
    std::vector<char> m(n, 0);
    for (auto p : s) m[p] = 1;
    return m;
}

}  // namespace detail

/// s_i = sup{d(x, y) : (x, y) ∈ E \ (K_i × K_i)} for each filtration index.
template <class D>
std::vector<SupWitness<D>> control_profile(const Entourage<D>& e)
{
    std::vector<SupWitness<D>> out;
    for (const auto& k : e.space()->filtration())
        out.push_back(detail::sup_outside(e, detail::indicator(e.space()->size(), k)));
    return out;
}

template <class D>
struct C0Report {
    bool pass = true;
    std::vector<D> profile;
    std::optional<std::size_t> first_violation;  ///< filtration index (0-based)
    std::optional<PointPair> witness;
};

namespace detail {

template <class D>
void check_schedule(const std::vector<D>& schedule, std::size_t expected, const char* what)
{
    if (schedule.size() != expected)
        throw PreconditionError(std::string(what) + " schedule has " + std::to_string(schedule.size()) +
                                " entries, expected " + std::to_string(expected));
    for (const auto& v : schedule)
        if (!(DistanceTraits<D>::zero() < v)) throw PreconditionError(std::string(what) + " schedule entries must be positive");
}

template <class D>
C0Report<D> c0_against(const Entourage<D>& e, const std::vector<D>& schedule, const std::vector<char>* restrict_outside)
{
    C0Report<D> rep;
    const auto n = e.space()->size();
    for (std::size_t i = 0; i < e.space()->filtration().size(); ++i) {
        auto inside = indicator(n, e.space()->filtration()[i]);
        SupWitness<D> w{DistanceTraits<D>::zero(), std::nullopt};
        for (const auto& [a, b] : e.pairs()) {
            if (inside[a] && inside[b]) continue;
            if (restrict_outside && (*restrict_outside)[a] && (*restrict_outside)[b]) continue;
            const auto& d = e.space()->distance(a, b);
            if (!w.pair || w.value < d) w = {d, PointPair{a, b}};
        }
        rep.profile.push_back(w.value);
        if (rep.pass && schedule[i] < w.value) {
            rep.pass = false;
            rep.first_violation = i;
            rep.witness = w.pair;
        }
    }
    return rep;
}

}  // namespace detail

/// Passes iff s_i <= eps_i at every filtration index.
template <class D>
C0Report<D> classify_c0(const Entourage<D>& e, const std::vector<D>& schedule)
{
    detail::check_schedule(schedule, e.space()->filtration().size(), "tolerance");
    return detail::c0_against(e, schedule, nullptr);
}

/// Level assignment: X_i = {x : level(x) <= i}, levels 1..L.
struct Levels {
    std::vector<std::size_t> level;

    std::size_t count() const { return level.empty() ? 0 : *std::max_element(level.begin(), level.end()); }

    std::vector<char> up_to(std::size_t i) const
    {
        std::vector<char> m(level.size());
        for (std::size_t p = 0; p < level.size(); ++p) m[p] = level[p] <= i;
        return m;
    }
};

namespace detail {

template <class D>
void check_levels(const Entourage<D>& e, const Levels& lv)
{
    if (lv.level.size() != e.space()->size()) throw PreconditionError("every point needs a level");
    for (auto l : lv.level)
        if (l < 1) throw PreconditionError("levels start at 1");
}

}  // namespace detail

template <class D>
struct FusionReport {
    bool pass = false;
    D bounded;                        ///< sup over E, finite on finite data
    std::optional<std::size_t> cut;   ///< minimal passing level i
    std::vector<C0Report<D>> attempts;  ///< one per tried cut, from i = 1
};

/// Passes iff for some cut i the pairs of E outside X_i × X_i satisfy the
/// C0 check against the filtration under `schedule`. Cuts run over
/// 1..max(1, L-1); the last level would make the condition vacuous.
template <class D>
FusionReport<D> classify_fusion(const Entourage<D>& e, const Levels& lv, const std::vector<D>& schedule)
{
    detail::check_levels(e, lv);
    detail::check_schedule(schedule, e.space()->filtration().size(), "tolerance");
    FusionReport<D> rep{false, bounded_bound(e), std::nullopt, {}};
    const std::size_t last = std::max<std::size_t>(1, lv.count() - 1);
    for (std::size_t i = 1; i <= last; ++i) {
        auto inside = lv.up_to(i);
        rep.attempts.push_back(detail::c0_against(e, schedule, &inside));
        if (rep.attempts.back().pass) {
            rep.pass = true;
            rep.cut = i;
            break;
        }
    }
    return rep;
}

template <class D>
struct HybridReport {
    bool pass = false;
    std::vector<D> sup_by_level;      ///< h_i = sup d over E \ (X_i × X_i), i = 1..L
    std::optional<std::size_t> start; ///< minimal i with h_j <= tau_j for all j >= i
    std::optional<std::size_t> last_violation;
};

/// Passes iff the level sups eventually sit below the tolerance schedule:
/// h_j <= tau_j for every j from some i <= max(1, L-1) on.
template <class D>
HybridReport<D> classify_hybrid(const Entourage<D>& e, const Levels& lv, const std::vector<D>& schedule)
{
    detail::check_levels(e, lv);
    const std::size_t count = lv.count();
    detail::check_schedule(schedule, count, "tolerance");
    HybridReport<D> rep;
    for (std::size_t i = 1; i <= count; ++i) rep.sup_by_level.push_back(detail::sup_outside(e, lv.up_to(i)).value);
    std::size_t start = count + 1;
    while (start > 1 && !(schedule[start - 2] < rep.sup_by_level[start - 2])) --start;
    if (start > 1) rep.last_violation = start - 1;
    if (start <= std::max<std::size_t>(1, count - 1)) {
        rep.pass = true;
        rep.start = start;
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Maps between finite spaces
// ---------------------------------------------------------------------------

template <class DS, class DT = DS>
struct PointMap {
    SpacePtr<DS> source;
    SpacePtr<DT> target;
    std::vector<PointId> values;

    PointMap(SpacePtr<DS> s, SpacePtr<DT> t, std::vector<PointId> v) : source(std::move(s)), target(std::move(t)), values(std::move(v))
    {
        if (values.size() != source->size()) throw PreconditionError("point map must be total");
        for (auto y : values)
            if (y >= target->size()) throw PreconditionError("point map value outside the target");
    }

    PointId operator()(PointId x) const { return values[x]; }
};

template <class DA, class DB, class DC>
PointMap<DA, DC> compose(const PointMap<DB, DC>& g, const PointMap<DA, DB>& f)
{
    if (f.target != g.source) throw PreconditionError("maps are not composable");
    std::vector<PointId> v;
    for (auto y : f.values) v.push_back(g.values[y]);
    return PointMap<DA, DC>(f.source, g.target, std::move(v));
}

/// Step function given at sample radii: value at r is the entry of the
/// largest radius <= r.
template <class DR, class DV>
struct ProfileTable {
    std::vector<std::pair<DR, DV>> rows;

    std::optional<DV> at(const DR& r) const
    {
        std::optional<DV> v;
        for (const auto& [rad, val] : rows) {
            if (r < rad) break;
            v = val;
        }
        return v;
    }
};

/// For every realized radius R of the target: max diameter of f^{-1}(ball(y, R)).
template <class DS, class DT>
ProfileTable<DT, DS> properness_profile(const PointMap<DS, DT>& f)
{
    ProfileTable<DT, DS> t;
    std::vector<std::vector<PointId>> fibres(f.target->size());
    for (PointId x = 0; x < f.source->size(); ++x) fibres[f.values[x]].push_back(x);
    for (const auto& r : f.target->realized_distances()) {
        DS worst = DistanceTraits<DS>::zero();
        for (PointId y = 0; y < f.target->size(); ++y) {
            PointSet pre;
            for (auto z : ball(*f.target, y, r)) pre.insert(pre.end(), fibres[z].begin(), fibres[z].end());
            DS d = f.source->diameter_of(pre);
            if (worst < d) worst = d;
        }
        t.rows.emplace_back(r, worst);
    }
    return t;
}

/// R -> sup{d(f x, f x') : d(x, x') <= R} over the realized source distances.
template <class DS, class DT>
ProfileTable<DS, DT> bornologous_profile(const PointMap<DS, DT>& f)
{
    const auto& s = *f.source;
    std::vector<std::tuple<DS, PointId, PointId>> pairs;
    for (PointId a = 0; a < s.size(); ++a)
        for (PointId b = a; b < s.size(); ++b) pairs.emplace_back(s.distance(a, b), a, b);
    std::sort(pairs.begin(), pairs.end(), [](const auto& x, const auto& y) { return std::get<0>(x) < std::get<0>(y); });
    ProfileTable<DS, DT> t;
    DT run = DistanceTraits<DT>::zero();
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        const auto& [d, a, b] = pairs[i];
        const auto& img = f.target->distance(f.values[a], f.values[b]);
        if (run < img) run = img;
        if (i + 1 == pairs.size() || std::get<0>(pairs[i]) < std::get<0>(pairs[i + 1])) t.rows.emplace_back(d, run);
    }
    return t;
}

template <class D>
struct ClosenessReport {
    D value;
    PointId point = 0;
};

/// sup_x d(f x, g x).
template <class DS, class DT>
ClosenessReport<DT> closeness(const PointMap<DS, DT>& f, const PointMap<DS, DT>& g)
{
    if (f.source != g.source || f.target != g.target) throw PreconditionError("maps have different sources or targets");
    ClosenessReport<DT> r{DistanceTraits<DT>::zero(), 0};
    for (PointId x = 0; x < f.source->size(); ++x) {
        const auto& d = f.target->distance(f.values[x], g.values[x]);
        if (r.value < d) r = {d, x};
    }
    return r;
}

// ---------------------------------------------------------------------------
// Coarse excisiveness
// ---------------------------------------------------------------------------

template <class D>
struct ExcisiveRow {
    D radius;
    bool ok = true;          ///< false when E ∩ F is empty but the thickenings meet
    D minimal;               ///< least S with E_R ∩ F_R ⊆ (E ∩ F)_S
};

/// For each R the least S with E_R ∩ F_R ⊆ (E ∩ F)_S, thickenings closed.
template <class D>
std::vector<ExcisiveRow<D>> excisive_profile(const MetricSpace<D>& space, PointSet e, PointSet f, const std::vector<D>& scales)
{
    e = detail::normalized(std::move(e));
    f = detail::normalized(std::move(f));
    PointSet both, all;
    std::set_union(e.begin(), e.end(), f.begin(), f.end(), std::back_inserter(all));
    if (all.size() != space.size() || (!all.empty() && all.back() >= space.size()))
        throw PreconditionError("the two pieces must cover the space");
    std::set_intersection(e.begin(), e.end(), f.begin(), f.end(), std::back_inserter(both));
    std::vector<ExcisiveRow<D>> out;
    for (const auto& r : scales) {
        if (r < DistanceTraits<D>::zero()) throw PreconditionError("negative thickening radius");
        auto er = space.thickening(e, r), fr = space.thickening(f, r);
        PointSet meet;
        std::set_intersection(er.begin(), er.end(), fr.begin(), fr.end(), std::back_inserter(meet));
        ExcisiveRow<D> row{r, true, DistanceTraits<D>::zero()};
        if (!meet.empty()) {
            if (both.empty()) {
                row.ok = false;
            } else {
                for (auto x : meet) {
                    D d = space.distance_to_set(x, both);
                    if (row.minimal < d) row.minimal = d;
                }
            }
        }
        out.push_back(row);
    }
    return out;
}

}  // namespace coarsekit
