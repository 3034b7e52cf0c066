#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "coarse.hpp"
#include "errors.hpp"
#include "polynomial.hpp"
#include "rational.hpp"
#include "spaces.hpp"

namespace coarsekit {

/// ℓ^p(points) ⊗ ℓ^p(channels); basis vector (point, channel) has flat index point*channels + channel.
template <class D>
struct Module {
    SpacePtr<D> space;
    std::size_t channels = 1;

    std::size_t dimension() const { return space->size() * channels; }
    std::size_t index(PointId x, std::size_t ch) const { return x * channels + ch; }
    PointId point_of(std::size_t flat) const { return flat / channels; }
    std::size_t channel_of(std::size_t flat) const { return flat % channels; }

    friend bool operator==(const Module& a, const Module& b) { return a.space == b.space && a.channels == b.channels; }
};

/// Sparse exact matrix from a source module to a target module. Zero entries are never stored.
template <class D>
class FiniteOperator {
public:
    using Key = std::pair<std::size_t, std::size_t>;  // (row, column), flat indices

    FiniteOperator(Module<D> target, Module<D> source) : target_(std::move(target)), source_(std::move(source))
    {
        if (!target_.space || !source_.space) throw PreconditionError("operator modules need a space");
        if (target_.channels == 0 || source_.channels == 0) throw PreconditionError("channel count must be positive");
    }

    /// Operator on ℓ^p(space) ⊗ ℓ^p(channels).
    static FiniteOperator on(SpacePtr<D> space, std::size_t channels)
    {
        Module<D> m{std::move(space), channels};
        return FiniteOperator(m, m);
    }

    static FiniteOperator identity(const Module<D>& m)
    {
        FiniteOperator t(m, m);
        for (std::size_t i = 0; i < m.dimension(); ++i) t.entries_.emplace(Key{i, i}, Rational(1));
        return t;
    }

    const Module<D>& target() const { return target_; }
    const Module<D>& source() const { return source_; }
    bool is_endomorphism() const { return target_ == source_; }
    const std::map<Key, Rational>& entries() const { return entries_; }
    bool is_zero() const { return entries_.empty(); }

    /// Entry T[(y, j), (x, i)].
    void set(PointId y, std::size_t j, PointId x, std::size_t i, const Rational& v)
    {
        check(target_, y, j);
        check(source_, x, i);
        set_flat(target_.index(y, j), source_.index(x, i), v);
    }

    Rational get(PointId y, std::size_t j, PointId x, std::size_t i) const
    {
        check(target_, y, j);
        check(source_, x, i);
        return get_flat(target_.index(y, j), source_.index(x, i));
    }

    void set_flat(std::size_t row, std::size_t col, Rational v)
    {
        v.canonicalize();
        if (v == 0) entries_.erase({row, col});
        else entries_[{row, col}] = std::move(v);
    }

    Rational get_flat(std::size_t row, std::size_t col) const
    {
        auto it = entries_.find({row, col});
        return it == entries_.end() ? Rational(0) : it->second;
    }

    FiniteOperator transpose() const
    {
        FiniteOperator t(source_, target_);
        for (const auto& [k, v] : entries_) t.entries_.emplace(Key{k.second, k.first}, v);
        return t;
    }

    friend FiniteOperator operator+(const FiniteOperator& a, const FiniteOperator& b)
    {
        same_shape(a, b);
        FiniteOperator out = a;
        for (const auto& [k, v] : b.entries_) out.set_flat(k.first, k.second, out.get_flat(k.first, k.second) + v);
        return out;
    }

    friend FiniteOperator operator-(const FiniteOperator& a, const FiniteOperator& b)
    {
        same_shape(a, b);
        FiniteOperator out = a;
        for (const auto& [k, v] : b.entries_) out.set_flat(k.first, k.second, out.get_flat(k.first, k.second) - v);
        return out;
    }

    friend FiniteOperator operator*(const FiniteOperator& a, const FiniteOperator& b)
    {
        if (!(a.source_ == b.target_)) throw PreconditionError("operator shapes do not compose");
        std::vector<std::vector<std::pair<std::size_t, const Rational*>>> rows(b.target_.dimension());
        for (const auto& [k, v] : b.entries_) rows[k.first].emplace_back(k.second, &v);
        std::map<Key, Rational> acc;
        for (const auto& [k, v] : a.entries_)
            for (const auto& [col, w] : rows[k.second]) acc[{k.first, col}] += v * *w;
        FiniteOperator out(a.target_, b.source_);
        for (auto& [k, v] : acc)
            if (v != 0) out.entries_.emplace(k, std::move(v));
        return out;
    }

    friend bool operator==(const FiniteOperator& a, const FiniteOperator& b)
    {
        return a.target_ == b.target_ && a.source_ == b.source_ && a.entries_ == b.entries_;
    }

private:
    static void check(const Module<D>& m, PointId x, std::size_t ch)
    {
        if (x >= m.space->size()) throw PreconditionError("operator index point outside the space");
        if (ch >= m.channels) throw PreconditionError("channel index out of range");
    }

    static void same_shape(const FiniteOperator& a, const FiniteOperator& b)
    {
        if (!(a.target_ == b.target_) || !(a.source_ == b.source_)) throw PreconditionError("operator shapes differ");
    }

    Module<D> target_, source_;
    std::map<Key, Rational> entries_;
};

/// Pairs (x, y) = (column point, row point) carrying a nonzero block.
template <class D>
std::vector<PointPair> support(const FiniteOperator<D>& t)
{
    std::vector<PointPair> out;
    for (const auto& [k, v] : t.entries()) out.emplace_back(t.source().point_of(k.second), t.target().point_of(k.first));
    std::sort(out.begin(), out.end());
    out.erase(std::unique(out.begin(), out.end()), out.end());
    return out;
}

/// Max distance over the support; needs source and target over the same space.
template <class D>
D propagation(const FiniteOperator<D>& t)
{
    if (t.source().space != t.target().space) throw PreconditionError("propagation needs one underlying space");
    D best = DistanceTraits<D>::zero();
    for (const auto& [x, y] : support(t)) {
        const auto& d = t.source().space->distance(x, y);
        if (best < d) best = d;
    }
    return best;
}

/// Multiplication by the indicator of a point set.
template <class D>
FiniteOperator<D> indicator_operator(const Module<D>& m, const PointSet& s)
{
    FiniteOperator<D> t(m, m);
    for (auto x : s) {
        if (x >= m.space->size()) throw PreconditionError("indicator set leaves the space");
        for (std::size_t c = 0; c < m.channels; ++c) t.set(x, c, x, c, 1);
    }
    return t;
}

/// χ_Y T χ_Y.
template <class D>
FiniteOperator<D> truncate(const FiniteOperator<D>& t, const PointSet& y)
{
    for (auto p : y)
        if (p >= t.target().space->size() || p >= t.source().space->size()) throw PreconditionError("truncation set leaves the space");
    auto rows = detail::indicator(t.target().space->size(), y);
    auto cols = detail::indicator(t.source().space->size(), y);
    FiniteOperator<D> out(t.target(), t.source());
    for (const auto& [k, v] : t.entries())
        if (rows[t.target().point_of(k.first)] && cols[t.source().point_of(k.second)]) out.set_flat(k.first, k.second, v);
    return out;
}

template <class D>
struct Split {
    FiniteOperator<D> along_first;   ///< χ_Y T
    FiniteOperator<D> along_second;  ///< T - χ_Y T
    D radius;                        ///< propagation of T
    bool reassembles = false;
    bool supports_thickened = false; ///< supports inside Y_R x Y_R and Z_R x Z_R
};

template <class D>
Split<D> split_along(const FiniteOperator<D>& t, const PointSet& y, const PointSet& z)
{
    if (!t.is_endomorphism()) throw PreconditionError("split_along needs an operator on one module");
    const auto& space = *t.source().space;
    PointSet both;
    std::set_union(y.begin(), y.end(), z.begin(), z.end(), std::back_inserter(both));
    if (both != space.all_points()) throw PreconditionError("the two pieces must cover the space");
    auto in_y = detail::indicator(space.size(), y);
    FiniteOperator<D> ty(t.target(), t.source());
    for (const auto& [k, v] : t.entries())
        if (in_y[t.target().point_of(k.first)]) ty.set_flat(k.first, k.second, v);
    Split<D> s{ty, t - ty, propagation(t)};
    s.reassembles = s.along_first + s.along_second == t;
    auto inside = [&](const FiniteOperator<D>& piece, const PointSet& part) {
        auto thick = detail::indicator(space.size(), space.thickening(part, s.radius));
        for (const auto& [x, yy] : support(piece))
            if (!thick[x] || !thick[yy]) return false;
        return true;
    };
    s.supports_thickened = inside(s.along_first, y) && inside(s.along_second, z);
    return s;
}

// ---------------------------------------------------------------------------
// Operator norms
// ---------------------------------------------------------------------------

/// Exact for p = 1 (a rational) and p = 2 (square root of an algebraic number);
/// a lower bound from test vectors otherwise.
struct OperatorNorm {
    enum class Kind { rational, sqrt_algebraic, lower_bound };
    double p = 1;
    Kind kind = Kind::rational;
    Rational value;         ///< p = 1
    AlgebraicReal squared;  ///< p = 2: the norm squared
    double bound = 0;       ///< other p

    bool exact() const { return kind != Kind::lower_bound; }

    double to_double() const
    {
        switch (kind) {
        case Kind::rational: return value.get_d();
        case Kind::sqrt_algebraic: return std::sqrt(squared.to_double());
        default: return bound;
        }
    }

    std::string describe() const
    {
        switch (kind) {
        case Kind::rational: return format_rational(value);
        case Kind::sqrt_algebraic:
            if (squared.is_pinned()) return "sqrt(" + format_rational(squared.lower()) + ")";
            return "sqrt(root of " + squared.polynomial().to_string() + " in (" + format_rational(squared.lower()) + ", " +
                   format_rational(squared.upper()) + "])";
        default: return ">= " + std::to_string(bound);
        }
    }
};

/// Exact comparison a <= b of two exact norms with the same p.
inline bool norm_le(const OperatorNorm& a, const OperatorNorm& b)
{
    if (!a.exact() || !b.exact() || a.kind != b.kind) throw PreconditionError("exact norm comparison needs two exact norms of one kind");
    if (a.kind == OperatorNorm::Kind::rational) return a.value <= b.value;
    return a.squared <= b.squared;
}

namespace detail {

template <class D>
std::vector<std::vector<Rational>> gram_matrix(const FiniteOperator<D>& t)
{
    // restrict to the nonzero columns; the others only add zero eigenvalues
    std::vector<std::size_t> cols;
    for (const auto& [k, v] : t.entries()) cols.push_back(k.second);
    std::sort(cols.begin(), cols.end());
    cols.erase(std::unique(cols.begin(), cols.end()), cols.end());
    std::map<std::size_t, std::size_t> at;
    for (std::size_t i = 0; i < cols.size(); ++i) at[cols[i]] = i;
    std::map<std::size_t, std::vector<std::pair<std::size_t, Rational>>> rows;
    for (const auto& [k, v] : t.entries()) rows[k.first].emplace_back(at[k.second], v);
    std::vector<std::vector<Rational>> g(cols.size(), std::vector<Rational>(cols.size()));
    for (const auto& [r, row] : rows)
        for (const auto& [a, va] : row)
            for (const auto& [b, vb] : row) g[a][b] += va * vb;
    return g;
}

}  // namespace detail

template <class D>
OperatorNorm opnorm(const FiniteOperator<D>& t, double p)
{
    if (!(p >= 1) || std::isinf(p)) throw PreconditionError("opnorm needs p in [1, inf)");
    OperatorNorm n;
    n.p = p;
    if (p == 1) {
        std::map<std::size_t, Rational> colsum;
        for (const auto& [k, v] : t.entries()) colsum[k.second] += abs(v);
        n.kind = OperatorNorm::Kind::rational;
        n.value = 0;
        for (const auto& [c, s] : colsum) n.value = std::max(n.value, s);
        return n;
    }
    if (p == 2) {
        n.kind = OperatorNorm::Kind::sqrt_algebraic;
        if (t.is_zero()) {
            n.squared = AlgebraicReal::rational(0);
            return n;
        }
        n.squared = AlgebraicReal::largest_root(characteristic_polynomial(detail::gram_matrix(t)));
        return n;
    }
    // test vectors: basis vectors, then every sign pattern when the source has at most 12 dimensions
    n.kind = OperatorNorm::Kind::lower_bound;
    const std::size_t dim = t.source().dimension();
    std::vector<std::vector<std::pair<std::size_t, double>>> cols(dim);
    for (const auto& [k, v] : t.entries()) cols[k.second].emplace_back(k.first, v.get_d());
    auto ratio_for = [&](const std::vector<double>& x) {
        std::map<std::size_t, long double> y;
        long double xn = 0, yn = 0;
        for (std::size_t c = 0; c < dim; ++c) {
            if (x[c] == 0) continue;
            xn += std::pow(std::fabs(static_cast<long double>(x[c])), p);
            for (const auto& [r, v] : cols[c]) y[r] += static_cast<long double>(v) * x[c];
        }
        for (const auto& [r, v] : y) yn += std::pow(std::fabs(v), p);
        if (xn == 0) return 0.0L;
        return std::pow(yn / xn, 1.0L / p);
    };
    long double best = 0;
    for (std::size_t c = 0; c < dim; ++c) {
        std::vector<double> x(dim, 0.0);
        x[c] = 1;
        best = std::max(best, ratio_for(x));
    }
    if (dim <= 12)
        for (std::uint32_t mask = 0; mask < (1u << dim); ++mask) {
            std::vector<double> x(dim);
            for (std::size_t c = 0; c < dim; ++c) x[c] = (mask >> c & 1) ? -1.0 : 1.0;
            best = std::max(best, ratio_for(x));
        }
    n.bound = static_cast<double>(best * (1 - 1e-12L));
    return n;
}

// ---------------------------------------------------------------------------
// Covering isometries
// ---------------------------------------------------------------------------

/// V from (X, m) to (Y, m') and V⁺ back, with V⁺V = I.
template <class D>
struct IsometryPair {
    FiniteOperator<D> forward;
    FiniteOperator<D> backward;
};

template <class D>
struct IsometryCheck {
    bool left_inverse = false;      ///< V⁺V = I
    bool inverse_support = false;   ///< supp(V⁺) = supp(V)⁻¹
};

template <class D>
IsometryCheck<D> check_isometry(const IsometryPair<D>& v)
{
    IsometryCheck<D> c;
    auto prod = v.backward * v.forward;
    c.left_inverse = prod == FiniteOperator<D>::identity(v.forward.source());
    auto fs = support(v.forward);
    for (auto& [a, b] : fs) std::swap(a, b);
    std::sort(fs.begin(), fs.end());
    c.inverse_support = fs == support(v.backward);
    return c;
}

/// V(x, i) = (f x, rank_x * m + i), rank_x the position of x in its fibre by ascending id; V⁺ = Vᵀ.
template <class D>
IsometryPair<D> covering_isometry(const PointMap<D, D>& f, std::size_t m, std::size_t target_channels)
{
    if (m == 0) throw PreconditionError("channel count must be positive");
    std::vector<std::size_t> rank(f.source->size()), fibre(f.target->size(), 0);
    for (PointId x = 0; x < f.source->size(); ++x) rank[x] = fibre[f(x)]++;
    std::size_t widest = fibre.empty() ? 0 : *std::max_element(fibre.begin(), fibre.end());
    if (target_channels < m * widest)
        throw PreconditionError("covering isometry needs " + std::to_string(m * widest) + " target channels, got " +
                                std::to_string(target_channels));
    FiniteOperator<D> v(Module<D>{f.target, target_channels}, Module<D>{f.source, m});
    for (PointId x = 0; x < f.source->size(); ++x)
        for (std::size_t i = 0; i < m; ++i) v.set(f(x), rank[x] * m + i, x, i, 1);
    auto vt = v.transpose();
    return {std::move(v), std::move(vt)};
}

/// Whether every pair (y, f(x)) with (x, y) in supp(V) lies in the tolerance entourage.
template <class D>
bool graph_within(const IsometryPair<D>& v, const PointMap<D, D>& f, const Entourage<D>& tolerance)
{
    for (const auto& [x, y] : support(v.forward))
        if (!tolerance.contains(y, f(x))) return false;
    return true;
}

/// Ad_V(T) = V T V⁺.
template <class D>
FiniteOperator<D> conjugate(const IsometryPair<D>& v, const FiniteOperator<D>& t)
{
    if (!(v.forward.source() == t.target()) || !(t.source() == v.backward.target()))
        throw PreconditionError("operator does not act on the isometry's source module");
    return v.forward * t * v.backward;
}

// ---------------------------------------------------------------------------
// Swindle rotations
// ---------------------------------------------------------------------------

/// Places an operator into block (row_block, col_block) of a blocks-fold direct sum,
/// modelled as channel stacking: channel c of block b becomes b*channels + c.
template <class D>
FiniteOperator<D> embed_block(const FiniteOperator<D>& a, std::size_t row_block, std::size_t col_block, std::size_t blocks)
{
    if (row_block >= blocks || col_block >= blocks) throw PreconditionError("block index out of range");
    const auto &tm = a.target(), &sm = a.source();
    FiniteOperator<D> out(Module<D>{tm.space, tm.channels * blocks}, Module<D>{sm.space, sm.channels * blocks});
    for (const auto& [k, v] : a.entries()) {
        PointId y = tm.point_of(k.first), x = sm.point_of(k.second);
        out.set(y, row_block * tm.channels + tm.channel_of(k.first), x, col_block * sm.channels + sm.channel_of(k.second), v);
    }
    return out;
}

template <class D>
FiniteOperator<D> block2(const FiniteOperator<D>& a, const FiniteOperator<D>& b, const FiniteOperator<D>& c, const FiniteOperator<D>& d)
{
    return embed_block(a, 0, 0, 2) + embed_block(b, 0, 1, 2) + embed_block(c, 1, 0, 2) + embed_block(d, 1, 1, 2);
}

template <class D>
struct Rotation {
    FiniteOperator<D> u;
    FiniteOperator<D> u_plus;
};

/// U = [[V' V⁺, 1 - V' V'⁺], [1 - V V⁺, V V'⁺]] and U⁺ with the roles swapped, where V = V_k, V' = V_{k+1}.
template <class D>
Rotation<D> swindle_rotation(const IsometryPair<D>& vk, const IsometryPair<D>& vk1)
{
    if (!(vk.forward.target() == vk1.forward.target()) || !(vk.forward.source() == vk1.forward.source()))
        throw PreconditionError("rotation needs two isometries between the same modules");
    auto one = FiniteOperator<D>::identity(vk.forward.target());
    auto pk = vk.forward * vk.backward, pk1 = vk1.forward * vk1.backward;
    auto a = vk1.forward * vk.backward, d = vk.forward * vk1.backward;
    return {block2(a, one - pk1, one - pk, d), block2(d, one - pk, one - pk1, a)};
}

template <class D>
struct RotationCheck {
    bool right_inverse = false;   ///< U U⁺ = I
    bool left_inverse = false;    ///< U⁺ U = I
    bool intertwines = false;     ///< U [[V_k,0],[0,0]] = [[V_{k+1},0],[0,0]]
    bool co_intertwines = false;  ///< [[V⁺_k,0],[0,0]] U⁺ = [[V⁺_{k+1},0],[0,0]]

    bool all() const { return right_inverse && left_inverse && intertwines && co_intertwines; }
};

template <class D>
RotationCheck<D> check_rotation(const Rotation<D>& r, const IsometryPair<D>& vk, const IsometryPair<D>& vk1)
{
    RotationCheck<D> c;
    auto one = FiniteOperator<D>::identity(r.u.target());
    c.right_inverse = r.u * r.u_plus == one;
    c.left_inverse = r.u_plus * r.u == one;
    c.intertwines = r.u * embed_block(vk.forward, 0, 0, 2) == embed_block(vk1.forward, 0, 0, 2);
    c.co_intertwines = embed_block(vk.backward, 0, 0, 2) * r.u_plus == embed_block(vk1.backward, 0, 0, 2);
    return c;
}

/// K-fold truncation of the block swindle. Block k of beta2 is Ad_{V_k}(T) and block k of
/// beta3 is Ad_{V_{k+1}}(T); the last block of beta3 is zero because V_K is not given.
template <class D>
struct BlockSwindle {
    std::size_t blocks = 0;
    FiniteOperator<D> beta2;
    FiniteOperator<D> beta3;
    FiniteOperator<D> u;        ///< diag(U_0, ..., U_{K-2}, I) on the doubled sum
    FiniteOperator<D> u_plus;
    std::vector<char> block_ok;  ///< identity on block pair k, k < K-1
    bool sub_block_identity = false;
    bool full_identity = false;  ///< usually false: the edge block is truncated
};

template <class D>
BlockSwindle<D> block_swindle(const FiniteOperator<D>& t, const std::vector<IsometryPair<D>>& pairs, std::size_t k_blocks)
{
    if (k_blocks < 2) throw PreconditionError("block swindle needs K >= 2");
    if (pairs.size() < k_blocks) throw PreconditionError("block swindle needs K isometry pairs");
    for (const auto& v : pairs)
        if (!(v.forward.source() == pairs[0].forward.source()) || !(v.forward.target() == pairs[0].forward.target()))
            throw PreconditionError("isometry pairs must share source and target modules");
    const std::size_t k = k_blocks;
    std::vector<FiniteOperator<D>> ad;
    for (std::size_t i = 0; i < k; ++i) ad.push_back(conjugate(pairs[i], t));
    const Module<D> big = pairs[0].forward.target();

    BlockSwindle<D> out{k, FiniteOperator<D>(Module<D>{big.space, big.channels * k}, Module<D>{big.space, big.channels * k}),
                        FiniteOperator<D>(Module<D>{big.space, big.channels * k}, Module<D>{big.space, big.channels * k}),
                        FiniteOperator<D>(Module<D>{big.space, big.channels * 2 * k}, Module<D>{big.space, big.channels * 2 * k}),
                        FiniteOperator<D>(Module<D>{big.space, big.channels * 2 * k}, Module<D>{big.space, big.channels * 2 * k}),
                        {}};
    for (std::size_t i = 0; i < k; ++i) {
        out.beta2 = out.beta2 + embed_block(ad[i], i, i, k);
        if (i + 1 < k) out.beta3 = out.beta3 + embed_block(ad[i + 1], i, i, k);
    }
    // doubled sum: block (copy c, index i) sits at c*k + i
    auto one = FiniteOperator<D>::identity(big);
    for (std::size_t i = 0; i < k; ++i) {
        Rotation<D> r = i + 1 < k ? swindle_rotation(pairs[i], pairs[i + 1]) : Rotation<D>{block2(one, one - one, one - one, one), block2(one, one - one, one - one, one)};
        for (std::size_t a = 0; a < 2; ++a)
            for (std::size_t b = 0; b < 2; ++b) {
                auto pick = [&](const FiniteOperator<D>& u2) {
                    FiniteOperator<D> blk(big, big);
                    for (const auto& [key, v] : u2.entries()) {
                        const auto& m2 = u2.target();
                        std::size_t rc = m2.channel_of(key.first), cc = m2.channel_of(key.second);
                        if (rc / big.channels != a || cc / big.channels != b) continue;
                        blk.set(m2.point_of(key.first), rc % big.channels, m2.point_of(key.second), cc % big.channels, v);
                    }
                    return blk;
                };
                out.u = out.u + embed_block(pick(r.u), a * k + i, b * k + i, 2 * k);
                out.u_plus = out.u_plus + embed_block(pick(r.u_plus), a * k + i, b * k + i, 2 * k);
            }
    }
    auto lhs = out.u * embed_block(out.beta2, 0, 0, 2) * out.u_plus;
    auto rhs = embed_block(out.beta3, 0, 0, 2);
    out.full_identity = lhs == rhs;
    // compare block by block on the doubled sum
    out.block_ok.assign(k - 1, 1);
    auto block_of = [&](std::size_t flat) { return lhs.target().channel_of(flat) / big.channels; };
    auto mark = [&](const FiniteOperator<D>& a, const FiniteOperator<D>& b) {
        for (const auto& [key, v] : a.entries()) {
            std::size_t rb = block_of(key.first), cb = block_of(key.second);
            if (b.get_flat(key.first, key.second) == v) continue;
            for (std::size_t blk : {rb % k, cb % k})
                if (blk + 1 < k) out.block_ok[blk] = 0;
        }
    };
    mark(lhs, rhs);
    mark(rhs, lhs);
    out.sub_block_identity = std::all_of(out.block_ok.begin(), out.block_ok.end(), [](char c) { return c != 0; });
    return out;
}

}  // namespace coarsekit
