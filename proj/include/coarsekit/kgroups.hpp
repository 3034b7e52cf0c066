#pragma once

#include <algorithm>
#include <optional>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "errors.hpp"
#include "rational.hpp"

namespace coarsekit {

using IntVector = std::vector<Integer>;
using IntMatrix = std::vector<IntVector>;  // row-major

namespace intmat {

inline IntMatrix zeros(std::size_t rows, std::size_t cols) { return IntMatrix(rows, IntVector(cols, 0)); }

inline IntMatrix identity(std::size_t n)
{
    auto m = zeros(n, n);
    for (std::size_t i = 0; i < n; ++i) m[i][i] = 1;
    return m;
}

inline std::size_t cols_of(const IntMatrix& m, std::size_t fallback = 0) { return m.empty() ? fallback : m[0].size(); }

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b, std::size_t inner, std::size_t b_cols)
{
    IntMatrix out = zeros(a.size(), b_cols);
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t k = 0; k < inner; ++k) {
            if (a[i][k] == 0) continue;
            for (std::size_t j = 0; j < b_cols; ++j) out[i][j] += a[i][k] * b[k][j];
        }
    return out;
}

inline IntMatrix multiply(const IntMatrix& a, const IntMatrix& b) { return multiply(a, b, b.size(), cols_of(b)); }

inline IntMatrix transpose(const IntMatrix& a, std::size_t cols)
{
    IntMatrix t = zeros(cols, a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        for (std::size_t j = 0; j < cols; ++j) t[j][i] = a[i][j];
    return t;
}

inline IntVector apply(const IntMatrix& m, const IntVector& v)
{
    IntVector out(m.size(), 0);
    for (std::size_t i = 0; i < m.size(); ++i)
        for (std::size_t j = 0; j < v.size(); ++j) out[i] += m[i][j] * v[j];
    return out;
}

inline bool is_zero(const IntVector& v)
{
    return std::all_of(v.begin(), v.end(), [](const Integer& a) { return a == 0; });
}

/// floor(a / b) for b != 0.
inline Integer floor_div(const Integer& a, const Integer& b)
{
    Integer q;
    mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
    return q;
}

inline void add_multiple(IntVector& row, const IntVector& other, const Integer& factor)
{
    if (factor == 0) return;
    for (std::size_t j = 0; j < row.size(); ++j) row[j] += factor * other[j];
}

/// Row Hermite form on the first `width` columns: positive pivots, entries above a
/// pivot reduced into [0, pivot). Whole rows take part in every operation, so extra
/// columns record the transformation. Returns the rank.
inline std::size_t hermite_rows(IntMatrix& rows, std::size_t width)
{
    std::size_t r = 0;
    for (std::size_t col = 0; col < width && r < rows.size(); ++col) {
        while (true) {
            std::optional<std::size_t> best;
            for (std::size_t i = r; i < rows.size(); ++i)
                if (rows[i][col] != 0 && (!best || abs(rows[i][col]) < abs(rows[*best][col]))) best = i;
            if (!best) break;
            std::swap(rows[r], rows[*best]);
            bool clean = true;
            for (std::size_t i = r + 1; i < rows.size(); ++i) {
                if (rows[i][col] == 0) continue;
                add_multiple(rows[i], rows[r], -floor_div(rows[i][col], rows[r][col]));
                if (rows[i][col] != 0) clean = false;
            }
            if (clean) break;
        }
        if (rows[r][col] == 0) continue;
        if (rows[r][col] < 0)
            for (auto& a : rows[r]) a = -a;
        for (std::size_t i = 0; i < r; ++i) add_multiple(rows[i], rows[r], -floor_div(rows[i][col], rows[r][col]));
        ++r;
    }
    return r;
}

}  // namespace intmat

/// Canonical basis (row Hermite form) of the lattice spanned by the given vectors of Z^n.
inline IntMatrix hermite_normal_form(IntMatrix generators, std::size_t n)
{
    for (const auto& g : generators)
        if (g.size() != n) throw PreconditionError("generator length differs from the ambient rank");
    auto rank = intmat::hermite_rows(generators, n);
    generators.resize(rank);
    return generators;
}

struct SmithForm {
    IntMatrix u, d, v;            ///< u * m * v = d
    std::vector<Integer> diagonal;  ///< nonzero diagonal entries, each dividing the next
    bool verified = false;
};

/// Smith normal form with unimodular transforms, checked by recomputing u * m * v.
inline SmithForm smith_normal_form(const IntMatrix& m, std::size_t cols)
{
    const std::size_t rows = m.size();
    for (const auto& r : m)
        if (r.size() != cols) throw PreconditionError("ragged integer matrix");
    SmithForm s{intmat::identity(rows), m, intmat::identity(cols), {}, false};
    auto& d = s.d;
    auto row_op = [&](std::size_t i, std::size_t k, const Integer& f) {  // row_i += f row_k
        intmat::add_multiple(d[i], d[k], f);
        intmat::add_multiple(s.u[i], s.u[k], f);
    };
    auto col_op = [&](std::size_t j, std::size_t k, const Integer& f) {  // col_j += f col_k
        for (auto& r : d) r[j] += f * r[k];
        for (auto& r : s.v) r[j] += f * r[k];
    };
    auto swap_rows = [&](std::size_t i, std::size_t k) {
        std::swap(d[i], d[k]);
        std::swap(s.u[i], s.u[k]);
    };
    auto swap_cols = [&](std::size_t j, std::size_t k) {
        for (auto& r : d) std::swap(r[j], r[k]);
        for (auto& r : s.v) std::swap(r[j], r[k]);
    };
    for (std::size_t t = 0; t < std::min(rows, cols); ++t) {
        std::optional<std::pair<std::size_t, std::size_t>> best;
        for (std::size_t i = t; i < rows; ++i)
            for (std::size_t j = t; j < cols; ++j)
                if (d[i][j] != 0 && (!best || abs(d[i][j]) < abs(d[best->first][best->second]))) best = {i, j};
        if (!best) break;
        swap_rows(t, best->first);
        swap_cols(t, best->second);
        while (true) {
            bool clean = true;
            for (std::size_t i = t + 1; i < rows; ++i)
                if (d[i][t] != 0) {
                    row_op(i, t, -intmat::floor_div(d[i][t], d[t][t]));
                    if (d[i][t] != 0) clean = false;
                }
            for (std::size_t j = t + 1; j < cols; ++j)
                if (d[t][j] != 0) {
                    col_op(j, t, -intmat::floor_div(d[t][j], d[t][t]));
                    if (d[t][j] != 0) clean = false;
                }
            if (!clean) {
                // a smaller remainder sits in row t or column t; make it the pivot
                std::size_t bi = t, bj = t;
                for (std::size_t i = t + 1; i < rows; ++i)
                    if (d[i][t] != 0 && abs(d[i][t]) < abs(d[bi][bj])) bi = i, bj = t;
                for (std::size_t j = t + 1; j < cols; ++j)
                    if (d[t][j] != 0 && abs(d[t][j]) < abs(d[bi][bj])) bi = t, bj = j;
                swap_rows(t, bi);
                swap_cols(t, bj);
                continue;
            }
            std::optional<std::size_t> bad;
            for (std::size_t i = t + 1; i < rows && !bad; ++i)
                for (std::size_t j = t + 1; j < cols; ++j)
                    if (d[i][j] % d[t][t] != 0) {
                        bad = i;
                        break;
                    }
            if (!bad) break;
            row_op(t, *bad, 1);
        }
        if (d[t][t] < 0) {
            for (auto& a : d[t]) a = -a;
            for (auto& a : s.u[t]) a = -a;
        }
        s.diagonal.push_back(d[t][t]);
    }
    s.verified = intmat::multiply(intmat::multiply(s.u, m, rows, cols), s.v, cols, cols) == d;
    for (std::size_t i = 1; i < s.diagonal.size(); ++i)
        if (s.diagonal[i] % s.diagonal[i - 1] != 0) s.verified = false;
    return s;
}

// ---------------------------------------------------------------------------
// Groups, homomorphisms, subgroups
// ---------------------------------------------------------------------------

/// Free abelian group on distinct labels.
struct FreeAbGroup {
    std::vector<std::string> labels;

    FreeAbGroup() = default;
    explicit FreeAbGroup(std::vector<std::string> l) : labels(std::move(l))
    {
        std::set<std::string> seen(labels.begin(), labels.end());
        if (seen.size() != labels.size()) throw MalformedInput("group basis labels must be distinct");
    }

    std::size_t rank() const { return labels.size(); }

    std::size_t index_of(const std::string& label) const
    {
        auto it = std::find(labels.begin(), labels.end(), label);
        if (it == labels.end()) throw PreconditionError("unknown basis label '" + label + "'");
        return static_cast<std::size_t>(it - labels.begin());
    }

    friend bool operator==(const FreeAbGroup& a, const FreeAbGroup& b) { return a.labels == b.labels; }
};

/// matrix[i][j]: coefficient of target basis i in the image of source basis j.
struct GroupHom {
    FreeAbGroup source, target;
    IntMatrix matrix;

    GroupHom(FreeAbGroup s, FreeAbGroup t, IntMatrix m) : source(std::move(s)), target(std::move(t)), matrix(std::move(m))
    {
        if (matrix.size() != target.rank()) throw MalformedInput("hom matrix needs one row per target basis element");
        for (const auto& r : matrix)
            if (r.size() != source.rank()) throw MalformedInput("hom matrix needs one column per source basis element");
    }

    IntVector operator()(const IntVector& v) const
    {
        if (v.size() != source.rank()) throw PreconditionError("vector length differs from the source rank");
        return intmat::apply(matrix, v);
    }
};

inline GroupHom identity_hom(const FreeAbGroup& g) { return GroupHom(g, g, intmat::identity(g.rank())); }

/// g ∘ f.
inline GroupHom compose(const GroupHom& g, const GroupHom& f)
{
    if (!(f.target == g.source)) throw PreconditionError("homs are not composable");
    return GroupHom(f.source, g.target, intmat::multiply(g.matrix, f.matrix, f.target.rank(), f.source.rank()));
}

/// Subgroup of Z^rank, held as its canonical Hermite basis.
class SubgroupBasis {
public:
    SubgroupBasis() = default;
    SubgroupBasis(std::size_t ambient, IntMatrix generators)
        : ambient_(ambient), basis_(hermite_normal_form(std::move(generators), ambient))
    {
    }

    static SubgroupBasis whole(std::size_t ambient) { return SubgroupBasis(ambient, intmat::identity(ambient)); }

    std::size_t ambient() const { return ambient_; }
    const IntMatrix& basis() const { return basis_; }
    std::size_t rank() const { return basis_.size(); }

    /// Membership by reduction against the echelon basis.
    bool contains(IntVector v) const
    {
        if (v.size() != ambient_) throw PreconditionError("vector length differs from the ambient rank");
        for (const auto& b : basis_) {
            std::size_t pivot = 0;
            while (b[pivot] == 0) ++pivot;
            if (v[pivot] % b[pivot] != 0) return false;
            intmat::add_multiple(v, b, -(v[pivot] / b[pivot]));
        }
        return intmat::is_zero(v);
    }

    /// First basis vector of this subgroup outside the other, if any.
    std::optional<IntVector> witness_outside(const SubgroupBasis& other) const
    {
        for (const auto& b : basis_)
            if (!other.contains(b)) return b;
        return std::nullopt;
    }

    bool subset_of(const SubgroupBasis& other) const { return !witness_outside(other); }

    friend SubgroupBasis operator+(const SubgroupBasis& a, const SubgroupBasis& b)
    {
        if (a.ambient_ != b.ambient_) throw PreconditionError("subgroups of different ambient groups");
        IntMatrix g = a.basis_;
        g.insert(g.end(), b.basis_.begin(), b.basis_.end());
        return SubgroupBasis(a.ambient_, std::move(g));
    }

    friend bool operator==(const SubgroupBasis& a, const SubgroupBasis& b) { return a.ambient_ == b.ambient_ && a.basis_ == b.basis_; }

private:
    std::size_t ambient_ = 0;
    IntMatrix basis_;
};

/// Kernel of an integer matrix with the given number of columns.
inline SubgroupBasis matrix_kernel(const IntMatrix& m, std::size_t cols)
{
    const std::size_t rows = m.size();
    IntMatrix aug(cols, IntVector(rows + cols, 0));
    for (std::size_t j = 0; j < cols; ++j) {
        for (std::size_t i = 0; i < rows; ++i) aug[j][i] = m[i][j];
        aug[j][rows + j] = 1;
    }
    auto rank = intmat::hermite_rows(aug, rows);
    IntMatrix gens;
    for (std::size_t j = rank; j < cols; ++j) gens.emplace_back(aug[j].begin() + static_cast<long>(rows), aug[j].end());
    return SubgroupBasis(cols, std::move(gens));
}

inline SubgroupBasis kernel(const GroupHom& h) { return matrix_kernel(h.matrix, h.source.rank()); }

inline SubgroupBasis image(const GroupHom& h)
{
    return SubgroupBasis(h.target.rank(), intmat::transpose(h.matrix, h.source.rank()));
}

/// {v : h v ∈ s}.
inline SubgroupBasis preimage(const GroupHom& h, const SubgroupBasis& s)
{
    if (s.ambient() != h.target.rank()) throw PreconditionError("subgroup does not live in the hom's target");
    // kernel of [h | -basis(s)ᵀ], projected to the first block
    const std::size_t n = h.source.rank(), k = s.rank();
    IntMatrix m = intmat::zeros(h.target.rank(), n + k);
    for (std::size_t i = 0; i < h.target.rank(); ++i) {
        for (std::size_t j = 0; j < n; ++j) m[i][j] = h.matrix[i][j];
        for (std::size_t j = 0; j < k; ++j) m[i][n + j] = -s.basis()[j][i];
    }
    IntMatrix gens;
    auto joint = matrix_kernel(m, n + k);
    for (const auto& g : joint.basis()) gens.emplace_back(g.begin(), g.begin() + static_cast<long>(n));
    return SubgroupBasis(n, std::move(gens));
}

/// Z^free ⊕ ⊕ Z/torsion[i]; torsion entries exceed 1 and divide each other in order.
struct AbelianInvariants {
    std::size_t free_rank = 0;
    std::vector<Integer> torsion;

    std::string to_string() const
    {
        std::string out;
        auto add = [&](const std::string& s) { out += (out.empty() ? "" : " + ") + s; };
        if (free_rank == 1) add("Z");
        else if (free_rank > 1) add("Z^" + std::to_string(free_rank));
        for (const auto& t : torsion) add("Z/" + t.get_str());
        return out.empty() ? "0" : out;
    }

    friend bool operator==(const AbelianInvariants& a, const AbelianInvariants& b)
    {
        return a.free_rank == b.free_rank && a.torsion == b.torsion;
    }
};

/// Z^ambient / relations.
inline AbelianInvariants quotient_invariants(std::size_t ambient, const SubgroupBasis& relations)
{
    if (relations.ambient() != ambient) throw PreconditionError("relations live in a different ambient group");
    AbelianInvariants q;
    q.free_rank = ambient - relations.rank();
    if (relations.rank() == 0) return q;
    auto s = smith_normal_form(relations.basis(), ambient);
    if (!s.verified) throw ConstructionFailure("Smith form verification failed");
    for (const auto& d : s.diagonal)
        if (d != 1) q.torsion.push_back(d);
    return q;
}

// ---------------------------------------------------------------------------
// Collapsed point sets
// ---------------------------------------------------------------------------

inline const std::string collapsed_label = "pt";

namespace detail {

inline std::vector<char> membership(const std::vector<std::string>& x, const std::vector<std::string>& c, const char* what)
{
    std::unordered_map<std::string, std::size_t> at;
    for (std::size_t i = 0; i < x.size(); ++i) at.emplace(x[i], i);
    std::vector<char> in(x.size(), 0);
    for (const auto& p : c) {
        auto it = at.find(p);
        if (it == at.end()) throw PreconditionError(std::string(what) + " contains '" + p + "', which is not a point of X");
        in[it->second] = 1;
    }
    return in;
}

}  // namespace detail

/// Basis of Z^{X/C}: the collapsed class first (when C is nonempty), then X \ C in order.
inline FreeAbGroup collapsed_group(const std::vector<std::string>& x, const std::vector<std::string>& c)
{
    auto in = detail::membership(x, c, "collapsed set");
    std::vector<std::string> labels;
    if (!c.empty()) labels.push_back(collapsed_label);
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!in[i]) labels.push_back(x[i]);
    return FreeAbGroup(std::move(labels));
}

/// Z^{X/C} -> Z^{X/C'}: the collapsed class and the points of C' \ C feed the new collapsed class.
inline GroupHom quotient_hom(const std::vector<std::string>& x, const std::vector<std::string>& c, const std::vector<std::string>& c_prime)
{
    if (std::find(x.begin(), x.end(), collapsed_label) != x.end()) throw MalformedInput("'pt' is reserved for the collapsed class");
    (void)FreeAbGroup{x};
    auto in_c = detail::membership(x, c, "C");
    auto in_cp = detail::membership(x, c_prime, "C'");
    for (std::size_t i = 0; i < x.size(); ++i)
        if (in_c[i] && !in_cp[i]) throw PreconditionError("C is not contained in C' ('" + x[i] + "')");
    auto src = collapsed_group(x, c), tgt = collapsed_group(x, c_prime);
    IntMatrix m = intmat::zeros(tgt.rank(), src.rank());
    for (std::size_t j = 0; j < src.rank(); ++j) {
        const auto& l = src.labels[j];
        bool into_class = l == collapsed_label || in_cp[static_cast<std::size_t>(std::find(x.begin(), x.end(), l) - x.begin())];
        m[into_class ? 0 : tgt.index_of(l)][j] = 1;
    }
    return GroupHom(src, tgt, std::move(m));
}

/// {n : Σ_{C'/C} n = 0, n = 0 on X/C'} in Z^{X/C}.
inline SubgroupBasis quotient_hom_kernel_description(const GroupHom& h)
{
    const auto& src = h.source;
    std::vector<std::size_t> merged;
    for (std::size_t j = 0; j < src.rank(); ++j)
        if (h.target.rank() > 0 && h.target.labels[0] == collapsed_label && h.matrix[0][j] == 1) merged.push_back(j);
    IntMatrix gens;
    for (std::size_t k = 1; k < merged.size(); ++k) {
        IntVector v(src.rank(), 0);
        v[merged[0]] = 1;
        v[merged[k]] = -1;
        gens.push_back(std::move(v));
    }
    return SubgroupBasis(src.rank(), std::move(gens));
}

struct QuotientHomCheck {
    bool surjective = false;      ///< every Smith invariant is 1 and the rank is full
    bool kernel_matches = false;  ///< kernel equals the sum-zero description
};

inline QuotientHomCheck check_quotient_hom(const GroupHom& h)
{
    QuotientHomCheck c;
    auto snf = smith_normal_form(h.matrix, h.source.rank());
    c.surjective = snf.verified && snf.diagonal.size() == h.target.rank() &&
                   std::all_of(snf.diagonal.begin(), snf.diagonal.end(), [](const Integer& d) { return d == 1; });
    c.kernel_matches = kernel(h) == quotient_hom_kernel_description(h);
    return c;
}

// ---------------------------------------------------------------------------
// Finite truncation of the C0 computation
// ---------------------------------------------------------------------------

struct StageReport {
    std::vector<std::string> from, to;  ///< collapsed sets
    GroupHom map;
    QuotientHomCheck check;
};

struct ZeroKReport {
    std::vector<StageReport> stages;   ///< X -> X/C_1 -> ... -> X/C_M
    bool composite_consistent = false; ///< product of the stages equals the direct map X -> X/C_M
    SubgroupBasis kernel_collapse;           ///< kernel of Z^X -> Z^{X/C_M}
    SubgroupBasis kernel_block;           ///< kernel of Z^X -> Z ⊕ Z^{X \ C_M}
    bool collapse_matches_description = false;
    bool kernels_equal = false;
    AbelianInvariants quotient_collapse, quotient_block, expected;
    bool quotient_matches = false;
    AbelianInvariants odd;             ///< K_1 model: 0
};

inline ZeroKReport c0_k_report(const std::vector<std::string>& x, const std::vector<std::vector<std::string>>& chain)
{
    if (x.empty()) throw PreconditionError("X must be nonempty");
    if (chain.empty()) throw PreconditionError("the chain needs at least one set");
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (chain[i].empty()) throw PreconditionError("chain sets must be nonempty");
        if (i > 0) {
            auto prev = detail::membership(x, chain[i - 1], "chain set");
            auto cur = detail::membership(x, chain[i], "chain set");
            for (std::size_t p = 0; p < x.size(); ++p)
                if (prev[p] && !cur[p]) throw PreconditionError("chain sets must increase");
        }
    }
    ZeroKReport r;
    std::vector<std::string> prev;
    std::optional<GroupHom> composite;
    for (const auto& c : chain) {
        auto h = quotient_hom(x, prev, c);
        r.stages.push_back({prev, c, h, check_quotient_hom(h)});
        composite = composite ? compose(h, *composite) : h;
        prev = c;
    }
    const auto& last = chain.back();
    auto direct = quotient_hom(x, {}, last);
    r.composite_consistent = composite->matrix == direct.matrix && composite->target == direct.target;
    r.kernel_collapse = kernel(*composite);

    // block algebra description Z ⊕ Z^{X \ C}: the compact block sums, the rest is kept
    auto in_last = detail::membership(x, last, "chain set");
    std::vector<std::string> block_labels{"K(C)"};
    for (std::size_t p = 0; p < x.size(); ++p)
        if (!in_last[p]) block_labels.push_back("diag:" + x[p]);
    IntMatrix block = intmat::zeros(block_labels.size(), x.size());
    for (std::size_t p = 0, k = 1; p < x.size(); ++p) {
        if (in_last[p]) block[0][p] = 1;
        else block[k++][p] = 1;
    }
    r.kernel_block = matrix_kernel(block, x.size());

    IntMatrix described;
    std::optional<std::size_t> first;
    for (std::size_t p = 0; p < x.size(); ++p) {
        if (!in_last[p]) continue;
        if (!first) {
            first = p;
            continue;
        }
        IntVector v(x.size(), 0);
        v[*first] = 1;
        v[p] = -1;
        described.push_back(std::move(v));
    }
    r.collapse_matches_description = r.kernel_collapse == SubgroupBasis(x.size(), described);
    r.kernels_equal = r.kernel_collapse == r.kernel_block;
    r.quotient_collapse = quotient_invariants(x.size(), r.kernel_collapse);
    r.quotient_block = quotient_invariants(x.size(), r.kernel_block);
    r.expected.free_rank = 1 + static_cast<std::size_t>(std::count(in_last.begin(), in_last.end(), 0));
    r.quotient_matches = r.quotient_collapse == r.expected && r.quotient_block == r.expected;
    return r;
}

// ---------------------------------------------------------------------------
// Exactness
// ---------------------------------------------------------------------------

/// Z^rank / relations.
struct PresentedGroup {
    FreeAbGroup generators;
    SubgroupBasis relations;

    static PresentedGroup free(FreeAbGroup g)
    {
        auto n = g.rank();
        return {std::move(g), SubgroupBasis(n, {})};
    }
};

struct ExactnessNode {
    std::size_t index = 0;       ///< the group between hom index-1 and hom index (0-based homs)
    bool image_in_kernel = false;
    bool kernel_in_image = false;
    std::optional<IntVector> counterexample;

    bool exact() const { return image_in_kernel && kernel_in_image; }
};

struct ExactnessReport {
    std::vector<ExactnessNode> nodes;
    bool well_defined = true;  ///< every hom maps relations into relations

    bool exact() const
    {
        return well_defined && std::all_of(nodes.begin(), nodes.end(), [](const ExactnessNode& n) { return n.exact(); });
    }
};

/// For homs h_0 : G_0 -> G_1, ..., h_{r-1} : G_{r-1} -> G_r, checks im h_{i-1} = ker h_i at G_1 .. G_{r-1}.
/// groups[i] gives the relations of G_i (all free when empty).
inline ExactnessReport exactness_check(const std::vector<GroupHom>& homs, std::vector<PresentedGroup> groups = {})
{
    if (homs.empty()) throw PreconditionError("exactness needs at least one hom");
    for (std::size_t i = 0; i + 1 < homs.size(); ++i)
        if (!(homs[i].target == homs[i + 1].source)) throw PreconditionError("homs " + std::to_string(i) + " and " + std::to_string(i + 1) + " do not compose");
    if (groups.empty()) {
        groups.push_back(PresentedGroup::free(homs[0].source));
        for (const auto& h : homs) groups.push_back(PresentedGroup::free(h.target));
    }
    if (groups.size() != homs.size() + 1) throw PreconditionError("need one presented group per node");
    for (std::size_t i = 0; i < homs.size(); ++i)
        if (!(groups[i].generators == homs[i].source) || !(groups[i + 1].generators == homs[i].target))
            throw PreconditionError("presented groups do not match the homs");
    ExactnessReport rep;
    for (std::size_t i = 0; i < homs.size(); ++i)
        for (const auto& rel : groups[i].relations.basis())
            if (!groups[i + 1].relations.contains(homs[i](rel))) rep.well_defined = false;
    for (std::size_t i = 1; i < homs.size(); ++i) {
        ExactnessNode node;
        node.index = i;
        auto im = image(homs[i - 1]) + groups[i].relations;
        auto ker = preimage(homs[i], groups[i + 1].relations);
        auto out_of_ker = im.witness_outside(ker);
        auto out_of_im = ker.witness_outside(im);
        node.image_in_kernel = !out_of_ker;
        node.kernel_in_image = !out_of_im;
        node.counterexample = out_of_ker ? out_of_ker : out_of_im;
        rep.nodes.push_back(std::move(node));
    }
    return rep;
}

inline FreeAbGroup trivial_group() { return FreeAbGroup{}; }

inline GroupHom zero_hom(const FreeAbGroup& s, const FreeAbGroup& t)
{
    return GroupHom(s, t, intmat::zeros(t.rank(), s.rank()));
}

/// 0 -> Z^{Y∩Z} -> Z^Y ⊕ Z^Z -> Z^{Y∪Z} -> 0 with inclusions (i1 ⊕ i2) and the difference (j1 - j2).
inline std::vector<GroupHom> mayer_vietoris_chain(const std::vector<std::string>& y, const std::vector<std::string>& z)
{
    std::vector<std::string> both, either = y;
    for (const auto& p : y)
        if (std::find(z.begin(), z.end(), p) != z.end()) both.push_back(p);
    for (const auto& p : z)
        if (std::find(y.begin(), y.end(), p) == y.end()) either.push_back(p);
    std::vector<std::string> sum;
    for (const auto& p : y) sum.push_back("Y:" + p);
    for (const auto& p : z) sum.push_back("Z:" + p);
    FreeAbGroup g_both(both), g_sum(sum), g_either(either);
    IntMatrix inc = intmat::zeros(sum.size(), both.size());
    for (std::size_t j = 0; j < both.size(); ++j) {
        inc[g_sum.index_of("Y:" + both[j])][j] = 1;
        inc[g_sum.index_of("Z:" + both[j])][j] = 1;
    }
    IntMatrix diff = intmat::zeros(either.size(), sum.size());
    for (std::size_t j = 0; j < sum.size(); ++j) {
        const auto& l = sum[j];
        diff[g_either.index_of(l.substr(2))][j] = l[0] == 'Y' ? 1 : -1;
    }
    return {zero_hom(trivial_group(), g_both), GroupHom(g_both, g_sum, inc), GroupHom(g_sum, g_either, diff),
            zero_hom(g_either, trivial_group())};
}

}  // namespace coarsekit
