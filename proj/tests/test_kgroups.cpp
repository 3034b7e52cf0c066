#include <gtest/gtest.h>

#include <coarsekit/kgroups.hpp>

#include <functional>
#include <random>

using namespace coarsekit;

namespace {

IntMatrix mat(std::vector<std::vector<long>> rows)
{
    IntMatrix m;
    for (const auto& r : rows) m.emplace_back(r.begin(), r.end());
    return m;
}

IntVector vec(std::vector<long> v) { return IntVector(v.begin(), v.end()); }

Rational det(std::vector<std::vector<Rational>> a)
{
    const std::size_t n = a.size();
    Rational d = 1;
    for (std::size_t c = 0; c < n; ++c) {
        std::size_t p = c;
        while (p < n && a[p][c] == 0) ++p;
        if (p == n) return 0;
        if (p != c) {
            std::swap(a[p], a[c]);
            d = -d;
        }
        d *= a[c][c];
        for (std::size_t r = c + 1; r < n; ++r) {
            Rational f = a[r][c] / a[c][c];
            for (std::size_t k = c; k < n; ++k) a[r][k] -= f * a[c][k];
        }
    }
    return d;
}

Integer int_det(const IntMatrix& m)
{
    std::vector<std::vector<Rational>> a;
    for (const auto& r : m) a.emplace_back(r.begin(), r.end());
    Rational d = det(a);
    return d.get_num();
}

// invariant factors from gcds of k x k minors
std::vector<Integer> determinantal_factors(const IntMatrix& m, std::size_t cols)
{
    const std::size_t rows = m.size();
    std::vector<Integer> g{1};
    for (std::size_t k = 1; k <= std::min(rows, cols); ++k) {
        Integer acc = 0;
        std::vector<std::size_t> rsel, csel;
        std::function<void(std::size_t, std::vector<std::size_t>&, std::size_t, const std::function<void()>&)> choose =
            [&](std::size_t start, std::vector<std::size_t>& sel, std::size_t limit, const std::function<void()>& done) {
                if (sel.size() == k) {
                    done();
                    return;
                }
                for (std::size_t i = start; i < limit; ++i) {
                    sel.push_back(i);
                    choose(i + 1, sel, limit, done);
                    sel.pop_back();
                }
            };
        choose(0, rsel, rows, [&] {
            choose(0, csel, cols, [&] {
                IntMatrix sub;
                for (auto r : rsel) {
                    IntVector row;
                    for (auto c : csel) row.push_back(m[r][c]);
                    sub.push_back(row);
                }
                Integer d = int_det(sub);
                mpz_gcd(acc.get_mpz_t(), acc.get_mpz_t(), d.get_mpz_t());
            });
        });
        if (acc == 0) break;
        g.push_back(acc);
    }
    std::vector<Integer> out;
    for (std::size_t k = 1; k < g.size(); ++k) out.push_back(g[k] / g[k - 1]);
    return out;
}

IntMatrix random_matrix(std::mt19937& rng, std::size_t rows, std::size_t cols, long spread)
{
    IntMatrix m = intmat::zeros(rows, cols);
    for (auto& r : m)
        for (auto& a : r) a = static_cast<long>(rng() % static_cast<unsigned long>(2 * spread + 1)) - spread;
    return m;
}

// every v in [-b, b]^n with M v = 0
std::vector<IntVector> small_kernel_vectors(const IntMatrix& m, std::size_t n, long b)
{
    std::vector<IntVector> out;
    IntVector v(n, -b);
    while (true) {
        if (intmat::is_zero(intmat::apply(m, v))) out.push_back(v);
        std::size_t i = 0;
        while (i < n && v[i] == b) v[i++] = -b;
        if (i == n) break;
        v[i] += 1;
    }
    return out;
}

std::vector<std::string> points(std::size_t n)
{
    std::vector<std::string> x;
    for (std::size_t i = 0; i < n; ++i) x.push_back("x" + std::to_string(i));
    return x;
}

}  // namespace

TEST(Smith, Examples)
{
    auto z = smith_normal_form(intmat::zeros(2, 3), 3);
    EXPECT_TRUE(z.verified);
    EXPECT_TRUE(z.diagonal.empty());
    auto s = smith_normal_form(mat({{2, 0}, {0, 3}}), 2);
    EXPECT_TRUE(s.verified);
    EXPECT_EQ(s.diagonal, (std::vector<Integer>{1, 6}));
    EXPECT_EQ(determinantal_factors(mat({{2, 0}, {0, 3}}), 2), (std::vector<Integer>{1, 6}));
}

TEST(Smith, RandomMatricesAgainstMinors)
{
    std::mt19937 rng(2);
    for (int trial = 0; trial < 200; ++trial) {
        std::size_t r = 1 + rng() % 6, c = 1 + rng() % 6;
        auto m = random_matrix(rng, r, c, 6);
        if (rng() % 4 == 0 && r > 1) m[r - 1] = m[0];  // force rank deficiency
        auto s = smith_normal_form(m, c);
        ASSERT_TRUE(s.verified);
        EXPECT_EQ(intmat::multiply(intmat::multiply(s.u, m, r, c), s.v, c, c), s.d);
        EXPECT_EQ(abs(int_det(s.u)), 1);
        EXPECT_EQ(abs(int_det(s.v)), 1);
        for (std::size_t i = 0; i < r; ++i)
            for (std::size_t j = 0; j < c; ++j)
                if (i != j) { EXPECT_EQ(s.d[i][j], 0); }
        if (r <= 4 && c <= 4) { EXPECT_EQ(s.diagonal, determinantal_factors(m, c)); }
    }
}

TEST(Hermite, CanonicalAndMembership)
{
    // the same lattice from different generators
    auto a = hermite_normal_form(mat({{2, 0}, {0, 3}}), 2);
    auto b = hermite_normal_form(mat({{2, 3}, {4, 3}, {0, 6}}), 2);
    EXPECT_EQ(a, b);
    EXPECT_EQ(a, mat({{2, 0}, {0, 3}}));
    SubgroupBasis s(2, mat({{2, 3}, {4, 3}}));
    EXPECT_TRUE(s.contains(vec({2, 9})));
    EXPECT_FALSE(s.contains(vec({1, 0})));
    EXPECT_EQ(s + SubgroupBasis(2, mat({{1, 0}})), SubgroupBasis(2, mat({{1, 0}, {0, 3}})));

    std::mt19937 rng(4);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 1 + rng() % 4, k = 1 + rng() % 5;
        auto g = random_matrix(rng, k, n, 5);
        // a unimodular shuffle of the generators spans the same lattice
        auto h = g;
        for (int step = 0; step < 10 && k > 1; ++step) {
            std::size_t i = rng() % k, j = rng() % k;
            if (i != j) intmat::add_multiple(h[i], h[j], static_cast<long>(rng() % 5) - 2);
        }
        std::shuffle(h.begin(), h.end(), rng);
        EXPECT_EQ(SubgroupBasis(n, g), SubgroupBasis(n, h));
        for (const auto& v : g) EXPECT_TRUE(SubgroupBasis(n, g).contains(v));
    }
}

TEST(Groups, KernelAndImage)
{
    FreeAbGroup g3({"a", "b", "c"}), g1({"s"});
    auto id = identity_hom(g3);
    EXPECT_EQ(kernel(id).rank(), 0u);
    EXPECT_EQ(image(id), SubgroupBasis::whole(3));
    GroupHom sum(g3, g1, mat({{1, 1, 1}}));
    EXPECT_EQ(kernel(sum).rank(), 2u);
    EXPECT_EQ(image(sum), SubgroupBasis::whole(1));

    std::mt19937 rng(6);
    for (int trial = 0; trial < 100; ++trial) {
        std::size_t n = 1 + rng() % 4, m = 1 + rng() % 4;
        auto mtx = random_matrix(rng, m, n, 3);
        if (rng() % 3 == 0) mtx[0] = IntVector(n, 0);
        GroupHom h(FreeAbGroup(points(n)), FreeAbGroup(points(m)), mtx);
        auto k = kernel(h);
        EXPECT_EQ(k.rank() + image(h).rank(), n);
        for (const auto& v : k.basis()) EXPECT_TRUE(intmat::is_zero(h(v)));
        // saturation: every small integer kernel vector lies in the computed kernel
        if (n <= 3) {
            for (const auto& v : small_kernel_vectors(mtx, n, 3)) EXPECT_TRUE(k.contains(v));
        }
    }
    EXPECT_THROW(GroupHom(g3, g1, mat({{1, 1}})), MalformedInput);
    EXPECT_THROW(FreeAbGroup({"a", "a"}), MalformedInput);
}

TEST(Groups, QuotientInvariants)
{
    EXPECT_EQ(quotient_invariants(3, SubgroupBasis(3, {})).free_rank, 3u);
    auto q = quotient_invariants(2, SubgroupBasis(2, mat({{2, 0}})));
    EXPECT_EQ(q.free_rank, 1u);
    EXPECT_EQ(q.torsion, (std::vector<Integer>{2}));
    EXPECT_EQ(q.to_string(), "Z + Z/2");
    FreeAbGroup g({"a", "b", "c", "d"});
    auto aug = kernel(GroupHom(g, FreeAbGroup({"s"}), mat({{1, 1, 1, 1}})));
    EXPECT_EQ(quotient_invariants(4, aug).to_string(), "Z");
    auto t = quotient_invariants(3, SubgroupBasis(3, mat({{2, 4, 0}, {0, 6, 0}})));
    EXPECT_EQ(t.free_rank, 1u);
    EXPECT_EQ(t.torsion, (std::vector<Integer>{2, 6}));
}

TEST(QuotientHom, Examples)
{
    auto x = points(4);
    auto same = quotient_hom(x, {"x0"}, {"x0"});
    EXPECT_EQ(same.matrix, intmat::identity(4));

    auto h = quotient_hom(x, {"x0"}, {"x0", "x1"});
    EXPECT_EQ(h.source.labels, (std::vector<std::string>{"pt", "x1", "x2", "x3"}));
    EXPECT_EQ(h.target.labels, (std::vector<std::string>{"pt", "x2", "x3"}));
    EXPECT_EQ(h.matrix, mat({{1, 1, 0, 0}, {0, 0, 1, 0}, {0, 0, 0, 1}}));
    auto k = kernel(h);
    EXPECT_EQ(k.rank(), 1u);
    auto brute = small_kernel_vectors(h.matrix, 4, 2);
    EXPECT_EQ(brute.size(), 5u);  // t * (1, -1, 0, 0), |t| <= 2
    for (const auto& v : brute) EXPECT_TRUE(k.contains(v));
    auto chk = check_quotient_hom(h);
    EXPECT_TRUE(chk.surjective);
    EXPECT_TRUE(chk.kernel_matches);

    EXPECT_THROW(quotient_hom(x, {"x0", "x1"}, {"x0"}), PreconditionError);
    EXPECT_THROW(quotient_hom(x, {"y"}, {"x0"}), PreconditionError);

    // composites agree with the direct map
    std::mt19937 rng(8);
    for (int trial = 0; trial < 100; ++trial) {
        auto pts = points(2 + rng() % 6);
        std::vector<std::string> c1, c2, c3;
        for (const auto& p : pts) {
            auto lvl = rng() % 4;
            if (lvl == 0) c1.push_back(p);
            if (lvl <= 1) c2.push_back(p);
            if (lvl <= 2) c3.push_back(p);
        }
        auto ab = quotient_hom(pts, c1, c2), bc = quotient_hom(pts, c2, c3);
        auto direct = quotient_hom(pts, c1, c3);
        EXPECT_EQ(compose(bc, ab).matrix, direct.matrix);
        EXPECT_TRUE(check_quotient_hom(ab).surjective);
        EXPECT_TRUE(check_quotient_hom(bc).kernel_matches);
    }
}

TEST(ZeroK, Reports)
{
    auto one = c0_k_report({"x"}, {{"x"}});
    EXPECT_EQ(one.quotient_collapse.to_string(), "Z");
    EXPECT_EQ(one.quotient_block.to_string(), "Z");
    EXPECT_TRUE(one.kernels_equal);

    auto x5 = points(5);
    auto full = c0_k_report(x5, {{"x0"}, {"x0", "x1", "x2"}, x5});
    EXPECT_TRUE(full.kernels_equal);
    EXPECT_TRUE(full.collapse_matches_description);
    EXPECT_TRUE(full.composite_consistent);
    EXPECT_EQ(full.quotient_collapse.to_string(), "Z");
    EXPECT_TRUE(full.quotient_matches);
    EXPECT_EQ(full.stages.size(), 3u);
    for (const auto& st : full.stages) {
        EXPECT_TRUE(st.check.surjective);
        EXPECT_TRUE(st.check.kernel_matches);
    }

    auto x6 = points(6);
    auto part = c0_k_report(x6, {{"x1"}, {"x1", "x3", "x4"}});
    EXPECT_EQ(part.quotient_collapse.to_string(), "Z^4");
    EXPECT_EQ(part.expected.free_rank, 4u);
    EXPECT_TRUE(part.quotient_matches);
    EXPECT_EQ(part.odd.to_string(), "0");

    EXPECT_THROW(c0_k_report(x6, {{"x1", "x2"}, {"x1"}}), PreconditionError);
    EXPECT_THROW(c0_k_report(x6, {{}}), PreconditionError);
}

TEST(Exactness, Examples)
{
    FreeAbGroup z({"e"});
    auto zero_in = zero_hom(trivial_group(), z), zero_out = zero_hom(z, trivial_group());
    EXPECT_TRUE(exactness_check({zero_in, identity_hom(z), zero_out}).exact());

    // 0 -> Z -(x2)-> Z -> Z/2 -> 0, the last group presented by one relation
    GroupHom twice(z, z, mat({{2}})), reduce(z, z, mat({{1}}));
    std::vector<PresentedGroup> groups{PresentedGroup::free(trivial_group()), PresentedGroup::free(z), PresentedGroup::free(z),
                                       {z, SubgroupBasis(1, mat({{2}}))}, PresentedGroup::free(trivial_group())};
    auto rep = exactness_check({zero_in, twice, reduce, zero_out}, groups);
    EXPECT_TRUE(rep.well_defined);
    EXPECT_TRUE(rep.exact());
    EXPECT_EQ(rep.nodes.size(), 3u);

    // Z -(x2)-> Z -(id)-> Z is not exact in the middle
    auto bad = exactness_check({twice, identity_hom(z)});
    EXPECT_FALSE(bad.exact());
    ASSERT_TRUE(bad.nodes[0].counterexample.has_value());
    EXPECT_EQ(*bad.nodes[0].counterexample, vec({2}));
    EXPECT_FALSE(bad.nodes[0].image_in_kernel);

    // map not respecting relations
    std::vector<PresentedGroup> g2{{z, SubgroupBasis(1, mat({{2}}))}, PresentedGroup::free(z)};
    EXPECT_FALSE(exactness_check({identity_hom(z)}, g2).well_defined);
    EXPECT_THROW(exactness_check({twice, zero_out, identity_hom(z)}), PreconditionError);
}

TEST(Exactness, MayerVietoris)
{
    std::mt19937 rng(12);
    for (int trial = 0; trial < 100; ++trial) {
        auto pts = points(1 + rng() % 7);
        std::vector<std::string> y, zz;
        for (const auto& p : pts) {
            auto r = rng() % 3;
            if (r != 1) y.push_back(p);
            if (r != 0) zz.push_back(p);
        }
        auto chain = mayer_vietoris_chain(y, zz);
        ASSERT_EQ(chain.size(), 4u);
        auto rep = exactness_check(chain);
        EXPECT_TRUE(rep.exact());
        EXPECT_EQ(rep.nodes.size(), 3u);
    }
}
