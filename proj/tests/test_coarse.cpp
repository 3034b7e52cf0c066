#include <gtest/gtest.h>

#include <random>

#include "coarsekit/coarse.hpp"

using namespace coarsekit;

namespace {

Entourage<Rational> band_pairs(const SpacePtr<Rational>& s, long width)
{
    return Entourage<Rational>::band(s, Rational(width));
}

// Tail space: integers 0..9 (levels 1 and 2) followed by clusters at levels
// 3..6; the cluster at level j is a pair at distance 2^-j placed far out.
struct TailInstance {
    SpacePtr<Rational> space;
    Levels levels;
    std::vector<PointPair> tail;
};

TailInstance tail_instance(bool decaying)
{
    std::vector<Rational> pos;
    std::vector<std::size_t> lv;
    for (int x = 0; x < 10; ++x) {
        pos.push_back(x);
        lv.push_back(x < 5 ? 1 : 2);
    }
    std::vector<PointPair> tail;
    for (std::size_t j = 3; j <= 6; ++j) {
        Rational base(100 * static_cast<long>(j));
        Rational gap = decaying ? Rational(1, 1L << j) : Rational(1);
        tail.emplace_back(pos.size(), pos.size() + 1);
        pos.push_back(base);
        pos.push_back(base + gap);
        lv.push_back(j);
        lv.push_back(j);
    }
    // filtration K_j = X_j
    std::vector<PointSet> filt;
    for (std::size_t j = 1; j <= 6; ++j) {
        PointSet k;
        for (PointId p = 0; p < lv.size(); ++p)
            if (lv[p] <= j) k.push_back(p);
        filt.push_back(k);
    }
    return {make_line_space(pos, filt), Levels{lv}, tail};
}

std::vector<Rational> halving_schedule(std::size_t n, Rational start)
{
    std::vector<Rational> s;
    for (std::size_t i = 0; i < n; ++i) {
        s.push_back(start);
        start /= 2;
    }
    return s;
}

}  // namespace

TEST(Entourage, Algebra)
{
    auto s = make_integer_interval(0, 12);
    auto delta = Entourage<Rational>::diagonal(s);
    auto e = Entourage<Rational>(s, {{0, 3}, {4, 7}, {2, 2}});
    EXPECT_EQ(compose(e, delta), e);
    EXPECT_EQ(compose(delta, e), e);
    EXPECT_EQ(inverse(inverse(e)), e);
    EXPECT_TRUE(inverse(e).contains(3, 0));
    auto u = unite(e, delta);
    EXPECT_EQ(u.pairs().size(), 13u + 2u);
    // band composition oracle: pairs of the 2R band by direct enumeration
    for (long r = 1; r <= 3; ++r) {
        auto b = band_pairs(s, r);
        auto bb = compose(b, b);
        std::vector<PointPair> oracle;
        for (PointId x = 0; x < 13; ++x)
            for (PointId y = 0; y < 13; ++y)
                if (std::labs(static_cast<long>(x) - static_cast<long>(y)) <= 2 * r) oracle.emplace_back(x, y);
        EXPECT_EQ(bb.pairs(), oracle);
    }
    auto other = make_integer_interval(0, 12);
    EXPECT_THROW(compose(e, Entourage<Rational>::diagonal(other)), PreconditionError);
    EXPECT_THROW(Entourage<Rational>(s, {{0, 13}}), MalformedInput);
}

TEST(Entourage, BoundedBound)
{
    auto s = make_integer_interval(0, 20);
    EXPECT_EQ(bounded_bound(Entourage<Rational>::diagonal(s)), 0);
    EXPECT_EQ(bounded_bound(Entourage<Rational>(s, {{3, 10}})), 7);
    std::mt19937 rng(3);
    std::vector<PointPair> p;
    long oracle = 0;
    for (int i = 0; i < 30; ++i) {
        PointId a = rng() % 21, b = rng() % 21;
        p.emplace_back(a, b);
        oracle = std::max(oracle, std::labs(static_cast<long>(a) - static_cast<long>(b)));
    }
    EXPECT_EQ(bounded_bound(Entourage<Rational>(s, p)), oracle);
}

TEST(ControlProfile, Examples)
{
    std::vector<PointSet> filt{{0, 1, 2}, {0, 1, 2, 3, 4, 5, 6}, {}};
    for (PointId p = 0; p < 11; ++p) filt[2].push_back(p);
    auto s = make_space<Rational>(
        [] {
            std::vector<std::string> ids;
            for (int i = 0; i < 11; ++i) ids.push_back(std::to_string(i));
            return ids;
        }(),
        [] {
            std::vector<Rational> m;
            for (long i = 0; i < 11; ++i)
                for (long j = 0; j < 11; ++j) m.push_back(std::labs(i - j));
            return m;
        }(),
        filt);
    auto inside = Entourage<Rational>(s, {{0, 2}, {1, 1}});
    for (const auto& w : control_profile(inside)) EXPECT_EQ(w.value, 0);

    auto far = unite(Entourage<Rational>::diagonal(s), Entourage<Rational>(s, {{1, 6}}));
    auto prof = control_profile(far);
    EXPECT_EQ(prof[0].value, 5);
    EXPECT_EQ(prof[1].value, 0);
    EXPECT_EQ(prof[2].value, 0);

    auto g = make_integer_interval(0, 30);
    std::vector<PointSet> gf;
    for (long r = 5; r < 30; r += 5) {
        PointSet k;
        for (PointId p = 0; p <= static_cast<PointId>(r); ++p) k.push_back(p);
        gf.push_back(k);
    }
    gf.push_back(g->all_points());
    auto gs = make_space<Rational>(g->ids(), [&] {
        std::vector<Rational> m;
        for (PointId a = 0; a < g->size(); ++a)
            for (PointId b = 0; b < g->size(); ++b) m.push_back(g->distance(a, b));
        return m;
    }(), gf);
    std::vector<PointPair> band;
    for (PointId x = 0; x + 3 < gs->size(); ++x) band.emplace_back(x, x + 3);
    auto bp = control_profile(Entourage<Rational>(gs, band));
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) EXPECT_EQ(bp[i].value, 3);
    EXPECT_EQ(bp.back().value, 0);
}

TEST(ControlProfile, NonincreasingOnRandomEntourages)
{
    std::mt19937 rng(17);
    auto inst = tail_instance(true);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<PointPair> p;
        for (int i = 0; i < 15; ++i) p.emplace_back(rng() % inst.space->size(), rng() % inst.space->size());
        auto prof = control_profile(Entourage<Rational>(inst.space, p));
        for (std::size_t i = 1; i < prof.size(); ++i) EXPECT_LE(prof[i].value, prof[i - 1].value);
        EXPECT_EQ(prof.back().value, 0);
    }
}

TEST(ClassifyC0, Examples)
{
    auto inst = tail_instance(true);
    auto sched = halving_schedule(6, Rational(1, 2));
    EXPECT_TRUE(classify_c0(Entourage<Rational>::diagonal(inst.space), sched).pass);

    auto flat = tail_instance(false);
    auto rep = classify_c0(Entourage<Rational>(flat.space, flat.tail), halving_schedule(6, Rational(1, 2)));
    EXPECT_FALSE(rep.pass);
    ASSERT_TRUE(rep.first_violation.has_value());
    EXPECT_EQ(*rep.first_violation, 0u);
    EXPECT_TRUE(rep.witness.has_value());

    // tail gaps 2^-j sit outside K_i for i < j; the worst one outside K_i is 2^-(i+1) for i >= 2
    auto decay = classify_c0(Entourage<Rational>(inst.space, inst.tail), halving_schedule(6, Rational(1, 2)));
    EXPECT_TRUE(decay.pass);
    EXPECT_EQ(decay.profile[2], Rational(1, 16));
    EXPECT_THROW(classify_c0(Entourage<Rational>::diagonal(inst.space), halving_schedule(3, Rational(1))),
                 PreconditionError);
}

TEST(ClassifyFusion, Examples)
{
    auto inst = tail_instance(true);
    auto sched = halving_schedule(6, Rational(1, 2));
    // inside X_1 x X_1
    auto low = Entourage<Rational>(inst.space, {{0, 4}, {1, 3}});
    auto r1 = classify_fusion(low, inst.levels, sched);
    EXPECT_TRUE(r1.pass);
    EXPECT_EQ(*r1.cut, 1u);

    // width-5 band inside X_2 x X_2 plus a decaying tail: passes from cut 2
    std::vector<PointPair> p = inst.tail;
    for (PointId x = 0; x + 5 < 10; ++x) p.emplace_back(x, x + 5);
    auto e = Entourage<Rational>(inst.space, p);
    auto r2 = classify_fusion(e, inst.levels, sched);
    EXPECT_TRUE(r2.pass);
    EXPECT_EQ(*r2.cut, 2u);
    EXPECT_EQ(r2.bounded, 5);

    auto flat = tail_instance(false);
    auto r3 = classify_fusion(Entourage<Rational>(flat.space, flat.tail), flat.levels, sched);
    EXPECT_FALSE(r3.pass);
}

TEST(ClassifyHybrid, Examples)
{
    auto inst = tail_instance(true);
    std::vector<Rational> tau{4, 3, 2, 1, Rational(1, 2), Rational(1, 4)};
    auto within = Entourage<Rational>(inst.space, {{5, 9}});
    auto r = classify_hybrid(within, inst.levels, tau);
    EXPECT_TRUE(r.pass);
    EXPECT_EQ(*r.start, 1u);

    // line points with four levels, sup sequence (3, 2, 1, 0)
    auto s = make_integer_interval(0, 7);
    Levels lv{{1, 1, 2, 2, 3, 3, 4, 4}};
    auto e = Entourage<Rational>(s, {{0, 3}, {2, 4}, {5, 6}});
    auto rep = classify_hybrid(e, lv, std::vector<Rational>{4, 3, 2, 1});
    EXPECT_EQ(rep.sup_by_level, (std::vector<Rational>{3, 2, 1, 0}));
    EXPECT_TRUE(rep.pass);
    auto tight = classify_hybrid(e, lv, std::vector<Rational>{1, 1, Rational(1, 2), Rational(1, 2)});
    EXPECT_FALSE(tight.pass);
}

TEST(FusionImpliesHybrid, GeneratedCorpus)
{
    std::mt19937 rng(41);
    int fusion_passes = 0;
    for (int trial = 0; trial < 300; ++trial) {
        auto inst = tail_instance(rng() % 2 == 0);
        std::vector<PointPair> p;
        std::size_t k = rng() % 8;
        for (std::size_t i = 0; i < k; ++i) p.emplace_back(rng() % inst.space->size(), rng() % inst.space->size());
        if (rng() % 2) p.insert(p.end(), inst.tail.begin(), inst.tail.end());
        auto e = Entourage<Rational>(inst.space, p);
        auto sched = halving_schedule(6, Rational(static_cast<long>(1 + rng() % 200), 16));
        auto f = classify_fusion(e, inst.levels, sched);
        auto h = classify_hybrid(e, inst.levels, sched);
        if (f.pass) {
            ++fusion_passes;
            EXPECT_TRUE(h.pass);
            EXPECT_LE(*h.start, *f.cut);
        }
    }
    EXPECT_GT(fusion_passes, 20);
}

TEST(MapProfiles, Properness)
{
    auto s = make_integer_interval(0, 6);
    std::vector<PointId> id(7);
    for (PointId i = 0; i < 7; ++i) id[i] = i;
    auto prof = properness_profile(PointMap<Rational>(s, s, id));
    for (const auto& [r, d] : prof.rows) EXPECT_LE(d, 2 * r);

    auto two = make_integer_interval(0, 1);
    auto constant = PointMap<Rational>(two, s, {3, 3});
    auto cp = properness_profile(constant);
    EXPECT_EQ(cp.rows.front().second, 1);
}

TEST(MapProfiles, Bornologous)
{
    auto s = make_integer_interval(0, 10);
    std::vector<PointId> id(11);
    for (PointId i = 0; i < 11; ++i) id[i] = i;
    auto iso = bornologous_profile(PointMap<Rational>(s, s, id));
    for (const auto& [r, v] : iso.rows) EXPECT_EQ(r, v);

    auto big = make_integer_interval(0, 20);
    std::vector<PointId> dbl;
    for (PointId i = 0; i < 11; ++i) dbl.push_back(2 * i);
    auto lip = bornologous_profile(PointMap<Rational>(s, big, dbl));
    for (const auto& [r, v] : lip.rows) EXPECT_LE(v, 2 * r);
    Rational prev = 0;
    for (const auto& [r, v] : lip.rows) {
        EXPECT_GE(v, prev);
        prev = v;
    }
}

TEST(MapProfiles, CompositionBound)
{
    std::mt19937 rng(8);
    auto a = make_integer_interval(0, 9);
    auto b = make_integer_interval(0, 14);
    auto c = make_integer_interval(0, 19);
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<PointId> fv, gv;
        for (int i = 0; i < 10; ++i) fv.push_back(rng() % 15);
        for (int i = 0; i < 15; ++i) gv.push_back(rng() % 20);
        PointMap<Rational> f(a, b, fv), g(b, c, gv);
        auto gf = compose(g, f);
        auto tf = bornologous_profile(f), tg = bornologous_profile(g), tgf = bornologous_profile(gf);
        for (const auto& [r, v] : tgf.rows) EXPECT_LE(v, *tg.at(*tf.at(r)));
    }
}

TEST(Closeness, Examples)
{
    auto s = make_integer_interval(0, 10);
    std::vector<PointId> v{0, 1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    PointMap<Rational> f(s, s, v);
    EXPECT_EQ(closeness(f, f).value, 0);
    std::vector<PointId> w = v;
    w[4] = 9;
    auto r = closeness(f, PointMap<Rational>(s, s, w));
    EXPECT_EQ(r.value, 5);
    EXPECT_EQ(r.point, 4u);
}

TEST(Excisive, HalfLines)
{
    auto s = make_integer_interval(-20, 20);
    PointSet e, f;
    for (PointId p = 0; p < s->size(); ++p) {
        if (p >= 20) e.push_back(p);
        if (p <= 20) f.push_back(p);
    }
    std::vector<Rational> scales{0, 1, 2, 5, 9};
    auto rows = excisive_profile(*s, e, f, scales);
    for (std::size_t i = 0; i < rows.size(); ++i) {
        EXPECT_TRUE(rows[i].ok);
        EXPECT_EQ(rows[i].minimal, scales[i]);
    }
    auto whole = excisive_profile(*s, s->all_points(), s->all_points(), scales);
    for (const auto& row : whole) EXPECT_EQ(row.minimal, 0);
    EXPECT_THROW(excisive_profile(*s, e, PointSet{0}, scales), PreconditionError);
}

TEST(Excisive, DisjointComponents)
{
    // pieces at distance 10: every point lies in one piece, so the
    // thickenings stay apart until R reaches 10
    std::vector<Rational> pos{0, 1, 2, 12, 13, 14};
    auto s = make_line_space(pos);
    auto rows = excisive_profile(*s, {0, 1, 2}, {3, 4, 5}, std::vector<Rational>{5, 6, 9, 10});
    for (int i = 0; i < 3; ++i) {
        EXPECT_TRUE(rows[i].ok);
        EXPECT_EQ(rows[i].minimal, 0);
    }
    EXPECT_FALSE(rows[3].ok);
}

TEST(Excisive, NondecreasingInRadius)
{
    std::mt19937 rng(23);
    auto s = make_integer_interval(0, 25);
    for (int trial = 0; trial < 40; ++trial) {
        PointSet e, f;
        for (PointId p = 0; p < s->size(); ++p) {
            int c = static_cast<int>(rng() % 3);
            if (c != 1) e.push_back(p);
            if (c != 0) f.push_back(p);
        }
        std::vector<Rational> scales;
        for (int r = 0; r < 8; ++r) scales.push_back(r);
        auto rows = excisive_profile(*s, e, f, scales);
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].ok && rows[i - 1].ok) {
                EXPECT_GE(rows[i].minimal, rows[i - 1].minimal);
            }
    }
}
