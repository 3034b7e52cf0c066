#include <gtest/gtest.h>

#include <cmath>

#include "coarsekit/coarse.hpp"
#include "coarsekit/coarsening.hpp"

using namespace coarsekit;

namespace {

SpacePtr<Rational> cycle_space(std::size_t n)
{
    std::vector<std::string> ids;
    std::vector<std::tuple<std::size_t, std::size_t, Rational>> edges;
    for (std::size_t i = 0; i < n; ++i) {
        ids.push_back(std::to_string(i));
        edges.emplace_back(i, (i + 1) % n, Rational(1));
    }
    return make_graph_space(ids, edges);
}

std::vector<Cover<Rational>> circle_covers()
{
    auto s = cycle_space(12);
    Cover<Rational> arcs(s, {{0, 1, 2, 3, 4}, {4, 5, 6, 7, 8}, {8, 9, 10, 11, 0}});
    Cover<Rational> halves(s, {{0, 1, 2, 3, 4, 5, 6, 7, 8}, {8, 9, 10, 11, 0, 1, 2, 3, 4}});
    return {arcs, halves, halves};
}

CoarseningSpace interval_instance(long half, std::vector<Rational> schedule, int depth)
{
    auto s = make_integer_interval(-half, half);
    return build_coarsening(build_anticech<Rational>(s, schedule), depth);
}

SphericalLength lin(long v) { return SphericalLength::linear(v); }

}  // namespace

TEST(Coarsening, SingleCover)
{
    auto s = make_integer_interval(0, 6);
    Cover<Rational> c(s, {{0, 1, 2, 3}, {3, 4, 5, 6}});
    CoarseningSpace x(std::vector<Cover<Rational>>{c}, 1);
    EXPECT_EQ(x.level_count(), 1u);
    EXPECT_EQ(x.nerve_at(1)->simplex_count(), 3u);
    EXPECT_EQ(x.node_count(), 3u);
    EXPECT_THROW(x.nerve_at(2), PreconditionError);
}

TEST(Coarsening, CircleExample)
{
    CoarseningSpace x(circle_covers(), 1);
    ASSERT_EQ(x.level_count(), 3u);
    EXPECT_EQ(x.nerve_at(1)->count_of_dimension(1), 3u);
    EXPECT_EQ(x.nerve_at(1)->count_of_dimension(2), 0u);
    for (std::size_t l = 2; l <= 3; ++l) {
        EXPECT_EQ(x.nerve_at(l)->dimension(), 1);
        EXPECT_EQ(x.nerve_at(l)->count_of_dimension(1), 1u);
    }
    for (std::size_t l = 1; l <= 2; ++l) EXPECT_TRUE(x.connecting(l).is_simplicial());
}

TEST(Coarsening, IntervalCounts)
{
    auto s = make_integer_interval(-50, 50);
    auto seq = build_anticech<Rational>(s, {1, 4, 16});
    auto x = build_coarsening(seq, 1);
    ASSERT_EQ(x.level_count(), 3u);
    // oracle: depth-1 subdivision of a graph has V+E vertices and 2E edges;
    // vertical edges leave every node below the top level
    std::size_t nodes = 0, edges = 0, below_top = 0;
    for (std::size_t l = 1; l <= 3; ++l) {
        auto k = nerve(seq.covers[l - 1]);
        ASSERT_LE(k->dimension(), 1);
        std::size_t v = k->count_of_dimension(0), e = k->count_of_dimension(1);
        nodes += v + e;
        edges += 2 * e;
        if (l < 3) below_top += v + e;
    }
    EXPECT_EQ(x.node_count(), nodes);
    EXPECT_EQ(x.edges().size(), edges + below_top);
    // frozen counts for this schedule
    EXPECT_EQ(x.node_count(), 153u);
    EXPECT_EQ(x.edges().size(), 292u);
}

TEST(Coarsening, PiAndPartialSpaces)
{
    auto x = interval_instance(12, {1, 3, 7}, 1);
    for (NodeId n = 0; n < x.node_count(); ++n) {
        EXPECT_GE(x.level_of(n), 1u);
        EXPECT_LE(x.level_of(n), 3u);
    }
    EXPECT_EQ(x.level_of(x.node(1, 0)), 1u);
    EXPECT_EQ(x.level_of(x.node(3, 0)), 3u);
    EXPECT_EQ(x.partial_space(3).size(), x.node_count());
    EXPECT_EQ(x.partial_space(1).size(), x.nodes_at(1));
    for (std::size_t i = 1; i < 3; ++i) EXPECT_LE(x.partial_space(i).size(), x.partial_space(i + 1).size());
    EXPECT_THROW(x.partial_space(0), PreconditionError);
    EXPECT_THROW(x.partial_space(4), PreconditionError);
}

TEST(Coarsening, GraphDistanceBasics)
{
    auto x = interval_instance(12, {1, 3, 7}, 1);
    auto n0 = x.node(1, 0);
    EXPECT_EQ(x.distance(n0, n0), SphericalLength());
    for (const auto& e : x.edges()) {
        EXPECT_LE(x.distance(e.a, e.b), e.length);
        if (e.kind == EdgeKind::vertical) {
            EXPECT_EQ(e.length, lin(1));
            EXPECT_EQ(x.collapse(x.level_of(e.b), e.a), e.b);
        } else {
            EXPECT_EQ(e.length, SphericalLength::quarter_turns(Rational(1, 2)));
        }
    }
    // symmetry and triangle inequality, exact
    const std::size_t n = x.node_count();
    for (NodeId a = 0; a < n; a += 3)
        for (NodeId b = 0; b < n; b += 2) {
            EXPECT_EQ(x.distance(a, b), x.distance(b, a));
            for (NodeId c = 0; c < n; c += 5) EXPECT_LE(x.distance(a, b), x.distance(a, c) + x.distance(c, b));
        }
}

TEST(Coarsening, LevelConsistencyWithNerve)
{
    for (int depth = 0; depth <= 2; ++depth) {
        CoarseningSpace x(circle_covers(), depth);
        auto seq = interval_instance(15, {1, 3, 9}, depth);
        for (const CoarseningSpace* sp : {&x, &seq}) {
            for (std::size_t l = 1; l <= sp->level_count(); ++l) {
                SphericalComplex sc{sp->nerve_at(l)};
                const auto nv = sp->nerve_at(l)->vertex_count();
                for (std::size_t a = 0; a < nv; ++a)
                    for (std::size_t b = 0; b < nv; ++b)
                        EXPECT_EQ(sp->level_distance(sp->node(l, a), sp->node(l, b)), vertex_distance(sc, a, b));
            }
        }
    }
}

TEST(Collapse, SemigroupLevelsAndContraction)
{
    std::vector<CoarseningSpace> instances;
    instances.emplace_back(circle_covers(), 1);
    instances.push_back(interval_instance(12, {1, 3, 7, 15}, 1));
    instances.push_back(interval_instance(20, {1, 4, 16}, 2));
    for (const auto& x : instances) {
        const std::size_t n = x.node_count(), levels = x.level_count();
        ASSERT_LE(n, 500u);
        for (std::size_t t = 1; t <= levels; ++t)
            for (NodeId p = 0; p < n; ++p) {
                auto q = x.collapse(t, p);
                EXPECT_EQ(x.level_of(q), std::max(x.level_of(p), t));
                if (x.level_of(p) >= t) { EXPECT_EQ(q, p); }
                for (std::size_t tp = 1; tp < t; ++tp) {
                    EXPECT_EQ(x.collapse(tp, q), q);
                    EXPECT_EQ(x.collapse(t, x.collapse(tp, p)), q);
                }
            }
        for (std::size_t t = 1; t <= levels; ++t)
            for (NodeId a = 0; a < n; ++a)
                for (NodeId b = a + 1; b < n; ++b)
                    EXPECT_LE(x.distance(x.collapse(t, a), x.collapse(t, b)), x.distance(a, b));
    }
}

TEST(Collapse, ToPointLevel)
{
    auto s = make_integer_interval(0, 5);
    Cover<Rational> fine(s, {{0, 1, 2}, {3, 4, 5}});
    Cover<Rational> coarse(s, {s->all_points()});
    CoarseningSpace x(std::vector<Cover<Rational>>{fine, coarse}, 0);
    EXPECT_EQ(*x.collapse_to_point_level({x.node(1, 0)}), 1u);
    EXPECT_EQ(*x.collapse_to_point_level({x.node(1, 0), x.node(1, 1)}), 2u);

    auto far = make_line_space({0, 1, 100, 101});
    Cover<Rational> comps(far, {{0, 1}, {2, 3}});
    CoarseningSpace y(std::vector<Cover<Rational>>{comps, comps}, 0);
    EXPECT_FALSE(y.collapse_to_point_level({y.node(1, 0), y.node(1, 1)}).has_value());
    EXPECT_THROW(y.collapse_to_point_level({}), PreconditionError);
}

TEST(Swindle, SequenceBasics)
{
    auto x = interval_instance(20, {1, 3, 7, 15, 31}, 0);
    ASSERT_EQ(x.level_count(), 5u);
    auto x0 = x.node(1, x.nodes_at(1) / 2);
    auto maps = swindle_sequence(x, x0, 60);
    for (NodeId p = 0; p < x.node_count(); ++p) EXPECT_EQ(maps[0][p], p);
    for (std::size_t k = 1; k <= 60; ++k)
        for (NodeId p = 0; p < x.node_count(); ++p) {
            double d = x.distance(p, x0).to_double();
            double r = std::log(static_cast<double>(k)) - d;
            if (r <= 0) { EXPECT_EQ(maps[k - 1][p], p); }
            std::size_t expect = r <= 0 ? 1 : std::min<std::size_t>(5, static_cast<std::size_t>(std::ceil(r)));
            EXPECT_EQ(x.level_of(maps[k - 1][p]), std::max(x.level_of(p), expect));
        }
    EXPECT_EQ(x.level_of(maps[59][x0]), 5u);
}

TEST(Swindle, HypothesisChecks)
{
    auto x = interval_instance(20, {1, 3, 7, 15, 31}, 0);
    auto x0 = x.node(1, x.nodes_at(1) / 2);
    std::vector<SphericalLength> radii{lin(1), lin(2), lin(3)};

    std::vector<NodeMap> ids(5, NodeMap(x.node_count()));
    for (auto& m : ids)
        for (NodeId p = 0; p < x.node_count(); ++p) m[p] = p;
    auto id_rep = check_swindle_hypotheses(x, ids, x0, radii);
    for (const auto& row : id_rep.escape) EXPECT_FALSE(row.escaped);
    for (const auto& row : id_rep.control) EXPECT_EQ(row.bound, row.radius);
    EXPECT_EQ(id_rep.step_bound, SphericalLength());

    auto jump = ids;
    for (std::size_t k = 3; k < 5; ++k) jump[k][0] = x.node(1, 10);
    auto j_rep = check_swindle_hypotheses(x, jump, x0, radii);
    // the jump covers 10 level-1 hops; vertical shortcuts make the graph distance smaller
    EXPECT_EQ(j_rep.step_bound, x.distance(x.node(1, 0), x.node(1, 10)));
    EXPECT_GE(j_rep.step_bound, lin(4));
    EXPECT_EQ(j_rep.step_k, 3u);
    EXPECT_EQ(j_rep.step_node, 0u);
}

TEST(Swindle, FiveLevelTables)
{
    auto x = interval_instance(20, {1, 3, 7, 15, 31}, 0);
    auto x0 = x.node(1, x.nodes_at(1) / 2);
    auto maps = swindle_sequence(x, x0, 20000);
    std::vector<SphericalLength> radii{lin(1), lin(2), lin(3), lin(4)};
    auto rep = check_swindle_hypotheses(x, maps, x0, radii);
    EXPECT_EQ(rep.escape[0].escape_index, 54u);
    EXPECT_EQ(rep.escape[1].escape_index, 1096u);
    EXPECT_EQ(rep.escape[2].escape_index, 9335u);
    // the top-level node above x0 is fixed by every map and sits at distance 4
    EXPECT_FALSE(rep.escape[3].escaped);
    rep.escape.pop_back();
    for (std::size_t i = 0; i < rep.escape.size(); ++i) {
        EXPECT_TRUE(rep.escape[i].escaped);
        if (i > 0) { EXPECT_GT(rep.escape[i].escape_index, rep.escape[i - 1].escape_index); }
    }
    EXPECT_TRUE(rep.control_finite);
    EXPECT_TRUE(rep.step_finite);
    // one step moves a node by at most one vertical edge
    EXPECT_LE(rep.step_bound, lin(1));
}

TEST(ComparisonMaps, ZetaAndPsiBounds)
{
    auto s = make_integer_interval(-15, 15);
    auto seq = build_anticech<Rational>(s, {1, 3, 9, 27});
    auto x = build_coarsening(seq, 0);
    const std::size_t levels = x.level_count();
    for (std::size_t i = 1; i <= levels; ++i) {
        auto zeta = zeta_map(x, i);
        auto psi = psi_map(x, seq.covers[i - 1], i);
        Rational diam_i = cover_diameter(seq.covers[i - 1]);
        for (PointId w = 0; w < s->size(); ++w) EXPECT_LE(s->distance(zeta[psi[w]], w), diam_i);
        auto nodes = x.partial_space(i);
        for (std::size_t j = 1; i + j <= levels; ++j) {
            double bound = (4.0 * static_cast<double>(j) / M_PI + 3.0) * cover_diameter(seq.covers[i + j - 1]).get_d();
            for (auto a : nodes)
                for (auto b : nodes)
                    if (x.distance(a, b) < lin(2 * static_cast<long>(j))) {
                        EXPECT_LE(s->distance(zeta[a], zeta[b]).get_d(), bound);
                    }
        }
        for (auto n : nodes) EXPECT_LE(x.distance(psi[zeta[n]], n).to_double(), M_PI + static_cast<double>(i));
    }
}

TEST(ComparisonMaps, ExcisiveLevelDecomposition)
{
    auto x = interval_instance(10, {1, 3, 7, 15}, 0);
    ASSERT_EQ(x.level_count(), 4u);
    auto sp = x.node_space();
    std::vector<SphericalLength> scales{lin(0), SphericalLength::quarter_turns(1), lin(1), lin(2), lin(3)};
    for (std::size_t i = 1; i <= 4; ++i) {
        PointSet low, high;
        for (NodeId n = 0; n < x.node_count(); ++n) {
            if (x.level_of(n) <= i) low.push_back(n);
            if (x.level_of(n) >= i) high.push_back(n);
        }
        auto rows = excisive_profile(*sp, low, high, scales);
        for (const auto& r : rows) EXPECT_TRUE(r.ok);
    }
}
