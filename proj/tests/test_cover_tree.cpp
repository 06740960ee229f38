#include <geocover/oracle/exact.hpp>
#include <geocover/oracle/generators.hpp>
#include <geocover/oracle/verify.hpp>
#include <geocover/squares/cover_tree.hpp>
#include <geocover/squares/engine.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace geocover;
using namespace geocover::oracle;
using namespace geocover::squares;

namespace {

SquaresInstance squares_of(const GeneratorSpec& g) { return std::get<SquaresInstance>(generate(g).instance); }

bool covered_by(const std::vector<Square>& S, const Point2& p) {
    for (const auto& s : S)
        if (contains(s, p)) return true;
    return false;
}

std::vector<IdSquare> with_ids(const std::vector<Square>& S) {
    std::vector<IdSquare> out;
    for (std::uint32_t i = 0; i < S.size(); ++i) out.emplace_back(i, S[i]);
    return out;
}

Rect random_rect(Rng& rng, Coord span) {
    const Coord x0 = Coord(uniform_below(rng, span)), y0 = Coord(uniform_below(rng, span));
    return {x0, x0 + Coord(uniform_below(rng, span / 2)), y0, y0 + Coord(uniform_below(rng, span / 2))};
}

// long squares of r are exactly covered by the maximal ones, on a sample grid
void check_maximal(const Rect& r, const std::vector<Square>& S, const std::vector<std::uint32_t>& ids) {
    std::vector<Square> longs, chosen;
    for (const auto& s : S)
        if (r.intersects(s) && !r.has_corner_of(s)) longs.push_back(s);
    for (auto id : ids) {
        ASSERT_TRUE(r.intersects(S[id]) && !r.has_corner_of(S[id]));
        chosen.push_back(S[id]);
    }
    const Coord sx = std::max<Coord>(1, (r.x1 - r.x0) / 24), sy = std::max<Coord>(1, (r.y1 - r.y0) / 24);
    for (Coord x = r.x0; x <= r.x1; x += sx)
        for (Coord y = r.y0; y <= r.y1; y += sy) ASSERT_EQ(covered_by(longs, {x, y}), covered_by(chosen, {x, y}));
}

}  // namespace

TEST(MaximalLong, Examples) {
    const Rect r{0, 10, 0, 10};
    EXPECT_TRUE(maximal_long_squares(r, {}).empty());
    std::vector<Square> S = {{5, 5, 20}, {5, 5, 30}, {-20, 5, 22}};
    EXPECT_EQ(maximal_long_squares(r, with_ids(S)), std::vector<std::uint32_t>{0});
    std::vector<Square> sides = {{-10, 5, 12}, {-10, 5, 14}, {25, 5, 20}, {5, -30, 31}};
    const auto m = maximal_long_squares(r, with_ids(sides));
    EXPECT_EQ(m, (std::vector<std::uint32_t>{1, 2, 3}));
}

TEST(MaximalLong, UnionEqualityOnRandomRects) {
    Rng rng(51);
    std::vector<Square> S;
    for (int i = 0; i < 300; ++i)
        S.push_back({Coord(uniform_below(rng, 4000)), Coord(uniform_below(rng, 4000)), Coord(50 + uniform_below(rng, 900))});
    for (int trial = 0; trial < 1000; ++trial) {
        const auto r = random_rect(rng, 4000);
        check_maximal(r, S, maximal_long_squares(r, with_ids(S)));
    }
}

TEST(CanonicalCache, DecompositionAndSoundness) {
    Rng rng(52);
    for (std::uint32_t a : {2u, 3u, 4u}) {
        std::vector<std::pair<std::uint32_t, Point2>> pts;
        std::vector<Square> S;
        for (std::uint32_t i = 0; i < 200; ++i) pts.push_back({i, {Coord(uniform_below(rng, 1000)), Coord(uniform_below(rng, 1000))}});
        for (int i = 0; i < 150; ++i)
            S.push_back({Coord(uniform_below(rng, 1000)), Coord(uniform_below(rng, 1000)), Coord(40 + uniform_below(rng, 200))});
        // every point coverable
        for (const auto& [id, p] : pts) S.push_back({p.x, p.y, 3});
        CanonicalCache cache(pts, with_ids(S), a, 7);
        const double la = std::log(200.0) / std::log(double(a));
        std::size_t worst = 0;
        for (int trial = 0; trial < 1000; ++trial) {
            const auto r = random_rect(rng, 1000);
            const auto keys = cache.decompose(r);
            worst = std::max(worst, keys.size());
            std::vector<std::uint32_t> seen;
            for (const auto& k : keys)
                for (auto p : cache.points_of(k)) seen.push_back(p);
            std::sort(seen.begin(), seen.end());
            std::vector<std::uint32_t> expect;
            for (const auto& [id, p] : pts)
                if (r.contains(p)) expect.push_back(id);
            ASSERT_EQ(seen, expect);
            const auto ans = cache.query(r);
            ASSERT_FALSE(ans.uncovered.has_value());
            std::vector<Square> chosen;
            for (auto o : ans.cover) chosen.push_back(S[o]);
            for (auto p : expect) ASSERT_TRUE(covered_by(chosen, pts[p].second));
        }
        EXPECT_LE(double(worst), 4.0 * (std::ceil(la) + 1) * (std::ceil(la) + 1)) << "a=" << a;
    }
}

TEST(CanonicalCache, EveryStoredCoverFeasible) {
    Rng rng(53);
    std::vector<std::pair<std::uint32_t, Point2>> pts;
    std::vector<Square> S;
    for (std::uint32_t i = 0; i < 64; ++i) pts.push_back({i, {Coord(uniform_below(rng, 300)), Coord(uniform_below(rng, 300))}});
    for (const auto& [id, p] : pts) S.push_back({p.x + 2, p.y - 1, 4});
    CanonicalCache cache(pts, with_ids(S), 2, 9);
    const auto n = cache.materialize_all();
    EXPECT_EQ(cache.cached(), n);
}

TEST(CoverTree, EmptyAndTrivial) {
    CoverTree t({16, 0.125, 1});
    EXPECT_TRUE(t.solve().cover.empty());
    SquaresInstance one;
    one.objects = {{0, 0, 1 << 20}};
    for (Coord i = 0; i < 300; ++i) one.points.push_back({i * 997 % 60000 - 30000, i * 113 % 50000 - 25000});
    auto tree = CoverTree::build(one, {16, 0.125, 1});
    const auto out = tree.solve();
    ASSERT_TRUE(out.feasible);
    EXPECT_EQ(out.cover, std::vector<std::uint32_t>{0});
}

TEST(CoverTree, LeafInvariants) {
    for (auto dist : {Distribution::uniform, Distribution::clustered, Distribution::planted}) {
        const auto inst = squares_of({Kind::squares2d, dist, 2048, 1024, 64, 54});
        const std::uint64_t b = 64;
        auto tree = CoverTree::build(inst, {b, 0.125, 1});
        const auto n = inst.points.size() + 4 * inst.objects.size();
        std::size_t total = 0;
        for (const auto& lv : tree.leaf_views()) {
            EXPECT_LE(lv.size, b);
            total += lv.size;
            for (auto p : lv.points) ASSERT_TRUE(lv.region.contains(inst.points[p]));
            check_maximal(lv.region, inst.objects, lv.maximal.ids());
            EXPECT_LE(lv.maximal.ids().size(), 4u);
            // short squares are exactly those with a corner inside
            std::vector<std::uint32_t> shorts;
            for (std::uint32_t s = 0; s < inst.objects.size(); ++s)
                if (lv.region.has_corner_of(inst.objects[s])) shorts.push_back(s);
            ASSERT_EQ(lv.shorts, shorts);
        }
        EXPECT_EQ(total, n);
        EXPECT_LE(tree.nonempty_leaf_count(), 8 * n / b) << distribution_name(dist);
        const auto out = tree.solve();
        ASSERT_TRUE(out.feasible);
        EXPECT_TRUE(verify_cover(inst, out.cover).ok);
    }
}

TEST(CoverTree, SmallInstancesVsExact) {
    double worst = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const auto inst = squares_of({Kind::squares2d, seed % 2 ? Distribution::clustered : Distribution::planted, 48, 20, 4, seed});
        auto tree = CoverTree::build(inst, {16, 0.125, seed});
        const auto out = tree.solve();
        ASSERT_TRUE(out.feasible);
        ASSERT_TRUE(verify_cover(inst, out.cover).ok);
        const auto opt = exact_opt(inst);
        worst = std::max(worst, double(out.cover.size()) / double(opt.opt_size));
    }
    EXPECT_LE(worst, 32.0);
}

TEST(CoverTree, Infeasible) {
    SquaresInstance bad;
    bad.objects = {{0, 0, 5}};
    bad.points = {{0, 0}, {100, 100}};
    auto tree = CoverTree::build(bad, {4, 0.125, 1});
    const auto out = tree.solve();
    EXPECT_FALSE(out.feasible);
    EXPECT_EQ(out.witness, std::optional<std::uint32_t>(1));
}

TEST(CoverTree, InversePair) {
    const auto inst = squares_of({Kind::squares2d, Distribution::clustered, 512, 256, 8, 55});
    auto tree = CoverTree::build(inst, {32, 0.125, 3});
    const auto before = tree.solve().cover;
    tree.insert_square(9999, {inst.points[0].x, inst.points[0].y, 700});
    tree.erase_square(9999);
    EXPECT_EQ(tree.solve().cover, before);
    tree.insert_point(7777, {inst.points[3].x + 1, inst.points[3].y});
    tree.erase_point(7777);
    EXPECT_EQ(tree.solve().cover, before);
    EXPECT_THROW(tree.erase_point(7777), LookupError);
    EXPECT_THROW(tree.erase_square(424242), LookupError);
    EXPECT_EQ(tree.solve().cover, before);
}

TEST(CoverTree, RandomUpdatesMatchRebuild) {
    const auto base = squares_of({Kind::squares2d, Distribution::clustered, 2048, 600, 8, 56});
    const auto extra = squares_of({Kind::squares2d, Distribution::clustered, 2048, 600, 8, 57});
    const CoverTreeConfig cfg{64, 0.125, 5};
    auto tree = CoverTree::build(base, cfg);
    std::map<std::uint32_t, Point2> pts;
    std::map<std::uint32_t, Square> sqs;
    for (std::uint32_t i = 0; i < base.points.size(); ++i) pts[i] = base.points[i];
    for (std::uint32_t i = 0; i < base.objects.size(); ++i) sqs[i] = base.objects[i];
    std::uint32_t next_p = std::uint32_t(pts.size()), next_s = std::uint32_t(sqs.size());
    Rng rng(58);
    for (int step = 0; step < 1000; ++step) {
        const auto r = uniform_below(rng, 4);
        if (r == 0) {
            const auto p = extra.points[uniform_below(rng, extra.points.size())];
            tree.insert_point(next_p, p);
            pts[next_p++] = p;
        } else if (r == 1 && !pts.empty()) {
            auto it = std::next(pts.begin(), std::ptrdiff_t(uniform_below(rng, pts.size())));
            tree.erase_point(it->first);
            pts.erase(it);
        } else if (r == 2) {
            const auto s = extra.objects[uniform_below(rng, extra.objects.size())];
            tree.insert_square(next_s, s);
            sqs[next_s++] = s;
        } else if (!sqs.empty()) {
            auto it = std::next(sqs.begin(), std::ptrdiff_t(uniform_below(rng, sqs.size())));
            tree.erase_square(it->first);
            sqs.erase(it);
        }
        if (step % 100 != 99) continue;
        for (const auto& lv : tree.leaf_views()) ASSERT_LE(lv.size, cfg.b_leaf);
        // from-scratch build over the same ids
        CoverTree fresh(cfg);
        for (const auto& [id, s] : sqs) fresh.insert_square(id, s);
        for (const auto& [id, p] : pts) fresh.insert_point(id, p);
        const auto a = tree.solve(), b = fresh.solve();
        ASSERT_EQ(a.feasible, b.feasible);
        ASSERT_EQ(a.cover, b.cover) << "step " << step;
        ASSERT_EQ(tree.leaf_count(), fresh.leaf_count());
    }
}

TEST(SquaresEngine, DispatchPaths) {
    SquaresInstance one;
    one.objects = {{0, 0, 500}, {3000, 3000, 10}};
    for (Coord i = 0; i < 60; ++i) one.points.push_back({i * 7 - 200, i * 5 - 150});
    SquaresEngine a(one);
    const auto r1 = a.solve();
    EXPECT_EQ(r1.path, DispatchResult::Path::small);
    EXPECT_EQ(r1.cover, std::vector<std::uint32_t>{0});

    SquaresInstance disjoint;
    for (Coord i = 0; i < 64; ++i) {
        disjoint.objects.push_back({(i % 8) * 100, (i / 8) * 100, 10});
        disjoint.points.push_back({(i % 8) * 100 + 3, (i / 8) * 100 - 2});
    }
    SquaresEngine b(disjoint);
    const auto r2 = b.solve();
    EXPECT_EQ(r2.path, DispatchResult::Path::large);
    ASSERT_TRUE(r2.feasible);
    EXPECT_TRUE(verify_cover(disjoint, r2.cover).ok);
    EXPECT_EQ(r2.cover.size(), 64u);
}

TEST(SquaresEngine, DynamicMatchesStatic) {
    const auto base = squares_of({Kind::squares2d, Distribution::clustered, 600, 300, 8, 61});
    const auto extra = squares_of({Kind::squares2d, Distribution::clustered, 600, 300, 8, 62});
    SquaresEngine eng(base, 4);
    Rng rng(63);
    for (int step = 0; step < 400; ++step) {
        if (bernoulli(rng, 0.5)) {
            eng.insert_point(extra.points[uniform_below(rng, extra.points.size())]);
        } else {
            eng.insert_object(extra.objects[uniform_below(rng, extra.objects.size())]);
        }
    }
    std::vector<std::uint32_t> pid, oid;
    const auto snap = eng.index().snapshot(&pid, &oid);
    const auto dyn = eng.solve();
    SquaresEngine fresh(snap, 4);
    const auto st = fresh.solve();
    ASSERT_EQ(dyn.feasible, st.feasible);
    if (dyn.feasible) {
        // map dynamic ids to snapshot positions and verify both
        std::vector<std::uint32_t> mapped;
        for (auto o : dyn.cover) mapped.push_back(std::uint32_t(std::lower_bound(oid.begin(), oid.end(), o) - oid.begin()));
        EXPECT_TRUE(verify_cover(snap, mapped).ok);
        EXPECT_TRUE(verify_cover(snap, st.cover).ok);
        const auto big = std::max(dyn.cover.size(), st.cover.size()), small = std::min(dyn.cover.size(), st.cover.size());
        EXPECT_LE(big, 4 * small);
    }
}
