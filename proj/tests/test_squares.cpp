#include <geocover/oracle/exact.hpp>
#include <geocover/oracle/generators.hpp>
#include <geocover/oracle/verify.hpp>
#include <geocover/squares/level.hpp>
#include <geocover/squares/small_opt.hpp>

#include <gtest/gtest.h>

#include <cmath>

using namespace geocover;
using namespace geocover::oracle;
using namespace geocover::squares;

namespace {

using Multi = std::vector<std::pair<Square, std::uint64_t>>;

std::uint64_t brute_depth(const Multi& R, const Point2& p) {
    std::uint64_t d = 0;
    for (const auto& [s, k] : R) d += contains(s, p) ? k : 0;
    return d;
}

bool in_cell(const LevelCell& c, const Point2& p) {
    return c.x0 <= p.x && p.x <= c.x1 && c.y0 <= p.y && p.y <= c.y1;
}

Multi random_multi(Rng& rng, std::size_t n, Coord span, Coord hmax) {
    Multi R;
    for (std::size_t i = 0; i < n; ++i)
        R.push_back({{Coord(uniform_below(rng, span)), Coord(uniform_below(rng, span)), Coord(1 + uniform_below(rng, hmax))},
                     1 + uniform_below(rng, 2)});
    return R;
}

// labels at representatives, partition of the <= b lattice, cell gate
void check_level(const Multi& R, std::uint64_t b, Coord lo, Coord hi) {
    const auto L = build_level(R, b);
    std::uint64_t total = 0;
    for (const auto& [s, k] : R) total += k;
    EXPECT_LE(L.cells.size(), 4 * std::max<std::uint64_t>(total, 1) * (b + 1));
    for (const auto& c : L.cells) {
        ASSERT_LE(c.depth, b);
        ASSERT_EQ(brute_depth(R, c.representative()), c.depth);
        ASSERT_LE(c.x0, c.x1);
        ASSERT_LE(c.y0, c.y1);
    }
    for (Coord x = lo; x <= hi; ++x)
        for (Coord y = lo; y <= hi; ++y) {
            const Point2 p{x, y};
            const auto d = brute_depth(R, p);
            std::size_t hits = 0;
            for (const auto& c : L.cells)
                if (in_cell(c, p)) {
                    ++hits;
                    ASSERT_EQ(c.depth, d);
                }
            ASSERT_EQ(hits, d <= b ? 1u : 0u) << x << "," << y;
        }
}

SquaresInstance instance_of(const Generated& g) { return std::get<SquaresInstance>(g.instance); }

}  // namespace

TEST(Level, OneSquare) {
    Multi R = {{{0, 0, 3}, 1}};
    const auto L = build_level(R, 1);
    std::size_t inner = 0;
    for (const auto& c : L.cells) inner += c.depth == 1;
    EXPECT_EQ(inner, 1u);
    check_level(R, 1, -6, 6);
    check_level(R, 0, -6, 6);
}

TEST(Level, NestedInnermostAbsent) {
    Multi R;
    for (Coord k = 1; k <= 5; ++k) R.push_back({{0, 0, 2 * k}, 1});
    const auto L = build_level(R, 3);
    for (const auto& c : L.cells) EXPECT_FALSE(in_cell(c, {0, 0}));
    check_level(R, 3, -12, 12);
}

TEST(Level, EmptySample) {
    const auto L = build_level({}, 2);
    ASSERT_EQ(L.cells.size(), 1u);
    EXPECT_EQ(L.cells[0].x0, kNegInf);
    EXPECT_EQ(L.cells[0].y1, kPosInf);
}

TEST(Level, ExhaustiveSmall) {
    Rng rng(31);
    for (int trial = 0; trial < 200; ++trial) {
        const auto R = random_multi(rng, 1 + uniform_below(rng, 12), 20, 6);
        check_level(R, uniform_below(rng, 5), -8, 28);
    }
}

TEST(Level, SeededLabels) {
    Rng rng(32);
    for (int trial = 0; trial < 5; ++trial) {
        Multi R;
        for (int i = 0; i < 200; ++i)
            R.push_back({{Coord(uniform_below(rng, 2000)), Coord(uniform_below(rng, 2000)), Coord(10 + uniform_below(rng, 200))}, 1});
        const auto L = build_level(R, 10);
        EXPECT_LE(L.cells.size(), 4 * 200 * 11u);
        for (const auto& c : L.cells) ASSERT_EQ(brute_depth(R, c.representative()), c.depth);
        for (int q = 0; q < 2000; ++q) {
            const Point2 p{Coord(uniform_below(rng, 2400)) - 200, Coord(uniform_below(rng, 2400)) - 200};
            const auto d = brute_depth(R, p);
            std::size_t hits = 0;
            for (const auto& c : L.cells) hits += in_cell(c, p);
            ASSERT_EQ(hits, d <= 10 ? 1u : 0u);
        }
    }
}

TEST(Level, StaleVersionRejected) {
    RangeTree2D X;
    const auto L = build_level({}, 1, 3);
    EXPECT_THROW(find_light_point(L, X, 4), LookupError);
}

TEST(Level, FindLightPoint) {
    RangeTree2D X;
    EXPECT_FALSE(find_light_point(build_level({{{0, 0, 5}, 1}}, 0), X, 0).has_value());
    X.insert(0, {1, 1});
    X.insert(1, {50, 50});
    EXPECT_EQ(find_light_point(build_level({{{0, 0, 5}, 1}}, 0), X, 0), std::optional<std::uint32_t>(1));

    GeneratorSpec g{Kind::squares2d, Distribution::clustered, 256, 120, 4, 33};
    const auto inst = instance_of(generate(g));
    SquaresIndex idx(inst);
    Rng rng(34);
    for (int trial = 0; trial < 30; ++trial) {
        Multi R;
        for (std::uint32_t o = 0; o < inst.objects.size(); ++o)
            if (bernoulli(rng, 0.4)) R.push_back({inst.objects[o], 1 + uniform_below(rng, 3)});
        const std::uint64_t b = uniform_below(rng, 8);
        const auto got = find_light_point(build_level(R, b), idx.X(), 0);
        std::uint64_t best = ~0ull;
        for (const auto& p : inst.points) best = std::min(best, brute_depth(R, p));
        ASSERT_EQ(got.has_value(), best <= b);
        if (got) {
            EXPECT_LE(brute_depth(R, inst.points[*got]), b);
        }
    }
}

TEST(SquaresOracles, WeightedSampleContaining) {
    SquaresInstance inst;
    inst.objects = {{0, 0, 10}, {100, 100, 1}};
    inst.points = {{500, 500}, {0, 0}};
    SquaresIndex idx(inst);
    SquaresOracles o(idx);
    Rng rng(35);
    o.reset_multiplicities();
    o.sample_all(1.0, rng);
    EXPECT_TRUE(o.weighted_sample_containing({500, 500}, 1.0, rng) == 0);
    o.weighted_sample_containing({0, 0}, 1.0, rng);
    o.weighted_sample_containing({0, 0}, 1.0, rng);
    // multiplicity now 4: doubling adds exactly 4 copies at rho = 1
    const auto before = o.sample().copies(0);
    EXPECT_TRUE(o.weighted_sample_containing({1, 1}, 1.0, rng) == 4);
    EXPECT_EQ(o.sample().copies(0) - before, 4u);
}

TEST(SquaresOracles, AggregateAndSampleMean) {
    GeneratorSpec g{Kind::squares2d, Distribution::clustered, 64, 64, 4, 36};
    const auto inst = instance_of(generate(g));
    SquaresIndex idx(inst);
    SquaresOracles o(idx);
    Rng rng(37);
    o.reset_multiplicities();
    o.sample_all(0.2, rng);
    std::vector<Point2> Q;
    for (int step = 0; step < 20; ++step) {
        const auto& p = inst.points[uniform_below(rng, inst.points.size())];
        Weight brute = 0;
        for (const auto& s : inst.objects) {
            std::uint32_t d = 0;
            for (const auto& q : Q) d += contains(s, q);
            if (contains(s, p)) brute += pow2(d);
        }
        ASSERT_TRUE(o.weighted_sample_containing(p, 0.2, rng) == brute);
        Q.push_back(p);
        for (std::uint32_t s = 0; s < inst.objects.size(); ++s) {
            std::uint32_t d = 0;
            for (const auto& q : Q) d += contains(inst.objects[s], q);
            ASSERT_EQ(o.exponent(s), d);
        }
    }
    // sample mean of the added copies at the next doubling
    const auto& p = inst.points[0];
    Weight agg = 0;
    double sum = 0;
    const int trials = 1000;
    const double rho = 0.3;
    for (int i = 0; i < trials; ++i) {
        SquaresOracles fresh(idx);
        fresh.reset_multiplicities();
        for (const auto& q : Q) fresh.weighted_sample_containing(q, 0.0, rng);
        const auto before = fresh.sample().total();
        agg = fresh.weighted_sample_containing(p, rho, rng);
        sum += double(fresh.sample().total() - before);
    }
    const double mean = rho * double(agg), sigma = std::sqrt(double(agg) * rho * (1 - rho) / trials);
    EXPECT_NEAR(sum / trials, mean, 3 * sigma + 1e-9);
}

TEST(SmallOpt, Examples) {
    SquaresInstance one;
    one.objects = {{0, 0, 1000}};
    for (Coord i = 0; i < 40; ++i) one.points.push_back({i * 13 - 260, i * 7 - 140});
    SquaresIndex a(one);
    const auto r1 = small_opt_solve(a, 1);
    ASSERT_TRUE(r1.is_cover());
    EXPECT_EQ(r1.cover, std::vector<std::uint32_t>{0});

    SquaresInstance bad = one;
    bad.points.push_back({5000, 5000});
    SquaresIndex b(bad);
    const auto r2 = guess_loop([&](std::uint64_t t) { return small_opt_solve(b, t); }, 1);
    ASSERT_EQ(r2.status, MwuOutcome::Status::infeasible);
    EXPECT_EQ(*r2.witness, 40u);
}

TEST(SmallOpt, CoversCorpusAtOpt) {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        GeneratorSpec g{Kind::squares2d, seed % 2 ? Distribution::planted : Distribution::clustered, 48, 16, 3, seed};
        const auto inst = instance_of(generate(g));
        const auto opt = exact_opt(inst);
        ASSERT_TRUE(opt.feasible);
        SquaresIndex idx(inst);
        auto out = guess_loop([&](std::uint64_t t) { return small_opt_solve(idx, t, seed); }, inst.objects.size());
        ASSERT_TRUE(out.is_cover());
        EXPECT_TRUE(verify_cover(inst, out.cover).ok);
        EXPECT_LE(out.cover.size(), 32 * opt.opt_size);
    }
}

TEST(SmallOpt, LevelGateDuringRuns) {
    GeneratorSpec g{Kind::squares2d, Distribution::planted, 2048, 512, 8, 41};
    const auto inst = instance_of(generate(g));
    SquaresIndex idx(inst);
    for (std::uint64_t t : {8u, 16u}) {
        SmallOptStats st;
        const auto out = small_opt_solve(idx, t, 3, 8.0, &st);
        const auto b = light_threshold(8.0, idx.n_points() + idx.n_objects());
        EXPECT_LE(st.max_level_cells, 4 * std::max<std::size_t>(st.max_level_sample, 1) * (b + 1));
        if (out.is_cover()) {
            EXPECT_TRUE(verify_cover(inst, out.cover).ok);
        }
    }
}

TEST(SquaresIndex, Updates) {
    SquaresIndex idx;
    const auto p = idx.insert_point({1, 1});
    const auto s = idx.insert_object({0, 0, 2});
    EXPECT_EQ(idx.n_points(), 1u);
    idx.erase_object(s);
    EXPECT_THROW(idx.erase_object(s), LookupError);
    EXPECT_THROW(idx.erase_point(p + 5), LookupError);
    EXPECT_EQ(idx.n_objects(), 0u);
    const auto r = guess_loop([&](std::uint64_t t) { return small_opt_solve(idx, t); }, 1);
    EXPECT_EQ(r.status, MwuOutcome::Status::infeasible);
}
