#include <geocover/halfspace/large_opt.hpp>
#include <geocover/halfspace/static_recursive.hpp>
#include <geocover/oracle/exact.hpp>
#include <geocover/oracle/generators.hpp>
#include <geocover/oracle/verify.hpp>

#include <gtest/gtest.h>

#include <cstdio>

using namespace geocover;
using namespace geocover::halfspace;

namespace {

HalfspacesInstance halfspace_instance(oracle::Distribution dist, std::uint32_t n, std::uint32_t m, std::uint32_t k,
                                      std::uint64_t seed, Kind kind = Kind::halfspaces3d) {
    oracle::GeneratorSpec g;
    g.kind = kind;
    g.dist = dist;
    g.n_points = n;
    g.n_objects = m;
    g.planted_k = k;
    g.seed = seed;
    auto inst = oracle::generate(g).instance;
    if (kind == Kind::disks2d) return lift_instance(std::get<DisksInstance>(inst));
    return std::get<HalfspacesInstance>(inst);
}

// every point under its own halfspace, which contains nothing else
HalfspacesInstance private_halfspaces(std::uint32_t side) {
    HalfspacesInstance inst;
    for (Coord x = 0; x < Coord(side); ++x)
        for (Coord y = 0; y < Coord(side); ++y) {
            inst.points.push_back(lift_point({x * 3, y * 3}));
            inst.objects.push_back(lift_disk({x * 3, y * 3, 1}));
        }
    return inst;
}

EstimateConfig small_config() {
    EstimateConfig ec;
    ec.b = 4;
    ec.g = 9;
    return ec;
}

}  // namespace

TEST(EstimateSum, Examples) {
    const std::vector<double> same(7, 3.0);
    EXPECT_DOUBLE_EQ(estimate_sum(same, 40), 120.0);
    const std::vector<double> all{1, 0, 5, 2};
    EXPECT_DOUBLE_EQ(estimate_sum(all, 4), 8.0);
    EXPECT_THROW(estimate_sum(std::vector<double>{}, 4), ContractViolation);
    EXPECT_EQ(prescribed_draws(1.0, 10, 1.0, 1e9, 100), 1u);
    EXPECT_EQ(prescribed_draws(0.5, 10, 10.0, 1.0, 100), 10u);
}

TEST(EstimateSum, Calibration) {
    // m values in [0, U] summing to T, concentrated on as few entries as possible
    const std::size_t m = 10000, n = 10000;
    const double U = 10, T = 1000, eps = 0.5;
    std::vector<double> a(m, 0.0);
    for (std::size_t i = 0; i < std::size_t(T / U); ++i) a[i] = U;
    const auto r = prescribed_draws(eps, m, U, T, n);
    Rng rng(21);
    int fails = 0;
    const int trials = 1000;
    for (int t = 0; t < trials; ++t) {
        std::vector<double> d;
        for (auto i : sample_without_replacement(rng, std::uint32_t(m), std::uint32_t(r))) d.push_back(a[i]);
        const auto e = estimate_sum(d, m);
        if (e < (1 - eps) * T || e > (1 + eps) * T) ++fails;
    }
    EXPECT_LE(fails, trials / 100);
}

TEST(Decompose, EmptyPointsCountOverheadOnly) {
    std::vector<Halfspace3> S{{1, 0, 0}, {0, 1, 5}, {-1, 2, 3}};
    const auto res = large_opt_estimate({}, S, small_config());
    EXPECT_DOUBLE_EQ(res.residual, 0.0);
    EXPECT_DOUBLE_EQ(res.value, double(res.overhead));
}

TEST(Decompose, PrivateHalfspaces) {
    const auto inst = private_halfspaces(30);
    auto ec = small_config();
    ec.all_clusters = true;
    const auto res = large_opt_estimate(inst.points, inst.objects, ec);
    const auto D = decompose(inst.points, inst.objects, DecompositionConfig{4, 9, ec.seed});
    std::size_t outside = 0;
    for (std::size_t p = 0; p < inst.points.size(); ++p) {
        bool cov = false;
        for (auto s : D.R) cov = cov || contains(inst.objects[s], inst.points[p]);
        for (auto s : D.SB) cov = cov || contains(inst.objects[s], inst.points[p]);
        outside += cov ? 0 : 1;
    }
    EXPECT_EQ(D.stats.residual_points, outside);
    EXPECT_DOUBLE_EQ(res.residual, double(outside));
    EXPECT_EQ(res.infeasible_clusters, 0u);
}

TEST(Decompose, SandwichWithExactOracle) {
    int held = 0, total = 0;
    std::size_t clustered = 0;
    for (std::uint64_t seed = 1; seed <= 12; ++seed) {
        const auto dist = seed % 3 == 0 ? oracle::Distribution::clustered : oracle::Distribution::planted;
        const auto inst = halfspace_instance(dist, 100, 100, 6, seed, Kind::disks2d);
        const auto opt = oracle::exact_opt(inst);
        if (opt.timed_out || !opt.feasible) continue;
        const auto D = decompose(inst.points, inst.objects, DecompositionConfig{12, 36, seed});
        ASSERT_LT(D.R.size(), inst.objects.size());
        std::size_t sum = 0;
        bool timed_out = false;
        for (const auto& C : D.clusters) {
            if (C.points.empty()) continue;
            HalfspacesInstance sub;
            for (auto p : C.points) sub.points.push_back(inst.points[p]);
            for (auto s : C.objects) sub.objects.push_back(inst.objects[s]);
            const auto e = oracle::exact_opt(sub);
            ASSERT_TRUE(e.feasible);
            timed_out = timed_out || e.timed_out;
            sum += e.opt_size;
        }
        if (timed_out) continue;
        ++total;
        if (sum <= opt.opt_size && opt.opt_size <= sum + D.overhead()) ++held;
        clustered += sum;
    }
    EXPECT_GT(clustered, 0u);
    EXPECT_GE(total, 8);
    EXPECT_EQ(held, total);
}

TEST(StaticRecursive, BaseCaseDelegates) {
    const auto inst = halfspace_instance(oracle::Distribution::planted, 200, 60, 5, 3, Kind::disks2d);
    StaticConfig cfg;
    cfg.seed = 5;
    const auto a = static_recursive_cover(inst, cfg);
    const auto b = static_mwu_cover(inst, cfg);
    ASSERT_TRUE(a.is_cover());
    EXPECT_EQ(a.cover, b.cover);
}

TEST(StaticRecursive, IdenticalHalfspaces) {
    auto inst = halfspace_instance(oracle::Distribution::uniform, 2000, 1, 1, 4);
    const auto h = inst.objects[0];
    inst.objects.assign(50, h);
    for (auto& p : inst.points) p.z = std::max<Coord>(p.z, Coord(std::min<Wide>(Wide(h.a) * p.x + Wide(h.b) * p.y + h.c, kCoordBound)));
    ASSERT_TRUE(oracle::verify_cover(inst, std::vector<std::uint32_t>{0}).ok);
    const auto out = static_recursive_cover(inst);
    ASSERT_TRUE(out.is_cover());
    EXPECT_TRUE(oracle::verify_cover(inst, std::span<const std::uint32_t>(out.cover)).ok);
    EXPECT_LE(out.cover.size(), 8u);
}

TEST(StaticRecursive, AgainstGreedy) {
    for (auto dist : {oracle::Distribution::planted, oracle::Distribution::clustered, oracle::Distribution::uniform}) {
        const auto kind = dist == oracle::Distribution::uniform ? Kind::halfspaces3d : Kind::disks2d;
        const auto inst = halfspace_instance(dist, 4096, 600, 20, 7, kind);
        RecursiveStats st;
        const auto out = static_recursive_cover(inst, StaticConfig{}, &st);
        ASSERT_TRUE(out.is_cover());
        ASSERT_TRUE(oracle::verify_cover(inst, std::span<const std::uint32_t>(out.cover)).ok);
        const auto greedy = greedy_cover(inst);
        ASSERT_TRUE(greedy);
        EXPECT_LE(out.cover.size(), 3 * greedy->size());
        std::printf("recursive %zu greedy %zu depth %u case1 %llu case2 %llu\n", out.cover.size(), greedy->size(),
                    st.max_depth, (unsigned long long)st.case1, (unsigned long long)st.case2);
    }
}

TEST(StaticRecursive, Infeasible) {
    auto inst = halfspace_instance(oracle::Distribution::planted, 600, 80, 6, 8, Kind::disks2d);
    inst.points.push_back({0, 0, -(Coord{1} << 27)});
    const auto out = static_recursive_cover(inst);
    ASSERT_EQ(out.status, MwuOutcome::Status::infeasible);
    EXPECT_FALSE(oracle::verify_cover(inst, std::vector<std::uint32_t>(inst.objects.size())).ok);
    ASSERT_TRUE(out.witness);
    for (const auto& h : inst.objects) EXPECT_FALSE(contains(h, inst.points[*out.witness]));
}

TEST(Dispatch, SmallLargeAndInfeasible) {
    HalfspacesInstance one;
    one.points = {{0, 0, 5}, {3, 4, 10}};
    one.objects = {{0, 0, 0}};
    HalfspaceIndex a(one);
    const auto ra = dispatch_solve_3d(a);
    EXPECT_EQ(ra.kind, DispatchResult::Kind::cover);
    EXPECT_EQ(ra.path, "small");
    EXPECT_EQ(ra.cover, std::vector<std::uint32_t>{0});

    one.points.push_back({0, 0, -1});
    HalfspaceIndex b(one);
    const auto rb = dispatch_solve_3d(b);
    EXPECT_EQ(rb.kind, DispatchResult::Kind::infeasible);
    EXPECT_EQ(rb.witness, 2u);

    // OPT = n / 4 with private halfspaces
    const auto priv = private_halfspaces(40);
    HalfspaceIndex c(priv);
    const auto rc = dispatch_solve_3d(c);
    ASSERT_EQ(rc.kind, DispatchResult::Kind::value);
    const double opt = double(priv.points.size());
    EXPECT_GE(rc.value, opt / 2);
    EXPECT_LE(rc.value, 2 * opt);
}
