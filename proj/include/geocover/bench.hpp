#pragma once

#include <geocover/halfspace/static_recursive.hpp>
#include <geocover/oracle/exact.hpp>
#include <geocover/oracle/generators.hpp>
#include <geocover/squares/engine.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

namespace geocover::bench {

/// Least-squares slope of log y against log x.
inline double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
    GEOCOVER_REQUIRE(x.size() == y.size() && x.size() >= 2, "loglog_slope: need two or more samples");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const double k = double(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double a = std::log(x[i]), b = std::log(std::max(y[i], 1e-12));
        sx += a;
        sy += b;
        sxx += a * a;
        sxy += a * b;
    }
    return (k * sxy - sx * sy) / (k * sxx - sx * sx);
}

template <class F>
double seconds(F&& f) {
    const auto t0 = std::chrono::steady_clock::now();
    f();
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

/// Fastest of `reps` runs.
template <class F>
double best_of(int reps, F&& f) {
    double best = 1e300;
    for (int i = 0; i < reps; ++i) best = std::min(best, seconds(f));
    return best;
}

struct ScalingRow {
    std::string series;
    std::size_t n = 0;
    std::uint64_t seed = 0;
    double seconds = 0;
    double metric = 0;  // solution size, or mean crossed cells
};

inline oracle::GeneratorSpec spec(Kind kind, oracle::Distribution dist, std::uint32_t n, std::uint32_t k, std::uint64_t seed) {
    oracle::GeneratorSpec g;
    g.kind = kind;
    g.dist = dist;
    g.n_points = n;
    g.n_objects = n;
    g.planted_k = k;
    g.seed = seed;
    return g;
}

/// Dynamic squares query with a planted optimum of 8; the build is not timed.
inline ScalingRow squares_small(std::uint32_t n, std::uint64_t seed, int reps = 3) {
    const auto inst = std::get<SquaresInstance>(oracle::generate(spec(Kind::squares2d, oracle::Distribution::planted, n, 8, seed)).instance);
    squares::SquaresEngine eng(inst, seed);
    squares::DispatchResult r;
    const double s = best_of(reps, [&] { r = eng.solve_small_only(64); });
    GEOCOVER_CHECK(r.feasible, "squares_small: planted instance reported infeasible");
    return {"squares_small", n, seed, s, double(r.cover.size())};
}

/// Mean cells crossed per query in the primal partition tree, for random
/// halfspaces through uniform points in a cube.
inline ScalingRow crossed_cells(std::uint32_t n, std::uint64_t seed, std::uint32_t queries = 256) {
    constexpr Coord span = Coord{1} << 20;
    Rng rng(mix_seed(seed, 0x63726f73));
    using oracle::gen_detail::uniform_in;
    std::vector<std::pair<std::uint32_t, Point3>> pts;
    for (std::uint32_t i = 0; i < n; ++i)
        pts.emplace_back(i, Point3{uniform_in(rng, -span, span), uniform_in(rng, -span, span), uniform_in(rng, -span, span)});
    halfspace::PartitionTree tree(pts, {});
    std::uint64_t crossed = 0;
    const double s = seconds([&] {
        for (std::uint32_t q = 0; q < queries; ++q) {
            const Coord a = uniform_in(rng, -4, 4), b = uniform_in(rng, -4, 4);
            const Coord x = uniform_in(rng, -span, span), y = uniform_in(rng, -span, span), z = uniform_in(rng, -span, span);
            crossed += tree.register_constraint(primal_constraint(Halfspace3{a, b, z - a * x - b * y}));
        }
    });
    return {"crossed_cells", n, seed, s, double(crossed) / queries};
}

/// Static recursive cover on lifted disks with about n/64 planted disks.
inline ScalingRow static_recursive(std::uint32_t n, std::uint64_t seed, int reps = 1) {
    const auto g = oracle::generate(spec(Kind::disks2d, oracle::Distribution::planted, n, std::max<std::uint32_t>(1, n / 64), seed));
    const auto inst = lift_instance(std::get<DisksInstance>(g.instance));
    StaticConfig cfg;
    cfg.seed = seed;
    MwuOutcome out;
    const double s = best_of(reps, [&] { out = halfspace::static_recursive_cover(inst, cfg); });
    GEOCOVER_CHECK(out.is_cover(), "static_recursive: planted instance reported infeasible");
    return {"static_recursive", n, seed, s, double(out.cover.size())};
}

struct RatioRow {
    std::uint64_t seed = 0;
    std::size_t n = 0;
    std::size_t opt = 0;
    std::size_t small = 0;      // squares, small-OPT MWU
    std::size_t large = 0;      // squares, cover tree
    std::size_t disks_opt = 0;  // lifted disks, exact
    std::size_t recursive = 0;  // lifted disks, static recursive cover
};

/// One small instance of each family, solved exactly and by the three
/// approximate solvers.
inline RatioRow ratio_row(std::uint64_t seed) {
    RatioRow row;
    row.seed = seed;
    const auto dist = static_cast<oracle::Distribution>(seed % 4);  // uniform, clustered, planted, nested
    const std::uint32_t n = 16 + std::uint32_t(seed % 3) * 16;    // points and objects, at most 64 in total
    const std::uint32_t half = n / 2;
    {
        const auto sq = std::get<SquaresInstance>(oracle::generate(spec(Kind::squares2d, dist, half, 4, seed)).instance);
        row.n = sq.size();
        const auto ex = oracle::exact_opt(sq);
        GEOCOVER_CHECK(ex.feasible && !ex.timed_out, "ratio_row: exact oracle failed on squares");
        row.opt = ex.opt_size;
        squares::SquaresEngine eng(sq, seed);
        const auto s = eng.solve_small_only(64);
        const auto l = eng.solve_large();
        GEOCOVER_CHECK(s.feasible && l.feasible, "ratio_row: solver reported infeasible");
        row.small = s.cover.size();
        row.large = l.cover.size();
    }
    {
        const auto dk = std::get<DisksInstance>(oracle::generate(spec(Kind::disks2d, dist, half, 4, seed)).instance);
        const auto ex = oracle::exact_opt(dk);
        GEOCOVER_CHECK(ex.feasible && !ex.timed_out, "ratio_row: exact oracle failed on disks");
        row.disks_opt = ex.opt_size;
        StaticConfig cfg;
        cfg.seed = seed;
        const auto out = halfspace::static_recursive_cover(dk, cfg);
        GEOCOVER_CHECK(out.is_cover(), "ratio_row: static recursive cover reported infeasible");
        row.recursive = out.cover.size();
    }
    return row;
}

}  // namespace geocover::bench
