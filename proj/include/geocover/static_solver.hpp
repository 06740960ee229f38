#pragma once

#include <geocover/containment.hpp>
#include <geocover/geom.hpp>
#include <geocover/mwu.hpp>
#include <geocover/range_tree.hpp>

#include <cmath>
#include <cstdint>
#include <optional>
#include <queue>
#include <vector>

namespace geocover {

struct StaticConfig {
    double c0 = 8.0;
    std::uint64_t seed = 1;
    std::uint32_t base_cutoff = 256;
    double case_exponent = 5.0 / 6.0;
    double delta = 1.0 / 12.0;
    double case_constant = 1.0;
    double b_exponent = 1.0 / 6.0;
    double g_exponent = 1.0 / 3.0;
    std::optional<std::uint32_t> reruns;  // Case 1 runs kept best-of; default ceil(log2(N) / 16) with N = 2^48 fixed
    bool start_from_greedy = true;
};

/// Containment lists through a 4D range tree on the lifted squares.
inline ContainmentLists containment_lists(const SquaresInstance& inst) {
    if (inst.points.size() * inst.objects.size() <= 1u << 16)
        return brute_containment(std::span<const Point2>(inst.points), std::span<const Square>(inst.objects));
    RangeTree4D tree;
    for (std::uint32_t i = 0; i < inst.objects.size(); ++i) tree.insert(i, lift_square(inst.objects[i]));
    std::vector<std::vector<std::uint32_t>> lists(inst.points.size());
    for (std::uint32_t p = 0; p < inst.points.size(); ++p)
        tree.report(containing_box(inst.points[p]), [&](std::uint32_t id) { lists[p].push_back(id); });
    return ContainmentLists::from_point_lists(std::move(lists), inst.objects.size());
}

template <class Inst>
ContainmentLists containment_lists(const Inst& inst) {
    using P = typename Inst::point_type;
    using O = typename Inst::object_type;
    return brute_containment(std::span<const P>(inst.points), std::span<const O>(inst.objects));
}

/// Max-coverage greedy with smallest-id tie-break; nullopt if some point is
/// in no object.
inline std::optional<std::vector<std::uint32_t>> greedy_cover(const ContainmentLists& lists) {
    const auto n = lists.n_points(), m = lists.n_objects();
    std::vector<std::uint32_t> gain(m);
    for (std::uint32_t o = 0; o < m; ++o) gain[o] = std::uint32_t(lists.members[o].size());
    for (std::uint32_t p = 0; p < n; ++p)
        if (lists.containing[p].empty()) return std::nullopt;
    using Entry = std::pair<std::uint32_t, std::int64_t>;  // (gain, -id)
    std::priority_queue<Entry> heap;
    for (std::uint32_t o = 0; o < m; ++o)
        if (gain[o]) heap.push({gain[o], -std::int64_t(o)});
    std::vector<char> covered(n, 0);
    std::size_t left = n;
    std::vector<std::uint32_t> out;
    while (left > 0) {
        GEOCOVER_CHECK(!heap.empty(), "greedy: uncovered points remain with no candidate object");
        auto [g, neg] = heap.top();
        heap.pop();
        const auto o = std::uint32_t(-neg);
        if (g != gain[o]) {
            if (gain[o]) heap.push({gain[o], neg});
            continue;
        }
        out.push_back(o);
        for (auto p : lists.members[o]) {
            if (covered[p]) continue;
            covered[p] = 1;
            --left;
            for (auto q : lists.containing[p]) --gain[q];
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

template <class Inst>
std::optional<std::vector<std::uint32_t>> greedy_cover(const Inst& inst) {
    return greedy_cover(containment_lists(inst));
}

inline std::uint64_t floor_pow2(std::uint64_t v) {
    std::uint64_t p = 1;
    while (p * 2 <= v) p *= 2;
    return p;
}

/// Direct MWU over explicit containment lists with the doubling guess loop.
/// The first guess is a power of two below greedy/(1 + ln n) <= OPT when
/// start_from_greedy is set.
inline MwuOutcome static_mwu_cover(const ContainmentLists& lists, const StaticConfig& cfg = {},
                                   std::optional<std::uint64_t> greedy_bound = std::nullopt) {
    MwuOutcome empty;
    empty.status = MwuOutcome::Status::cover;
    if (lists.n_points() == 0) return empty;
    for (std::uint32_t p = 0; p < lists.n_points(); ++p)
        if (lists.containing[p].empty()) {
            MwuOutcome bad;
            bad.status = MwuOutcome::Status::infeasible;
            bad.witness = p;
            return bad;
        }
    const std::uint64_t n = lists.n_points() + lists.n_objects();
    std::uint64_t t0 = 1;
    if (cfg.start_from_greedy) {
        if (!greedy_bound) greedy_bound = greedy_cover(lists)->size();
        t0 = floor_pow2(std::max<std::uint64_t>(
            1, std::uint64_t(double(*greedy_bound) / (1.0 + std::log(double(std::max<std::uint64_t>(n, 2)))))));
    }
    ExplicitOracles oracles(lists);
    return guess_loop(
        [&](std::uint64_t t) {
            MwuConfig mc;
            mc.t = t;
            mc.c0 = cfg.c0;
            mc.n = n;
            mc.seed = cfg.seed;
            return run_mwu(oracles, mc);
        },
        std::max<std::uint64_t>(lists.n_objects(), 1), t0);
}

template <class Inst>
MwuOutcome static_mwu_cover(const Inst& inst, const StaticConfig& cfg = {}) {
    return static_mwu_cover(containment_lists(inst), cfg);
}

struct T0Result {
    std::vector<std::uint32_t> T0;
    std::vector<std::uint32_t> removed;  // points covered by T0
};

/// One pass in id order: take any object holding more than ceil(n/t')
/// residual points and drop those points. Counts only decrease, so every
/// object left out holds at most ceil(n/t') residual points at the end.
inline T0Result build_T0(const ContainmentLists& lists, std::uint64_t t_prime) {
    GEOCOVER_REQUIRE(t_prime >= 1, "build_T0: t' must be positive");
    const auto n = lists.n_points();
    const std::uint64_t thr = (n + t_prime - 1) / t_prime;
    std::vector<char> gone(n, 0);
    T0Result res;
    for (std::uint32_t o = 0; o < lists.n_objects(); ++o) {
        std::uint64_t c = 0;
        for (auto p : lists.members[o]) c += gone[p] ? 0 : 1;
        if (c <= thr) continue;
        res.T0.push_back(o);
        for (auto p : lists.members[o])
            if (!gone[p]) {
                gone[p] = 1;
                res.removed.push_back(p);
            }
    }
    std::sort(res.removed.begin(), res.removed.end());
    return res;
}

/// Restriction of containment lists to a point subset (ids renumbered in order).
inline ContainmentLists restrict_points(const ContainmentLists& lists, const std::vector<std::uint32_t>& keep) {
    std::vector<std::vector<std::uint32_t>> c;
    c.reserve(keep.size());
    for (auto p : keep) c.push_back(lists.containing[p]);
    return ContainmentLists::from_point_lists(std::move(c), lists.n_objects());
}

}  // namespace geocover
