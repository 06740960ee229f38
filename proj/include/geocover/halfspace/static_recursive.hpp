#pragma once

#include <geocover/error.hpp>
#include <geocover/geom.hpp>
#include <geocover/halfspace/large_opt.hpp>
#include <geocover/halfspace/small_opt.hpp>
#include <geocover/mwu.hpp>
#include <geocover/static_solver.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

namespace geocover::halfspace {

struct RecursiveStats {
    std::uint32_t max_depth = 0;
    std::uint64_t nodes = 0;
    std::uint64_t base_cases = 0;
    std::uint64_t case1 = 0;
    std::uint64_t case2 = 0;
    std::uint64_t stalled = 0;       // children as large as their parent, solved directly
    double max_child_ratio = 0;      // child load / sqrt(parent load)
    std::uint64_t conflict_flags = 0;
};

namespace recursive_detail {

inline std::uint32_t round_pow(std::size_t n, double e, std::uint32_t lo) {
    return std::max<std::uint32_t>(lo, std::uint32_t(std::lround(std::pow(double(n), e))));
}

struct Node {
    std::vector<Point3> X;
    std::vector<Halfspace3> S;
    std::vector<std::uint32_t> ids;  // global object id per S entry
};

// Cover (global ids) or the local index of an uncoverable point.
struct NodeResult {
    std::vector<std::uint32_t> cover;
    std::optional<std::uint32_t> witness;
};

inline NodeResult base_case(const Node& v, const StaticConfig& cfg) {
    NodeResult res;
    const auto out = static_mwu_cover(brute_containment(std::span<const Point3>(v.X), std::span<const Halfspace3>(v.S)), cfg);
    if (!out.is_cover()) {
        res.witness = out.witness;
        return res;
    }
    for (auto o : out.cover) res.cover.push_back(v.ids[o]);
    return res;
}

// Drops cover members whose points are all covered twice, smallest first.
inline std::vector<std::uint32_t> prune_redundant(HalfspaceIndex& idx, std::vector<std::uint32_t> cover) {
    auto& P = idx.primal();
    P.reset_counters();
    std::vector<std::vector<std::uint32_t>> members(cover.size());
    std::unordered_map<std::uint32_t, std::uint32_t> count;
    for (std::size_t i = 0; i < cover.size(); ++i) {
        auto& M = members[i];
        P.register_constraint(
            primal_constraint(idx.object(cover[i])), 1,
            [&](std::uint32_t v, std::uint64_t) { P.for_each_in(v, [&](std::uint32_t p) { M.push_back(p); }); },
            [&](std::uint32_t p, std::uint64_t) { M.push_back(p); });
        for (auto p : M) ++count[p];
    }
    P.reset_counters();
    std::vector<std::size_t> order(cover.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::stable_sort(order.begin(), order.end(), [&](auto a, auto b) { return members[a].size() < members[b].size(); });
    std::vector<char> keep(cover.size(), 1);
    for (auto i : order) {
        bool spare = true;
        for (auto p : members[i]) spare = spare && count[p] >= 2;
        if (!spare) continue;
        keep[i] = 0;
        for (auto p : members[i]) --count[p];
    }
    std::vector<std::uint32_t> out;
    for (std::size_t i = 0; i < cover.size(); ++i)
        if (keep[i]) out.push_back(cover[i]);
    return out;
}

// partition-tree MWU, doubling t from t0 while t stays below the bound
inline std::optional<std::vector<std::uint32_t>> case1(const Node& v, const StaticConfig& cfg, std::uint64_t t0,
                                                       std::uint64_t bound) {
    HalfspacesInstance inst{v.X, v.S};
    HalfspaceIndex idx(inst);
    const auto reruns = std::max<std::uint32_t>(1, cfg.reruns.value_or(3));
    std::optional<std::vector<std::uint32_t>> best;
    const auto cap = std::max<std::uint64_t>(bound, 1);
    for (std::uint32_t k = 0; k < reruns; ++k) {
        try {
            const auto seed = mix_seed(cfg.seed, 0x63617365 + k);
            const auto out = guess_loop([&](std::uint64_t t) { return small_opt_solve(idx, t, seed, cfg.c0); }, cap,
                                        std::min(t0, cap));
            if (!out.is_cover()) continue;
            t0 = std::max(t0, out.stats.t);  // later runs start at the first guess that worked
            const auto lean = prune_redundant(idx, out.cover);
            if (!best || lean.size() < best->size()) {
                best.emplace();
                for (auto o : lean) best->push_back(v.ids[o]);
            }
        } catch (const Anomaly&) {
        }
    }
    return best;
}

inline NodeResult solve(const Node& v, const StaticConfig& cfg, std::uint32_t depth, RecursiveStats& st) {
    ++st.nodes;
    st.max_depth = std::max(st.max_depth, depth);
    const auto n = v.X.size();
    if (n == 0) return {};
    if (v.S.empty()) return {{}, 0u};
    if (n <= cfg.base_cutoff) {
        ++st.base_cases;
        return base_case(v, cfg);
    }
    const auto b = round_pow(n, cfg.b_exponent, 2);
    const auto g = round_pow(n, cfg.g_exponent, 4);
    const auto D = decompose(v.X, v.S, DecompositionConfig{b, g, mix_seed(cfg.seed, n)});
    if (D.stats.conflict_flag) ++st.conflict_flags;
    if (D.uncoverable) return {{}, *D.uncoverable};

    // Case 2: R, S_B, and a recursive cover in every cluster
    std::vector<std::uint32_t> cover2;
    for (auto s : D.R) cover2.push_back(v.ids[s]);
    for (auto s : D.SB) cover2.push_back(v.ids[s]);
    std::size_t residual = 0, child_sum = 0;
    for (const auto& C : D.clusters) {
        if (C.points.empty()) continue;
        child_sum += C.points.size();
        st.max_child_ratio = std::max(st.max_child_ratio, double(C.points.size()) / std::sqrt(double(n)));
        Node child;
        for (auto p : C.points) child.X.push_back(v.X[p]);
        for (auto s : C.objects) {
            child.S.push_back(v.S[s]);
            child.ids.push_back(v.ids[s]);
        }
        NodeResult sub;
        if (child.X.size() >= n) {
            ++st.stalled;
            sub = base_case(child, cfg);
        } else {
            sub = solve(child, cfg, depth + 1, st);
        }
        GEOCOVER_CHECK(!sub.witness, "static_recursive_cover: cluster residual has an uncoverable point");
        residual += sub.cover.size();
        cover2.insert(cover2.end(), sub.cover.begin(), sub.cover.end());
    }
    GEOCOVER_CHECK(child_sum <= n, "static_recursive_cover: children exceed the parent load");
    std::sort(cover2.begin(), cover2.end());
    cover2.erase(std::unique(cover2.begin(), cover2.end()), cover2.end());

    if (double(residual) >= cfg.case_constant * double(D.overhead())) {
        ++st.case2;
        return {cover2, std::nullopt};
    }
    // Case 1 below the Case 2 size
    const auto t0 = floor_pow2(std::max<std::uint64_t>(1, residual / 8));
    auto c1 = case1(v, cfg, t0, cover2.size());
    if (c1 && c1->size() < cover2.size()) {
        ++st.case1;
        std::sort(c1->begin(), c1->end());
        return {*c1, std::nullopt};
    }
    ++st.case2;
    return {cover2, std::nullopt};
}

}  // namespace recursive_detail

/// Static cover for upper halfspaces: direct MWU below the base cutoff,
/// otherwise a sample-and-divide step with recursion in every cluster,
/// replaced by partition-tree MWU when the residual is small next to
/// the sample and boundary overhead.
inline MwuOutcome static_recursive_cover(const HalfspacesInstance& inst, const StaticConfig& cfg = {},
                                         RecursiveStats* stats = nullptr) {
    for (const auto& p : inst.points) validate(p);
    for (const auto& h : inst.objects) validate(h);
    recursive_detail::Node root{inst.points, inst.objects, {}};
    root.ids.resize(inst.objects.size());
    for (std::uint32_t i = 0; i < root.ids.size(); ++i) root.ids[i] = i;
    RecursiveStats st;
    const auto res = recursive_detail::solve(root, cfg, 0, st);
    if (stats) *stats = st;
    MwuOutcome out;
    if (res.witness) {
        out.status = MwuOutcome::Status::infeasible;
        out.witness = res.witness;
        return out;
    }
    out.status = MwuOutcome::Status::cover;
    out.cover = res.cover;
    out.stats.t = res.cover.size();
    return out;
}

inline MwuOutcome static_recursive_cover(const DisksInstance& inst, const StaticConfig& cfg = {},
                                         RecursiveStats* stats = nullptr) {
    return static_recursive_cover(lift_instance(inst), cfg, stats);
}

// ---------------------------------------------------------------- dispatcher

struct DispatchConfig {
    std::uint64_t seed = 1;
    double c0 = 8.0;
    double small_slack = 1.0;      // small path up to t = slack * n^{2/9}
    std::optional<double> t_hint;  // residual hint for the estimator
    StaticConfig static_cfg{};
};

struct DispatchResult {
    enum class Kind { cover, value, infeasible };
    Kind kind = Kind::cover;
    std::string path;                   // "small", "medium" or "large"
    std::vector<std::uint32_t> cover;  // object ids of the index
    std::optional<std::uint32_t> witness;
    double value = 0;
    std::uint64_t guess_t = 0;
    std::uint32_t rounds = 0;
    std::uint64_t doubling_steps = 0;
    HalfspaceStats tree_stats;
    std::optional<EstimateResult> estimate;
    RecursiveStats recursive_stats;
};

/// Small OPT: partition-tree MWU while t <= n^{2/9}. Beyond that the
/// value estimator decides between reporting a value (above n^{10/13})
/// and a static cover of the current instance.
inline DispatchResult dispatch_solve_3d(HalfspaceIndex& idx, const DispatchConfig& cfg = {}) {
    DispatchResult res;
    const double n = double(idx.n_points() + idx.n_objects());
    if (idx.n_points() == 0) {
        res.path = "small";
        return res;
    }
    const auto t_small = std::max<std::uint64_t>(1, std::uint64_t(cfg.small_slack * std::pow(n, 2.0 / 9.0)));
    for (std::uint64_t t = 1;; t = std::min(2 * t, t_small)) {
        HalfspaceStats hs;
        const auto out = small_opt_solve(idx, t, cfg.seed, cfg.c0, &hs);
        res.rounds += out.stats.rounds;
        res.doubling_steps += out.stats.doubling_steps;
        res.tree_stats = hs;
        res.guess_t = t;
        if (out.status == MwuOutcome::Status::infeasible) {
            res.kind = DispatchResult::Kind::infeasible;
            res.path = "small";
            res.witness = out.witness;
            return res;
        }
        if (out.is_cover()) {
            res.path = "small";
            res.cover = out.cover;
            return res;
        }
        if (t >= t_small) break;
    }

    std::vector<std::uint32_t> pid, oid;
    const auto snap = idx.snapshot(&pid, &oid);
    const auto big = std::max<std::uint32_t>(2, std::uint32_t(std::lround(std::pow(n, 3.0 / 13.0))));
    EstimateConfig ec;
    ec.b = big;
    ec.g = std::size_t(big) * big;
    ec.t_hint = cfg.t_hint;
    ec.seed = cfg.seed;
    auto est = large_opt_estimate(snap.points, snap.objects, ec);
    if (est.uncoverable) {
        res.kind = DispatchResult::Kind::infeasible;
        res.path = "large";
        res.witness = pid[*est.uncoverable];
        res.estimate = std::move(est);
        return res;
    }
    if (est.value > std::pow(n, 10.0 / 13.0)) {
        res.kind = DispatchResult::Kind::value;
        res.path = "large";
        res.value = est.value;
        res.estimate = std::move(est);
        return res;
    }
    res.estimate = std::move(est);
    auto scfg = cfg.static_cfg;
    scfg.seed = cfg.seed;
    const auto out = static_recursive_cover(snap, scfg, &res.recursive_stats);
    res.path = "medium";
    if (!out.is_cover()) {
        res.kind = DispatchResult::Kind::infeasible;
        res.witness = pid[*out.witness];
        return res;
    }
    for (auto o : out.cover) res.cover.push_back(oid[o]);
    std::sort(res.cover.begin(), res.cover.end());
    return res;
}

}  // namespace geocover::halfspace
