#pragma once

#include <geocover/containment.hpp>
#include <geocover/error.hpp>
#include <geocover/geom.hpp>
#include <geocover/halfspace/envelope.hpp>
#include <geocover/halfspace/r_division.hpp>
#include <geocover/rng.hpp>
#include <geocover/static_solver.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace geocover::halfspace {

/// Sum of r values drawn from m, scaled to all m.
inline double estimate_sum(std::span<const double> draws, std::size_t m) {
    GEOCOVER_REQUIRE(!draws.empty(), "estimate_sum: no draws");
    double s = 0;
    for (auto d : draws) s += d;
    return s * double(m) / double(draws.size());
}

/// Draw count r = ceil((c0 / eps^2) m U log2 n / T), clamped to [1, m].
inline std::size_t prescribed_draws(double eps, std::size_t m, double U, double T, std::size_t n, double c0 = 1.0) {
    GEOCOVER_REQUIRE(eps > 0 && T > 0, "prescribed_draws: eps and T must be positive");
    if (m == 0) return 0;
    const double r = std::ceil(c0 / (eps * eps) * double(m) * U * std::log2(double(std::max<std::size_t>(n, 2))) / T);
    return std::size_t(std::clamp(r, 1.0, double(m)));
}

struct DecompositionConfig {
    std::uint32_t b = 8;                 // cell load, and |R| = ceil(n / b)
    std::size_t g = 64;                  // cells per cluster
    std::uint64_t seed = 1;
    double conflict_constant = 8.0;      // resample when a conflict list exceeds this * b * log2 n
    int max_trials = 3;
};

/// Points of one cluster left uncovered by R and S_B, with the halfspaces
/// crossing the cluster that contain them.
struct ResidualCluster {
    std::vector<std::uint32_t> points;                   // indices into X
    std::vector<std::uint32_t> objects;                  // indices into S, sorted
    std::vector<std::vector<std::uint32_t>> containing;  // per point, positions in objects

    ContainmentLists lists() const { return ContainmentLists::from_point_lists(containing, objects.size()); }
    std::size_t cap() const { return std::min(points.size(), objects.size()); }
};

struct DecompositionStats {
    std::size_t sample = 0;
    std::size_t cells = 0;
    std::size_t boundary_cells = 0;
    std::size_t max_conflict = 0;
    std::size_t max_load = 0;
    std::size_t max_cluster_points = 0;
    std::size_t residual_points = 0;
    int trials = 0;
    bool conflict_flag = false;  // last trial still above the conflict threshold
};

struct Decomposition {
    std::vector<std::uint32_t> R;
    std::vector<std::uint32_t> SB;
    std::vector<ResidualCluster> clusters;  // one per cluster of the division, possibly empty
    std::optional<std::uint32_t> uncoverable;
    DecompositionStats stats;

    std::size_t overhead() const { return R.size() + SB.size(); }
};

/// Sample R, decompose below its envelope, divide the cell graph, and
/// split the points R misses into boundary points (covered by S_B) and
/// per-cluster residual problems.
inline Decomposition decompose(std::span<const Point3> X, std::span<const Halfspace3> S, const DecompositionConfig& cfg) {
    GEOCOVER_REQUIRE(!S.empty(), "decompose: no halfspaces");
    GEOCOVER_REQUIRE(cfg.b >= 1 && cfg.g >= 1, "decompose: b and g must be positive");
    Decomposition out;
    const auto n = X.size();
    const auto r = std::min<std::size_t>(S.size(), std::max<std::size_t>(1, (n + cfg.b - 1) / cfg.b));
    const double limit = cfg.conflict_constant * cfg.b * std::log2(double(std::max<std::size_t>(n, 2)));

    Rng rng(mix_seed(cfg.seed, 0x6465636f));
    std::optional<EnvelopeDecomposition> E;
    for (int trial = 1;; ++trial) {
        auto R = sample_without_replacement(rng, std::uint32_t(S.size()), std::uint32_t(r));
        std::sort(R.begin(), R.end());
        E.emplace(X, S, R, EnvelopeConfig{cfg.b, true, mix_seed(cfg.seed, trial)});
        out.stats.trials = trial;
        out.R = std::move(R);
        out.stats.conflict_flag = double(E->max_conflict()) > limit;
        if (!out.stats.conflict_flag || trial >= cfg.max_trials) break;
    }
    const auto& cells = E->cells();
    out.stats.sample = out.R.size();
    out.stats.cells = cells.size();
    out.stats.max_conflict = E->max_conflict();
    out.stats.max_load = E->max_load();

    const auto rd = r_division(E->adjacency(), cfg.g);
    out.stats.boundary_cells = rd.boundary.size();
    std::vector<char> in_sb(S.size(), 0);
    for (auto c : rd.boundary)
        for (auto s : cells[c].conflicts) in_sb[s] = 1;
    for (std::uint32_t s = 0; s < S.size(); ++s)
        if (in_sb[s]) out.SB.push_back(s);

    out.clusters.resize(rd.clusters.size());
    std::vector<std::vector<std::vector<std::uint32_t>>> global(rd.clusters.size());
    std::vector<std::uint32_t> hit;
    for (std::uint32_t p = 0; p < n; ++p) {
        if (E->covered_by_sample(p)) continue;
        const auto c = E->cell_of(p);
        hit.clear();
        bool by_sb = false;
        for (auto s : cells[c].conflicts)
            if (contains(S[s], X[p])) {
                hit.push_back(s);
                by_sb = by_sb || in_sb[s];
            }
        if (hit.empty()) {
            if (!out.uncoverable) out.uncoverable = p;
            continue;
        }
        if (by_sb) continue;
        const auto k = rd.cluster_of[c];
        GEOCOVER_CHECK(k != RDivision::kNoCluster, "decompose: boundary point missed by S_B");
        out.clusters[k].points.push_back(p);
        global[k].push_back(hit);
    }
    for (std::size_t k = 0; k < out.clusters.size(); ++k) {
        auto& C = out.clusters[k];
        for (const auto& h : global[k]) C.objects.insert(C.objects.end(), h.begin(), h.end());
        std::sort(C.objects.begin(), C.objects.end());
        C.objects.erase(std::unique(C.objects.begin(), C.objects.end()), C.objects.end());
        for (auto& h : global[k]) {
            for (auto& s : h) s = std::uint32_t(std::lower_bound(C.objects.begin(), C.objects.end(), s) - C.objects.begin());
        }
        C.containing = std::move(global[k]);
        out.stats.residual_points += C.points.size();
        std::size_t load = 0;
        for (auto c : rd.clusters[k]) load += cells[c].points.size();
        out.stats.max_cluster_points = std::max(out.stats.max_cluster_points, load);
    }
    return out;
}

struct EstimateConfig {
    std::uint32_t b = 8;
    std::size_t g = 64;
    std::optional<double> t_hint;  // lower guess for the residual sum; a pilot sample sets it when absent
    double c_est = 1.0;
    std::uint64_t seed = 1;
    bool all_clusters = false;  // solve every cluster instead of sampling
    StaticConfig cluster_solver{};
};

struct EstimateResult {
    double value = 0;
    double residual = 0;  // scaled cluster-sample sum
    std::size_t overhead = 0;
    std::size_t clusters = 0;
    std::size_t draws = 0;
    std::size_t cap = 0;  // U
    double t_hint = 0;
    std::size_t infeasible_clusters = 0;
    std::optional<std::uint32_t> uncoverable;
    std::vector<std::size_t> cluster_values;  // filled when all clusters are solved
    DecompositionStats stats;
};

/// Value of a static cover for one residual cluster.
inline std::size_t cluster_value(const ResidualCluster& C, const StaticConfig& cfg, std::size_t* infeasible = nullptr) {
    if (C.points.empty()) return 0;
    const auto out = static_mwu_cover(C.lists(), cfg);
    if (!out.is_cover()) {
        if (infeasible) ++*infeasible;
        return 0;
    }
    return out.cover.size();
}

/// |R| + |S_B| plus the residual sum estimated from a uniform sample of
/// clusters.
inline EstimateResult large_opt_estimate(std::span<const Point3> X, std::span<const Halfspace3> S,
                                         const EstimateConfig& cfg) {
    EstimateResult res;
    if (S.empty()) {
        GEOCOVER_REQUIRE(X.empty(), "large_opt_estimate: points but no halfspaces");
        return res;
    }
    const auto D = decompose(X, S, DecompositionConfig{cfg.b, cfg.g, cfg.seed});
    res.stats = D.stats;
    res.overhead = D.overhead();
    res.clusters = D.clusters.size();
    res.uncoverable = D.uncoverable;
    const auto m = D.clusters.size();
    for (const auto& C : D.clusters) res.cap = std::max(res.cap, C.cap());
    if (res.cap == 0 || m == 0) {
        res.value = double(res.overhead);
        return res;
    }
    auto scfg = cfg.cluster_solver;
    if (cfg.all_clusters) {
        double sum = 0;
        for (const auto& C : D.clusters) {
            res.cluster_values.push_back(cluster_value(C, scfg, &res.infeasible_clusters));
            sum += double(res.cluster_values.back());
        }
        res.draws = m;
        res.residual = sum;
        res.value = double(res.overhead) + sum;
        return res;
    }
    const auto n = X.size();
    Rng rng(mix_seed(cfg.seed, 0x65737469));
    auto draw = [&](std::size_t r) {
        const auto ids = sample_without_replacement(rng, std::uint32_t(m), std::uint32_t(r));
        std::vector<double> vals;
        for (auto k : ids) {
            scfg.seed = mix_seed(cfg.seed, k);
            vals.push_back(double(cluster_value(D.clusters[k], scfg, &res.infeasible_clusters)));
        }
        return vals;
    };
    double T = 0;
    if (cfg.t_hint) {
        T = std::max(1.0, *cfg.t_hint);
    } else {
        // pilot: enough draws to see a residual sum of about m clusters' worth of one unit each
        const auto pilot = draw(prescribed_draws(1.0, m, double(res.cap), double(m), n, cfg.c_est));
        T = std::max(1.0, estimate_sum(pilot, m) / 2);
    }
    res.t_hint = T;
    res.draws = prescribed_draws(1.0, m, double(res.cap), T, n, cfg.c_est);
    const auto vals = draw(res.draws);
    res.residual = estimate_sum(vals, m);
    res.value = double(res.overhead) + res.residual;
    return res;
}

}  // namespace geocover::halfspace
