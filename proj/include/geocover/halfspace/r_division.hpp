#pragma once

#include <geocover/error.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <vector>

namespace geocover::halfspace {

struct RDivision {
    std::vector<std::vector<std::uint32_t>> clusters;
    std::vector<std::uint32_t> boundary;
    std::vector<std::uint32_t> cluster_of;  // kNoCluster for boundary vertices

    static constexpr std::uint32_t kNoCluster = ~std::uint32_t{0};
};

struct RDivisionCheck {
    std::size_t max_cluster = 0;
    std::size_t boundary = 0;
    std::size_t cross_edges = 0;
    bool partition = true;  // every vertex in exactly one cluster or the boundary

    bool ok(std::size_t m, std::size_t g) const {
        return partition && cross_edges == 0 && max_cluster <= 4 * g &&
               double(boundary) <= 8.0 * double(m) / std::sqrt(double(g));
    }
};

/// Splits the graph into clusters of at most g vertices by repeatedly
/// removing a thin BFS layer from every piece larger than g; the removed
/// layers form the boundary. Leftover components are packed into clusters.
inline RDivision r_division(const std::vector<std::vector<std::uint32_t>>& adj, std::size_t g) {
    GEOCOVER_REQUIRE(g >= 1, "r_division: g must be positive");
    const auto m = std::uint32_t(adj.size());
    constexpr auto kNone = RDivision::kNoCluster;
    RDivision out;
    out.cluster_of.assign(m, kNone);

    std::vector<char> removed(m, 0);
    std::vector<std::uint32_t> piece_of(m, 0), dist(m, kNone);
    std::uint32_t next_piece = 0;

    auto bfs = [&](std::uint32_t src, std::uint32_t piece, std::vector<std::uint32_t>& order) {
        order.clear();
        order.push_back(src);
        dist[src] = 0;
        for (std::size_t h = 0; h < order.size(); ++h) {
            const auto v = order[h];
            for (auto w : adj[v])
                if (!removed[w] && piece_of[w] == piece && dist[w] == kNone) {
                    dist[w] = dist[v] + 1;
                    order.push_back(w);
                }
        }
    };
    auto clear = [&](const std::vector<std::uint32_t>& order) {
        for (auto v : order) dist[v] = kNone;
    };

    // connected components of the live graph, each tagged with a fresh piece id
    auto components = [&](const std::vector<std::uint32_t>& verts, std::uint32_t piece,
                           std::vector<std::vector<std::uint32_t>>& comps) {
        std::vector<std::uint32_t> order;
        for (auto s : verts) {
            if (removed[s] || piece_of[s] != piece) continue;
            bfs(s, piece, order);
            clear(order);
            const auto id = ++next_piece;
            for (auto v : order) piece_of[v] = id;
            comps.push_back(order);
        }
    };

    std::vector<std::vector<std::uint32_t>> work, done;
    {
        std::vector<std::uint32_t> all(m);
        for (std::uint32_t v = 0; v < m; ++v) all[v] = v;
        components(all, 0, work);
    }
    std::vector<std::uint32_t> order;
    while (!work.empty()) {
        auto P = std::move(work.back());
        work.pop_back();
        if (P.size() <= g) {
            done.push_back(std::move(P));
            continue;
        }
        const auto piece = piece_of[P[0]];
        // pseudo-peripheral root
        bfs(P[0], piece, order);
        const auto far = order.back();
        clear(order);
        bfs(far, piece, order);
        const auto depth = dist[order.back()] + 1;
        std::vector<std::size_t> layer(depth, 0);
        for (auto v : order) ++layer[dist[v]];
        std::size_t before = 0, best = kNone, best_size = ~std::size_t{0};
        for (std::uint32_t i = 0; i < depth; ++i) {
            const auto after = P.size() - before - layer[i];
            if (4 * before <= 3 * P.size() && 4 * after <= 3 * P.size() && layer[i] < best_size) {
                best = i;
                best_size = layer[i];
            }
            before += layer[i];
        }
        GEOCOVER_CHECK(best != kNone, "r_division: no balanced layer");
        for (auto v : order)
            if (dist[v] == best) {
                removed[v] = 1;
                out.boundary.push_back(v);
            }
        clear(order);
        components(P, piece, work);
    }

    // pack pieces into clusters of at most g vertices, largest first
    std::stable_sort(done.begin(), done.end(), [](const auto& a, const auto& b) { return a.size() > b.size(); });
    for (auto& P : done) {
        if (out.clusters.empty() || out.clusters.back().size() + P.size() > g) out.clusters.emplace_back();
        auto& C = out.clusters.back();
        C.insert(C.end(), P.begin(), P.end());
    }
    for (std::uint32_t c = 0; c < out.clusters.size(); ++c) {
        std::sort(out.clusters[c].begin(), out.clusters[c].end());
        for (auto v : out.clusters[c]) out.cluster_of[v] = c;
    }
    std::sort(out.boundary.begin(), out.boundary.end());
    return out;
}

inline RDivisionCheck check_r_division(const std::vector<std::vector<std::uint32_t>>& adj, const RDivision& rd) {
    RDivisionCheck ck;
    ck.boundary = rd.boundary.size();
    std::vector<int> seen(adj.size(), 0);
    for (const auto& C : rd.clusters) {
        ck.max_cluster = std::max(ck.max_cluster, C.size());
        for (auto v : C) ++seen[v];
    }
    for (auto v : rd.boundary) ++seen[v];
    for (auto s : seen)
        if (s != 1) ck.partition = false;
    for (std::uint32_t v = 0; v < adj.size(); ++v)
        for (auto w : adj[v]) {
            const auto a = rd.cluster_of[v], b = rd.cluster_of[w];
            if (a != RDivision::kNoCluster && b != RDivision::kNoCluster && a != b) ++ck.cross_edges;
        }
    return ck;
}

}  // namespace geocover::halfspace
