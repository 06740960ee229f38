#pragma once

#include <geocover/error.hpp>
#include <geocover/geom.hpp>
#include <geocover/rng.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <numeric>
#include <vector>

namespace geocover::halfspace {

/// det[b - a, c - a, d - a]; positive when d lies on the side of the normal
/// (b - a) x (c - a). Exact for |x|, |y| < 2^31 and |z| < 2^61.
inline Wide orient3(const Point3& a, const Point3& b, const Point3& c, const Point3& d) {
    const Wide bx = Wide(b.x) - a.x, by = Wide(b.y) - a.y, bz = Wide(b.z) - a.z;
    const Wide cx = Wide(c.x) - a.x, cy = Wide(c.y) - a.y, cz = Wide(c.z) - a.z;
    const Wide dx = Wide(d.x) - a.x, dy = Wide(d.y) - a.y, dz = Wide(d.z) - a.z;
    const Wide m1 = cy * dz - dy * cz;
    const Wide m2 = cx * dz - dx * cz;
    const Wide m3 = cx * dy - dx * cy;
    return bx * m1 - by * m2 + bz * m3;
}

/// Randomized incremental convex hull with conflict lists. Faces are
/// triangles oriented counterclockwise seen from outside; points on or
/// inside the current hull are skipped, so coplanar faces may remain.
class ConvexHull3 {
public:
    struct Face {
        std::array<std::uint32_t, 3> v;
        std::array<std::uint32_t, 3> nb;  // across edge v[i] -> v[i+1]
        bool alive = true;
    };

    ConvexHull3(std::vector<Point3> pts, std::uint64_t seed) : pts_(std::move(pts)) {
        GEOCOVER_REQUIRE(pts_.size() >= 4, "hull: need four points");
        build(seed);
    }

    const std::vector<Point3>& points() const noexcept { return pts_; }
    const std::vector<Face>& faces() const noexcept { return faces_; }
    bool on_hull(std::uint32_t i) const { return incident_[i] != kNone; }

    /// Live faces around vertex i in counterclockwise order seen from outside.
    std::vector<std::uint32_t> faces_around(std::uint32_t i) const {
        std::vector<std::uint32_t> out;
        const auto f0 = incident_[i];
        if (f0 == kNone) return out;
        auto f = f0;
        do {
            out.push_back(f);
            const auto& F = faces_[f];
            const auto k = slot(F, i);
            f = F.nb[(k + 2) % 3];
            GEOCOVER_CHECK(out.size() <= faces_.size(), "hull: broken vertex cycle");
        } while (f != f0);
        return out;
    }

    std::vector<std::uint32_t> neighbors(std::uint32_t i) const {
        std::vector<std::uint32_t> out;
        for (auto f : faces_around(i)) {
            const auto& F = faces_[f];
            out.push_back(F.v[(slot(F, i) + 1) % 3]);
        }
        return out;
    }

    /// Outward normal (b - a) x (c - a).
    std::array<Wide, 3> normal(std::uint32_t f) const {
        const auto& a = pts_[faces_[f].v[0]];
        const auto& b = pts_[faces_[f].v[1]];
        const auto& c = pts_[faces_[f].v[2]];
        const Wide ux = Wide(b.x) - a.x, uy = Wide(b.y) - a.y, uz = Wide(b.z) - a.z;
        const Wide vx = Wide(c.x) - a.x, vy = Wide(c.y) - a.y, vz = Wide(c.z) - a.z;
        return {uy * vz - uz * vy, uz * vx - ux * vz, ux * vy - uy * vx};
    }

    Wide side(std::uint32_t f, const Point3& p) const {
        const auto& F = faces_[f];
        return orient3(pts_[F.v[0]], pts_[F.v[1]], pts_[F.v[2]], p);
    }

    std::size_t live_faces() const {
        return std::size_t(std::count_if(faces_.begin(), faces_.end(), [](const Face& f) { return f.alive; }));
    }

private:
    static constexpr std::uint32_t kNone = ~std::uint32_t{0};

    static std::uint32_t slot(const Face& F, std::uint32_t v) {
        for (std::uint32_t k = 0; k < 3; ++k)
            if (F.v[k] == v) return k;
        throw Anomaly("hull: vertex not on face");
    }

    std::uint32_t add_face(std::uint32_t a, std::uint32_t b, std::uint32_t c) {
        faces_.push_back({{a, b, c}, {kNone, kNone, kNone}, true});
        conflicts_.emplace_back();
        return std::uint32_t(faces_.size() - 1);
    }

    void build(std::uint64_t seed) {
        const auto n = std::uint32_t(pts_.size());
        // first four affinely independent points
        std::array<std::uint32_t, 4> s{0, kNone, kNone, kNone};
        for (std::uint32_t i = 1; i < n && s[1] == kNone; ++i)
            if (pts_[i] != pts_[0]) s[1] = i;
        GEOCOVER_REQUIRE(s[1] != kNone, "hull: all points coincide");
        for (std::uint32_t i = 0; i < n && s[2] == kNone; ++i) {
            const Wide ux = Wide(pts_[s[1]].x) - pts_[0].x, uy = Wide(pts_[s[1]].y) - pts_[0].y,
                       uz = Wide(pts_[s[1]].z) - pts_[0].z;
            const Wide vx = Wide(pts_[i].x) - pts_[0].x, vy = Wide(pts_[i].y) - pts_[0].y,
                       vz = Wide(pts_[i].z) - pts_[0].z;
            if (uy * vz - uz * vy != 0 || uz * vx - ux * vz != 0 || ux * vy - uy * vx != 0) s[2] = i;
        }
        GEOCOVER_REQUIRE(s[2] != kNone, "hull: all points collinear");
        for (std::uint32_t i = 0; i < n && s[3] == kNone; ++i)
            if (orient3(pts_[s[0]], pts_[s[1]], pts_[s[2]], pts_[i]) != 0) s[3] = i;
        GEOCOVER_REQUIRE(s[3] != kNone, "hull: all points coplanar");

        if (orient3(pts_[s[0]], pts_[s[1]], pts_[s[2]], pts_[s[3]]) > 0) std::swap(s[1], s[2]);
        // now s3 is below face (s0, s1, s2)
        const auto f0 = add_face(s[0], s[1], s[2]);
        const auto f1 = add_face(s[0], s[3], s[1]);
        const auto f2 = add_face(s[1], s[3], s[2]);
        const auto f3 = add_face(s[2], s[3], s[0]);
        for (auto f : {f0, f1, f2, f3}) link_all(f, {f0, f1, f2, f3});

        std::vector<std::uint32_t> order;
        for (std::uint32_t i = 0; i < n; ++i)
            if (i != s[0] && i != s[1] && i != s[2] && i != s[3]) order.push_back(i);
        Rng rng(mix_seed(seed, 0x68756c6c));
        std::shuffle(order.begin(), order.end(), rng);

        point_faces_.assign(n, {});
        for (auto p : order)
            for (auto f : {f0, f1, f2, f3})
                if (side(f, pts_[p]) > 0) {
                    conflicts_[f].push_back(p);
                    point_faces_[p].push_back(f);
                }

        std::vector<std::uint32_t> stamp(faces_.size(), 0), pstamp(n, 0);
        std::uint32_t round = 0;
        for (auto p : order) {
            ++round;
            std::vector<std::uint32_t> visible;
            for (auto f : point_faces_[p])
                if (faces_[f].alive) visible.push_back(f);
            if (visible.empty()) continue;
            stamp.resize(faces_.size(), 0);
            for (auto f : visible) stamp[f] = round;

            struct Horizon {
                std::uint32_t u, w, outside, inside;
            };
            std::vector<Horizon> horizon;
            for (auto f : visible)
                for (std::uint32_t k = 0; k < 3; ++k) {
                    const auto g = faces_[f].nb[k];
                    if (stamp[g] != round) horizon.push_back({faces_[f].v[k], faces_[f].v[(k + 1) % 3], g, f});
                }

            std::vector<std::pair<std::uint32_t, std::uint32_t>> start_of;  // (u, new face)
            std::vector<std::uint32_t> created;
            for (const auto& h : horizon) {
                const auto nf = add_face(h.u, h.w, p);
                created.push_back(nf);
                start_of.push_back({h.u, nf});
                faces_[nf].nb[0] = h.outside;
                auto& G = faces_[h.outside];
                for (std::uint32_t k = 0; k < 3; ++k)
                    if (G.v[k] == h.w && G.v[(k + 1) % 3] == h.u) G.nb[k] = nf;
            }
            std::sort(start_of.begin(), start_of.end());
            auto find_start = [&](std::uint32_t u) {
                auto it = std::lower_bound(start_of.begin(), start_of.end(), std::make_pair(u, std::uint32_t{0}));
                GEOCOVER_CHECK(it != start_of.end() && it->first == u, "hull: horizon is not a cycle");
                return it->second;
            };
            // (u, w, p) meets (w, x, p) along w -> p
            for (auto nf : created) faces_[nf].nb[1] = find_start(faces_[nf].v[1]);
            for (auto nf : created) {
                const auto next = faces_[nf].nb[1];
                faces_[next].nb[2] = nf;
            }

            stamp.resize(faces_.size(), 0);
            for (std::size_t i = 0; i < horizon.size(); ++i) {
                const auto nf = created[i];
                const auto& h = horizon[i];
                ++round;
                pstamp[p] = round;
                for (auto src : {h.inside, h.outside})
                    for (auto q : conflicts_[src]) {
                        if (pstamp[q] == round) continue;
                        pstamp[q] = round;
                        if (side(nf, pts_[q]) > 0) {
                            conflicts_[nf].push_back(q);
                            point_faces_[q].push_back(nf);
                        }
                    }
            }
            for (auto f : visible) {
                faces_[f].alive = false;
                conflicts_[f].clear();
                conflicts_[f].shrink_to_fit();
            }
            stamp.resize(faces_.size(), 0);
        }

        incident_.assign(n, kNone);
        for (std::uint32_t f = 0; f < faces_.size(); ++f) {
            if (!faces_[f].alive) continue;
            for (auto v : faces_[f].v) incident_[v] = f;
        }
        conflicts_.clear();
        point_faces_.clear();
    }

    void link_all(std::uint32_t f, const std::array<std::uint32_t, 4>& fs) {
        auto& F = faces_[f];
        for (std::uint32_t k = 0; k < 3; ++k) {
            const auto a = F.v[k], b = F.v[(k + 1) % 3];
            for (auto g : fs) {
                if (g == f) continue;
                const auto& G = faces_[g];
                for (std::uint32_t j = 0; j < 3; ++j)
                    if (G.v[j] == b && G.v[(j + 1) % 3] == a) F.nb[k] = g;
            }
        }
    }

    std::vector<Point3> pts_;
    std::vector<Face> faces_;
    std::vector<std::vector<std::uint32_t>> conflicts_;
    std::vector<std::vector<std::uint32_t>> point_faces_;
    std::vector<std::uint32_t> incident_;
};

}  // namespace geocover::halfspace
