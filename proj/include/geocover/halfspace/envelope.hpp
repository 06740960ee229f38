#pragma once

#include <geocover/error.hpp>
#include <geocover/geom.hpp>
#include <geocover/halfspace/hull3d.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <numeric>
#include <span>
#include <unordered_map>
#include <vector>

namespace geocover::halfspace {

struct Vec2 {
    long double x = 0, y = 0;
};

/// Value of the bounding plane of h at q.
inline long double plane_at(const Halfspace3& h, const Vec2& q) {
    return (long double)h.a * q.x + (long double)h.b * q.y + (long double)h.c;
}

struct EnvelopeConfig {
    std::uint32_t b = 8;  // max points per cell after refinement
    bool refine = true;
    std::uint64_t seed = 1;
};

struct EnvelopeCell {
    std::uint32_t owner = 0;           // index into S of the envelope plane over the cell
    std::array<std::uint32_t, 3> v{};  // vertex ids, counterclockwise
    std::vector<std::uint32_t> conflicts;  // indices into S crossing the cell
    std::vector<std::uint32_t> points;     // indices into X located in the cell
};

/// Vertical decomposition of the region below the lower envelope of the
/// planes of a sample R, restricted to the bounding box of X's projection:
/// the minimization diagram of R, each face clipped and fan-triangulated,
/// then refined by longest-edge bisection until every triangle holds at
/// most b points. A halfspace crosses a cell when its plane is more than
/// 1/2 below the cell's plane at some corner; for integer points this
/// catches every halfspace containing a point of the cell that R misses.
class EnvelopeDecomposition {
public:
    EnvelopeDecomposition(std::span<const Point3> X, std::span<const Halfspace3> S, std::vector<std::uint32_t> R,
                          const EnvelopeConfig& cfg)
        : X_(X), S_(S), R_(std::move(R)), cfg_(cfg) {
        GEOCOVER_REQUIRE(!R_.empty(), "envelope: empty sample");
        for (auto r : R_) GEOCOVER_REQUIRE(r < S_.size(), "envelope: sample id out of range");
        set_box();
        build_hull();
        build_faces();
        locate_points();
        if (cfg_.refine) refine();
        finish_graph();
        build_conflicts();
    }

    const std::vector<EnvelopeCell>& cells() const noexcept { return cells_; }
    const std::vector<Vec2>& vertices() const noexcept { return verts_; }
    const std::vector<std::vector<std::uint32_t>>& adjacency() const noexcept { return adj_; }
    const std::vector<std::uint32_t>& sample() const noexcept { return R_; }
    std::uint32_t cell_of(std::uint32_t p) const { return cell_of_[p]; }
    bool covered_by_sample(std::uint32_t p) const { return covered_[p] != 0; }
    std::size_t face_count() const noexcept { return faces_built_; }
    std::array<long double, 4> box() const noexcept { return {x0_, x1_, y0_, y1_}; }

    /// Corner test against one cell.
    bool crosses(std::uint32_t cell, const Halfspace3& h) const { return dips(cell, h, -0.5L); }

    std::size_t max_conflict() const {
        std::size_t m = 0;
        for (const auto& c : cells_) m = std::max(m, c.conflicts.size());
        return m;
    }
    std::size_t max_load() const {
        std::size_t m = 0;
        for (const auto& c : cells_) m = std::max(m, c.points.size());
        return m;
    }

    /// Exact lower envelope of R at (x, y), with the minimizing sample index.
    std::pair<Wide, std::uint32_t> envelope_at(Coord x, Coord y, std::uint32_t start = 0) const {
        auto val = [&](std::uint32_t i) {
            const auto& h = S_[R_[i]];
            return Wide(h.a) * x + Wide(h.b) * y + h.c;
        };
        auto cur = start < R_.size() && hull_->on_hull(start) ? start : first_on_hull_;
        auto best = val(cur);
        for (bool moved = true; moved;) {
            moved = false;
            for (auto w : real_nbrs_[cur]) {
                const auto v = val(w);
                if (v < best) {
                    best = v;
                    cur = w;
                    moved = true;
                }
            }
        }
        return {best, cur};
    }

private:
    static constexpr Coord kSlope = Coord{1} << 30;
    static constexpr Coord kHeight = Coord{1} << 60;
    static constexpr std::uint32_t kNone = ~std::uint32_t{0};
    using Key = std::array<Wide, 4>;

    struct Label {
        int kind;  // 0: between faces a and b, 1: box side a
        std::uint32_t a, b;
    };

    void set_box() {
        if (X_.empty()) {
            x0_ = y0_ = -1;
            x1_ = y1_ = 1;
            return;
        }
        Coord xl = X_[0].x, xh = X_[0].x, yl = X_[0].y, yh = X_[0].y;
        for (const auto& p : X_) {
            xl = std::min(xl, p.x);
            xh = std::max(xh, p.x);
            yl = std::min(yl, p.y);
            yh = std::max(yh, p.y);
        }
        x0_ = (long double)(xl - 1);
        x1_ = (long double)(xh + 1);
        y0_ = (long double)(yl - 1);
        y1_ = (long double)(yh + 1);
        ix_ = {xl - 1, xh + 1, yl - 1, yh + 1};
    }

    // sample plane i, or one of the four far planes after the sample
    Halfspace3 plane_of(std::uint32_t i) const {
        if (i < R_.size()) return S_[R_[i]];
        static constexpr std::array<std::array<Coord, 2>, 4> dir{{{-1, 0}, {1, 0}, {0, -1}, {0, 1}}};
        const auto& d = dir[i - R_.size()];
        return {d[0] * kSlope, d[1] * kSlope, kHeight};
    }

    void build_hull() {
        std::vector<Point3> pts;
        for (auto r : R_) pts.push_back(halfspace_dual(S_[r]));
        for (std::uint32_t k = 0; k < 4; ++k) pts.push_back(halfspace_dual(plane_of(std::uint32_t(R_.size()) + k)));
        hull_ = std::make_unique<ConvexHull3>(std::move(pts), cfg_.seed);
        const auto nr = std::uint32_t(R_.size());
        real_nbrs_.assign(nr, {});
        first_on_hull_ = kNone;
        for (std::uint32_t i = 0; i < nr; ++i) {
            if (!hull_->on_hull(i)) continue;
            if (first_on_hull_ == kNone) first_on_hull_ = i;
            for (auto w : hull_->neighbors(i))
                if (w < nr) real_nbrs_[i].push_back(w);
        }
        GEOCOVER_CHECK(first_on_hull_ != kNone, "envelope: no sample plane on the hull");
    }

    std::uint32_t vertex(const Key& k, Vec2 q) {
        auto [it, fresh] = vid_.emplace(k, std::uint32_t(verts_.size()));
        if (fresh) {
            verts_.push_back(q);
            exact_.push_back(k[0] == 0 ? std::array<Wide, 3>{k[1], k[2], k[3]} : std::array<Wide, 3>{0, 0, 0});
        }
        return it->second;
    }

    static Wide gcd(Wide a, Wide b) {
        if (a < 0) a = -a;
        if (b < 0) b = -b;
        while (b) {
            const Wide t = a % b;
            a = b;
            b = t;
        }
        return a;
    }

    // side 0: x >= x0, 1: x <= x1, 2: y >= y0, 3: y <= y1
    bool inside(std::uint32_t v, int side) const {
        const auto& e = exact_[v];
        if (e[2] > 0) {
            switch (side) {
                case 0: return e[0] >= Wide(ix_[0]) * e[2];
                case 1: return e[0] <= Wide(ix_[1]) * e[2];
                case 2: return e[1] >= Wide(ix_[2]) * e[2];
                default: return e[1] <= Wide(ix_[3]) * e[2];
            }
        }
        const auto& q = verts_[v];
        switch (side) {
            case 0: return q.x >= x0_;
            case 1: return q.x <= x1_;
            case 2: return q.y >= y0_;
            default: return q.y <= y1_;
        }
    }

    long double side_value(int side) const {
        switch (side) {
            case 0: return x0_;
            case 1: return x1_;
            case 2: return y0_;
            default: return y1_;
        }
    }

    std::uint32_t crossing(const Label& L, int side, std::uint32_t A, std::uint32_t B) {
        if (L.kind == 1) {
            const int s = std::min<int>(side, int(L.a)), t = std::max<int>(side, int(L.a));
            GEOCOVER_CHECK(s < 2 && t >= 2, "envelope: parallel box sides");
            return vertex({2, s, t, 0}, {side_value(s), side_value(t)});
        }
        const auto i = std::min(L.a, L.b), j = std::max(L.a, L.b);
        const auto h = plane_of(i), g = plane_of(j);
        const long double da = (long double)(h.a - g.a), db = (long double)(h.b - g.b), dc = (long double)(h.c - g.c);
        Vec2 q;
        const long double s = side_value(side);
        if (side < 2) {
            q.x = s;
            q.y = db != 0 ? -(da * s + dc) / db : verts_[A].y;
        } else {
            q.y = s;
            q.x = da != 0 ? -(db * s + dc) / da : verts_[A].x;
        }
        (void)B;
        return vertex({1, Wide(i) << 3 | side, j, 0}, q);
    }

    void build_faces() {
        const auto nr = std::uint32_t(R_.size());
        for (std::uint32_t i = 0; i < nr; ++i) {
            if (!hull_->on_hull(i)) continue;
            const auto around = hull_->faces_around(i);
            std::vector<std::uint32_t> poly;
            std::vector<Label> labels;
            for (std::size_t k = 0; k < around.size(); ++k) {
                const auto f = around[k];
                auto n = hull_->normal(f);
                GEOCOVER_CHECK(n[2] < 0, "envelope: face around a sample plane is not a lower face");
                for (auto& c : n) c = -c;
                const Wide g = gcd(gcd(n[0], n[1]), n[2]);
                for (auto& c : n) c /= g;
                const auto v = vertex({0, n[0], n[1], n[2]}, {(long double)n[0] / (long double)n[2],
                                                               (long double)n[1] / (long double)n[2]});
                // neighbor between this face and the next one around i
                const auto& F = hull_->faces()[f];
                std::uint32_t slot = 0;
                while (F.v[slot] != i) ++slot;
                const auto nb = F.v[(slot + 2) % 3];
                if (!poly.empty() && poly.back() == v) {
                    labels.back() = {0, i, nb};
                    continue;
                }
                poly.push_back(v);
                labels.push_back({0, i, nb});
            }
            while (poly.size() > 1 && poly.front() == poly.back()) {
                poly.pop_back();
                labels.pop_back();
            }
            if (poly.size() < 3) continue;
            for (int side = 0; side < 4 && poly.size() >= 3; ++side) {
                std::vector<std::uint32_t> np;
                std::vector<Label> nl;
                const auto m = poly.size();
                for (std::size_t k = 0; k < m; ++k) {
                    const auto A = poly[k], B = poly[(k + 1) % m];
                    const auto& L = labels[k];
                    const bool ia = inside(A, side), ib = inside(B, side);
                    if (ia) {
                        np.push_back(A);
                        nl.push_back(L);
                        if (!ib) {
                            np.push_back(crossing(L, side, A, B));
                            nl.push_back({1, std::uint32_t(side), 0});
                        }
                    } else if (ib) {
                        np.push_back(crossing(L, side, A, B));
                        nl.push_back(L);
                    }
                }
                // drop repeats from crossings landing on existing vertices
                std::vector<std::uint32_t> cp;
                std::vector<Label> cl;
                for (std::size_t k = 0; k < np.size(); ++k) {
                    if (!cp.empty() && cp.back() == np[k]) {
                        cl.back() = nl[k];
                        continue;
                    }
                    cp.push_back(np[k]);
                    cl.push_back(nl[k]);
                }
                while (cp.size() > 1 && cp.front() == cp.back()) {
                    cp.pop_back();
                    cl.pop_back();
                }
                poly = std::move(cp);
                labels = std::move(cl);
            }
            if (poly.size() < 3) continue;
            long double area = 0;
            for (std::size_t k = 0; k < poly.size(); ++k)
                area += cross({0, 0}, verts_[poly[k]], verts_[poly[(k + 1) % poly.size()]]);
            if (area < 0) std::reverse(poly.begin(), poly.end());
            ++faces_built_;
            for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
                EnvelopeCell c;
                c.owner = i;  // sample index for now
                c.v = {poly[0], poly[k], poly[k + 1]};
                cells_.push_back(std::move(c));
            }
        }
        GEOCOVER_CHECK(!cells_.empty(), "envelope: decomposition is empty");
    }

    static long double cross(const Vec2& o, const Vec2& a, const Vec2& b) {
        return (a.x - o.x) * (b.y - o.y) - (a.y - o.y) * (b.x - o.x);
    }

    // smallest barycentric coordinate of q (negative outside), scaled by area sign
    long double containment(std::uint32_t c, const Vec2& q) const {
        const auto& A = verts_[cells_[c].v[0]];
        const auto& B = verts_[cells_[c].v[1]];
        const auto& C = verts_[cells_[c].v[2]];
        const long double area = cross(A, B, C);
        if (area <= 0) return -1e30L;
        return std::min({cross(q, B, C), cross(A, q, C), cross(A, B, q)}) / area;
    }

    void locate_points() {
        const auto nc = cells_.size();
        const auto G = std::uint32_t(std::max<std::size_t>(1, std::size_t(std::sqrt(double(nc)))));
        const long double w = (x1_ - x0_) / G, h = (y1_ - y0_) / G;
        auto gx = [&](long double x) {
            return std::uint32_t(std::clamp<long double>(std::floor((x - x0_) / w), 0, G - 1));
        };
        auto gy = [&](long double y) {
            return std::uint32_t(std::clamp<long double>(std::floor((y - y0_) / h), 0, G - 1));
        };
        std::vector<std::vector<std::uint32_t>> grid(std::size_t(G) * G);
        for (std::uint32_t c = 0; c < nc; ++c) {
            long double xl = 1e40L, xh = -1e40L, yl = 1e40L, yh = -1e40L;
            for (auto v : cells_[c].v) {
                xl = std::min(xl, verts_[v].x);
                xh = std::max(xh, verts_[v].x);
                yl = std::min(yl, verts_[v].y);
                yh = std::max(yh, verts_[v].y);
            }
            for (auto i = gx(xl); i <= gx(xh); ++i)
                for (auto j = gy(yl); j <= gy(yh); ++j) grid[std::size_t(i) * G + j].push_back(c);
        }
        cell_of_.assign(X_.size(), kNone);
        covered_.assign(X_.size(), 0);
        for (std::uint32_t p = 0; p < X_.size(); ++p) {
            const Vec2 q{(long double)X_[p].x, (long double)X_[p].y};
            std::uint32_t best = kNone;
            long double bv = -1e40L;
            for (auto c : grid[std::size_t(gx(q.x)) * G + gy(q.y)]) {
                const auto v = containment(c, q);
                if (v > bv) {
                    bv = v;
                    best = c;
                }
            }
            if (best == kNone || bv < -1e-9L) {
                for (std::uint32_t c = 0; c < nc; ++c) {
                    const auto v = containment(c, q);
                    if (v > bv) {
                        bv = v;
                        best = c;
                    }
                }
            }
            GEOCOVER_CHECK(best != kNone, "envelope: point outside every cell");
            cells_[best].points.push_back(p);
            const auto [env, arg] = envelope_at(X_[p].x, X_[p].y, cells_[best].owner);
            covered_[p] = Wide(X_[p].z) >= env ? 1 : 0;
        }
    }

    static std::uint64_t edge_key(std::uint32_t a, std::uint32_t b) {
        if (a > b) std::swap(a, b);
        return std::uint64_t(a) << 32 | b;
    }

    long double len2(std::uint32_t a, std::uint32_t b) const {
        const long double dx = verts_[a].x - verts_[b].x, dy = verts_[a].y - verts_[b].y;
        return dx * dx + dy * dy;
    }

    // index k of the longest edge v[k] -> v[k+1]; ties by edge key
    int longest(std::uint32_t c) const {
        const auto& v = cells_[c].v;
        int best = 0;
        for (int k = 1; k < 3; ++k) {
            const auto lk = len2(v[k], v[(k + 1) % 3]), lb = len2(v[best], v[(best + 1) % 3]);
            if (lk > lb || (lk == lb && edge_key(v[k], v[(k + 1) % 3]) < edge_key(v[best], v[(best + 1) % 3])))
                best = k;
        }
        return best;
    }

    void add_edges(std::uint32_t c) {
        const auto& v = cells_[c].v;
        for (int k = 0; k < 3; ++k) edges_[edge_key(v[k], v[(k + 1) % 3])].push_back(c);
    }
    void remove_edges(std::uint32_t c) {
        const auto& v = cells_[c].v;
        for (int k = 0; k < 3; ++k) {
            auto& e = edges_[edge_key(v[k], v[(k + 1) % 3])];
            e.erase(std::find(e.begin(), e.end(), c));
        }
    }
    std::uint32_t across(std::uint32_t c, int k) const {
        const auto& v = cells_[c].v;
        const auto it = edges_.find(edge_key(v[k], v[(k + 1) % 3]));
        for (auto o : it->second)
            if (o != c) return o;
        return kNone;
    }

    bool splittable(std::uint32_t c) const {
        const auto& pts = cells_[c].points;
        if (pts.size() <= cfg_.b) return false;
        const auto& v = cells_[c].v;
        if (len2(v[longest(c)], v[(longest(c) + 1) % 3]) < 1e-6L) return false;
        for (auto p : pts)
            if (X_[p].x != X_[pts[0]].x || X_[p].y != X_[pts[0]].y) return true;
        return false;
    }

    // splits both cells on edge (a, b) at its midpoint
    void bisect(std::uint32_t a, std::uint32_t b, std::deque<std::uint32_t>& work) {
        const auto mid = vertex({3, std::min(a, b), std::max(a, b), 0},
                                {(verts_[a].x + verts_[b].x) / 2, (verts_[a].y + verts_[b].y) / 2});
        const auto owners = edges_[edge_key(a, b)];
        for (auto c : owners) {
            remove_edges(c);
            auto v = cells_[c].v;
            int k = 0;
            while (!(edge_key(v[k], v[(k + 1) % 3]) == edge_key(a, b))) ++k;
            const auto p = v[k], q = v[(k + 1) % 3], r = v[(k + 2) % 3];
            EnvelopeCell second;
            second.owner = cells_[c].owner;
            second.v = {mid, q, r};
            cells_[c].v = {p, mid, r};
            std::vector<std::uint32_t> keep;
            for (auto pt : cells_[c].points) {
                const Vec2 x{(long double)X_[pt].x, (long double)X_[pt].y};
                // same side of (mid, r) as p
                if (cross(verts_[mid], verts_[r], x) * cross(verts_[mid], verts_[r], verts_[p]) >= 0)
                    keep.push_back(pt);
                else
                    second.points.push_back(pt);
            }
            cells_[c].points = std::move(keep);
            const auto nc = std::uint32_t(cells_.size());
            cells_.push_back(std::move(second));
            add_edges(c);
            add_edges(nc);
            work.push_back(c);
            work.push_back(nc);
        }
    }

    void refine() {
        for (std::uint32_t c = 0; c < cells_.size(); ++c) add_edges(c);
        std::deque<std::uint32_t> work;
        for (std::uint32_t c = 0; c < cells_.size(); ++c)
            if (splittable(c)) work.push_back(c);
        while (!work.empty()) {
            const auto c = work.front();
            work.pop_front();
            if (!splittable(c)) continue;
            // longest-edge propagation path to a terminal edge
            auto t = c;
            for (std::size_t guard = 0;; ++guard) {
                GEOCOVER_CHECK(guard <= cells_.size(), "envelope: refinement path does not terminate");
                const int k = longest(t);
                const auto& v = cells_[t].v;
                const auto a = v[k], b = v[(k + 1) % 3];
                const auto n = across(t, k);
                if (n == kNone) {
                    bisect(a, b, work);
                    break;
                }
                const int kn = longest(n);
                const auto& w = cells_[n].v;
                if (edge_key(w[kn], w[(kn + 1) % 3]) == edge_key(a, b)) {
                    bisect(a, b, work);
                    break;
                }
                t = n;
            }
            work.push_back(c);
        }
    }

    void finish_graph() {
        edges_.clear();
        for (std::uint32_t c = 0; c < cells_.size(); ++c) add_edges(c);
        adj_.assign(cells_.size(), {});
        for (const auto& [k, cs] : edges_)
            if (cs.size() == 2) {
                adj_[cs[0]].push_back(cs[1]);
                adj_[cs[1]].push_back(cs[0]);
            }
        for (auto& a : adj_) {
            std::sort(a.begin(), a.end());
            a.erase(std::unique(a.begin(), a.end()), a.end());
        }
        for (std::uint32_t c = 0; c < cells_.size(); ++c) {
            cells_[c].owner = R_[cells_[c].owner];
            std::sort(cells_[c].points.begin(), cells_[c].points.end());
            for (auto p : cells_[c].points) cell_of_[p] = c;
        }
    }

    void build_conflicts() {
        const auto nv = verts_.size();
        std::vector<std::vector<std::uint32_t>> vcells(nv), vnbr(nv);
        for (std::uint32_t c = 0; c < cells_.size(); ++c)
            for (int k = 0; k < 3; ++k) {
                const auto a = cells_[c].v[k], b = cells_[c].v[(k + 1) % 3];
                vcells[a].push_back(c);
                vnbr[a].push_back(b);
                vnbr[b].push_back(a);
            }
        std::vector<std::uint32_t> used;
        std::vector<long double> env(nv, 0);
        for (std::uint32_t v = 0; v < nv; ++v) {
            auto& nb = vnbr[v];
            std::sort(nb.begin(), nb.end());
            nb.erase(std::unique(nb.begin(), nb.end()), nb.end());
            if (vcells[v].empty()) continue;
            used.push_back(v);
            long double m = 1e40L;
            for (auto c : vcells[v]) m = std::min(m, plane_at(S_[cells_[c].owner], verts_[v]));
            env[v] = m;
        }
        std::vector<std::uint32_t> starts;
        const std::size_t K = std::min<std::size_t>(used.size(), 32);
        for (std::size_t k = 0; k < K; ++k) starts.push_back(used[k * used.size() / K]);

        std::vector<std::uint32_t> cstamp(cells_.size(), 0);
        std::uint32_t round = 0;
        for (std::uint32_t s = 0; s < S_.size(); ++s) {
            const auto& h = S_[s];
            auto f = [&](std::uint32_t v) { return plane_at(h, verts_[v]) - env[v]; };
            auto cur = starts[0];
            auto fc = f(cur);
            for (auto v : starts) {
                const auto fv = f(v);
                if (fv < fc) {
                    fc = fv;
                    cur = v;
                }
            }
            for (bool moved = true; moved;) {
                moved = false;
                auto best = cur;
                auto fb = fc;
                for (auto w : vnbr[cur]) {
                    const auto fw = f(w);
                    if (fw < fb) {
                        fb = fw;
                        best = w;
                    }
                }
                if (best != cur && fb < fc - 1e-12L * (1 + std::fabs(fc))) {
                    cur = best;
                    fc = fb;
                    moved = true;
                }
            }
            if (fc >= -0.25L) continue;
            // cells meeting the convex region where h dips below the envelope
            ++round;
            std::vector<std::uint32_t> stack;
            for (auto c : vcells[cur]) {
                cstamp[c] = round;
                stack.push_back(c);
            }
            while (!stack.empty()) {
                const auto c = stack.back();
                stack.pop_back();
                if (crosses(c, h)) cells_[c].conflicts.push_back(s);
                for (auto d : adj_[c]) {
                    if (cstamp[d] == round) continue;
                    cstamp[d] = round;
                    if (dips(d, h, -0.25L)) stack.push_back(d);
                }
            }
        }
        for (auto& c : cells_) std::sort(c.conflicts.begin(), c.conflicts.end());
    }

    bool dips(std::uint32_t cell, const Halfspace3& h, long double below) const {
        const auto& C = cells_[cell];
        const auto& o = S_[C.owner];
        for (auto v : C.v)
            if (plane_at(h, verts_[v]) - plane_at(o, verts_[v]) < below) return true;
        return false;
    }

    std::span<const Point3> X_;
    std::span<const Halfspace3> S_;
    std::vector<std::uint32_t> R_;
    EnvelopeConfig cfg_;
    long double x0_ = 0, x1_ = 0, y0_ = 0, y1_ = 0;
    std::array<Coord, 4> ix_{-1, 1, -1, 1};
    std::unique_ptr<ConvexHull3> hull_;
    std::vector<std::vector<std::uint32_t>> real_nbrs_;
    std::uint32_t first_on_hull_ = 0;
    std::map<Key, std::uint32_t> vid_;
    std::vector<Vec2> verts_;
    std::vector<std::array<Wide, 3>> exact_;
    std::vector<EnvelopeCell> cells_;
    std::unordered_map<std::uint64_t, std::vector<std::uint32_t>> edges_;
    std::vector<std::vector<std::uint32_t>> adj_;
    std::vector<std::uint32_t> cell_of_;
    std::vector<char> covered_;
    std::size_t faces_built_ = 0;
};

}  // namespace geocover::halfspace
