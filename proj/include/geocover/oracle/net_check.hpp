#pragma once

#include <geocover/geom.hpp>
#include <geocover/rng.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <span>
#include <string>
#include <tuple>
#include <vector>

namespace geocover::oracle {

struct NetCheckResult {
    bool ok = true;
    std::string witness;  // human-readable deep uncovered point
    std::size_t certificate_points = 0;
};

inline std::size_t net_threshold(double eps, std::size_t r_size) {
    // depth >= eps|R|, as an integer threshold
    return std::size_t(std::ceil(eps * double(r_size) - 1e-9));
}

/// T is an eps-net of the square multiset R: every point of depth >= eps|R|
/// in R lies in some square of T. Checked on every face of the arrangement
/// of R and T (compressed grid in doubled coordinates: edges and the gaps
/// between them) plus the extra points X.
inline NetCheckResult brute_net_check(std::span<const Square> T, std::span<const Square> R, double eps,
                                      std::span<const Point2> X = {}) {
    NetCheckResult res;
    const std::size_t thr = std::max<std::size_t>(1, net_threshold(eps, R.size()));
    if (R.empty()) return res;
    std::vector<Coord> xs, ys;
    auto add_edges = [&](const Square& s) {
        xs.push_back(2 * s.x0());
        xs.push_back(2 * s.x1());
        ys.push_back(2 * s.y0());
        ys.push_back(2 * s.y1());
    };
    for (const auto& s : R) add_edges(s);
    for (const auto& s : T) add_edges(s);
    auto refine = [](std::vector<Coord>& v) {
        std::sort(v.begin(), v.end());
        v.erase(std::unique(v.begin(), v.end()), v.end());
        std::vector<Coord> out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.push_back(v[i]);
            if (i + 1 < v.size()) out.push_back((v[i] + v[i + 1]) / 2);
        }
        return out;
    };
    xs = refine(xs);
    ys = refine(ys);
    const std::size_t gx = xs.size(), gy = ys.size();
    auto ix = [&](Coord v) { return std::size_t(std::lower_bound(xs.begin(), xs.end(), v) - xs.begin()); };
    auto iy = [&](Coord v) { return std::size_t(std::lower_bound(ys.begin(), ys.end(), v) - ys.begin()); };

    // 2D difference arrays over grid indices; squares are closed index ranges.
    auto accumulate = [&](std::span<const Square> set) {
        std::vector<std::int64_t> a((gx + 1) * (gy + 1), 0);
        auto at = [&](std::size_t i, std::size_t j) -> std::int64_t& { return a[i * (gy + 1) + j]; };
        for (const auto& s : set) {
            const auto i0 = ix(2 * s.x0()), i1 = ix(2 * s.x1()) + 1;
            const auto j0 = iy(2 * s.y0()), j1 = iy(2 * s.y1()) + 1;
            at(i0, j0) += 1;
            at(i1, j0) -= 1;
            at(i0, j1) -= 1;
            at(i1, j1) += 1;
        }
        for (std::size_t i = 0; i <= gx; ++i)
            for (std::size_t j = 0; j <= gy; ++j) {
                if (i) at(i, j) += at(i - 1, j);
                if (j) at(i, j) += at(i, j - 1);
                if (i && j) at(i, j) -= at(i - 1, j - 1);
            }
        return a;
    };
    const auto depth_r = accumulate(R);
    const auto cover_t = accumulate(T);
    res.certificate_points = gx * gy + X.size();
    for (std::size_t i = 0; i < gx; ++i)
        for (std::size_t j = 0; j < gy; ++j) {
            const auto k = i * (gy + 1) + j;
            if (std::size_t(depth_r[k]) >= thr && cover_t[k] == 0) {
                res.ok = false;
                res.witness = "(" + std::to_string(xs[i]) + "/2, " + std::to_string(ys[j]) + "/2) depth " +
                              std::to_string(depth_r[k]);
                return res;
            }
        }
    for (const auto& p : X) {
        if (depth(p, R) >= thr && depth(p, T) == 0) {
            res.ok = false;
            res.witness = "X point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")";
            return res;
        }
    }
    return res;
}

namespace net_detail {

// Intersection of three non-vertical planes z = a x + b y + c as (xn, yn, zn) / den.
struct RationalPoint {
    Wide xn = 0, yn = 0, zn = 0, den = 0;
};

inline bool vertex(const Halfspace3& p, const Halfspace3& q, const Halfspace3& r, RationalPoint& out) {
    const Wide a1 = Wide(p.a) - q.a, b1 = Wide(p.b) - q.b, c1 = Wide(q.c) - p.c;
    const Wide a2 = Wide(p.a) - r.a, b2 = Wide(p.b) - r.b, c2 = Wide(r.c) - p.c;
    const Wide det = a1 * b2 - b1 * a2;
    if (det == 0) return false;
    out.xn = c1 * b2 - b1 * c2;
    out.yn = a1 * c2 - c1 * a2;
    out.den = det;
    out.zn = Wide(p.a) * out.xn + Wide(p.b) * out.yn + Wide(p.c) * det;
    if (out.den < 0) out.xn = -out.xn, out.yn = -out.yn, out.zn = -out.zn, out.den = -out.den;
    return true;
}

// sign of (z - a x - b y - c) at the vertex, scaled by den > 0
inline int side(const Halfspace3& h, const RationalPoint& v) {
    const Wide s = v.zn - Wide(h.a) * v.xn - Wide(h.b) * v.yn - Wide(h.c) * v.den;
    return (s > 0) - (s < 0);
}

}  // namespace net_detail

/// Halfspace version: certificate = all plane-triple vertices of R and T,
/// each probed at the vertex and infinitesimally below and above it, plus X.
/// Above `triple_cap` triples a seeded random subset of triples is probed
/// (sound but incomplete).
inline NetCheckResult brute_net_check(std::span<const Halfspace3> T, std::span<const Halfspace3> R, double eps,
                                      std::span<const Point3> X = {}, std::size_t triple_cap = 100'000,
                                      std::uint64_t seed = 1) {
    NetCheckResult res;
    const std::size_t thr = std::max<std::size_t>(1, net_threshold(eps, R.size()));
    if (R.empty()) return res;
    for (const auto& p : X) {
        if (depth(p, R) >= thr && depth(p, T) == 0) {
            res.ok = false;
            res.witness = "X point (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ", " +
                          std::to_string(p.z) + ")";
            return res;
        }
    }
    std::vector<Halfspace3> planes(R.begin(), R.end());
    planes.insert(planes.end(), T.begin(), T.end());
    std::sort(planes.begin(), planes.end(), [](const auto& u, const auto& v) {
        return std::tie(u.a, u.b, u.c) < std::tie(v.a, v.b, v.c);
    });
    planes.erase(std::unique(planes.begin(), planes.end()), planes.end());
    const std::size_t k = planes.size();
    const double total = double(k) * double(k - 1) * double(k - 2) / 6.0;

    auto probe = [&](const net_detail::RationalPoint& v) {
        // offsets: 0 at the vertex, -1 just below, +1 just above
        for (int off = -1; off <= 1; ++off) {
            std::size_t d = 0;
            bool covered = false;
            auto inside = [&](const Halfspace3& h) {
                const int s = net_detail::side(h, v);
                return off == 0 ? s >= 0 : (s > 0 || (s == 0 && off > 0));
            };
            for (const auto& h : R) d += inside(h) ? 1 : 0;
            if (d < thr) continue;
            for (const auto& h : T)
                if (inside(h)) {
                    covered = true;
                    break;
                }
            if (!covered) return off;
        }
        return 2;
    };
    auto fail = [&](const net_detail::RationalPoint& v, int off) {
        res.ok = false;
        res.witness = "vertex (" + to_string(Weight(v.xn < 0 ? -v.xn : v.xn)) + "...)/" +
                      to_string(Weight(v.den)) + " offset " + std::to_string(off);
    };
    net_detail::RationalPoint v;
    if (k >= 3 && total <= double(triple_cap)) {
        for (std::size_t i = 0; i < k; ++i)
            for (std::size_t j = i + 1; j < k; ++j)
                for (std::size_t l = j + 1; l < k; ++l) {
                    if (!net_detail::vertex(planes[i], planes[j], planes[l], v)) continue;
                    ++res.certificate_points;
                    if (int off = probe(v); off != 2) {
                        fail(v, off);
                        return res;
                    }
                }
    } else if (k >= 3) {
        Rng rng(seed);
        for (std::size_t it = 0; it < triple_cap; ++it) {
            auto i = uniform_below(rng, k), j = uniform_below(rng, k), l = uniform_below(rng, k);
            if (i == j || j == l || i == l || !net_detail::vertex(planes[i], planes[j], planes[l], v)) continue;
            ++res.certificate_points;
            if (int off = probe(v); off != 2) {
                fail(v, off);
                return res;
            }
        }
    }
    res.certificate_points += X.size();
    return res;
}

inline NetCheckResult brute_net_check(std::span<const Disk> T, std::span<const Disk> R, double eps,
                                      std::span<const Point2> X = {}) {
    std::vector<Halfspace3> t, r;
    std::vector<Point3> x;
    for (const auto& d : T) t.push_back(lift_disk(d));
    for (const auto& d : R) r.push_back(lift_disk(d));
    for (const auto& p : X) x.push_back(lift_point(p));
    return brute_net_check(std::span<const Halfspace3>(t), std::span<const Halfspace3>(r), eps,
                           std::span<const Point3>(x));
}

}  // namespace geocover::oracle
