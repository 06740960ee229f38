#pragma once

#include <geocover/containment.hpp>
#include <geocover/geom.hpp>
#include <geocover/rng.hpp>
#include <geocover/static_solver.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace geocover::squares {

/// Closed integer rectangle; empty when x0 > x1 or y0 > y1.
struct Rect {
    Coord x0, x1, y0, y1;
    bool empty() const noexcept { return x0 > x1 || y0 > y1; }
    bool contains(const Point2& p) const noexcept { return x0 <= p.x && p.x <= x1 && y0 <= p.y && p.y <= y1; }
    bool intersects(const Square& s) const noexcept {
        return !empty() && s.x0() <= x1 && s.x1() >= x0 && s.y0() <= y1 && s.y1() >= y0;
    }
    bool has_corner_of(const Square& s) const noexcept {
        for (Coord x : {s.x0(), s.x1()})
            for (Coord y : {s.y0(), s.y1()})
                if (contains({x, y})) return true;
        return false;
    }
};

using IdSquare = std::pair<std::uint32_t, Square>;

/// Long squares of a rectangle meet it without a corner inside, so each one
/// spans its full width (a y-band) or full height (an x-band). Returns one
/// container if there is one, else the bands not nested in another band of
/// the same family; ties go to the smallest id.
inline std::vector<std::uint32_t> maximal_long_squares(const Rect& r, const std::vector<IdSquare>& cands) {
    std::optional<std::uint32_t> container;
    struct Band {
        Coord lo, hi;
        std::uint32_t id;
    };
    std::vector<Band> hbands, vbands;
    for (const auto& [id, s] : cands) {
        if (!r.intersects(s) || r.has_corner_of(s)) continue;
        const bool full_w = s.x0() <= r.x0 && s.x1() >= r.x1;
        const bool full_h = s.y0() <= r.y0 && s.y1() >= r.y1;
        if (full_w && full_h) {
            if (!container || id < *container) container = id;
        } else if (full_w) {
            hbands.push_back({std::max(s.y0(), r.y0), std::min(s.y1(), r.y1), id});
        } else if (full_h) {
            vbands.push_back({std::max(s.x0(), r.x0), std::min(s.x1(), r.x1), id});
        }
    }
    if (container) return {*container};
    std::vector<std::uint32_t> out;
    for (auto* fam : {&hbands, &vbands}) {
        // by lo ascending, then hi descending, then id: the first of each lo wins
        std::sort(fam->begin(), fam->end(), [](const Band& a, const Band& b) {
            if (a.lo != b.lo) return a.lo < b.lo;
            if (a.hi != b.hi) return a.hi > b.hi;
            return a.id < b.id;
        });
        Coord reach = kNegInf;
        for (const auto& b : *fam) {
            if (b.hi <= reach) continue;
            out.push_back(b.id);
            reach = b.hi;
        }
    }
    std::sort(out.begin(), out.end());
    return out;
}

/// Per-leaf store of approximate covers for canonical rectangles of an
/// a-ary 2D range tree over the leaf's points. Covers are computed on first
/// use and kept until the cache is dropped.
class CanonicalCache {
public:
    struct Answer {
        std::vector<std::uint32_t> cover;
        std::optional<std::uint32_t> uncovered;  // point id no short square contains
        std::size_t canonical_rects = 0;
    };
    using Range = std::pair<std::uint32_t, std::uint32_t>;  // [lo, hi) in a sorted order
    using Key = std::array<std::uint32_t, 4>;

    CanonicalCache(std::vector<std::pair<std::uint32_t, Point2>> points, std::vector<IdSquare> shorts,
                   std::uint32_t a, std::uint64_t seed)
        : pts_(std::move(points)), shorts_(std::move(shorts)), a_(std::max<std::uint32_t>(a, 2)), seed_(seed) {
        std::sort(pts_.begin(), pts_.end(), [](const auto& p, const auto& q) {
            return std::tie(p.second.x, p.second.y, p.first) < std::tie(q.second.x, q.second.y, q.first);
        });
    }

    std::size_t size() const noexcept { return pts_.size(); }
    std::uint32_t branching() const noexcept { return a_; }
    std::size_t cached() const noexcept { return covers_.size(); }

    /// Canonical rectangles whose union is the set of points in r.
    std::vector<Key> decompose(const Rect& r) {
        std::vector<Key> out;
        if (r.empty() || pts_.empty()) return out;
        auto lo = std::lower_bound(pts_.begin(), pts_.end(), r.x0, [](const auto& e, Coord x) { return e.second.x < x; });
        auto hi = std::upper_bound(pts_.begin(), pts_.end(), r.x1, [](Coord x, const auto& e) { return x < e.second.x; });
        std::vector<Range> prim;
        split(0, std::uint32_t(pts_.size()), std::uint32_t(lo - pts_.begin()), std::uint32_t(hi - pts_.begin()), prim);
        for (const auto& P : prim) {
            const auto& ys = secondary(P);
            auto ylo = std::lower_bound(ys.begin(), ys.end(), r.y0, [&](std::uint32_t i, Coord y) { return pts_[i].second.y < y; });
            auto yhi = std::upper_bound(ys.begin(), ys.end(), r.y1, [&](Coord y, std::uint32_t i) { return y < pts_[i].second.y; });
            std::vector<Range> sec;
            split(0, std::uint32_t(ys.size()), std::uint32_t(ylo - ys.begin()), std::uint32_t(yhi - ys.begin()), sec);
            for (const auto& S : sec) out.push_back({P.first, P.second, S.first, S.second});
        }
        return out;
    }

    Answer query(const Rect& r) {
        Answer ans;
        const auto keys = decompose(r);
        ans.canonical_rects = keys.size();
        for (const auto& k : keys) {
            const auto& c = cover_of(k);
            if (c.uncovered) {
                ans.uncovered = c.uncovered;
                return ans;
            }
            ans.cover.insert(ans.cover.end(), c.cover.begin(), c.cover.end());
        }
        std::sort(ans.cover.begin(), ans.cover.end());
        ans.cover.erase(std::unique(ans.cover.begin(), ans.cover.end()), ans.cover.end());
        return ans;
    }

    /// Computes every canonical cover; returns how many there are.
    std::size_t materialize_all() {
        std::vector<Range> prim;
        all_sets(0, std::uint32_t(pts_.size()), prim);
        std::size_t n = 0;
        for (const auto& P : prim) {
            std::vector<Range> sec;
            all_sets(0, P.second - P.first, sec);
            for (const auto& S : sec) {
                cover_of({P.first, P.second, S.first, S.second});
                ++n;
            }
        }
        return n;
    }

    /// Point ids of a canonical rectangle.
    std::vector<std::uint32_t> points_of(const Key& k) {
        const auto& ys = secondary({k[0], k[1]});
        std::vector<std::uint32_t> out;
        for (auto i = k[2]; i < k[3]; ++i) out.push_back(pts_[ys[i]].first);
        return out;
    }

    struct Stored {
        std::vector<std::uint32_t> cover;
        std::optional<std::uint32_t> uncovered;
    };
    const Stored& cover_of(const Key& k) {
        auto it = covers_.find(k);
        if (it != covers_.end()) return it->second;
        return covers_.emplace(k, compute(k)).first->second;
    }

private:
    // children of node [lo, hi): min(a, hi - lo) nearly equal parts
    std::vector<std::uint32_t> bounds(std::uint32_t lo, std::uint32_t hi) const {
        const std::uint32_t c = std::min<std::uint32_t>(a_, hi - lo);
        std::vector<std::uint32_t> b(c + 1);
        for (std::uint32_t i = 0; i <= c; ++i) b[i] = lo + std::uint32_t(std::uint64_t(hi - lo) * i / c);
        return b;
    }

    void split(std::uint32_t lo, std::uint32_t hi, std::uint32_t ql, std::uint32_t qh, std::vector<Range>& out) const {
        if (qh <= lo || hi <= ql || ql >= qh) return;
        if (ql <= lo && hi <= qh) {
            out.push_back({lo, hi});
            return;
        }
        const auto b = bounds(lo, hi);
        std::uint32_t run_lo = 0, run_n = 0;
        for (std::size_t i = 0; i + 1 < b.size(); ++i) {
            const bool full = ql <= b[i] && b[i + 1] <= qh;
            if (full) {
                if (!run_n) run_lo = b[i];
                ++run_n;
                continue;
            }
            if (run_n) out.push_back({run_lo, b[i]});
            run_n = 0;
            split(b[i], b[i + 1], ql, qh, out);
        }
        if (run_n) out.push_back({run_lo, b.back()});
    }

    void all_sets(std::uint32_t lo, std::uint32_t hi, std::vector<Range>& out) const {
        if (lo >= hi) return;
        out.push_back({lo, hi});
        if (hi - lo == 1) return;
        const auto b = bounds(lo, hi);
        const auto c = b.size() - 1;
        for (std::size_t i = 0; i < c; ++i)
            for (std::size_t j = i + 2; j <= c; ++j)
                if (j - i < c) out.push_back({b[i], b[j]});
        for (std::size_t i = 0; i < c; ++i) all_sets(b[i], b[i + 1], out);
    }

    const std::vector<std::uint32_t>& secondary(const Range& P) {
        auto it = ys_.find(P);
        if (it != ys_.end()) return it->second;
        std::vector<std::uint32_t> v;
        for (auto i = P.first; i < P.second; ++i) v.push_back(i);
        std::sort(v.begin(), v.end(), [&](std::uint32_t i, std::uint32_t j) {
            return std::tie(pts_[i].second.y, pts_[i].second.x, pts_[i].first) <
                   std::tie(pts_[j].second.y, pts_[j].second.x, pts_[j].first);
        });
        return ys_.emplace(P, std::move(v)).first->second;
    }

    Stored compute(const Key& k) {
        const auto& ys = secondary({k[0], k[1]});
        std::vector<Point2> P;
        std::vector<std::uint32_t> pid;
        Rect box{kPosInf, kNegInf, kPosInf, kNegInf};
        for (auto i = k[2]; i < k[3]; ++i) {
            const auto& [id, p] = pts_[ys[i]];
            P.push_back(p);
            pid.push_back(id);
            box = {std::min(box.x0, p.x), std::max(box.x1, p.x), std::min(box.y0, p.y), std::max(box.y1, p.y)};
        }
        std::vector<IdSquare> longs;
        std::vector<Square> cand;
        std::vector<std::uint32_t> cid;
        for (const auto& e : shorts_) {
            if (!box.intersects(e.second)) continue;
            if (box.has_corner_of(e.second)) {
                cand.push_back(e.second);
                cid.push_back(e.first);
            } else {
                longs.push_back(e);
            }
        }
        for (auto id : maximal_long_squares(box, longs))
            for (const auto& e : longs)
                if (e.first == id) {
                    cand.push_back(e.second);
                    cid.push_back(id);
                    break;
                }
        Stored st;
        const auto lists = brute_containment(std::span<const Point2>(P), std::span<const Square>(cand));
        for (std::uint32_t i = 0; i < P.size(); ++i)
            if (lists.containing[i].empty()) {
                st.uncovered = pid[i];
                return st;
            }
        StaticConfig cfg;
        cfg.seed = mix_seed(seed_, (std::uint64_t(k[0]) << 32 | k[1]) ^ (std::uint64_t(k[2]) << 40 | k[3]));
        const auto out = static_mwu_cover(lists, cfg);
        GEOCOVER_CHECK(out.is_cover(), "canonical cover: static solver failed on a feasible set");
        for (auto o : out.cover) st.cover.push_back(cid[o]);
        std::sort(st.cover.begin(), st.cover.end());
        return st;
    }

    std::vector<std::pair<std::uint32_t, Point2>> pts_;  // x-sorted
    std::vector<IdSquare> shorts_;
    std::uint32_t a_;
    std::uint64_t seed_;
    std::map<Range, std::vector<std::uint32_t>> ys_;
    std::map<Key, Stored> covers_;
};

}  // namespace geocover::squares
