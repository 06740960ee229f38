#pragma once

#include <geocover/error.hpp>
#include <geocover/geom.hpp>
#include <geocover/range_tree.hpp>

#include <algorithm>
#include <cstdint>
#include <map>
#include <optional>
#include <utility>
#include <vector>

namespace geocover::squares {

/// Integer-lattice rectangle [x0, x1] x [y0, y1] of constant depth.
/// kNegInf / kPosInf mark unbounded sides.
struct LevelCell {
    Coord x0, x1, y0, y1;
    std::uint64_t depth;

    Point2 representative() const noexcept {
        auto pick = [](Coord lo, Coord hi) { return lo != kNegInf ? lo : (hi != kPosInf ? hi : 0); };
        return {pick(x0, x1), pick(y0, y1)};
    }
    RangeTree2D::Box box() const { return rect_box(x0, x1, y0, y1); }
};

struct LevelStructure {
    std::uint64_t b = 0;
    std::uint64_t version = 0;  // sample version it was built for
    std::vector<LevelCell> cells;
};

/// (<= b)-level of a square multiset by a left-to-right sweep. The y-profile
/// of the current slab is a piecewise constant map; a cell is a maximal run
/// of one profile interval over consecutive slabs.
inline LevelStructure build_level(const std::vector<std::pair<Square, std::uint64_t>>& R, std::uint64_t b,
                                  std::uint64_t version = 0) {
    LevelStructure L;
    L.b = b;
    L.version = version;

    struct Event {
        Coord x;
        Coord y0, y1;
        std::int64_t k;
    };
    std::vector<Event> ev;
    ev.reserve(2 * R.size());
    for (const auto& [s, k] : R) {
        if (k == 0) continue;
        ev.push_back({s.x0(), s.y0(), s.y1(), std::int64_t(k)});
        ev.push_back({s.x1() + 1, s.y0(), s.y1(), -std::int64_t(k)});
    }
    std::sort(ev.begin(), ev.end(), [](const Event& a, const Event& c) { return a.x < c.x; });

    std::map<Coord, std::int64_t> prof{{kNegInf, 0}};
    struct Run {
        Coord end;
        std::int64_t depth;
        Coord x_start;
    };
    std::map<Coord, Run> runs;
    auto end_of = [&](std::map<Coord, std::int64_t>::const_iterator it) {
        auto nx = std::next(it);
        return nx == prof.end() ? kPosInf : nx->first - 1;
    };
    auto split = [&](Coord y) {
        auto it = std::prev(prof.upper_bound(y));
        if (it->first != y) prof.emplace(y, it->second);
    };
    auto merge_at = [&](Coord y) {
        auto it = prof.find(y);
        if (it == prof.end() || it == prof.begin()) return;
        if (std::prev(it)->second == it->second) prof.erase(it);
    };
    auto close = [&](std::map<Coord, Run>::iterator it, Coord x_end) {
        L.cells.push_back({it->second.x_start, x_end, it->first, it->second.end, std::uint64_t(it->second.depth)});
        return runs.erase(it);
    };
    runs.emplace(kNegInf, Run{kPosInf, 0, kNegInf});

    for (std::size_t i = 0; i < ev.size();) {
        const Coord x = ev[i].x;
        std::size_t j = i;
        for (; j < ev.size() && ev[j].x == x; ++j) {
            const auto& e = ev[j];
            split(e.y0);
            if (e.y1 < kPosInf) split(e.y1 + 1);
            for (auto it = prof.find(e.y0); it != prof.end() && it->first <= e.y1; ++it) it->second += e.k;
        }
        for (std::size_t q = i; q < j; ++q) {
            merge_at(ev[q].y0);
            merge_at(ev[q].y1 + 1);
        }
        for (std::size_t q = i; q < j; ++q) {
            const Coord lo = ev[q].y0 - 1, hi = ev[q].y1 + 1;
            auto it = runs.upper_bound(lo);
            if (it != runs.begin()) --it;
            while (it != runs.end() && it->first <= hi) {
                if (it->second.end < lo) {
                    ++it;
                    continue;
                }
                auto p = prof.find(it->first);
                if (p != prof.end() && p->second == it->second.depth && end_of(p) == it->second.end) {
                    ++it;
                    continue;
                }
                it = close(it, x - 1);
            }
            auto p = std::prev(prof.upper_bound(lo));
            for (; p != prof.end() && p->first <= hi; ++p) {
                if (p->second > std::int64_t(b) || runs.count(p->first)) continue;
                runs.emplace(p->first, Run{end_of(p), p->second, x});
            }
        }
        i = j;
    }
    for (auto it = runs.begin(); it != runs.end();) it = close(it, kPosInf);
    return L;
}

/// A point of X lying in some cell of the level, i.e. of depth <= b.
inline std::optional<std::uint32_t> find_light_point(const LevelStructure& level, const RangeTree2D& X,
                                                     std::uint64_t current_version) {
    if (level.version != current_version) throw LookupError("level structure is stale");
    for (const auto& c : level.cells)
        if (auto id = X.rect_witness(c.box())) return id;
    return std::nullopt;
}

}  // namespace geocover::squares
