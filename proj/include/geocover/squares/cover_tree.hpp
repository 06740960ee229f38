#pragma once

#include <geocover/error.hpp>
#include <geocover/geom.hpp>
#include <geocover/range_tree.hpp>
#include <geocover/rng.hpp>
#include <geocover/squares/canonical_cache.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <unordered_map>
#include <vector>

namespace geocover::squares {

struct CoverTreeConfig {
    std::uint64_t b_leaf = 64;
    double delta = 1.0 / 8.0;
    std::uint64_t seed = 1;
};

/// b_leaf = n^(2/3) rounded to a power of two (at least 4).
inline std::uint64_t default_b_leaf(std::uint64_t n) {
    const double target = std::pow(double(std::max<std::uint64_t>(n, 1)), 2.0 / 3.0);
    std::uint64_t b = 4;
    while (double(b) * 1.5 < target) b *= 2;
    return b;
}

struct LargeOptOutcome {
    bool feasible = true;
    std::vector<std::uint32_t> cover;
    std::optional<std::uint32_t> witness;
    std::size_t leaves_used = 0;
    std::size_t canonical_rects = 0;
};

/// Compressed quadtree over the frame [-2^30, 2^30)^2. A cell's size counts
/// the points of X and the square corners inside it; a cell of size > b_leaf
/// is split into its four quadrants, or shrunk to the smallest quadtree
/// square holding its content when that is strictly smaller. The shape is a
/// function of the current content only.
class CoverTree {
public:
    static constexpr std::uint32_t kFrameLog = 31;
    static constexpr Coord kFrameLo = -(Coord{1} << 30);

    explicit CoverTree(CoverTreeConfig cfg = {}) : cfg_(cfg) {
        GEOCOVER_REQUIRE(cfg_.b_leaf >= 1, "cover tree: b_leaf must be positive");
        a_ = std::max<std::uint32_t>(2, std::uint32_t(std::lround(std::pow(double(cfg_.b_leaf), cfg_.delta))));
        root_ = new_node(kFrameLo, kFrameLo, kFrameLog, kNone);
        make_leaf(root_);
    }

    static CoverTree build(const std::vector<std::pair<std::uint32_t, Point2>>& points,
                           const std::vector<IdSquare>& squares, CoverTreeConfig cfg) {
        CoverTree t(cfg);
        std::vector<Elem> elems;
        for (const auto& [id, p] : points) {
            validate(p);
            GEOCOVER_REQUIRE(t.points_.emplace(id, p).second, "cover tree: duplicate point id " + std::to_string(id));
            elems.push_back({p.x, p.y, id, kPointTag});
        }
        for (const auto& [id, s] : squares) {
            validate(s);
            GEOCOVER_REQUIRE(t.squares_.emplace(id, s).second, "cover tree: duplicate square id " + std::to_string(id));
            t.S4_.insert(id, lift_square(s));
            for (std::uint8_t c = 0; c < 4; ++c) {
                const auto v = corner(s, c);
                elems.push_back({v.x, v.y, id, c});
            }
        }
        t.rebuild(t.root_, std::move(elems));
        return t;
    }

    static CoverTree build(const SquaresInstance& inst, CoverTreeConfig cfg) {
        std::vector<std::pair<std::uint32_t, Point2>> pts;
        std::vector<IdSquare> sqs;
        for (std::uint32_t i = 0; i < inst.points.size(); ++i) pts.emplace_back(i, inst.points[i]);
        for (std::uint32_t i = 0; i < inst.objects.size(); ++i) sqs.emplace_back(i, inst.objects[i]);
        return build(pts, sqs, cfg);
    }

    const CoverTreeConfig& config() const noexcept { return cfg_; }
    std::uint32_t branching() const noexcept { return a_; }
    std::size_t n_points() const noexcept { return points_.size(); }
    std::size_t n_squares() const noexcept { return squares_.size(); }

    void insert_point(std::uint32_t id, const Point2& p) {
        validate(p);
        GEOCOVER_REQUIRE(!points_.count(id), "cover tree: duplicate point id " + std::to_string(id));
        points_.emplace(id, p);
        add_elem({p.x, p.y, id, kPointTag});
    }
    void erase_point(std::uint32_t id) {
        auto it = points_.find(id);
        if (it == points_.end()) throw LookupError("cover tree: unknown point id " + std::to_string(id));
        const auto p = it->second;
        points_.erase(it);
        remove_elem({p.x, p.y, id, kPointTag});
    }
    void insert_square(std::uint32_t id, const Square& s) {
        validate(s);
        GEOCOVER_REQUIRE(!squares_.count(id), "cover tree: duplicate square id " + std::to_string(id));
        squares_.emplace(id, s);
        S4_.insert(id, lift_square(s));
        for (std::uint8_t c = 0; c < 4; ++c) {
            const auto v = corner(s, c);
            add_elem({v.x, v.y, id, c});
        }
        visit_leaves(root_, s, [&](std::uint32_t v) { add_long(v, id, s); });
    }
    void erase_square(std::uint32_t id) {
        auto it = squares_.find(id);
        if (it == squares_.end()) throw LookupError("cover tree: unknown square id " + std::to_string(id));
        const auto s = it->second;
        squares_.erase(it);
        S4_.erase(id);
        visit_leaves(root_, s, [&](std::uint32_t v) { drop_long(v, id, s); });
        for (std::uint8_t c = 0; c < 4; ++c) {
            const auto v = corner(s, c);
            remove_elem({v.x, v.y, id, c});
        }
    }

    LargeOptOutcome solve() {
        LargeOptOutcome out;
        for (auto v : leaves()) {
            auto& L = *nodes_[v].leaf;
            if (L.points.empty()) continue;
            ++out.leaves_used;
            const auto region = region_of(v);
            const auto ml = maximal_long(v);
            Rect r = region;
            if (ml.container) {
                out.cover.push_back(*ml.container);
                continue;
            }
            if (ml.left) r.x0 = std::max(r.x0, squares_.at(*ml.left).x1() + 1);
            if (ml.right) r.x1 = std::min(r.x1, squares_.at(*ml.right).x0() - 1);
            if (ml.bottom) r.y0 = std::max(r.y0, squares_.at(*ml.bottom).y1() + 1);
            if (ml.top) r.y1 = std::min(r.y1, squares_.at(*ml.top).y0() - 1);
            for (auto o : {ml.left, ml.right, ml.bottom, ml.top}) {
                if (!o) continue;
                const auto& s = squares_.at(*o);
                for (auto p : L.points)
                    if (contains(s, points_.at(p))) {
                        out.cover.push_back(*o);
                        break;
                    }
            }
            const auto ans = cache(v).query(r);
            out.canonical_rects += ans.canonical_rects;
            if (ans.uncovered) {
                out.feasible = false;
                out.witness = ans.uncovered;
                out.cover.clear();
                return out;
            }
            out.cover.insert(out.cover.end(), ans.cover.begin(), ans.cover.end());
        }
        std::sort(out.cover.begin(), out.cover.end());
        out.cover.erase(std::unique(out.cover.begin(), out.cover.end()), out.cover.end());
        return out;
    }

    // ------------------------------------------------------------ inspection

    struct MaximalLong {
        std::optional<std::uint32_t> container, left, right, bottom, top;
        std::vector<std::uint32_t> ids() const {
            std::vector<std::uint32_t> out;
            for (auto o : {container, left, right, bottom, top})
                if (o) out.push_back(*o);
            std::sort(out.begin(), out.end());
            out.erase(std::unique(out.begin(), out.end()), out.end());
            return out;
        }
    };

    struct LeafView {
        Rect region;
        std::uint32_t log_width;
        std::size_t size;
        std::vector<std::uint32_t> points;
        std::vector<std::uint32_t> shorts;
        MaximalLong maximal;
    };

    std::vector<LeafView> leaf_views() const {
        std::vector<LeafView> out;
        for (auto v : leaves()) {
            const auto& L = *nodes_[v].leaf;
            LeafView lv{region_of(v), nodes_[v].k, L.size(), L.points, {}, maximal_long(v)};
            for (const auto& [id, c] : L.short_count) lv.shorts.push_back(id);
            std::sort(lv.points.begin(), lv.points.end());
            out.push_back(std::move(lv));
        }
        return out;
    }

    std::size_t leaf_count() const { return leaves().size(); }
    std::size_t nonempty_leaf_count() const {
        std::size_t c = 0;
        for (auto v : leaves()) c += nodes_[v].size > 0;
        return c;
    }
    std::uint32_t depth() const { return depth_of(root_); }
    std::size_t rebuilds() const noexcept { return rebuilds_; }
    std::size_t rebuilt_elements() const noexcept { return rebuilt_elems_; }

    /// Canonical cache of the leaf containing p (built if needed).
    CanonicalCache& leaf_cache_at(const Point2& p) {
        auto v = root_;
        while (nodes_[v].kind != Kind::leaf) {
            const auto c = child_for(v, p.x, p.y);
            GEOCOVER_REQUIRE(c != kNone, "cover tree: point lies in an empty shrink margin");
            v = c;
        }
        return cache(v);
    }

private:
    static constexpr std::uint32_t kNone = ~std::uint32_t{0};
    static constexpr std::uint8_t kPointTag = 255;

    enum class Kind : std::uint8_t { leaf, split, shrink };

    struct Elem {
        Coord x, y;
        std::uint32_t id;
        std::uint8_t tag;  // corner index, or kPointTag
        bool operator==(const Elem&) const = default;
    };

    struct Leaf {
        std::vector<std::uint32_t> points;
        std::vector<Elem> vertices;
        std::map<std::uint32_t, std::uint32_t> short_count;  // square id -> corners inside
        std::set<std::pair<Coord, std::uint32_t>> left, right, bottom, top;  // keys: -x1, x0, -y1, y0
        std::set<std::uint32_t> containers;
        std::unique_ptr<CanonicalCache> cache;
        std::size_t size() const noexcept { return points.size() + vertices.size(); }
    };

    struct Node {
        Coord x0, y0;
        std::uint32_t k;  // width 2^k
        std::uint32_t parent;
        Kind kind = Kind::leaf;
        std::uint32_t child[4] = {kNone, kNone, kNone, kNone};
        std::uint64_t size = 0;
        std::unique_ptr<Leaf> leaf;
    };

    static Point2 corner(const Square& s, std::uint8_t c) {
        return {(c & 1) ? s.x1() : s.x0(), (c & 2) ? s.y1() : s.y0()};
    }

    Rect region_of(std::uint32_t v) const {
        const auto& n = nodes_[v];
        const Coord w = Coord{1} << n.k;
        return {n.x0, n.x0 + w - 1, n.y0, n.y0 + w - 1};
    }
    bool inside(std::uint32_t v, Coord x, Coord y) const { return region_of(v).contains({x, y}); }

    std::uint32_t new_node(Coord x0, Coord y0, std::uint32_t k, std::uint32_t parent) {
        std::uint32_t v;
        if (!free_.empty()) {
            v = free_.back();
            free_.pop_back();
            nodes_[v] = Node{};
        } else {
            v = std::uint32_t(nodes_.size());
            nodes_.emplace_back();
        }
        auto& n = nodes_[v];
        n.x0 = x0;
        n.y0 = y0;
        n.k = k;
        n.parent = parent;
        return v;
    }

    void make_leaf(std::uint32_t v) {
        nodes_[v].kind = Kind::leaf;
        nodes_[v].leaf = std::make_unique<Leaf>();
    }

    std::uint32_t child_for(std::uint32_t v, Coord x, Coord y) const {
        const auto& n = nodes_[v];
        if (n.kind == Kind::shrink) return inside(n.child[0], x, y) ? n.child[0] : kNone;
        const Coord half = Coord{1} << (n.k - 1);
        const int q = (x >= n.x0 + half ? 1 : 0) | (y >= n.y0 + half ? 2 : 0);
        return n.child[q];
    }

    std::vector<std::uint32_t> leaves() const {
        std::vector<std::uint32_t> out, stack{root_};
        while (!stack.empty()) {
            const auto v = stack.back();
            stack.pop_back();
            const auto& n = nodes_[v];
            if (n.kind == Kind::leaf) {
                out.push_back(v);
                continue;
            }
            for (int i = 3; i >= 0; --i)
                if (n.child[i] != kNone) stack.push_back(n.child[i]);
        }
        return out;
    }

    std::uint32_t depth_of(std::uint32_t v) const {
        const auto& n = nodes_[v];
        std::uint32_t d = 0;
        for (auto c : n.child)
            if (c != kNone) d = std::max(d, 1 + depth_of(c));
        return d;
    }

    template <class F>
    void visit_leaves(std::uint32_t v, const Square& s, F&& f) {
        if (!region_of(v).intersects(s)) return;
        auto& n = nodes_[v];
        if (n.kind == Kind::leaf) {
            f(v);
            return;
        }
        for (auto c : n.child)
            if (c != kNone) visit_leaves(c, s, f);
    }

    // ---------------------------------------------------------- long squares

    enum class LongKind { none, container, left, right, bottom, top };

    LongKind classify(std::uint32_t v, const Square& s) const {
        const auto r = region_of(v);
        if (!r.intersects(s) || r.has_corner_of(s)) return LongKind::none;
        const bool full_w = s.x0() <= r.x0 && s.x1() >= r.x1;
        const bool full_h = s.y0() <= r.y0 && s.y1() >= r.y1;
        if (full_w && full_h) return LongKind::container;
        if (full_h) return s.x0() < r.x0 ? LongKind::left : LongKind::right;
        return s.y0() < r.y0 ? LongKind::bottom : LongKind::top;
    }

    void add_long(std::uint32_t v, std::uint32_t id, const Square& s) {
        auto& L = *nodes_[v].leaf;
        switch (classify(v, s)) {
            case LongKind::none: return;
            case LongKind::container: L.containers.insert(id); break;
            case LongKind::left: L.left.insert({-s.x1(), id}); break;
            case LongKind::right: L.right.insert({s.x0(), id}); break;
            case LongKind::bottom: L.bottom.insert({-s.y1(), id}); break;
            case LongKind::top: L.top.insert({s.y0(), id}); break;
        }
    }
    void drop_long(std::uint32_t v, std::uint32_t id, const Square& s) {
        auto& L = *nodes_[v].leaf;
        L.containers.erase(id);
        L.left.erase({-s.x1(), id});
        L.right.erase({s.x0(), id});
        L.bottom.erase({-s.y1(), id});
        L.top.erase({s.y0(), id});
    }

    MaximalLong maximal_long(std::uint32_t v) const {
        const auto& L = *nodes_[v].leaf;
        MaximalLong m;
        if (!L.containers.empty()) {
            m.container = *L.containers.begin();
            return m;
        }
        if (!L.left.empty()) m.left = L.left.begin()->second;
        if (!L.right.empty()) m.right = L.right.begin()->second;
        if (!L.bottom.empty()) m.bottom = L.bottom.begin()->second;
        if (!L.top.empty()) m.top = L.top.begin()->second;
        return m;
    }

    CanonicalCache& cache(std::uint32_t v) {
        auto& L = *nodes_[v].leaf;
        if (!L.cache) {
            std::vector<std::pair<std::uint32_t, Point2>> pts;
            for (auto p : L.points) pts.emplace_back(p, points_.at(p));
            std::vector<IdSquare> shorts;
            for (const auto& [id, c] : L.short_count) shorts.emplace_back(id, squares_.at(id));
            const auto& n = nodes_[v];
            const auto seed = mix_seed(cfg_.seed, std::uint64_t(n.x0) * 0x9e3779b97f4a7c15ull ^
                                                      std::uint64_t(n.y0) * 0xc2b2ae3d27d4eb4full ^ n.k);
            L.cache = std::make_unique<CanonicalCache>(std::move(pts), std::move(shorts), a_, seed);
        }
        return *L.cache;
    }

    // ---------------------------------------------------------- elements

    void leaf_add(std::uint32_t v, const Elem& e) {
        auto& L = *nodes_[v].leaf;
        L.cache.reset();
        if (e.tag == kPointTag) {
            L.points.push_back(e.id);
            return;
        }
        L.vertices.push_back(e);
        if (L.short_count[e.id]++ == 0) {
            auto it = squares_.find(e.id);
            if (it != squares_.end()) drop_long(v, e.id, it->second);
        }
    }
    void leaf_remove(std::uint32_t v, const Elem& e) {
        auto& L = *nodes_[v].leaf;
        L.cache.reset();
        if (e.tag == kPointTag) {
            auto it = std::find(L.points.begin(), L.points.end(), e.id);
            GEOCOVER_CHECK(it != L.points.end(), "cover tree: point missing from its leaf");
            L.points.erase(it);
            return;
        }
        auto it = std::find(L.vertices.begin(), L.vertices.end(), e);
        GEOCOVER_CHECK(it != L.vertices.end(), "cover tree: vertex missing from its leaf");
        L.vertices.erase(it);
        if (--L.short_count[e.id] == 0) {
            L.short_count.erase(e.id);
            auto sq = squares_.find(e.id);
            if (sq != squares_.end()) add_long(v, e.id, sq->second);
        }
    }

    void add_elem(const Elem& e) {
        std::vector<std::uint32_t> path;
        auto v = root_;
        for (;;) {
            path.push_back(v);
            ++nodes_[v].size;
            if (nodes_[v].kind == Kind::leaf) break;
            const auto c = child_for(v, e.x, e.y);
            if (c == kNone) {
                // outside the shrunk box: this node's shape changes
                auto elems = collect(v);
                elems.push_back(e);
                rebuild(v, std::move(elems));
                return;
            }
            v = c;
        }
        leaf_add(v, e);
        fix(path);
    }

    void remove_elem(const Elem& e) {
        std::vector<std::uint32_t> path;
        auto v = root_;
        for (;;) {
            path.push_back(v);
            --nodes_[v].size;
            if (nodes_[v].kind == Kind::leaf) break;
            v = child_for(v, e.x, e.y);
            GEOCOVER_CHECK(v != kNone, "cover tree: element outside its cell");
        }
        leaf_remove(v, e);
        fix(path);
    }

    bool violates(std::uint32_t v) const {
        const auto& n = nodes_[v];
        if (n.kind == Kind::leaf) return n.size > cfg_.b_leaf && n.k > 0 && !all_same(v);
        if (n.size <= cfg_.b_leaf) return true;
        if (n.kind == Kind::split) {
            int nonempty = 0;
            for (auto c : n.child) nonempty += nodes_[c].size > 0;
            return nonempty < 2;
        }
        return false;
    }

    bool all_same(std::uint32_t v) const {
        const auto& L = *nodes_[v].leaf;
        std::optional<Point2> first;
        auto same = [&](Coord x, Coord y) {
            if (!first) first = Point2{x, y};
            return first->x == x && first->y == y;
        };
        for (auto p : L.points)
            if (!same(points_.at(p).x, points_.at(p).y)) return false;
        for (const auto& e : L.vertices)
            if (!same(e.x, e.y)) return false;
        return true;
    }

    void fix(const std::vector<std::uint32_t>& path) {
        for (std::size_t i = 0; i < path.size(); ++i) {
            if (!violates(path[i])) continue;
            auto v = path[i];
            if (i > 0 && nodes_[path[i - 1]].kind == Kind::shrink) v = path[i - 1];
            rebuild(v, collect(v));
            return;
        }
    }

    std::vector<Elem> collect(std::uint32_t v) const {
        std::vector<Elem> out;
        std::vector<std::uint32_t> stack{v};
        while (!stack.empty()) {
            const auto u = stack.back();
            stack.pop_back();
            const auto& n = nodes_[u];
            if (n.kind == Kind::leaf) {
                for (auto p : n.leaf->points) out.push_back({points_.at(p).x, points_.at(p).y, p, kPointTag});
                out.insert(out.end(), n.leaf->vertices.begin(), n.leaf->vertices.end());
                continue;
            }
            for (auto c : n.child)
                if (c != kNone) stack.push_back(c);
        }
        return out;
    }

    void release_children(std::uint32_t v) {
        for (auto& c : nodes_[v].child) {
            if (c == kNone) continue;
            release_children(c);
            nodes_[c].leaf.reset();
            free_.push_back(c);
            c = kNone;
        }
    }

    /// Rebuilds the subtree at v from its elements, then registers the long
    /// squares of every new leaf.
    void rebuild(std::uint32_t v, std::vector<Elem> elems) {
        ++rebuilds_;
        rebuilt_elems_ += elems.size();
        release_children(v);
        nodes_[v].leaf.reset();
        // canonical element order keeps leaf contents independent of history
        std::sort(elems.begin(), elems.end(), [](const Elem& a, const Elem& b) {
            return std::tie(a.tag, a.id) < std::tie(b.tag, b.id);
        });
        build_into(v, elems);
        const auto r = region_of(v);
        S4_.report(RangeTree4D::Box{{kNegInf, r.x0, kNegInf, r.y0}, {r.x1, kPosInf, r.y1, kPosInf}},
                   [&](std::uint32_t id) {
                       const auto& s = squares_.at(id);
                       visit_leaves(v, s, [&](std::uint32_t u) {
                           if (!nodes_[u].leaf->short_count.count(id)) add_long(u, id, s);
                       });
                   });
    }

    void build_into(std::uint32_t v, const std::vector<Elem>& elems) {
        auto& n = nodes_[v];
        n.size = elems.size();
        for (auto& c : n.child) c = kNone;
        if (elems.size() <= cfg_.b_leaf || n.k == 0 || same_point(elems)) {
            make_leaf(v);
            for (const auto& e : elems) leaf_add(v, e);
            return;
        }
        // smallest aligned square holding every element
        std::uint64_t diff = 0;
        const auto ux0 = std::uint64_t(elems[0].x - kFrameLo), uy0 = std::uint64_t(elems[0].y - kFrameLo);
        for (const auto& e : elems)
            diff |= (std::uint64_t(e.x - kFrameLo) ^ ux0) | (std::uint64_t(e.y - kFrameLo) ^ uy0);
        const auto kk = std::uint32_t(std::bit_width(diff));
        if (kk < n.k) {
            const std::uint64_t mask = ~((std::uint64_t{1} << kk) - 1);
            n.kind = Kind::shrink;
            const auto c = new_node(Coord(ux0 & mask) + kFrameLo, Coord(uy0 & mask) + kFrameLo, kk, v);
            nodes_[v].child[0] = c;
            build_split(c, elems);
            return;
        }
        build_split(v, elems);
    }

    void build_split(std::uint32_t v, const std::vector<Elem>& elems) {
        nodes_[v].kind = Kind::split;
        nodes_[v].size = elems.size();
        const auto k = nodes_[v].k;
        const Coord half = Coord{1} << (k - 1);
        const Coord x0 = nodes_[v].x0, y0 = nodes_[v].y0;
        std::vector<Elem> part[4];
        for (const auto& e : elems) part[(e.x >= x0 + half ? 1 : 0) | (e.y >= y0 + half ? 2 : 0)].push_back(e);
        for (int q = 0; q < 4; ++q) {
            const auto c = new_node(x0 + ((q & 1) ? half : 0), y0 + ((q & 2) ? half : 0), k - 1, v);
            nodes_[v].child[q] = c;
            build_into(c, part[q]);
        }
    }

    static bool same_point(const std::vector<Elem>& elems) {
        for (const auto& e : elems)
            if (e.x != elems[0].x || e.y != elems[0].y) return false;
        return true;
    }

    CoverTreeConfig cfg_;
    std::uint32_t a_ = 2;
    std::vector<Node> nodes_;
    std::vector<std::uint32_t> free_;
    std::uint32_t root_ = kNone;
    std::unordered_map<std::uint32_t, Point2> points_;
    std::unordered_map<std::uint32_t, Square> squares_;
    RangeTree4D S4_;
    std::size_t rebuilds_ = 0;
    std::size_t rebuilt_elems_ = 0;
};

}  // namespace geocover::squares
