#pragma once

#include <geocover/error.hpp>
#include <geocover/geom.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <unordered_map>
#include <vector>

namespace geocover {

inline constexpr Coord kNegInf = std::numeric_limits<Coord>::min();
inline constexpr Coord kPosInf = std::numeric_limits<Coord>::max();

/// Canonical subset handle. Valid until the block that produced it is
/// merged or rebuilt; stale handles raise LookupError.
struct NodeId {
    std::uint64_t version = 0;
    std::uint32_t structure = 0;
    std::uint32_t lo = 0, hi = 0;
    friend bool operator==(const NodeId&, const NodeId&) = default;
};

/// Dynamic D-dimensional orthogonal range tree over (id, key) pairs.
///
/// Static multi-level range trees (bucketed leaves, secondary structures
/// built on first use) are kept in a logarithmic family of blocks: inserts
/// merge blocks like a binary counter, deletes tombstone in place and
/// trigger a global rebuild once half the stored elements are dead. Every
/// last-level array carries a small segment tree with live count, minimum
/// live id and (optionally) weight sum, so canonical aggregates are exact
/// and write-through.
template <std::size_t D>
class RangeTree {
public:
    using Id = std::uint32_t;
    using Key = std::array<Coord, D>;

    struct Box {
        Key lo, hi;
        bool contains(const Key& k) const {
            for (std::size_t d = 0; d < D; ++d)
                if (k[d] < lo[d] || k[d] > hi[d]) return false;
            return true;
        }
    };

    struct Canonical {
        NodeId node;
        std::uint32_t count = 0;
        Weight aggregate = 0;
        Id min_id = 0;
    };

    explicit RangeTree(bool weighted = false, std::uint32_t bucket = 16)
        : weighted_(weighted), bucket_(std::max<std::uint32_t>(bucket, 1)) {}

    RangeTree(const RangeTree&) = delete;
    RangeTree& operator=(const RangeTree&) = delete;
    RangeTree(RangeTree&&) = default;
    RangeTree& operator=(RangeTree&&) = default;

    std::size_t size() const noexcept { return live_; }
    bool empty() const noexcept { return live_ == 0; }
    bool weighted() const noexcept { return weighted_; }
    bool contains(Id id) const { return index_.count(id) != 0; }

    const Key& key(Id id) const { return elems_[slot_of(id)].key; }
    Weight weight(Id id) const { return elems_[slot_of(id)].weight; }

    void insert(Id id, const Key& key, Weight w = 1) {
        GEOCOVER_REQUIRE(!index_.count(id), "range tree: duplicate id " + std::to_string(id));
        const auto slot = std::uint32_t(elems_.size());
        elems_.push_back({id, key, weighted_ ? w : 1, true, {}});
        index_.emplace(id, slot);
        ++live_;
        std::vector<std::uint32_t> carry{slot};
        std::size_t level = 0;
        while (level < blocks_.size() && blocks_[level]) {
            for (auto s : blocks_[level]->slots)
                if (elems_[s].alive) carry.push_back(s);
            blocks_[level].reset();
            ++level;
        }
        if (level == blocks_.size()) blocks_.emplace_back();
        blocks_[level] = build_block(std::move(carry));
    }

    /// Removes id; returns false (structure unchanged) when id is unknown.
    bool erase(Id id) {
        auto it = index_.find(id);
        if (it == index_.end()) return false;
        auto& e = elems_[it->second];
        e.alive = false;
        for (auto [b, s, pos] : e.refs) point_update(b, s, pos, e);
        e.refs.clear();
        index_.erase(it);
        --live_;
        ++dead_;
        if (dead_ > 64 && dead_ > live_) rebuild_all();
        return true;
    }

    /// Updates the weight of a stored element in every structure holding it.
    void set_weight(Id id, Weight w) {
        GEOCOVER_REQUIRE(weighted_, "range tree: weights not enabled");
        auto& e = elems_[slot_of(id)];
        e.weight = w;
        for (auto [b, s, pos] : e.refs) point_update(b, s, pos, e);
    }

    /// Disjoint canonical subsets whose union is exactly the stored
    /// elements inside the closed box. Empty subsets are omitted.
    std::vector<Canonical> canonical_decompose(const Box& box) const {
        std::vector<Canonical> out;
        for (std::size_t b = 0; b < blocks_.size(); ++b)
            if (blocks_[b] && !blocks_[b]->slots.empty()) query(*blocks_[b], 0, box, out);
        return out;
    }

    std::size_t count(const Box& box) const {
        std::size_t c = 0;
        for (const auto& n : canonical_decompose(box)) c += n.count;
        return c;
    }

    Weight weight_sum(const Box& box) const {
        Weight w = 0;
        for (const auto& n : canonical_decompose(box)) w += n.aggregate;
        return w;
    }

    /// Smallest contained id, if any.
    std::optional<Id> rect_witness(const Box& box) const {
        std::optional<Id> best;
        for (const auto& n : canonical_decompose(box))
            if (!best || n.min_id < *best) best = n.min_id;
        return best;
    }

    /// Live elements of a canonical subset.
    std::vector<Id> enumerate(const NodeId& node) const {
        std::vector<Id> out;
        for_each_in(node, [&](Id id) { out.push_back(id); });
        return out;
    }

    template <class F>
    void for_each_in(const NodeId& node, F&& f) const {
        const Block* blk = find_block(node.version);
        if (!blk || node.structure >= blk->structs.size() ||
            node.hi > blk->structs[node.structure].items.size() || node.lo > node.hi)
            throw LookupError("range tree: stale or unknown canonical node");
        const auto& st = blk->structs[node.structure];
        for (std::uint32_t p = node.lo; p < node.hi; ++p) {
            const auto& e = elems_[st.items[p]];
            if (e.alive) f(e.id);
        }
    }

    /// Calls f(id) for every stored element in the box.
    template <class F>
    void report(const Box& box, F&& f) const {
        for (const auto& n : canonical_decompose(box)) for_each_in(n.node, f);
    }

    std::vector<Id> ids() const {
        std::vector<Id> out;
        out.reserve(live_);
        for (const auto& e : elems_)
            if (e.alive) out.push_back(e.id);
        std::sort(out.begin(), out.end());
        return out;
    }

    /// Number of materialized structures (roots plus built secondaries).
    std::size_t structure_count() const {
        std::size_t c = 0;
        for (const auto& b : blocks_)
            if (b) c += b->structs.size();
        return c;
    }

    void clear() {
        blocks_.clear();
        elems_.clear();
        index_.clear();
        live_ = dead_ = 0;
    }

private:
    struct Elem {
        Id id;
        Key key;
        Weight weight;
        bool alive;
        // (block level, structure, position) of every last-level array holding it
        std::vector<std::array<std::uint32_t, 3>> refs;
    };

    struct Structure {
        std::uint32_t dim = 0;
        std::vector<std::uint32_t> items;  // element slots sorted by key[dim]
        std::vector<Coord> keys;
        std::unordered_map<std::uint32_t, std::uint32_t> children;  // segment node -> structure
        // last level only: bottom-up segment tree over positions
        std::uint32_t leaves = 0;
        std::vector<std::uint32_t> cnt;
        std::vector<Id> min_id;
        std::vector<Weight> wt;
    };

    struct Block {
        std::uint64_t version = 0;
        std::vector<std::uint32_t> slots;
        mutable std::vector<Structure> structs;
    };

    static constexpr Id kNoId = std::numeric_limits<Id>::max();

    std::uint32_t slot_of(Id id) const {
        auto it = index_.find(id);
        if (it == index_.end()) throw LookupError("range tree: unknown id " + std::to_string(id));
        return it->second;
    }

    const Block* find_block(std::uint64_t version) const {
        for (const auto& b : blocks_)
            if (b && b->version == version) return b.get();
        return nullptr;
    }

    std::unique_ptr<Block> build_block(std::vector<std::uint32_t> slots) {
        auto blk = std::make_unique<Block>();
        blk->version = ++version_counter_;
        blk->slots = std::move(slots);
        for (auto s : blk->slots) elems_[s].refs.clear();
        blk->structs.push_back(make_structure(blk->slots, 0));
        return blk;
    }

    Structure make_structure(std::vector<std::uint32_t> items, std::uint32_t dim) const {
        Structure st;
        st.dim = dim;
        std::sort(items.begin(), items.end(), [&](std::uint32_t a, std::uint32_t b) {
            const auto ka = elems_[a].key[dim], kb = elems_[b].key[dim];
            return ka != kb ? ka < kb : elems_[a].id < elems_[b].id;
        });
        st.items = std::move(items);
        st.keys.reserve(st.items.size());
        for (auto s : st.items) st.keys.push_back(elems_[s].key[dim]);
        return st;
    }

    // Attach the aggregate tree to a last-level structure and register refs.
    void finish_last_level(const Block& blk, std::uint32_t si) const {
        auto& st = blk.structs[si];
        const auto m = std::uint32_t(st.items.size());
        std::uint32_t n = 1;
        while (n < m) n <<= 1;
        st.leaves = n;
        st.cnt.assign(2 * n, 0);
        st.min_id.assign(2 * n, kNoId);
        if (weighted_) st.wt.assign(2 * n, 0);
        const auto level = block_level(blk);
        for (std::uint32_t p = 0; p < m; ++p) {
            auto& e = elems_[st.items[p]];
            e.refs.push_back({level, si, p});
            if (!e.alive) continue;
            st.cnt[n + p] = 1;
            st.min_id[n + p] = e.id;
            if (weighted_) st.wt[n + p] = e.weight;
        }
        for (std::uint32_t i = n - 1; i >= 1; --i) {
            st.cnt[i] = st.cnt[2 * i] + st.cnt[2 * i + 1];
            st.min_id[i] = std::min(st.min_id[2 * i], st.min_id[2 * i + 1]);
            if (weighted_) st.wt[i] = st.wt[2 * i] + st.wt[2 * i + 1];
        }
    }

    std::uint32_t block_level(const Block& blk) const {
        for (std::uint32_t l = 0; l < blocks_.size(); ++l)
            if (blocks_[l].get() == &blk) return l;
        GEOCOVER_CHECK(false, "range tree: orphan block");
        return 0;
    }

    void point_update(std::uint32_t level, std::uint32_t si, std::uint32_t pos, const Elem& e) {
        auto& st = blocks_[level]->structs[si];
        std::uint32_t i = st.leaves + pos;
        st.cnt[i] = e.alive ? 1 : 0;
        st.min_id[i] = e.alive ? e.id : kNoId;
        if (weighted_) st.wt[i] = e.alive ? e.weight : 0;
        for (i >>= 1; i >= 1; i >>= 1) {
            st.cnt[i] = st.cnt[2 * i] + st.cnt[2 * i + 1];
            st.min_id[i] = std::min(st.min_id[2 * i], st.min_id[2 * i + 1]);
            if (weighted_) st.wt[i] = st.wt[2 * i] + st.wt[2 * i + 1];
        }
    }

    Canonical range_aggregate(const Block& blk, std::uint32_t si, std::uint32_t lo, std::uint32_t hi) const {
        const auto& st = blk.structs[si];
        Canonical c;
        c.node = {blk.version, si, lo, hi};
        c.min_id = kNoId;
        for (std::uint32_t l = lo + st.leaves, r = hi + st.leaves; l < r; l >>= 1, r >>= 1) {
            if (l & 1) {
                c.count += st.cnt[l];
                c.min_id = std::min(c.min_id, st.min_id[l]);
                if (weighted_) c.aggregate += st.wt[l];
                ++l;
            }
            if (r & 1) {
                --r;
                c.count += st.cnt[r];
                c.min_id = std::min(c.min_id, st.min_id[r]);
                if (weighted_) c.aggregate += st.wt[r];
            }
        }
        if (!weighted_) c.aggregate = c.count;
        return c;
    }

    std::uint32_t child_structure(const Block& blk, std::uint32_t si, std::uint32_t node, std::uint32_t lo,
                                  std::uint32_t hi) const {
        {
            auto& st = blk.structs[si];
            auto it = st.children.find(node);
            if (it != st.children.end()) return it->second;
        }
        const auto dim = blk.structs[si].dim + 1;
        std::vector<std::uint32_t> items(blk.structs[si].items.begin() + lo, blk.structs[si].items.begin() + hi);
        const auto child = std::uint32_t(blk.structs.size());
        blk.structs.push_back(make_structure(std::move(items), dim));
        blk.structs[si].children.emplace(node, child);
        if (dim + 1 == D) finish_last_level(blk, child);
        return child;
    }

    void query(const Block& blk, std::uint32_t si, const Box& box, std::vector<Canonical>& out) const {
        if (si == 0 && D == 1 && blk.structs[0].leaves == 0) finish_last_level(blk, 0);
        const auto& st0 = blk.structs[si];
        const auto dim = st0.dim;
        const auto L = std::uint32_t(std::lower_bound(st0.keys.begin(), st0.keys.end(), box.lo[dim]) - st0.keys.begin());
        const auto R = std::uint32_t(std::upper_bound(st0.keys.begin(), st0.keys.end(), box.hi[dim]) - st0.keys.begin());
        if (L >= R) return;
        if (dim + 1 == D) {
            auto c = range_aggregate(blk, si, L, R);
            if (c.count) out.push_back(c);
            return;
        }
        descend(blk, si, 1, 0, std::uint32_t(st0.items.size()), L, R, box, out);
    }

    void descend(const Block& blk, std::uint32_t si, std::uint32_t node, std::uint32_t lo, std::uint32_t hi,
                 std::uint32_t L, std::uint32_t R, const Box& box, std::vector<Canonical>& out) const {
        if (hi <= L || R <= lo) return;
        if (hi - lo <= bucket_) {
            const auto& st = blk.structs[si];
            for (auto p = std::max(lo, L); p < std::min(hi, R); ++p) {
                const auto& e = elems_[st.items[p]];
                if (!e.alive || !box.contains(e.key)) continue;
                out.push_back({{blk.version, si, p, p + 1}, 1, weighted_ ? e.weight : 1, e.id});
            }
            return;
        }
        if (L <= lo && hi <= R) {
            const auto child = child_structure(blk, si, node, lo, hi);
            query(blk, child, box, out);
            return;
        }
        const auto mid = lo + (hi - lo) / 2;
        descend(blk, si, 2 * node, lo, mid, L, R, box, out);
        descend(blk, si, 2 * node + 1, mid, hi, L, R, box, out);
    }

    void rebuild_all() {
        std::vector<Elem> alive;
        alive.reserve(live_);
        for (auto& e : elems_)
            if (e.alive) alive.push_back({e.id, e.key, e.weight, true, {}});
        clear();
        for (const auto& e : alive) insert_bulk(e);
        flush_bulk();
    }

    void insert_bulk(const Elem& e) {
        index_.emplace(e.id, std::uint32_t(elems_.size()));
        elems_.push_back(e);
        ++live_;
    }

    // Places all elements into blocks following the binary decomposition of their count.
    void flush_bulk() {
        std::size_t start = 0, n = elems_.size();
        for (std::size_t level = 64; level-- > 0;) {
            if (!((n >> level) & 1)) continue;
            std::vector<std::uint32_t> slots;
            for (std::size_t i = 0; i < (std::size_t{1} << level); ++i) slots.push_back(std::uint32_t(start + i));
            start += slots.size();
            if (blocks_.size() <= level) blocks_.resize(level + 1);
            blocks_[level] = build_block(std::move(slots));
        }
    }

    bool weighted_;
    std::uint32_t bucket_;
    std::vector<std::unique_ptr<Block>> blocks_;
    mutable std::vector<Elem> elems_;
    std::unordered_map<Id, std::uint32_t> index_;
    std::size_t live_ = 0, dead_ = 0;
    std::uint64_t version_counter_ = 0;
};

using RangeTree2D = RangeTree<2>;
using RangeTree4D = RangeTree<4>;

inline RangeTree2D::Key key_of(const Point2& p) { return {p.x, p.y}; }

/// Closed box query for the points of a rectangle.
inline RangeTree2D::Box rect_box(Coord x0, Coord x1, Coord y0, Coord y1) { return {{x0, y0}, {x1, y1}}; }

/// Lifted squares containing p: x0 <= px <= x1 and y0 <= py <= y1.
inline RangeTree4D::Box containing_box(const Point2& p) {
    return {{kNegInf, p.x, kNegInf, p.y}, {p.x, kPosInf, p.y, kPosInf}};
}

}  // namespace geocover
