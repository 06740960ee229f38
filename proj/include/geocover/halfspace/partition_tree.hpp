#pragma once

#include <geocover/error.hpp>
#include <geocover/geom.hpp>
#include <geocover/range_tree.hpp>
#include <geocover/rng.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <tuple>
#include <unordered_map>
#include <utility>
#include <vector>

namespace geocover::halfspace {

struct PartitionTreeConfig {
    std::uint32_t leaf_size = 8;
    bool track_weights = false;  // maintain m_v (dual use)
};

/// Counter-augmented partition tree over a dynamic 3D point set.
///
/// Cells are tight boxes sheared along the cell's fitted z slope; each
/// internal node has up to 8 children from three nested median splits, each
/// along whichever of x, y, z, x+y, x-y leaves the smallest sheared boxes.
/// Per node: c_v counts registered constraints (with multiplicity)
/// containing the cell but not its parent's; d_v is the
/// minimum over the subtree of the counts below v; m_v is the sum over the
/// subtree of 2^(counts below v). Counters are cleared in O(1) by bumping
/// an epoch.
///
/// Insertions go to a small buffer handled directly and the tree is rebuilt
/// when the buffer or the number of deleted slots grows too large.
class PartitionTree {
public:
    using Id = std::uint32_t;
    static constexpr std::uint64_t kInf = std::numeric_limits<std::uint64_t>::max() / 4;

    explicit PartitionTree(PartitionTreeConfig cfg = {}) : cfg_(cfg) { rebuild(); }

    PartitionTree(const std::vector<std::pair<Id, Point3>>& pts, PartitionTreeConfig cfg) : cfg_(cfg) {
        for (const auto& [id, p] : pts) {
            GEOCOVER_REQUIRE(!where_.count(id), "partition tree: duplicate id " + std::to_string(id));
            where_[id] = Loc{true, std::uint32_t(buffer_.size())};
            buffer_.push_back({id, p, 0, 0});
        }
        rebuild();
    }

    std::size_t size() const noexcept { return live_; }
    bool contains_id(Id id) const { return where_.count(id) != 0; }
    const Point3& point(Id id) const {
        auto it = where_.find(id);
        if (it == where_.end()) throw LookupError("partition tree: unknown id " + std::to_string(id));
        return it->second.buffered ? buffer_[it->second.index].p : slots_[it->second.index].p;
    }

    void insert(Id id, const Point3& p) {
        GEOCOVER_REQUIRE(!where_.count(id), "partition tree: duplicate id " + std::to_string(id));
        where_[id] = Loc{true, std::uint32_t(buffer_.size())};
        buffer_.push_back({id, p, 0, epoch_});
        ++live_;
        if (double(buffer_.size()) > buffer_cap()) rebuild();
    }

    bool erase(Id id) {
        auto it = where_.find(id);
        if (it == where_.end()) return false;
        const auto loc = it->second;
        where_.erase(it);
        --live_;
        if (loc.buffered) {
            const auto last = buffer_.back();
            buffer_[loc.index] = last;
            buffer_.pop_back();
            if (loc.index < buffer_.size()) where_[last.id].index = loc.index;
            return true;
        }
        auto& s = slots_[loc.index];
        s.alive = false;
        ++dead_;
        for (auto v = slot_leaf_[loc.index]; v != kNone; v = nodes_[v].parent) {
            --nodes_[v].live;
            recompute(v);
        }
        if (dead_ > 64 && dead_ > live_) rebuild();
        return true;
    }

    /// Forgets every registered constraint.
    void reset_counters() { ++epoch_; }

    /// Adds k to the count of every live point satisfying q. Calls
    /// on_hit(id, exponent_before) for each point it reaches individually and
    /// on_node(node, exponent_before) for each fully contained cell, where
    /// exponent_before is the count of that point / the counts above the
    /// cell's subtree, before this registration. Returns crossed cells.
    template <class OnNode, class OnHit>
    std::size_t register_constraint(const LinearConstraint3& q, std::uint64_t k, OnNode&& on_node, OnHit&& on_hit) {
        std::size_t crossed = 0;
        if (!nodes_.empty() && nodes_[0].live > 0) visit(0, 0, q, k, on_node, on_hit, crossed);
        for (auto& b : buffer_) {
            if (!q.satisfied(b.p)) continue;
            on_hit(b.id, bc(b));
            set_bc(b, bc(b) + k);
        }
        return crossed;
    }

    std::size_t register_constraint(const LinearConstraint3& q, std::uint64_t k = 1) {
        return register_constraint(q, k, [](std::uint32_t, std::uint64_t) {}, [](Id, std::uint64_t) {});
    }

    /// Minimum count over live points with a witness (smallest id among ties
    /// inside the tree walk).
    std::optional<std::pair<Id, std::uint64_t>> min_depth() const {
        std::optional<std::pair<Id, std::uint64_t>> best;
        if (!nodes_.empty() && nodes_[0].live > 0) {
            std::uint32_t v = 0;
            std::uint64_t acc = c(0);
            while (!nodes_[v].leaf) {
                std::uint32_t arg = kNone;
                std::uint64_t val = kInf;
                for (auto ch = nodes_[v].first; ch < nodes_[v].first + nodes_[v].count; ++ch) {
                    if (nodes_[ch].live == 0) continue;
                    const auto x = c(ch) + d(ch);
                    if (x < val) {
                        val = x;
                        arg = ch;
                    }
                }
                acc += c(arg);
                v = arg;
            }
            std::uint32_t arg = kNone;
            std::uint64_t val = kInf;
            for (auto s = nodes_[v].begin; s < nodes_[v].end; ++s) {
                if (!slots_[s].alive) continue;
                const auto x = sc(s);
                if (arg == kNone || x < val || (x == val && slots_[s].id < slots_[arg].id)) {
                    val = x;
                    arg = s;
                }
            }
            best = {slots_[arg].id, acc + val};
        }
        for (const auto& b : buffer_)
            if (!best || bc(b) < best->second || (bc(b) == best->second && b.id < best->first)) best = {b.id, bc(b)};
        return best;
    }

    /// d at the root plus the root's own count (kInf when empty).
    std::uint64_t root_min() const {
        auto m = min_depth();
        return m ? m->second : kInf;
    }

    /// Sum over live points of 2^count.
    Weight total_weight() const {
        GEOCOVER_REQUIRE(cfg_.track_weights, "partition tree: weights not tracked");
        Weight w = 0;
        if (!nodes_.empty() && nodes_[0].live > 0) w += pow2(std::uint32_t(c(0))) * m(0);
        for (const auto& b : buffer_) w += pow2(std::uint32_t(bc(b)));
        return w;
    }

    /// Weight of a contained cell reported by on_node with exponent e.
    Weight node_weight(std::uint32_t v, std::uint64_t e) const {
        return pow2(std::uint32_t(e + c(v))) * m(v);
    }

    /// Count (exponent) of a single id.
    std::uint64_t count_of(Id id) const {
        auto it = where_.find(id);
        if (it == where_.end()) throw LookupError("partition tree: unknown id " + std::to_string(id));
        if (it->second.buffered) return bc(buffer_[it->second.index]);
        std::uint64_t acc = sc(it->second.index);
        for (auto v = slot_leaf_[it->second.index]; v != kNone; v = nodes_[v].parent) acc += c(v);
        return acc;
    }

    /// Each of the node_weight(v, e) copies under v independently with
    /// probability rho; calls out(id, copies) per id hit.
    template <class Out>
    void sample_node(std::uint32_t v, std::uint64_t e, double rho, Rng& rng, Out&& out) const {
        GEOCOVER_REQUIRE(cfg_.track_weights, "partition tree: weights not tracked");
        if (rho <= 0.0) return;
        const Weight total = node_weight(v, e);
        if (rho >= 1.0) {
            emit_all(v, e + c(v), out);
            return;
        }
        std::vector<std::pair<Id, std::uint64_t>> hits;
        Weight pos = skip(rng, rho);
        while (pos < total) {
            const Id id = locate(v, e + c(v), pos);
            if (!hits.empty() && hits.back().first == id) {
                ++hits.back().second;
            } else {
                hits.push_back({id, 1});
            }
            const Weight s = skip(rng, rho);
            if (s >= total - pos) break;
            pos += s + 1;
        }
        for (const auto& [id, k] : hits) out(id, k);
    }

    /// Each copy of every live point independently with probability rho.
    template <class Out>
    void sample_all(double rho, Rng& rng, Out&& out) const {
        if (!nodes_.empty() && nodes_[0].live > 0) sample_node(0, 0, rho, rng, out);
        for (const auto& b : buffer_) {
            const auto k = std::uint64_t(binomial(rng, pow2(std::uint32_t(bc(b))), rho));
            if (k) out(b.id, k);
        }
    }

    /// Ids of live points in a contained cell.
    template <class F>
    void for_each_in(std::uint32_t v, F&& f) const {
        for (auto s = nodes_[v].begin; s < nodes_[v].end; ++s)
            if (slots_[s].alive) f(slots_[s].id);
    }

    std::size_t node_count() const noexcept { return nodes_.size(); }
    std::size_t buffered() const noexcept { return buffer_.size(); }
    std::size_t rebuilds() const noexcept { return rebuilds_; }
    std::uint32_t height() const {
        std::uint32_t h = 0;
        for (std::uint32_t v = 0; v < nodes_.size(); ++v) {
            std::uint32_t d = 0;
            for (auto u = v; nodes_[u].parent != kNone; u = nodes_[u].parent) ++d;
            h = std::max(h, d);
        }
        return h;
    }

    /// Counts survive a rebuild.
    void rebuild() {
        ++rebuilds_;
        std::vector<Slot> items;
        for (const auto& s : slots_)
            if (s.alive) items.push_back({s.id, s.p, true, count_of(s.id), 0});
        for (const auto& b : buffer_) items.push_back({b.id, b.p, true, bc(b), 0});
        std::sort(items.begin(), items.end(), [](const Slot& a, const Slot& b) { return a.id < b.id; });
        std::unordered_map<Id, std::uint64_t> keep;
        for (const auto& it : items) keep[it.id] = it.c;
        buffer_.clear();
        slots_ = std::move(items);
        nodes_.clear();
        slot_leaf_.assign(slots_.size(), kNone);
        dead_ = 0;
        live_ = slots_.size();
        ++epoch_;
        built_ = slots_.size();
        if (!slots_.empty()) {
            nodes_.push_back({});
            nodes_[0].parent = kNone;
            build(0, 0, std::uint32_t(slots_.size()), 0);
        }
        std::vector<std::uint64_t> items_c(slots_.size());
        for (std::uint32_t i = 0; i < slots_.size(); ++i) items_c[i] = keep[slots_[i].id];
        where_.clear();
        for (std::uint32_t i = 0; i < slots_.size(); ++i) {
            where_[slots_[i].id] = Loc{false, i};
            slots_[i].c = items_c[i];
        }
        // children always follow their parent
        for (auto v = std::uint32_t(nodes_.size()); v-- > 0;) recompute(v);
    }

private:
    static constexpr std::uint32_t kNone = ~std::uint32_t{0};

    struct Slot {
        Id id;
        Point3 p;
        bool alive;
        std::uint64_t c;
        std::uint64_t epoch;
    };
    struct Buffered {
        Id id;
        Point3 p;
        std::uint64_t c;
        std::uint64_t epoch;
    };
    struct Loc {
        bool buffered;
        std::uint32_t index;
    };
    struct Node {
        // sheared box: x, y ranges and the range of z - gx x - gy y
        std::array<Coord, 2> lo{}, hi{};
        Coord gx = 0, gy = 0;
        Wide zlo = 0, zhi = 0;
        std::uint32_t parent = kNone;
        std::uint32_t first = 0, count = 0;  // children
        std::uint32_t begin = 0, end = 0;    // slots
        std::uint32_t live = 0;
        bool leaf = true;
        std::uint64_t c = 0, d = 0, epoch = 0;
        Weight m = 0;
    };

    static constexpr std::array<std::array<int, 3>, 5> kDirs = {
        {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}, {1, 1, 0}, {1, -1, 0}}};

    double buffer_cap() const { return std::max(16.0, std::pow(double(std::max<std::size_t>(built_, 1)), 2.0 / 3.0)); }

    std::uint64_t c(std::uint32_t v) const { return nodes_[v].epoch == epoch_ ? nodes_[v].c : 0; }
    std::uint64_t d(std::uint32_t v) const {
        if (nodes_[v].live == 0) return kInf;
        return nodes_[v].epoch == epoch_ ? nodes_[v].d : 0;
    }
    Weight m(std::uint32_t v) const { return nodes_[v].epoch == epoch_ ? nodes_[v].m : Weight(nodes_[v].live); }
    std::uint64_t sc(std::uint32_t s) const { return slots_[s].epoch == epoch_ ? slots_[s].c : 0; }
    std::uint64_t bc(const Buffered& b) const { return b.epoch == epoch_ ? b.c : 0; }
    void set_bc(Buffered& b, std::uint64_t v) {
        b.c = v;
        b.epoch = epoch_;
    }
    void touch(std::uint32_t v) {
        auto& n = nodes_[v];
        if (n.epoch == epoch_) return;
        n.c = 0;
        n.d = 0;
        n.m = Weight(n.live);
        n.epoch = epoch_;
    }
    void touch_slot(std::uint32_t s) {
        if (slots_[s].epoch == epoch_) return;
        slots_[s].c = 0;
        slots_[s].epoch = epoch_;
    }

    void recompute(std::uint32_t v) {
        touch(v);
        auto& n = nodes_[v];
        std::uint64_t dd = kInf;
        Weight mm = 0;
        if (n.leaf) {
            for (auto s = n.begin; s < n.end; ++s) {
                if (!slots_[s].alive) continue;
                dd = std::min(dd, sc(s));
                if (cfg_.track_weights) mm += pow2(std::uint32_t(sc(s)));
            }
        } else {
            for (auto ch = n.first; ch < n.first + n.count; ++ch) {
                if (nodes_[ch].live == 0) continue;
                dd = std::min(dd, c(ch) + d(ch));
                if (cfg_.track_weights) mm += pow2(std::uint32_t(c(ch))) * m(ch);
            }
        }
        n.d = dd;
        n.m = mm;
    }

    // min and max of the constraint slack over the cell
    std::pair<Wide, Wide> slack_range(const Node& n, const LinearConstraint3& q) const {
        Wide lo = -Wide(q.rhs), hi = -Wide(q.rhs);
        const Wide k[2] = {Wide(q.coef[0]) + Wide(q.coef[2]) * n.gx, Wide(q.coef[1]) + Wide(q.coef[2]) * n.gy};
        for (int i = 0; i < 2; ++i) {
            const Wide a = k[i] * n.lo[i], b = k[i] * n.hi[i];
            lo += std::min(a, b);
            hi += std::max(a, b);
        }
        const Wide a = Wide(q.coef[2]) * n.zlo, b = Wide(q.coef[2]) * n.zhi;
        lo += std::min(a, b);
        hi += std::max(a, b);
        return {lo, hi};
    }

    // -1: cell outside q, +1: inside, 0: crossed
    int side(const Node& n, const LinearConstraint3& q) const {
        const auto [lo, hi] = slack_range(n, q);
        return hi < 0 ? -1 : lo >= 0 ? 1 : 0;
    }

    // least-squares slope of z over x and y on slots [a, b), rounded
    std::pair<Coord, Coord> fit_slope(std::uint32_t a, std::uint32_t b) const {
        long double sx = 0, sy = 0, sz = 0;
        const long double k = b - a;
        for (auto s = a; s < b; ++s) {
            sx += slots_[s].p.x;
            sy += slots_[s].p.y;
            sz += slots_[s].p.z;
        }
        const long double mx = sx / k, my = sy / k, mz = sz / k;
        long double xx = 0, xy = 0, yy = 0, xz = 0, yz = 0;
        for (auto s = a; s < b; ++s) {
            const long double dx = slots_[s].p.x - mx, dy = slots_[s].p.y - my, dz = slots_[s].p.z - mz;
            xx += dx * dx;
            xy += dx * dy;
            yy += dy * dy;
            xz += dx * dz;
            yz += dy * dz;
        }
        const long double det = xx * yy - xy * xy;
        if (!(det > 0)) return {0, 0};
        constexpr long double cap = 1LL << 30;
        return {Coord(std::llround(std::clamp((xz * yy - yz * xy) / det, -cap, cap))),
                Coord(std::llround(std::clamp((yz * xx - xz * xy) / det, -cap, cap)))};
    }

    // volume of the sheared box of slots [a, b)
    long double box_volume(std::uint32_t a, std::uint32_t b) const {
        const auto [gx, gy] = fit_slope(a, b);
        Coord x0 = kPosInf, x1 = kNegInf, y0 = kPosInf, y1 = kNegInf;
        long double z0 = 1e300L, z1 = -1e300L;
        for (auto s = a; s < b; ++s) {
            const auto& p = slots_[s].p;
            x0 = std::min(x0, p.x);
            x1 = std::max(x1, p.x);
            y0 = std::min(y0, p.y);
            y1 = std::max(y1, p.y);
            const long double z = (long double)p.z - (long double)gx * p.x - (long double)gy * p.y;
            z0 = std::min(z0, z);
            z1 = std::max(z1, z);
        }
        return ((long double)(x1 - x0) + 1) * ((long double)(y1 - y0) + 1) * (z1 - z0 + 1);
    }

    void split_along(std::uint32_t a, std::uint32_t b, const std::array<int, 3>& dir) {
        auto key = [&](const Slot& s) {
            return std::pair<Wide, Id>(Wide(dir[0]) * s.p.x + Wide(dir[1]) * s.p.y + Wide(dir[2]) * s.p.z, s.id);
        };
        std::nth_element(slots_.begin() + a, slots_.begin() + (a + (b - a) / 2), slots_.begin() + b,
                         [&](const Slot& x, const Slot& y) { return key(x) < key(y); });
    }

    template <class OnNode, class OnHit>
    void visit(std::uint32_t v, std::uint64_t above, const LinearConstraint3& q, std::uint64_t k, OnNode& on_node,
               OnHit& on_hit, std::size_t& crossed) {
        const int sd = side(nodes_[v], q);
        if (sd < 0) return;
        if (sd > 0) {
            on_node(v, above);
            touch(v);
            nodes_[v].c += k;
            return;
        }
        ++crossed;
        touch(v);
        const auto here = above + nodes_[v].c;
        if (nodes_[v].leaf) {
            for (auto s = nodes_[v].begin; s < nodes_[v].end; ++s) {
                if (!slots_[s].alive || !q.satisfied(slots_[s].p)) continue;
                touch_slot(s);
                on_hit(slots_[s].id, here + slots_[s].c);
                slots_[s].c += k;
            }
        } else {
            for (auto ch = nodes_[v].first; ch < nodes_[v].first + nodes_[v].count; ++ch)
                if (nodes_[ch].live > 0) visit(ch, here, q, k, on_node, on_hit, crossed);
        }
        recompute(v);
    }

    void build(std::uint32_t v, std::uint32_t begin, std::uint32_t end, std::uint32_t level) {
        auto& n = nodes_[v];
        n.begin = begin;
        n.end = end;
        n.live = end - begin;
        n.epoch = epoch_;
        n.c = 0;
        n.d = 0;
        n.m = Weight(n.live);
        n.lo = {kPosInf, kPosInf};
        n.hi = {kNegInf, kNegInf};
        std::tie(n.gx, n.gy) = fit_slope(begin, end);
        n.zlo = Wide(~static_cast<unsigned __int128>(0) >> 1);
        n.zhi = -n.zlo - 1;
        for (auto s = begin; s < end; ++s) {
            const auto& p = slots_[s].p;
            n.lo = {std::min(n.lo[0], p.x), std::min(n.lo[1], p.y)};
            n.hi = {std::max(n.hi[0], p.x), std::max(n.hi[1], p.y)};
            const Wide z = Wide(p.z) - Wide(n.gx) * p.x - Wide(n.gy) * p.y;
            n.zlo = std::min(n.zlo, z);
            n.zhi = std::max(n.zhi, z);
        }
        if (end - begin <= cfg_.leaf_size) {
            n.leaf = true;
            for (auto s = begin; s < end; ++s) {
                slot_leaf_[s] = v;
                slots_[s].epoch = epoch_;
                slots_[s].c = 0;
            }
            return;
        }
        n.leaf = false;
        // up to three nested median splits, each along the direction whose
        // halves have the smallest total sheared-box volume; parts that fit
        // in a leaf are not split further
        std::vector<std::uint32_t> cuts{begin, end};
        for (int j = 0; j < 3; ++j) {
            std::vector<std::uint32_t> next;
            for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
                const auto a = cuts[i], b = cuts[i + 1];
                next.push_back(a);
                if (b - a > cfg_.leaf_size) {
                    const auto mid = a + (b - a) / 2;
                    std::size_t best = 0;
                    long double best_vol = 0;
                    for (std::size_t d = 0; d < kDirs.size(); ++d) {
                        split_along(a, b, kDirs[d]);
                        const auto vol = box_volume(a, mid) + box_volume(mid, b);
                        if (d == 0 || vol < best_vol) {
                            best = d;
                            best_vol = vol;
                        }
                    }
                    if (best != kDirs.size() - 1) split_along(a, b, kDirs[best]);
                    next.push_back(mid);
                }
            }
            next.push_back(end);
            cuts = std::move(next);
        }
        const auto first = std::uint32_t(nodes_.size());
        const auto count = std::uint32_t(cuts.size() - 1);
        nodes_[v].first = first;
        nodes_[v].count = count;
        for (std::uint32_t i = 0; i < count; ++i) {
            nodes_.push_back({});
            nodes_.back().parent = v;
        }
        for (std::uint32_t i = 0; i < count; ++i) build(first + i, cuts[i], cuts[i + 1], level + 1);
    }

    static Weight skip(Rng& rng, double rho) {
        const double u = 1.0 - uniform01(rng);
        const long double k = std::floor((long double)std::log(u) / (long double)std::log1p(-rho));
        if (!(k < 1.0e36L)) return ~Weight{0} >> 1;
        return Weight(k);
    }

    template <class Out>
    void emit_all(std::uint32_t v, std::uint64_t e, Out& out) const {
        const auto& n = nodes_[v];
        if (n.leaf) {
            for (auto s = n.begin; s < n.end; ++s)
                if (slots_[s].alive) out(slots_[s].id, std::uint64_t(pow2(std::uint32_t(e + sc(s)))));
            return;
        }
        for (auto ch = n.first; ch < n.first + n.count; ++ch)
            if (nodes_[ch].live > 0) emit_all(ch, e + c(ch), out);
    }

    Id locate(std::uint32_t v, std::uint64_t e, Weight pos) const {
        for (;;) {
            const auto& n = nodes_[v];
            if (n.leaf) {
                for (auto s = n.begin; s < n.end; ++s) {
                    if (!slots_[s].alive) continue;
                    const Weight w = pow2(std::uint32_t(e + sc(s)));
                    if (pos < w) return slots_[s].id;
                    pos -= w;
                }
                throw Anomaly("partition tree: sample position beyond subtree weight");
            }
            bool moved = false;
            for (auto ch = n.first; ch < n.first + n.count; ++ch) {
                if (nodes_[ch].live == 0) continue;
                const Weight w = pow2(std::uint32_t(e + c(ch))) * m(ch);
                if (pos < w) {
                    e += c(ch);
                    v = ch;
                    moved = true;
                    break;
                }
                pos -= w;
            }
            if (!moved) throw Anomaly("partition tree: sample position beyond subtree weight");
        }
    }

    PartitionTreeConfig cfg_;
    std::vector<Slot> slots_;
    std::vector<std::uint32_t> slot_leaf_;
    std::vector<Node> nodes_;
    std::vector<Buffered> buffer_;
    std::unordered_map<Id, Loc> where_;
    std::size_t live_ = 0, dead_ = 0, built_ = 0, rebuilds_ = 0;
    std::uint64_t epoch_ = 1;
};

}  // namespace geocover::halfspace
