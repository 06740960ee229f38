#pragma once

#include <geocover/geom.hpp>

#include <algorithm>
#include <bit>
#include <cstdint>
#include <limits>
#include <numeric>
#include <span>
#include <vector>

namespace geocover::oracle {

struct ExactResult {
    bool feasible = true;
    std::uint32_t opt_size = 0;
    std::vector<std::uint32_t> witness;
    std::uint64_t explored_nodes = 0;
    bool timed_out = false;
};

namespace detail {

class Bits {
public:
    Bits() = default;
    explicit Bits(std::size_t n) : words_((n + 63) / 64, 0) {}
    void set(std::size_t i) { words_[i >> 6] |= std::uint64_t{1} << (i & 63); }
    bool test(std::size_t i) const { return (words_[i >> 6] >> (i & 63)) & 1; }
    bool any() const {
        return std::any_of(words_.begin(), words_.end(), [](auto w) { return w != 0; });
    }
    std::size_t count() const {
        std::size_t c = 0;
        for (auto w : words_) c += std::popcount(w);
        return c;
    }
    std::size_t count_and(const Bits& o) const {
        std::size_t c = 0;
        for (std::size_t i = 0; i < words_.size(); ++i) c += std::popcount(words_[i] & o.words_[i]);
        return c;
    }
    void subtract(const Bits& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= ~o.words_[i];
    }
    void intersect(const Bits& o) {
        for (std::size_t i = 0; i < words_.size(); ++i) words_[i] &= o.words_[i];
    }
    bool subset_of(const Bits& o) const {
        for (std::size_t i = 0; i < words_.size(); ++i)
            if (words_[i] & ~o.words_[i]) return false;
        return true;
    }
    template <class F>
    void for_each(F&& f) const {
        for (std::size_t w = 0; w < words_.size(); ++w) {
            auto bits = words_[w];
            while (bits) {
                const int b = std::countr_zero(bits);
                f(w * 64 + std::size_t(b));
                bits &= bits - 1;
            }
        }
    }
    friend bool operator==(const Bits&, const Bits&) = default;

private:
    std::vector<std::uint64_t> words_;
};

class BranchAndBound {
public:
    BranchAndBound(std::vector<Bits> sets, std::vector<std::vector<std::uint32_t>> covering,
                   std::size_t n_points, std::uint64_t budget)
        : sets_(std::move(sets)), covering_(std::move(covering)), n_points_(n_points), budget_(budget) {}

    ExactResult run() {
        Bits uncovered(n_points_);
        for (std::size_t i = 0; i < n_points_; ++i) uncovered.set(i);
        excluded_.assign(sets_.size(), false);
        best_ = greedy(uncovered);
        std::vector<std::uint32_t> chosen;
        dfs(uncovered, chosen);
        ExactResult r;
        r.opt_size = std::uint32_t(best_.size());
        r.witness = best_;
        std::sort(r.witness.begin(), r.witness.end());
        r.explored_nodes = nodes_;
        r.timed_out = nodes_ >= budget_;
        return r;
    }

private:
    std::vector<std::uint32_t> greedy(Bits uncovered) const {
        std::vector<std::uint32_t> out;
        while (uncovered.any()) {
            std::size_t best = 0, best_gain = 0;
            for (std::size_t s = 0; s < sets_.size(); ++s) {
                const auto g = sets_[s].count_and(uncovered);
                if (g > best_gain) best_gain = g, best = s;
            }
            out.push_back(std::uint32_t(best));
            uncovered.subtract(sets_[best]);
        }
        return out;
    }

    // Points that pairwise share no usable set each need their own set.
    std::size_t packing_bound(const Bits& uncovered) const {
        std::vector<std::pair<std::size_t, std::uint32_t>> order;
        uncovered.for_each([&](std::size_t p) {
            std::size_t deg = 0;
            for (auto s : covering_[p]) deg += excluded_[s] ? 0 : 1;
            order.emplace_back(deg, std::uint32_t(p));
        });
        std::sort(order.begin(), order.end());
        std::vector<char> used(sets_.size(), 0);
        std::size_t bound = 0;
        for (auto [deg, p] : order) {
            bool free = true;
            for (auto s : covering_[p])
                if (!excluded_[s] && used[s]) {
                    free = false;
                    break;
                }
            if (!free) continue;
            ++bound;
            for (auto s : covering_[p])
                if (!excluded_[s]) used[s] = 1;
        }
        return bound;
    }

    void dfs(const Bits& uncovered, std::vector<std::uint32_t>& chosen) {
        if (nodes_ >= budget_) return;
        ++nodes_;
        if (!uncovered.any()) {
            if (chosen.size() < best_.size()) best_ = chosen;
            return;
        }
        if (chosen.size() + 1 >= best_.size()) return;
        if (chosen.size() + packing_bound(uncovered) >= best_.size()) return;

        // Branch on the uncovered point with the fewest usable sets.
        std::size_t pivot = 0, pivot_deg = std::numeric_limits<std::size_t>::max();
        uncovered.for_each([&](std::size_t p) {
            std::size_t deg = 0;
            for (auto s : covering_[p]) deg += excluded_[s] ? 0 : 1;
            if (deg < pivot_deg) pivot_deg = deg, pivot = p;
        });
        if (pivot_deg == 0) return;

        std::vector<std::pair<std::size_t, std::uint32_t>> options;
        for (auto s : covering_[pivot])
            if (!excluded_[s]) options.emplace_back(sets_[s].count_and(uncovered), s);
        std::sort(options.begin(), options.end(), [](auto& a, auto& b) {
            return a.first != b.first ? a.first > b.first : a.second < b.second;
        });
        // Drop options dominated by another option on the uncovered points.
        std::vector<std::uint32_t> kept;
        for (std::size_t i = 0; i < options.size(); ++i) {
            bool dominated = false;
            for (std::size_t j = 0; j < options.size() && !dominated; ++j) {
                if (i == j) continue;
                const bool smaller = options[i].first < options[j].first ||
                                     (options[i].first == options[j].first && j < i);
                if (!smaller) continue;
                Bits lhs = sets_[options[i].second];
                lhs.intersect(uncovered);
                dominated = lhs.subset_of(sets_[options[j].second]);
            }
            if (!dominated) kept.push_back(options[i].second);
        }

        std::vector<std::uint32_t> newly_excluded;
        for (auto s : kept) {
            Bits next = uncovered;
            next.subtract(sets_[s]);
            chosen.push_back(s);
            dfs(next, chosen);
            chosen.pop_back();
            excluded_[s] = true;
            newly_excluded.push_back(s);
            if (nodes_ >= budget_) break;
        }
        for (auto s : newly_excluded) excluded_[s] = false;
    }

    std::vector<Bits> sets_;
    std::vector<std::vector<std::uint32_t>> covering_;
    std::size_t n_points_;
    std::uint64_t budget_;
    std::vector<bool> excluded_;
    std::vector<std::uint32_t> best_;
    std::uint64_t nodes_ = 0;
};

}  // namespace detail

/// Exact minimum set cover by branch and bound: branch on the uncovered
/// point with fewest candidate objects, prune with a greedy incumbent and a
/// disjoint-point packing lower bound. Intended for |X| + |S| up to ~100.
template <class Point, class Object>
ExactResult exact_opt(std::span<const Point> points, std::span<const Object> objects,
                      std::uint64_t node_budget = 10'000'000) {
    const std::size_t n = points.size();
    std::vector<detail::Bits> raw(objects.size(), detail::Bits(n));
    for (std::size_t s = 0; s < objects.size(); ++s)
        for (std::size_t p = 0; p < n; ++p)
            if (contains(objects[s], points[p])) raw[s].set(p);

    ExactResult r;
    for (std::size_t p = 0; p < n; ++p) {
        bool hit = false;
        for (std::size_t s = 0; s < objects.size() && !hit; ++s) hit = raw[s].test(p);
        if (!hit) {
            r.feasible = false;
            return r;
        }
    }
    if (n == 0) return r;

    // Duplicate/dominated objects: keep one representative of each maximal set.
    std::vector<std::uint32_t> keep;
    for (std::size_t s = 0; s < objects.size(); ++s) {
        if (!raw[s].any()) continue;
        bool dominated = false;
        for (std::size_t t = 0; t < objects.size() && !dominated; ++t) {
            if (t == s || !raw[s].subset_of(raw[t])) continue;
            dominated = !(raw[t] == raw[s]) || t < s;
        }
        if (!dominated) keep.push_back(std::uint32_t(s));
    }
    std::vector<detail::Bits> sets;
    std::vector<std::vector<std::uint32_t>> covering(n);
    for (std::uint32_t k = 0; k < keep.size(); ++k) {
        sets.push_back(raw[keep[k]]);
        sets.back().for_each([&](std::size_t p) { covering[p].push_back(k); });
    }
    detail::BranchAndBound bb(std::move(sets), std::move(covering), n, node_budget);
    r = bb.run();
    for (auto& w : r.witness) w = keep[w];
    std::sort(r.witness.begin(), r.witness.end());
    return r;
}

template <class Inst>
ExactResult exact_opt(const Inst& inst, std::uint64_t node_budget = 10'000'000) {
    using P = typename Inst::point_type;
    using O = typename Inst::object_type;
    return exact_opt<P, O>(std::span<const P>(inst.points), std::span<const O>(inst.objects), node_budget);
}

/// Exhaustive minimum over all subsets; only for |S| <= 20.
template <class Inst>
ExactResult exhaustive_opt(const Inst& inst) {
    const std::size_t m = inst.objects.size();
    GEOCOVER_REQUIRE(m <= 20, "exhaustive_opt supports at most 20 objects");
    ExactResult best;
    best.feasible = false;
    for (std::uint32_t mask = 0; mask < (1u << m); ++mask) {
        const auto k = std::uint32_t(std::popcount(mask));
        if (best.feasible && k >= best.opt_size) continue;
        bool ok = true;
        for (const auto& p : inst.points) {
            bool hit = false;
            for (std::size_t s = 0; s < m && !hit; ++s)
                hit = ((mask >> s) & 1) && contains(inst.objects[s], p);
            if (!hit) {
                ok = false;
                break;
            }
        }
        if (!ok) continue;
        best.feasible = true;
        best.opt_size = k;
        best.witness.clear();
        for (std::size_t s = 0; s < m; ++s)
            if ((mask >> s) & 1) best.witness.push_back(std::uint32_t(s));
    }
    return best;
}

}  // namespace geocover::oracle
