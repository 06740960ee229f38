#pragma once

#include <geocover/mwu.hpp>
#include <geocover/squares/cover_tree.hpp>
#include <geocover/squares/small_opt.hpp>

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace geocover::squares {

struct DispatchResult {
    enum class Path { small, large };
    Path path = Path::small;
    bool feasible = true;
    std::vector<std::uint32_t> cover;
    std::optional<std::uint32_t> witness;
    MwuStats mwu;  // last small-path run
    std::uint64_t guess_t = 0;
    std::size_t leaves_used = 0;
    std::size_t canonical_rects = 0;
};

inline const char* path_name(DispatchResult::Path p) { return p == DispatchResult::Path::small ? "small" : "large"; }

/// Largest t the small path tries: floor(n^(1/3)), at least 1.
inline std::uint64_t small_opt_limit(std::uint64_t n) {
    auto t = std::uint64_t(std::cbrt(double(n)));
    while ((t + 1) * (t + 1) * (t + 1) <= n) ++t;
    while (t > 1 && t * t * t > n) --t;
    return std::max<std::uint64_t>(t, 1);
}

/// Dynamic squares engine: the live index for the small-OPT oracles and the
/// cover tree for large OPT, kept in step under updates. The cover tree is
/// rebuilt with a fresh b_leaf whenever n drifts by a factor of two.
class SquaresEngine {
public:
    explicit SquaresEngine(std::uint64_t seed = 1, double c0 = 8.0) : seed_(seed), c0_(c0) { reset_tree(); }

    explicit SquaresEngine(const SquaresInstance& inst, std::uint64_t seed = 1, double c0 = 8.0)
        : seed_(seed), c0_(c0), idx_(inst) {
        reset_tree();
    }

    std::uint32_t insert_point(const Point2& p) {
        const auto id = idx_.insert_point(p);
        tree_->insert_point(id, p);
        drift();
        return id;
    }
    void erase_point(std::uint32_t id) {
        idx_.erase_point(id);
        tree_->erase_point(id);
        drift();
    }
    std::uint32_t insert_object(const Square& s) {
        const auto id = idx_.insert_object(s);
        tree_->insert_square(id, s);
        drift();
        return id;
    }
    void erase_object(std::uint32_t id) {
        idx_.erase_object(id);
        tree_->erase_square(id);
        drift();
    }

    const SquaresIndex& index() const noexcept { return idx_; }
    const CoverTree& tree() const noexcept { return *tree_; }
    std::uint64_t n() const noexcept { return idx_.n_points() + idx_.n_objects(); }

    /// Small path for t <= n^(1/3); large path if every such guess is too small.
    DispatchResult solve(std::optional<std::uint64_t> seed = std::nullopt) {
        const auto s = seed.value_or(seed_);
        DispatchResult res;
        const auto limit = small_opt_limit(n());
        for (std::uint64_t t = 1;; t = std::min(2 * t, limit)) {
            auto out = small_opt_solve(idx_, t, s, c0_);
            res.mwu = out.stats;
            res.guess_t = t;
            if (out.status == MwuOutcome::Status::cover) {
                res.cover = std::move(out.cover);
                return res;
            }
            if (out.status == MwuOutcome::Status::infeasible) {
                res.feasible = false;
                res.witness = out.witness;
                return res;
            }
            if (t >= limit) break;
        }
        return solve_large(res);
    }

    DispatchResult solve_large(DispatchResult res = {}) {
        res.path = DispatchResult::Path::large;
        auto big = tree_->solve();
        res.feasible = big.feasible;
        res.cover = std::move(big.cover);
        res.witness = big.witness;
        res.leaves_used = big.leaves_used;
        res.canonical_rects = big.canonical_rects;
        return res;
    }

    DispatchResult solve_small_only(std::uint64_t max_t, std::optional<std::uint64_t> seed = std::nullopt) {
        DispatchResult res;
        auto out = guess_loop([&](std::uint64_t t) { return small_opt_solve(idx_, t, seed.value_or(seed_), c0_); },
                              std::max<std::uint64_t>(max_t, 1));
        res.mwu = out.stats;
        res.guess_t = out.stats.t;
        res.feasible = out.status != MwuOutcome::Status::infeasible;
        res.cover = std::move(out.cover);
        res.witness = out.witness;
        return res;
    }

private:
    void drift() {
        const auto cur = n();
        if (cur > 2 * built_n_ || 2 * cur < built_n_) reset_tree();
    }

    void reset_tree() {
        built_n_ = std::max<std::uint64_t>(n(), 16);
        CoverTreeConfig cfg;
        cfg.b_leaf = default_b_leaf(built_n_);
        cfg.seed = seed_;
        std::vector<std::pair<std::uint32_t, Point2>> pts;
        std::vector<IdSquare> sqs;
        for (std::uint32_t p = 0; p < idx_.point_slots(); ++p)
            if (idx_.point_live(p)) pts.emplace_back(p, idx_.point(p));
        for (std::uint32_t o = 0; o < idx_.object_slots(); ++o)
            if (idx_.object_live(o)) sqs.emplace_back(o, idx_.object(o));
        tree_ = std::make_unique<CoverTree>(CoverTree::build(pts, sqs, cfg));
    }

    std::uint64_t seed_;
    double c0_;
    SquaresIndex idx_;
    std::unique_ptr<CoverTree> tree_;
    std::uint64_t built_n_ = 16;
};

}  // namespace geocover::squares
