#pragma once

#include <geocover/geom.hpp>
#include <geocover/mwu.hpp>
#include <geocover/rng.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace geocover {

/// Point -> containing objects, and the transpose. Both sorted by id.
struct ContainmentLists {
    std::vector<std::vector<std::uint32_t>> containing;  // per point
    std::vector<std::vector<std::uint32_t>> members;     // per object

    std::size_t n_points() const noexcept { return containing.size(); }
    std::size_t n_objects() const noexcept { return members.size(); }

    static ContainmentLists from_point_lists(std::vector<std::vector<std::uint32_t>> containing,
                                             std::size_t n_objects) {
        ContainmentLists c;
        c.members.assign(n_objects, {});
        for (std::uint32_t p = 0; p < containing.size(); ++p) {
            std::sort(containing[p].begin(), containing[p].end());
            for (auto o : containing[p]) c.members[o].push_back(p);
        }
        c.containing = std::move(containing);
        return c;
    }
};

/// Quadratic construction by direct membership tests.
template <class Point, class Object>
ContainmentLists brute_containment(std::span<const Point> points, std::span<const Object> objects) {
    std::vector<std::vector<std::uint32_t>> lists(points.size());
    for (std::uint32_t p = 0; p < points.size(); ++p)
        for (std::uint32_t o = 0; o < objects.size(); ++o)
            if (contains(objects[o], points[p])) lists[p].push_back(o);
    return ContainmentLists::from_point_lists(std::move(lists), objects.size());
}

/// MWU oracles over explicit containment lists: depths in R are kept
/// incrementally per point, and light points are found by a cursor that
/// only moves forward within a round (depths never decrease inside one).
class ExplicitOracles {
public:
    explicit ExplicitOracles(const ContainmentLists& lists)
        : lists_(&lists),
          exps_(lists.n_objects(), 0),
          depth_r_(lists.n_points(), 0) {}

    std::uint64_t object_count() const noexcept { return lists_->n_objects(); }

    void reset_multiplicities() {
        for (auto o : touched_) exps_[o] = 0;
        touched_.clear();
    }

    void sample_all(double rho, Rng& rng) {
        R_.clear();
        std::fill(depth_r_.begin(), depth_r_.end(), 0);
        cursor_ = 0;
        for (auto o : bernoulli_indices(rng, lists_->n_objects(), rho))
            if (exps_[o] == 0) add_copies(o, 1);
        for (auto o : touched_) add_copies(o, std::uint64_t(binomial(rng, pow2(exps_[o]), rho)));
    }

    std::optional<std::uint32_t> find_light_point(std::uint64_t b) {
        while (cursor_ < depth_r_.size() && depth_r_[cursor_] > b) ++cursor_;
        if (cursor_ == depth_r_.size()) return std::nullopt;
        return std::uint32_t(cursor_);
    }

    Weight double_point(std::uint32_t p, double rho, Rng& rng) {
        Weight agg = 0;
        for (auto o : lists_->containing[p]) {
            const Weight m = pow2(exps_[o]);
            agg += m;
            if (exps_[o] == 0) touched_.push_back(o);
            ++exps_[o];
            // the m new copies each enter R with probability rho
            add_copies(o, std::uint64_t(binomial(rng, m, rho)));
        }
        return agg;
    }

    const SampleSet& sample() const noexcept { return R_; }

    std::optional<std::uint32_t> uncovered_point(const std::vector<std::uint32_t>& T) {
        mark_.assign(lists_->n_objects(), 0);
        for (auto o : T) mark_[o] = 1;
        for (std::uint32_t p = 0; p < lists_->n_points(); ++p) {
            bool hit = false;
            for (auto o : lists_->containing[p])
                if (mark_[o]) {
                    hit = true;
                    break;
                }
            if (!hit) return p;
        }
        return std::nullopt;
    }

    std::optional<std::uint32_t> sample_object_containing(std::uint32_t p) const {
        for (auto o : lists_->containing[p])
            if (R_.copies(o)) return o;
        return std::nullopt;
    }

    std::uint32_t exponent(std::uint32_t o) const { return exps_[o]; }
    std::uint64_t depth_in_sample(std::uint32_t p) const { return depth_r_[p]; }

private:
    void add_copies(std::uint32_t o, std::uint64_t k) {
        if (k == 0) return;
        R_.add(o, k);
        for (auto p : lists_->members[o]) depth_r_[p] += k;
    }

    const ContainmentLists* lists_;
    std::vector<std::uint32_t> exps_;
    std::vector<std::uint32_t> touched_;
    std::vector<std::uint64_t> depth_r_;
    std::size_t cursor_ = 0;
    SampleSet R_;
    std::vector<char> mark_;
};

static_assert(MwuOracles<ExplicitOracles>);

}  // namespace geocover
