#pragma once

#include <geocover/halfspace/partition_tree.hpp>
#include <geocover/mwu.hpp>
#include <geocover/rng.hpp>

#include <algorithm>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace geocover::halfspace {

/// Live points and halfspaces. The primal tree holds the points, the dual
/// tree holds the halfspaces as dual points (a, b, c). Ids are dense slots
/// assigned at insertion and never reused.
class HalfspaceIndex {
public:
    HalfspaceIndex() : primal_(PartitionTreeConfig{8, false}), dual_(PartitionTreeConfig{8, true}) {}

    explicit HalfspaceIndex(const HalfspacesInstance& inst) {
        std::vector<std::pair<std::uint32_t, Point3>> P, D;
        for (const auto& p : inst.points) {
            validate(p);
            P.emplace_back(std::uint32_t(points_.size()), p);
            points_.push_back(p);
            point_live_.push_back(1);
        }
        for (const auto& h : inst.objects) {
            validate(h);
            D.emplace_back(std::uint32_t(objects_.size()), halfspace_dual(h));
            objects_.push_back(h);
            object_live_.push_back(1);
        }
        n_points_ = P.size();
        n_objects_ = D.size();
        primal_ = PartitionTree(P, PartitionTreeConfig{8, false});
        dual_ = PartitionTree(D, PartitionTreeConfig{8, true});
    }

    std::uint32_t insert_point(const Point3& p) {
        validate(p);
        const auto id = std::uint32_t(points_.size());
        points_.push_back(p);
        point_live_.push_back(1);
        primal_.insert(id, p);
        ++n_points_;
        return id;
    }
    std::uint32_t insert_object(const Halfspace3& h) {
        validate(h);
        const auto id = std::uint32_t(objects_.size());
        objects_.push_back(h);
        object_live_.push_back(1);
        dual_.insert(id, halfspace_dual(h));
        ++n_objects_;
        return id;
    }
    void erase_point(std::uint32_t id) {
        if (id >= points_.size() || !point_live_[id]) throw LookupError("unknown point id " + std::to_string(id));
        point_live_[id] = 0;
        primal_.erase(id);
        --n_points_;
    }
    void erase_object(std::uint32_t id) {
        if (id >= objects_.size() || !object_live_[id]) throw LookupError("unknown object id " + std::to_string(id));
        object_live_[id] = 0;
        dual_.erase(id);
        --n_objects_;
    }

    bool point_live(std::uint32_t id) const { return id < points_.size() && point_live_[id]; }
    bool object_live(std::uint32_t id) const { return id < objects_.size() && object_live_[id]; }
    const Point3& point(std::uint32_t id) const { return points_.at(id); }
    const Halfspace3& object(std::uint32_t id) const { return objects_.at(id); }
    std::size_t n_points() const noexcept { return n_points_; }
    std::size_t n_objects() const noexcept { return n_objects_; }
    std::size_t point_slots() const noexcept { return points_.size(); }
    std::size_t object_slots() const noexcept { return objects_.size(); }

    PartitionTree& primal() noexcept { return primal_; }
    PartitionTree& dual() noexcept { return dual_; }
    const PartitionTree& primal() const noexcept { return primal_; }
    const PartitionTree& dual() const noexcept { return dual_; }

    HalfspacesInstance snapshot(std::vector<std::uint32_t>* point_ids = nullptr,
                                std::vector<std::uint32_t>* object_ids = nullptr) const {
        HalfspacesInstance out;
        for (std::uint32_t i = 0; i < points_.size(); ++i)
            if (point_live_[i]) {
                out.points.push_back(points_[i]);
                if (point_ids) point_ids->push_back(i);
            }
        for (std::uint32_t i = 0; i < objects_.size(); ++i)
            if (object_live_[i]) {
                out.objects.push_back(objects_[i]);
                if (object_ids) object_ids->push_back(i);
            }
        return out;
    }

private:
    std::vector<Point3> points_;
    std::vector<Halfspace3> objects_;
    std::vector<char> point_live_, object_live_;
    std::size_t n_points_ = 0, n_objects_ = 0;
    PartitionTree primal_, dual_;
};

struct HalfspaceStats {
    std::uint64_t registrations = 0;
    std::uint64_t crossed_total = 0;
    std::uint64_t max_crossed = 0;
    std::uint64_t dual_registrations = 0;
    std::uint64_t dual_crossed_total = 0;

    double mean_crossed() const {
        return registrations ? double(crossed_total) / double(registrations) : 0.0;
    }
};

/// Oracles over the two partition trees. Multiplicities live in the dual
/// tree's counters, depth in R in the primal tree's counters.
class HalfspaceOracles {
public:
    explicit HalfspaceOracles(HalfspaceIndex& idx) : idx_(&idx) {}

    std::uint64_t object_count() const noexcept { return idx_->n_objects(); }

    void reset_multiplicities() { idx_->dual().reset_counters(); }

    void sample_all(double rho, Rng& rng) {
        R_.clear();
        idx_->primal().reset_counters();
        std::vector<std::pair<std::uint32_t, std::uint64_t>> got;
        idx_->dual().sample_all(rho, rng, [&](std::uint32_t o, std::uint64_t k) { got.emplace_back(o, k); });
        for (const auto& [o, k] : got) add_to_R(o, k);
    }

    std::optional<std::uint32_t> find_light_point(std::uint64_t b) {
        const auto m = idx_->primal().min_depth();
        if (m && m->second <= b) return m->first;
        return std::nullopt;
    }

    Weight double_point(std::uint32_t p, double rho, Rng& rng) {
        Weight agg = 0;
        std::vector<std::pair<std::uint32_t, std::uint64_t>> got;
        auto& D = idx_->dual();
        const auto crossed = D.register_constraint(
            dual_constraint(idx_->point(p)), 1,
            [&](std::uint32_t v, std::uint64_t e) {
                agg += D.node_weight(v, e);
                D.sample_node(v, e, rho, rng, [&](std::uint32_t o, std::uint64_t k) { got.emplace_back(o, k); });
            },
            [&](std::uint32_t o, std::uint64_t e) {
                const Weight w = pow2(std::uint32_t(e));
                agg += w;
                const auto k = std::uint64_t(binomial(rng, w, rho));
                if (k) got.emplace_back(o, k);
            });
        ++stats_.dual_registrations;
        stats_.dual_crossed_total += crossed;
        for (const auto& [o, k] : got) add_to_R(o, k);
        return agg;
    }

    const SampleSet& sample() const noexcept { return R_; }

    std::optional<std::uint32_t> uncovered_point(const std::vector<std::uint32_t>& T) {
        auto& P = idx_->primal();
        P.reset_counters();
        for (auto o : T) note(P.register_constraint(primal_constraint(idx_->object(o)), 1));
        const auto m = P.min_depth();
        if (m && m->second == 0) return m->first;
        return std::nullopt;
    }

    std::optional<std::uint32_t> sample_object_containing(std::uint32_t p) const {
        for (const auto& [o, k] : R_.entries())
            if (contains(idx_->object(o), idx_->point(p))) return o;
        return std::nullopt;
    }

    std::uint64_t exponent(std::uint32_t o) const { return idx_->dual().count_of(o); }
    const HalfspaceStats& stats() const noexcept { return stats_; }

private:
    void add_to_R(std::uint32_t o, std::uint64_t k) {
        R_.add(o, k);
        note(idx_->primal().register_constraint(primal_constraint(idx_->object(o)), k));
    }
    void note(std::size_t crossed) {
        ++stats_.registrations;
        stats_.crossed_total += crossed;
        stats_.max_crossed = std::max<std::uint64_t>(stats_.max_crossed, crossed);
    }

    HalfspaceIndex* idx_;
    SampleSet R_;
    HalfspaceStats stats_;
};

static_assert(MwuOracles<HalfspaceOracles>);

/// One MWU run on the live halfspace instance for guess t.
inline MwuOutcome small_opt_solve(HalfspaceIndex& idx, std::uint64_t t, std::uint64_t seed = 1, double c0 = 8.0,
                                  HalfspaceStats* stats = nullptr) {
    HalfspaceOracles o(idx);
    MwuConfig cfg;
    cfg.t = t;
    cfg.c0 = c0;
    cfg.n = idx.n_points() + idx.n_objects();
    cfg.seed = seed;
    auto out = run_mwu(o, cfg);
    if (stats) *stats = o.stats();
    return out;
}

}  // namespace geocover::halfspace
