#pragma once

#include <geocover/mwu.hpp>
#include <geocover/range_tree.hpp>
#include <geocover/rng.hpp>
#include <geocover/squares/level.hpp>

#include <cstdint>
#include <optional>
#include <unordered_map>
#include <vector>

namespace geocover::squares {

/// Live points and squares with their range trees. Ids are dense slots
/// assigned at insertion and never reused.
class SquaresIndex {
public:
    SquaresIndex() : S4_(false) {}

    explicit SquaresIndex(const SquaresInstance& inst) : SquaresIndex() {
        for (const auto& p : inst.points) insert_point(p);
        for (const auto& s : inst.objects) insert_object(s);
    }

    std::uint32_t insert_point(const Point2& p) {
        validate(p);
        const auto id = std::uint32_t(points_.size());
        points_.push_back(p);
        point_live_.push_back(1);
        X_.insert(id, key_of(p));
        ++n_points_;
        return id;
    }
    std::uint32_t insert_object(const Square& s) {
        validate(s);
        const auto id = std::uint32_t(objects_.size());
        objects_.push_back(s);
        object_pos_.push_back(std::uint32_t(live_objects_.size()));
        live_objects_.push_back(id);
        S4_.insert(id, lift_square(s));
        return id;
    }
    void erase_point(std::uint32_t id) {
        if (id >= points_.size() || !point_live_[id]) throw LookupError("unknown point id " + std::to_string(id));
        point_live_[id] = 0;
        X_.erase(id);
        --n_points_;
    }
    void erase_object(std::uint32_t id) {
        if (id >= objects_.size() || object_pos_[id] == kDead) throw LookupError("unknown object id " + std::to_string(id));
        const auto pos = object_pos_[id];
        const auto last = live_objects_.back();
        live_objects_[pos] = last;
        object_pos_[last] = pos;
        live_objects_.pop_back();
        object_pos_[id] = kDead;
        S4_.erase(id);
    }

    bool point_live(std::uint32_t id) const { return id < points_.size() && point_live_[id]; }
    bool object_live(std::uint32_t id) const { return id < objects_.size() && object_pos_[id] != kDead; }
    const Point2& point(std::uint32_t id) const { return points_[id]; }
    const Square& object(std::uint32_t id) const { return objects_[id]; }
    std::size_t n_points() const noexcept { return n_points_; }
    std::size_t n_objects() const noexcept { return live_objects_.size(); }
    const std::vector<std::uint32_t>& live_objects() const noexcept { return live_objects_; }
    std::size_t point_slots() const noexcept { return points_.size(); }
    std::size_t object_slots() const noexcept { return objects_.size(); }

    const RangeTree2D& X() const noexcept { return X_; }
    const RangeTree4D& S4() const noexcept { return S4_; }

    template <class F>
    void for_each_containing(const Point2& p, F&& f) const {
        S4_.report(containing_box(p), f);
    }

    SquaresInstance snapshot(std::vector<std::uint32_t>* point_ids = nullptr,
                             std::vector<std::uint32_t>* object_ids = nullptr) const {
        SquaresInstance inst;
        for (std::uint32_t i = 0; i < points_.size(); ++i)
            if (point_live_[i]) {
                inst.points.push_back(points_[i]);
                if (point_ids) point_ids->push_back(i);
            }
        for (std::uint32_t i = 0; i < objects_.size(); ++i)
            if (object_pos_[i] != kDead) {
                inst.objects.push_back(objects_[i]);
                if (object_ids) object_ids->push_back(i);
            }
        return inst;
    }

private:
    static constexpr std::uint32_t kDead = ~std::uint32_t{0};
    std::vector<Point2> points_;
    std::vector<char> point_live_;
    std::vector<Square> objects_;
    std::vector<std::uint32_t> object_pos_;
    std::vector<std::uint32_t> live_objects_;
    std::size_t n_points_ = 0;
    RangeTree2D X_;
    RangeTree4D S4_;
};

/// Multiplicity exponents = depth of each square in the doubling log Q,
/// kept from the explicit log.
class ConeDepthIndex {
public:
    void clear() {
        for (auto o : touched_) exps_.erase(o);
        touched_.clear();
        Q_.clear();
    }
    std::uint32_t depth(std::uint32_t o) const {
        auto it = exps_.find(o);
        return it == exps_.end() ? 0 : it->second;
    }
    /// Appends p and bumps every containing square; calls f(id, old_exponent).
    template <class F>
    void append(const SquaresIndex& idx, const Point2& p, F&& f) {
        Q_.push_back(p);
        idx.for_each_containing(p, [&](std::uint32_t o) {
            auto [it, fresh] = exps_.try_emplace(o, 0);
            if (fresh) touched_.push_back(o);
            f(o, it->second);
            ++it->second;
        });
    }
    const std::vector<std::uint32_t>& touched() const noexcept { return touched_; }
    const std::vector<Point2>& log() const noexcept { return Q_; }

private:
    std::unordered_map<std::uint32_t, std::uint32_t> exps_;
    std::vector<std::uint32_t> touched_;
    std::vector<Point2> Q_;
};

struct SmallOptStats {
    std::size_t level_builds = 0;
    std::size_t max_level_cells = 0;
    std::size_t max_level_sample = 0;
};

/// MWU oracles for squares: light points through the (<= b)-level of R and
/// range queries on X; multiplicities through the cone-depth index and the
/// 4D tree on lifted squares.
class SquaresOracles {
public:
    explicit SquaresOracles(const SquaresIndex& idx) : idx_(&idx) {}

    std::uint64_t object_count() const noexcept { return idx_->n_objects(); }

    void reset_multiplicities() { cone_.clear(); }

    void sample_all(double rho, Rng& rng) {
        R_.clear();
        ++version_;
        const auto& live = idx_->live_objects();
        for (auto pos : bernoulli_indices(rng, live.size(), rho))
            if (cone_.depth(live[pos]) == 0) R_.add(live[pos], 1);
        for (auto o : cone_.touched())
            if (idx_->object_live(o)) R_.add(o, std::uint64_t(binomial(rng, pow2(cone_.depth(o)), rho)));
    }

    std::optional<std::uint32_t> find_light_point(std::uint64_t b) {
        const auto level = build_level(sample_squares(), b, version_);
        note_level(level);
        return squares::find_light_point(level, idx_->X(), version_);
    }

    Weight double_point(std::uint32_t p, double rho, Rng& rng) {
        return weighted_sample_containing(idx_->point(p), rho, rng);
    }

    /// Appends p to Q; each of the 2^depth new copies of a containing square
    /// joins R with probability rho. Returns the pre-doubling aggregate.
    Weight weighted_sample_containing(const Point2& p, double rho, Rng& rng) {
        Weight agg = 0;
        std::vector<std::pair<std::uint32_t, Weight>> grown;
        cone_.append(*idx_, p, [&](std::uint32_t o, std::uint32_t e) {
            const Weight m = pow2(e);
            agg += m;
            grown.emplace_back(o, m);
        });
        std::sort(grown.begin(), grown.end());
        for (const auto& [o, m] : grown) {
            const auto k = std::uint64_t(binomial(rng, m, rho));
            if (k) {
                R_.add(o, k);
                ++version_;
            }
        }
        return agg;
    }

    const SampleSet& sample() const noexcept { return R_; }

    std::optional<std::uint32_t> uncovered_point(const std::vector<std::uint32_t>& T) {
        std::vector<std::pair<Square, std::uint64_t>> sq;
        sq.reserve(T.size());
        for (auto o : T) sq.emplace_back(idx_->object(o), 1);
        const auto level = build_level(sq, 0, 0);
        return squares::find_light_point(level, idx_->X(), 0);
    }

    std::optional<std::uint32_t> sample_object_containing(std::uint32_t p) const {
        for (const auto& [o, k] : R_.entries())
            if (contains(idx_->object(o), idx_->point(p))) return o;
        return std::nullopt;
    }

    std::uint32_t exponent(std::uint32_t o) const { return cone_.depth(o); }
    const ConeDepthIndex& cone() const noexcept { return cone_; }
    std::uint64_t version() const noexcept { return version_; }
    const SmallOptStats& stats() const noexcept { return stats_; }

    std::vector<std::pair<Square, std::uint64_t>> sample_squares() const {
        std::vector<std::pair<Square, std::uint64_t>> out;
        out.reserve(R_.distinct());
        for (const auto& [o, k] : R_.entries()) out.emplace_back(idx_->object(o), k);
        return out;
    }

private:
    void note_level(const LevelStructure& L) {
        ++stats_.level_builds;
        stats_.max_level_cells = std::max(stats_.max_level_cells, L.cells.size());
        stats_.max_level_sample = std::max<std::size_t>(stats_.max_level_sample, R_.total());
    }

    const SquaresIndex* idx_;
    ConeDepthIndex cone_;
    SampleSet R_;
    std::uint64_t version_ = 0;
    SmallOptStats stats_;
};

static_assert(MwuOracles<SquaresOracles>);

/// One MWU run on the live squares instance for guess t.
inline MwuOutcome small_opt_solve(const SquaresIndex& idx, std::uint64_t t, std::uint64_t seed = 1,
                                  double c0 = 8.0, SmallOptStats* stats = nullptr) {
    SquaresOracles o(idx);
    MwuConfig cfg;
    cfg.t = t;
    cfg.c0 = c0;
    cfg.n = idx.n_points() + idx.n_objects();
    cfg.seed = seed;
    auto out = run_mwu(o, cfg);
    if (stats) *stats = o.stats();
    return out;
}

}  // namespace geocover::squares
