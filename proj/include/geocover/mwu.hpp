#pragma once

#include <geocover/geom.hpp>
#include <geocover/rng.hpp>

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace geocover {

/// Multiset of object ids with copy counts, iterated in id order.
class SampleSet {
public:
    void clear() {
        copies_.clear();
        total_ = 0;
    }
    void add(std::uint32_t id, std::uint64_t k) {
        if (k == 0) return;
        copies_[id] += k;
        total_ += k;
    }
    std::uint64_t total() const noexcept { return total_; }
    std::size_t distinct() const noexcept { return copies_.size(); }
    bool empty() const noexcept { return total_ == 0; }
    std::uint64_t copies(std::uint32_t id) const {
        auto it = copies_.find(id);
        return it == copies_.end() ? 0 : it->second;
    }
    const std::map<std::uint32_t, std::uint64_t>& entries() const noexcept { return copies_; }
    std::vector<std::uint32_t> ids() const {
        std::vector<std::uint32_t> out;
        out.reserve(copies_.size());
        for (const auto& [id, k] : copies_) out.push_back(id);
        return out;
    }

private:
    std::map<std::uint32_t, std::uint64_t> copies_;
    std::uint64_t total_ = 0;
};

struct MwuConfig {
    std::uint64_t t = 1;
    double c0 = 8.0;
    std::uint64_t n = 2;  // |X| + |S|
    std::uint64_t seed = 1;
    std::optional<std::uint32_t> round_cap;  // default 4(ceil(log2(n/t)) + 2)
};

/// ceil(log2(n / t)), never negative.
inline std::uint32_t log2_ratio_ceil(std::uint64_t n, std::uint64_t t) {
    t = std::max<std::uint64_t>(t, 1);
    std::uint32_t k = 0;
    while ((Wide(t) << k) < Wide(n)) ++k;
    return k;
}

inline std::uint32_t default_round_cap(std::uint64_t n, std::uint64_t t) {
    return 4 * (log2_ratio_ceil(n, t) + 2);
}

/// Light threshold b = (c0/2) log n.
inline std::uint64_t light_threshold(double c0, std::uint64_t n) {
    return std::uint64_t(std::floor(c0 / 2.0 * double(log2_ceil(n))));
}

struct MwuStats {
    std::uint64_t t = 0;
    std::uint32_t rounds = 0;
    std::uint64_t doubling_steps = 0;
    double max_round_growth = 1.0;  // max over completed rounds of shat_end / shat_start
    std::vector<double> round_growth;
    std::uint64_t max_sample_size = 0;
    std::uint32_t net_attempts = 0;
    std::uint32_t net_repairs = 0;
    std::string shat_final;  // decimal |S-hat| at the end
};

struct MwuOutcome {
    enum class Status { cover, guess_too_small, infeasible };
    Status status = Status::guess_too_small;
    std::vector<std::uint32_t> cover;      // object ids, sorted
    std::optional<std::uint32_t> witness;  // uncoverable point id
    MwuStats stats;
    bool is_cover() const noexcept { return status == Status::cover; }
};

inline const char* status_name(MwuOutcome::Status s) {
    switch (s) {
        case MwuOutcome::Status::cover: return "cover";
        case MwuOutcome::Status::guess_too_small: return "guess_too_small";
        case MwuOutcome::Status::infeasible: return "infeasible";
    }
    return "?";
}

// ---------------------------------------------------------------- net builder

struct NetResult {
    std::vector<std::uint32_t> ids;  // sorted, subset of distinct(R)
    std::uint32_t attempts = 0;
    std::uint32_t repairs = 0;
};

/// Sample-and-verify eps-net of the multiset R. `uncovered(T)` returns a
/// point that must be covered but is not (or none); `cover_of(p)` returns
/// an object of R containing p. Draw counts grow geometrically from
/// (1/64)(1/eps)ln(2/eps) to (1/eps)ln(2/eps); if no draw verifies, the
/// last one is completed greedily from the reported points.
template <class Uncovered, class CoverOf>
NetResult build_net(const SampleSet& R, double eps, Rng& rng, Uncovered&& uncovered, CoverOf&& cover_of) {
    GEOCOVER_REQUIRE(eps > 0.0 && eps <= 1.0, "net eps must lie in (0, 1]");
    NetResult res;
    if (R.empty()) {
        ++res.attempts;
        if (auto p = uncovered(res.ids)) {
            auto o = cover_of(*p);
            GEOCOVER_CHECK(o.has_value(), "net: deep point contained in no sample object");
        }
        return res;
    }
    std::vector<std::uint32_t> ids;
    std::vector<Weight> weights;
    for (const auto& [id, k] : R.entries()) {
        ids.push_back(id);
        weights.push_back(k);
    }
    const double base = std::log(2.0 / eps) / eps;
    std::vector<std::uint32_t> T;
    for (double C = 1.0 / 64; C <= 1.0 + 1e-12; C *= 2) {
        ++res.attempts;
        const auto draws = std::max<Weight>(1, Weight(std::ceil(C * base)));
        const auto split = multinomial(rng, draws, weights);
        T.clear();
        for (std::size_t i = 0; i < ids.size(); ++i)
            if (split[i] > 0) T.push_back(ids[i]);
        if (!uncovered(T)) {
            res.ids = T;
            return res;
        }
    }
    for (;;) {
        auto p = uncovered(T);
        if (!p) break;
        auto o = cover_of(*p);
        GEOCOVER_CHECK(o.has_value(), "net: deep point contained in no sample object");
        GEOCOVER_CHECK(std::find(T.begin(), T.end(), *o) == T.end(), "net: repair object does not cover the point");
        T.insert(std::upper_bound(T.begin(), T.end(), *o), *o);
        ++res.repairs;
    }
    res.ids = T;
    return res;
}

// ---------------------------------------------------------------- engine

/// Oracle bundle driving one MWU run. Implementations own the sample R
/// and the multiplicities (2^depth in the doubling log Q).
template <class O>
concept MwuOracles = requires(O& o, const O& co, Rng& rng, double rho, std::uint32_t pid, std::uint64_t b,
                              const std::vector<std::uint32_t>& T) {
    { co.object_count() } -> std::convertible_to<std::uint64_t>;
    { o.reset_multiplicities() };
    { o.sample_all(rho, rng) };                                            // R := Bernoulli(rho) per copy
    { o.find_light_point(b) } -> std::same_as<std::optional<std::uint32_t>>;  // depth_R <= b
    { o.double_point(pid, rho, rng) } -> std::same_as<Weight>;             // returns pre-doubling aggregate
    { co.sample() } -> std::convertible_to<const SampleSet&>;
    { o.uncovered_point(T) } -> std::same_as<std::optional<std::uint32_t>>;
    { o.sample_object_containing(pid) } -> std::same_as<std::optional<std::uint32_t>>;
};

/// One MWU run for a fixed guess t.
template <MwuOracles O>
MwuOutcome run_mwu(O& oracles, const MwuConfig& cfg) {
    GEOCOVER_REQUIRE(cfg.t >= 1, "mwu: t must be positive");
    GEOCOVER_REQUIRE(cfg.c0 >= 2.0, "mwu: c0 must be at least 2");
    MwuOutcome out;
    out.stats.t = cfg.t;
    Rng rng(mix_seed(cfg.seed, cfg.t));
    const auto m = std::uint64_t(oracles.object_count());
    const auto logn = log2_ceil(cfg.n);
    const auto b = light_threshold(cfg.c0, cfg.n);
    const auto cap = cfg.round_cap.value_or(default_round_cap(cfg.n, cfg.t));

    oracles.reset_multiplicities();
    Weight shat = m;
    for (;;) {
        if (out.stats.rounds >= cap) {
            out.status = MwuOutcome::Status::guess_too_small;
            out.stats.shat_final = to_string(shat);
            return out;
        }
        ++out.stats.rounds;
        double rho = 1.0;
        if (shat > 0) rho = std::min(1.0, cfg.c0 * double(cfg.t) * double(logn) / double(shat));
        oracles.sample_all(rho, rng);
        const Weight shat_start = shat;
        std::uint64_t steps_round = 0;
        bool restart = false;
        for (;;) {
            out.stats.max_sample_size = std::max(out.stats.max_sample_size, oracles.sample().total());
            const auto p = oracles.find_light_point(b);
            if (!p) break;
            const Weight agg = oracles.double_point(*p, rho, rng);
            if (agg == 0) {
                out.status = MwuOutcome::Status::infeasible;
                out.witness = *p;
                out.stats.shat_final = to_string(shat);
                return out;
            }
            shat += agg;
            ++out.stats.doubling_steps;
            if (++steps_round > cfg.t) {
                restart = true;
                break;
            }
        }
        const double growth = double(shat) / double(std::max<Weight>(shat_start, 1));
        out.stats.round_growth.push_back(growth);
        out.stats.max_round_growth = std::max(out.stats.max_round_growth, growth);
        if (restart) continue;

        // Every point has depth > b in R: any net with eps|R| <= b + 1 covers X.
        const auto& R = oracles.sample();
        double eps = 1.0 / (8.0 * double(cfg.t));
        if (R.total() > 0) eps = std::min(eps, double(b + 1) / double(R.total()));
        eps = std::min(eps, 1.0);
        auto net = build_net(
            R, eps, rng, [&](const std::vector<std::uint32_t>& T) { return oracles.uncovered_point(T); },
            [&](std::uint32_t pid) { return oracles.sample_object_containing(pid); });
        out.stats.net_attempts = net.attempts;
        out.stats.net_repairs = net.repairs;
        out.status = MwuOutcome::Status::cover;
        out.cover = std::move(net.ids);
        out.stats.shat_final = to_string(shat);
        return out;
    }
}

/// Runs t = t0, 2 t0, 4 t0, ... until a Cover or Infeasible outcome.
inline MwuOutcome guess_loop(const std::function<MwuOutcome(std::uint64_t)>& solver, std::uint64_t max_t,
                             std::uint64_t t0 = 1) {
    max_t = std::max<std::uint64_t>(max_t, 1);
    std::uint64_t t = std::max<std::uint64_t>(t0, 1);
    for (;;) {
        auto out = solver(t);
        if (out.status != MwuOutcome::Status::guess_too_small) return out;
        if (t >= max_t) break;
        t = std::min(2 * t, max_t);
    }
    throw Anomaly("guess loop exhausted every guess up to " + std::to_string(max_t));
}

}  // namespace geocover
