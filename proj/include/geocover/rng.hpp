#pragma once

#include <geocover/geom.hpp>

#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace geocover {

using Rng = std::mt19937_64;

/// splitmix64 step; derives independent child seeds from one master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t salt) noexcept {
    std::uint64_t z = seed + 0x9e3779b97f4a7c15ULL * (salt + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

inline double uniform01(Rng& rng) {
    // 53 random bits; avoids implementation-defined generate_canonical.
    return double(rng() >> 11) * (1.0 / 9007199254740992.0);
}

inline bool bernoulli(Rng& rng, double p) {
    if (p >= 1.0) return true;
    if (p <= 0.0) return false;
    return uniform01(rng) < p;
}

inline std::uint64_t uniform_below(Rng& rng, std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(rng);
}

/// Binomial(n, p) for multiplicity-sized n.
inline Weight binomial(Rng& rng, Weight n, double p) {
    if (n == 0 || p <= 0.0) return 0;
    if (p >= 1.0) return n;
    constexpr Weight kDirect = Weight{1} << 62;
    if (n <= kDirect) {
        std::binomial_distribution<std::uint64_t> dist(std::uint64_t(n), p);
        return dist(rng);
    }
    // Out of range for the library distribution: normal approximation.
    const long double mean = (long double)n * p;
    const long double sd = std::sqrt(mean * (1.0L - p));
    std::normal_distribution<double> z(0.0, 1.0);
    long double v = std::llround(double(mean + sd * z(rng)));
    if (v < 0) v = 0;
    if (v > (long double)n) return n;
    return Weight(v);
}

/// Number of failures before the next success of Bernoulli(p) trials.
inline std::uint64_t geometric_skip(Rng& rng, double p) {
    if (p >= 1.0) return 0;
    const double u = 1.0 - uniform01(rng);  // (0, 1]
    const double k = std::floor(std::log(u) / std::log1p(-p));
    if (!(k < 1.8e19)) return ~std::uint64_t{0};
    return std::uint64_t(k);
}

/// Each index in [0, n) kept independently with probability p.
inline std::vector<std::uint32_t> bernoulli_indices(Rng& rng, std::uint64_t n, double p) {
    std::vector<std::uint32_t> out;
    if (p <= 0.0) return out;
    std::uint64_t i = geometric_skip(rng, p);
    while (i < n) {
        out.push_back(std::uint32_t(i));
        const std::uint64_t s = geometric_skip(rng, p);
        if (s >= n) break;
        i += s + 1;
    }
    return out;
}

/// Split k draws among bins proportionally to weights (multinomial).
inline std::vector<Weight> multinomial(Rng& rng, Weight k, const std::vector<Weight>& weights) {
    std::vector<Weight> out(weights.size(), 0);
    Weight remaining_weight = 0;
    for (auto w : weights) remaining_weight += w;
    for (std::size_t i = 0; i < weights.size() && k > 0; ++i) {
        if (weights[i] == 0) continue;
        if (weights[i] == remaining_weight) {
            out[i] = k;
            k = 0;
            break;
        }
        const double p = double((long double)weights[i] / (long double)remaining_weight);
        const Weight got = binomial(rng, k, p);
        out[i] = got;
        k -= got;
        remaining_weight -= weights[i];
    }
    return out;
}

/// r distinct indices from [0, m), sorted.
inline std::vector<std::uint32_t> sample_without_replacement(Rng& rng, std::uint32_t m, std::uint32_t r) {
    r = std::min(r, m);
    std::vector<std::uint32_t> idx(m);
    std::iota(idx.begin(), idx.end(), 0u);
    for (std::uint32_t i = 0; i < r; ++i) {
        const auto j = i + std::uint32_t(uniform_below(rng, m - i));
        std::swap(idx[i], idx[j]);
    }
    idx.resize(r);
    std::sort(idx.begin(), idx.end());
    return idx;
}

}  // namespace geocover
