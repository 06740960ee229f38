#pragma once

#include <geocover/geom.hpp>
#include <geocover/rng.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace geocover::oracle {

enum class Distribution { uniform, clustered, planted, nested, grid };

inline std::string_view distribution_name(Distribution d) noexcept {
    switch (d) {
        case Distribution::uniform: return "uniform";
        case Distribution::clustered: return "clustered";
        case Distribution::planted: return "planted";
        case Distribution::nested: return "nested";
        case Distribution::grid: return "grid";
    }
    return "?";
}

inline std::optional<Distribution> parse_distribution(std::string_view s) {
    for (auto d : {Distribution::uniform, Distribution::clustered, Distribution::planted,
                   Distribution::nested, Distribution::grid})
        if (distribution_name(d) == s) return d;
    return std::nullopt;
}

struct GeneratorSpec {
    Kind kind = Kind::squares2d;
    Distribution dist = Distribution::uniform;
    std::uint32_t n_points = 64;
    std::uint32_t n_objects = 64;
    std::uint32_t planted_k = 8;  // planted: optimum size; nested: depth
    std::uint64_t seed = 1;
};

using AnyInstance = std::variant<SquaresInstance, DisksInstance, HalfspacesInstance>;

inline Kind kind_of(const AnyInstance& a) {
    return std::visit([](const auto& inst) { return std::decay_t<decltype(inst)>::kind_type::kind; }, a);
}

/// Generated instance plus what the generator knows about its optimum.
struct Generated {
    AnyInstance instance;
    std::optional<std::uint32_t> planted_opt;
};

namespace gen_detail {

// Squares live in [0, kSquareSpan)^2. Disks stay small enough that lifting
// to 3D respects the coordinate bound.
inline constexpr Coord kSquareSpan = Coord{1} << 20;
inline constexpr Coord kDiskSpan = 4096;

inline Coord uniform_in(Rng& rng, Coord lo, Coord hi) {  // inclusive
    if (hi <= lo) return lo;
    return lo + Coord(uniform_below(rng, std::uint64_t(hi - lo + 1)));
}

inline Point2 point_in(Rng& rng, const Square& s) {
    return {uniform_in(rng, s.x0(), s.x1()), uniform_in(rng, s.y0(), s.y1())};
}

inline Point2 point_in(Rng& rng, const Disk& d) {
    for (;;) {
        Point2 p{uniform_in(rng, d.cx - d.r, d.cx + d.r), uniform_in(rng, d.cy - d.r, d.cy + d.r)};
        if (contains(d, p)) return p;
    }
}

inline Coord clamp_span(Coord v, Coord lo, Coord hi) { return std::clamp(v, lo, hi); }

template <class Object>
Object random_object(Rng& rng, Coord span, Coord size_lo, Coord size_hi, Point2 around, Coord spread) {
    Coord cx = clamp_span(around.x + uniform_in(rng, -spread, spread), 0, span);
    Coord cy = clamp_span(around.y + uniform_in(rng, -spread, spread), 0, span);
    Coord r = uniform_in(rng, size_lo, size_hi);
    if constexpr (std::is_same_v<Object, Square>)
        return Square{cx, cy, r};
    else
        return Disk{cx, cy, r};
}

template <class Object>
Coord typical_size(Coord span, std::uint32_t m) {
    // Union of m objects of this size covers a constant fraction of the domain.
    return std::max<Coord>(2, Coord(double(span) / std::sqrt(double(std::max<std::uint32_t>(m, 1)))));
}

template <class Object>
Instance<std::conditional_t<std::is_same_v<Object, Square>, SquaresKind, DisksKind>>
make_uniform(Rng& rng, const GeneratorSpec& g, Coord span, bool clustered) {
    Instance<std::conditional_t<std::is_same_v<Object, Square>, SquaresKind, DisksKind>> inst;
    const Coord size = typical_size<Object>(span, g.n_objects);
    std::vector<Point2> centers;
    const std::uint32_t n_clusters = clustered ? std::max<std::uint32_t>(2, g.n_objects / 16) : 1;
    for (std::uint32_t c = 0; c < n_clusters; ++c)
        centers.push_back({uniform_in(rng, 0, span), uniform_in(rng, 0, span)});
    for (std::uint32_t i = 0; i < g.n_objects; ++i) {
        if (clustered) {
            const auto& c = centers[uniform_below(rng, centers.size())];
            inst.objects.push_back(random_object<Object>(rng, span, std::max<Coord>(1, size / 8),
                                                         std::max<Coord>(2, size / 2), c, size));
        } else {
            inst.objects.push_back(random_object<Object>(rng, span, std::max<Coord>(1, size / 4), size,
                                                         {span / 2, span / 2}, span / 2));
        }
    }
    for (std::uint32_t i = 0; i < g.n_points; ++i) {
        const auto& o = inst.objects[uniform_below(rng, inst.objects.size())];
        inst.points.push_back(point_in(rng, o));
    }
    return inst;
}

// k disjoint anchors on a grid. Each anchor owns a pin point that no other
// object contains; decoys sit strictly inside an anchor away from its pin.
// Hence the k anchors form an optimal cover of size exactly k.
inline SquaresInstance make_planted_squares(Rng& rng, const GeneratorSpec& g) {
    SquaresInstance inst;
    const std::uint32_t k = std::max<std::uint32_t>(1, g.planted_k);
    const auto side = std::uint32_t(std::ceil(std::sqrt(double(k))));
    const Coord cell = kSquareSpan / side;
    const Coord h = cell / 2 - 2;
    GEOCOVER_REQUIRE(h >= 8, "planted instance too dense");
    std::vector<Square> anchors;
    for (std::uint32_t i = 0; i < k; ++i) {
        const Coord cx = Coord(i % side) * cell + cell / 2, cy = Coord(i / side) * cell + cell / 2;
        anchors.push_back({cx, cy, h});
    }
    inst.objects = anchors;
    inst.points.reserve(g.n_points);
    for (const auto& a : anchors) inst.points.push_back({a.x0(), a.y0()});
    const std::uint32_t n_decoys = g.n_objects > k ? g.n_objects - k : 0;
    const std::uint32_t extra = g.n_points > k ? g.n_points - k : 0;
    const Coord decoy_h = std::max<Coord>(1, Coord(double(h) / std::sqrt(double(std::max<std::uint32_t>(
                                                                   1, std::max(extra, n_decoys) / k + 1)))));
    for (std::uint32_t i = 0; i < n_decoys; ++i) {
        const auto& a = anchors[uniform_below(rng, k)];
        const Coord dh = std::min<Coord>(decoy_h, (a.x1() - a.x0() - 2) / 2);
        const Coord cx = uniform_in(rng, a.x0() + 1 + dh, a.x1() - dh);
        const Coord cy = uniform_in(rng, a.y0() + 1 + dh, a.y1() - dh);
        inst.objects.push_back({cx, cy, dh});
    }
    for (std::uint32_t i = 0; i < extra; ++i) {
        const auto& a = anchors[uniform_below(rng, k)];
        inst.points.push_back({uniform_in(rng, a.x0() + 1, a.x1()), uniform_in(rng, a.y0() + 1, a.y1())});
    }
    return inst;
}

inline DisksInstance make_planted_disks(Rng& rng, const GeneratorSpec& g) {
    DisksInstance inst;
    const std::uint32_t k = std::max<std::uint32_t>(1, g.planted_k);
    const auto side = std::uint32_t(std::ceil(std::sqrt(double(k))));
    const Coord cell = kDiskSpan / side;
    const Coord r = cell / 2 - 2;
    GEOCOVER_REQUIRE(r >= 8, "planted instance too dense");
    std::vector<Disk> anchors;
    for (std::uint32_t i = 0; i < k; ++i)
        anchors.push_back({Coord(i % side) * cell + cell / 2, Coord(i / side) * cell + cell / 2, r});
    inst.objects = anchors;
    for (const auto& a : anchors) inst.points.push_back({a.cx + a.r, a.cy});
    const std::uint32_t n_decoys = g.n_objects > k ? g.n_objects - k : 0;
    const std::uint32_t extra = g.n_points > k ? g.n_points - k : 0;
    const Coord inner = r - 2;  // pins are at distance r from the center
    const Coord decoy_r = std::max<Coord>(
        1, Coord(double(inner) / std::sqrt(double(std::max<std::uint32_t>(1, std::max(extra, n_decoys) / k + 1)))));
    for (std::uint32_t i = 0; i < n_decoys; ++i) {
        const auto& a = anchors[uniform_below(rng, k)];
        const Coord dr = std::min(decoy_r, inner);
        const Point2 c = point_in(rng, Disk{a.cx, a.cy, inner - dr > 0 ? inner - dr : 1});
        inst.objects.push_back({c.x, c.y, dr});
    }
    for (std::uint32_t i = 0; i < extra; ++i) {
        const auto& a = anchors[uniform_below(rng, k)];
        inst.points.push_back(point_in(rng, Disk{a.cx, a.cy, inner}));
    }
    return inst;
}

template <class Object>
auto make_nested(Rng& rng, const GeneratorSpec& g, Coord span) {
    Instance<std::conditional_t<std::is_same_v<Object, Square>, SquaresKind, DisksKind>> inst;
    const std::uint32_t d = std::max<std::uint32_t>(1, g.planted_k);
    const Coord c = span / 2, step = std::max<Coord>(1, (span / 2 - 1) / Coord(d));
    for (std::uint32_t i = 1; i <= d; ++i) inst.objects.push_back(Object{c, c, step * Coord(i)});
    for (std::uint32_t i = d; i < g.n_objects; ++i)
        inst.objects.push_back(Object{c, c, step * Coord(1 + uniform_below(rng, d))});
    inst.points.push_back({c, c});
    for (std::uint32_t i = 1; i < g.n_points; ++i) inst.points.push_back(point_in(rng, inst.objects[d - 1]));
    return inst;
}

inline SquaresInstance make_grid_squares(Rng& rng, const GeneratorSpec& g) {
    SquaresInstance inst;
    const auto side = std::max<std::uint32_t>(2, std::uint32_t(std::ceil(std::sqrt(double(g.n_points)))));
    const Coord spacing = kSquareSpan / Coord(side + 1);
    for (std::uint32_t i = 0; i < g.n_points; ++i)
        inst.points.push_back({spacing * Coord(1 + i % side), spacing * Coord(1 + i / side)});
    // Lattice-aligned squares of several scales, plus one unit cell per point
    // so every point is coverable.
    for (std::uint32_t i = 0; i < g.n_objects; ++i) {
        const auto& p = inst.points[uniform_below(rng, inst.points.size())];
        const Coord scale = Coord(1) << uniform_below(rng, std::max<std::uint32_t>(1, log2_ceil(side)));
        inst.objects.push_back({p.x + spacing / 2, p.y + spacing / 2, spacing * scale / 2 + spacing / 4});
    }
    for (const auto& p : inst.points) {
        bool hit = false;
        for (const auto& s : inst.objects) hit = hit || contains(s, p);
        if (!hit) inst.objects.push_back({p.x, p.y, spacing / 4});
    }
    return inst;
}

inline DisksInstance make_grid_disks(Rng& rng, const GeneratorSpec& g) {
    DisksInstance inst;
    const auto side = std::max<std::uint32_t>(2, std::uint32_t(std::ceil(std::sqrt(double(g.n_points)))));
    const Coord spacing = std::max<Coord>(2, kDiskSpan / Coord(side + 1));
    for (std::uint32_t i = 0; i < g.n_points; ++i)
        inst.points.push_back({spacing * Coord(1 + i % side), spacing * Coord(1 + i / side)});
    for (std::uint32_t i = 0; i < g.n_objects; ++i) {
        const auto& p = inst.points[uniform_below(rng, inst.points.size())];
        const Coord scale = Coord(1) << uniform_below(rng, std::max<std::uint32_t>(1, log2_ceil(side) - 1));
        inst.objects.push_back({p.x, p.y, spacing * scale});
    }
    for (const auto& p : inst.points) {
        bool hit = false;
        for (const auto& s : inst.objects) hit = hit || contains(s, p);
        if (!hit) inst.objects.push_back({p.x, p.y, 1});
    }
    return inst;
}

inline HalfspacesInstance make_uniform_halfspaces(Rng& rng, const GeneratorSpec& g) {
    // Points on a slightly perturbed downward paraboloid-like surface; planes
    // with bounded slopes placed below random points.
    HalfspacesInstance inst;
    constexpr Coord span = 2048;
    for (std::uint32_t i = 0; i < g.n_objects; ++i) {
        const Coord a = uniform_in(rng, -64, 64), b = uniform_in(rng, -64, 64);
        const Coord x = uniform_in(rng, -span, span), y = uniform_in(rng, -span, span);
        const Coord z = uniform_in(rng, -(Coord{1} << 24), Coord{1} << 24);
        inst.objects.push_back({a, b, z - a * x - b * y});
    }
    for (std::uint32_t i = 0; i < g.n_points; ++i) {
        const auto& h = inst.objects[uniform_below(rng, inst.objects.size())];
        const Coord x = uniform_in(rng, -span, span), y = uniform_in(rng, -span, span);
        const Coord base = h.a * x + h.b * y + h.c;
        const Coord z = std::min<Coord>(kCoordBound, base + uniform_in(rng, 0, Coord{1} << 20));
        inst.points.push_back({x, y, z});
    }
    return inst;
}

}  // namespace gen_detail

/// Deterministic instance generator: identical specs yield identical instances.
/// Every generated instance is feasible.
inline Generated generate(const GeneratorSpec& g) {
    GEOCOVER_REQUIRE(g.n_points >= 1 && g.n_objects >= 1, "generator needs points and objects");
    Rng rng(mix_seed(g.seed, 0x67656e));
    using namespace gen_detail;
    auto disks = [&]() -> std::pair<DisksInstance, std::optional<std::uint32_t>> {
        switch (g.dist) {
            case Distribution::uniform: return {make_uniform<Disk>(rng, g, kDiskSpan, false), std::nullopt};
            case Distribution::clustered: return {make_uniform<Disk>(rng, g, kDiskSpan, true), std::nullopt};
            case Distribution::planted: return {make_planted_disks(rng, g), std::max<std::uint32_t>(1, g.planted_k)};
            case Distribution::nested: return {make_nested<Disk>(rng, g, kDiskSpan), 1u};
            case Distribution::grid: return {make_grid_disks(rng, g), std::nullopt};
        }
        return {};
    };
    switch (g.kind) {
        case Kind::squares2d:
            switch (g.dist) {
                case Distribution::uniform: return {make_uniform<Square>(rng, g, kSquareSpan, false), std::nullopt};
                case Distribution::clustered: return {make_uniform<Square>(rng, g, kSquareSpan, true), std::nullopt};
                case Distribution::planted:
                    return {make_planted_squares(rng, g), std::max<std::uint32_t>(1, g.planted_k)};
                case Distribution::nested: return {make_nested<Square>(rng, g, kSquareSpan), 1u};
                case Distribution::grid: return {make_grid_squares(rng, g), std::nullopt};
            }
            break;
        case Kind::disks2d: {
            auto [inst, opt] = disks();
            return {std::move(inst), opt};
        }
        case Kind::halfspaces3d: {
            if (g.dist == Distribution::uniform) return {make_uniform_halfspaces(rng, g), std::nullopt};
            auto [inst, opt] = disks();
            return {lift_instance(inst), opt};
        }
    }
    return {};
}

// ---------------------------------------------------------------- streams

struct StreamOp {
    enum class Type { insert_point, delete_point, insert_object, delete_object, solve, estimate };
    Type type = Type::solve;
    std::vector<Coord> data;  // inserts
    std::uint64_t id = 0;     // deletes
};

struct GeneratedStream {
    Kind kind = Kind::squares2d;
    std::vector<StreamOp> ops;
    std::optional<std::uint32_t> planted_opt;  // holds at every checkpoint
};

struct StreamSpec {
    GeneratorSpec base;
    std::uint32_t n_updates = 200;
    std::uint32_t solve_every = 50;
};

namespace gen_detail {

inline std::vector<Coord> encode(const Point2& p) { return {p.x, p.y}; }
inline std::vector<Coord> encode(const Point3& p) { return {p.x, p.y, p.z}; }
inline std::vector<Coord> encode(const Square& s) { return {s.cx, s.cy, s.h}; }
inline std::vector<Coord> encode(const Disk& d) { return {d.cx, d.cy, d.r}; }
inline std::vector<Coord> encode(const Halfspace3& h) { return {h.a, h.b, h.c}; }

}  // namespace gen_detail

/// Feasibility-preserving update stream seeded from a generated instance.
/// Inserted points lie in a live object; an object is deleted only when all
/// of its live points stay covered. Planted streams never touch anchors or
/// pins and only add decoys/points inside anchors, so the optimum is fixed.
inline GeneratedStream generate_stream(const StreamSpec& spec) {
    const Generated base = generate(spec.base);
    GeneratedStream out;
    out.kind = spec.base.kind;
    out.planted_opt = spec.base.dist == Distribution::planted ? base.planted_opt : std::nullopt;
    Rng rng(mix_seed(spec.base.seed, 0x737472));
    std::visit(
        [&](const auto& inst) {
            using Inst = std::decay_t<decltype(inst)>;
            using P = typename Inst::point_type;
            using O = typename Inst::object_type;
            std::vector<std::pair<std::uint64_t, P>> pts;
            std::vector<std::pair<std::uint64_t, O>> objs;
            std::uint64_t next_p = 0, next_o = 0;
            const std::size_t protected_objects = out.planted_opt ? *out.planted_opt : 0;
            const std::size_t protected_points = protected_objects;
            for (const auto& o : inst.objects) {
                out.ops.push_back({StreamOp::Type::insert_object, gen_detail::encode(o), 0});
                objs.emplace_back(next_o++, o);
            }
            for (const auto& p : inst.points) {
                out.ops.push_back({StreamOp::Type::insert_point, gen_detail::encode(p), 0});
                pts.emplace_back(next_p++, p);
            }
            out.ops.push_back({StreamOp::Type::solve, {}, 0});
            // Fresh elements are drawn from an independent instance of the same family.
            GeneratorSpec fresh_spec = spec.base;
            fresh_spec.seed = mix_seed(spec.base.seed, 0x66726573);
            fresh_spec.n_points = std::max<std::uint32_t>(spec.n_updates, 1);
            fresh_spec.n_objects = std::max<std::uint32_t>(spec.n_updates, fresh_spec.planted_k + 1);
            const auto fresh = std::get<Inst>(generate(fresh_spec).instance);
            std::size_t fresh_p = protected_points, fresh_o = protected_objects;

            for (std::uint32_t u = 0; u < spec.n_updates; ++u) {
                const auto roll = uniform_below(rng, 4);
                if (roll == 0 && fresh_p < fresh.points.size()) {
                    // insert a point covered by a live object
                    P p = fresh.points[fresh_p++];
                    bool hit = false;
                    for (const auto& [id, o] : objs) hit = hit || contains(o, p);
                    if (!hit) p = pts.empty() ? inst.points.front() : pts[uniform_below(rng, pts.size())].second;
                    out.ops.push_back({StreamOp::Type::insert_point, gen_detail::encode(p), 0});
                    pts.emplace_back(next_p++, p);
                } else if (roll == 1 && pts.size() > protected_points + 1) {
                    const auto k = protected_points + uniform_below(rng, pts.size() - protected_points);
                    out.ops.push_back({StreamOp::Type::delete_point, {}, pts[k].first});
                    pts.erase(pts.begin() + std::ptrdiff_t(k));
                } else if (roll == 2 && fresh_o < fresh.objects.size()) {
                    const O o = fresh.objects[fresh_o++];
                    out.ops.push_back({StreamOp::Type::insert_object, gen_detail::encode(o), 0});
                    objs.emplace_back(next_o++, o);
                } else if (objs.size() > protected_objects + 1) {
                    const auto k = protected_objects + uniform_below(rng, objs.size() - protected_objects);
                    bool safe = true;
                    for (const auto& [pid, p] : pts) {
                        if (!contains(objs[k].second, p)) continue;
                        bool other = false;
                        for (std::size_t j = 0; j < objs.size() && !other; ++j)
                            other = j != k && contains(objs[j].second, p);
                        if (!other) {
                            safe = false;
                            break;
                        }
                    }
                    if (safe) {
                        out.ops.push_back({StreamOp::Type::delete_object, {}, objs[k].first});
                        objs.erase(objs.begin() + std::ptrdiff_t(k));
                    }
                }
                if (spec.solve_every && (u + 1) % spec.solve_every == 0)
                    out.ops.push_back({StreamOp::Type::solve, {}, 0});
            }
            out.ops.push_back({StreamOp::Type::solve, {}, 0});
        },
        base.instance);
    return out;
}

}  // namespace geocover::oracle
