#pragma once

#include <geocover/geom.hpp>

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

namespace geocover::oracle {

struct VerifyResult {
    bool ok = true;
    std::optional<std::uint32_t> uncovered;  // first uncovered point id
};

/// True iff every point of X lies in some object of S indexed by `cover`.
template <class Point, class Object>
VerifyResult verify_cover(std::span<const Point> points, std::span<const Object> objects,
                          std::span<const std::uint32_t> cover) {
    for (auto id : cover)
        GEOCOVER_REQUIRE(id < objects.size(), "cover references unknown object id");
    for (std::uint32_t i = 0; i < points.size(); ++i) {
        bool hit = false;
        for (auto id : cover) {
            if (contains(objects[id], points[i])) {
                hit = true;
                break;
            }
        }
        if (!hit) return {false, i};
    }
    return {};
}

template <class Inst>
VerifyResult verify_cover(const Inst& inst, std::span<const std::uint32_t> cover) {
    using P = typename Inst::point_type;
    using O = typename Inst::object_type;
    return verify_cover<P, O>(std::span<const P>(inst.points), std::span<const O>(inst.objects), cover);
}

/// First point contained in no object at all, if any.
template <class Inst>
std::optional<std::uint32_t> uncoverable_point(const Inst& inst) {
    for (std::uint32_t i = 0; i < inst.points.size(); ++i) {
        bool hit = false;
        for (const auto& o : inst.objects)
            if (contains(o, inst.points[i])) {
                hit = true;
                break;
            }
        if (!hit) return i;
    }
    return std::nullopt;
}

}  // namespace geocover::oracle
