#pragma once

#include <geocover/error.hpp>

#include <algorithm>
#include <array>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace geocover {

using Coord = std::int64_t;
using Wide = __int128;
using Weight = unsigned __int128;  // multiplicities 2^depth and their sums

/// Every input coordinate and coefficient is bounded by this value, which
/// keeps all predicates exact in 128-bit intermediates.
inline constexpr Coord kCoordBound = Coord{1} << 28;

inline bool within_bound(Coord v) noexcept { return v >= -kCoordBound && v <= kCoordBound; }

struct Point2 {
    Coord x = 0, y = 0;
    friend bool operator==(const Point2&, const Point2&) = default;
    friend auto operator<=>(const Point2&, const Point2&) = default;
};

struct Point3 {
    Coord x = 0, y = 0, z = 0;
    friend bool operator==(const Point3&, const Point3&) = default;
    friend auto operator<=>(const Point3&, const Point3&) = default;
};

/// Closed axis-aligned square with center (cx, cy) and half-side h.
struct Square {
    Coord cx = 0, cy = 0, h = 1;
    Coord x0() const noexcept { return cx - h; }
    Coord x1() const noexcept { return cx + h; }
    Coord y0() const noexcept { return cy - h; }
    Coord y1() const noexcept { return cy + h; }
    friend bool operator==(const Square&, const Square&) = default;
};

/// Closed disk.
struct Disk {
    Coord cx = 0, cy = 0, r = 1;
    friend bool operator==(const Disk&, const Disk&) = default;
};

/// Closed upper halfspace z >= a*x + b*y + c.
struct Halfspace3 {
    Coord a = 0, b = 0, c = 0;
    friend bool operator==(const Halfspace3&, const Halfspace3&) = default;
};

/// (x - h, x + h, y - h, y + h): squares as 4D points.
using LiftedSquarePoint = std::array<Coord, 4>;

/// Square s as the 3D point (cx, cy, h); p lies in s iff s* lies in the cone of p.
struct SquareDualPoint {
    Coord x = 0, y = 0, z = 0;
    friend bool operator==(const SquareDualPoint&, const SquareDualPoint&) = default;
};

/// The region {(x,y,z) : z >= max(|x - apex.x|, |y - apex.y|)}.
struct ConeRegion {
    Point2 apex;
};

/// Dual of a 3D point p: the set of (a,b,c) with p.z >= a*p.x + b*p.y + c.
struct DualHalfspace {
    Point3 p;
};

// ---------------------------------------------------------------- validation

inline void validate(const Point2& p) {
    GEOCOVER_REQUIRE(within_bound(p.x) && within_bound(p.y), "point coordinate out of bound");
}
inline void validate(const Point3& p) {
    GEOCOVER_REQUIRE(within_bound(p.x) && within_bound(p.y) && within_bound(p.z),
                     "point coordinate out of bound");
}
inline void validate(const Square& s) {
    GEOCOVER_REQUIRE(s.h >= 1, "square half-side must be positive");
    GEOCOVER_REQUIRE(within_bound(s.cx) && within_bound(s.cy) && s.h <= kCoordBound,
                     "square out of bound");
    GEOCOVER_REQUIRE(within_bound(s.x0()) && within_bound(s.x1()) && within_bound(s.y0()) &&
                         within_bound(s.y1()),
                     "square corner out of bound");
}
inline void validate(const Disk& d) {
    GEOCOVER_REQUIRE(d.r >= 1, "disk radius must be positive");
    GEOCOVER_REQUIRE(within_bound(d.cx) && within_bound(d.cy) && d.r <= kCoordBound,
                     "disk out of bound");
}
inline void validate(const Halfspace3& h) {
    GEOCOVER_REQUIRE(within_bound(h.a) && within_bound(h.b) && within_bound(h.c),
                     "halfspace coefficient out of bound");
}

// ---------------------------------------------------------------- membership

inline bool contains(const Square& s, const Point2& p) noexcept {
    return p.x >= s.x0() && p.x <= s.x1() && p.y >= s.y0() && p.y <= s.y1();
}

inline bool contains(const Disk& d, const Point2& p) noexcept {
    const Wide dx = p.x - d.cx, dy = p.y - d.cy;
    return dx * dx + dy * dy <= Wide(d.r) * d.r;
}

inline bool contains(const Halfspace3& h, const Point3& p) noexcept {
    return Wide(p.z) >= Wide(h.a) * p.x + Wide(h.b) * p.y + h.c;
}

// ---------------------------------------------------------------- dualities

inline LiftedSquarePoint lift_square(const Square& s) noexcept {
    return {s.x0(), s.x1(), s.y0(), s.y1()};
}

inline SquareDualPoint square_dual(const Square& s) noexcept { return {s.cx, s.cy, s.h}; }

inline ConeRegion point_cone(const Point2& p) noexcept { return {p}; }

inline bool cone_contains(const ConeRegion& cone, const SquareDualPoint& q) noexcept {
    return q.z >= std::max(std::llabs(q.x - cone.apex.x), std::llabs(q.y - cone.apex.y));
}

inline bool cone_contains(const Point2& p, const SquareDualPoint& q) noexcept {
    return cone_contains(point_cone(p), q);
}

inline Point3 halfspace_dual(const Halfspace3& h) noexcept { return {h.a, h.b, h.c}; }

inline DualHalfspace point_dual(const Point3& p) noexcept { return {p}; }

inline bool contains(const DualHalfspace& d, const Point3& hstar) noexcept {
    return Wide(d.p.z) >= Wide(hstar.x) * d.p.x + Wide(hstar.y) * d.p.y + hstar.z;
}

/// Disk (x-cx)^2 + (y-cy)^2 <= r^2 lifts to the lower halfspace
/// z <= 2cx x + 2cy y + r^2 - cx^2 - cy^2 under z = x^2 + y^2. Negating all
/// coefficients and the point's z turns it into an upper halfspace.
inline Halfspace3 lift_disk(const Disk& d) {
    validate(d);
    const Wide c = Wide(d.cx) * d.cx + Wide(d.cy) * d.cy - Wide(d.r) * d.r;
    const Wide a = -2 * Wide(d.cx), b = -2 * Wide(d.cy);
    GEOCOVER_REQUIRE(a >= -kCoordBound && a <= kCoordBound && b >= -kCoordBound &&
                         b <= kCoordBound && c >= -kCoordBound && c <= kCoordBound,
                     "lifted disk exceeds the 3D coefficient bound");
    return {Coord(a), Coord(b), Coord(c)};
}

inline Point3 lift_point(const Point2& p) {
    validate(p);
    const Wide z = Wide(p.x) * p.x + Wide(p.y) * p.y;
    GEOCOVER_REQUIRE(z <= kCoordBound, "lifted point exceeds the 3D coordinate bound");
    return {p.x, p.y, -Coord(z)};
}

// ---------------------------------------------------------------- linear constraints

/// {q : coef . q >= rhs}. Used by partition trees for both the primal
/// (points vs. halfspace) and dual (halfspace duals vs. point dual) queries.
struct LinearConstraint3 {
    std::array<Coord, 3> coef{};
    Coord rhs = 0;

    Wide slack(const Point3& q) const noexcept {
        return Wide(coef[0]) * q.x + Wide(coef[1]) * q.y + Wide(coef[2]) * q.z - rhs;
    }
    bool satisfied(const Point3& q) const noexcept { return slack(q) >= 0; }
};

/// Points p with p in h.
inline LinearConstraint3 primal_constraint(const Halfspace3& h) noexcept {
    return {{-h.a, -h.b, 1}, h.c};
}

/// Dual points h* with p in h.
inline LinearConstraint3 dual_constraint(const Point3& p) noexcept {
    return {{-p.x, -p.y, -1}, -p.z};
}

// ---------------------------------------------------------------- kinds

enum class Kind { squares2d, disks2d, halfspaces3d };

inline std::string_view kind_name(Kind k) noexcept {
    switch (k) {
        case Kind::squares2d: return "squares2d";
        case Kind::disks2d: return "disks2d";
        case Kind::halfspaces3d: return "halfspaces3d";
    }
    return "?";
}

struct SquaresKind {
    using point_type = Point2;
    using object_type = Square;
    static constexpr Kind kind = Kind::squares2d;
};
struct DisksKind {
    using point_type = Point2;
    using object_type = Disk;
    static constexpr Kind kind = Kind::disks2d;
};
struct HalfspacesKind {
    using point_type = Point3;
    using object_type = Halfspace3;
    static constexpr Kind kind = Kind::halfspaces3d;
};

template <class K>
concept GeometryKind = requires(const typename K::object_type& o, const typename K::point_type& p) {
    { contains(o, p) } -> std::same_as<bool>;
    { K::kind } -> std::convertible_to<Kind>;
};

/// A set-cover universe. Element ids are vector indices.
template <GeometryKind K>
struct Instance {
    using kind_type = K;
    using point_type = typename K::point_type;
    using object_type = typename K::object_type;

    std::vector<point_type> points;
    std::vector<object_type> objects;

    std::size_t size() const noexcept { return points.size() + objects.size(); }
    friend bool operator==(const Instance&, const Instance&) = default;
    void validate_all() const {
        for (const auto& p : points) geocover::validate(p);
        for (const auto& o : objects) geocover::validate(o);
    }
};

using SquaresInstance = Instance<SquaresKind>;
using DisksInstance = Instance<DisksKind>;
using HalfspacesInstance = Instance<HalfspacesKind>;

/// Lift a disk instance into an equivalent upper-halfspace instance.
inline HalfspacesInstance lift_instance(const DisksInstance& in) {
    HalfspacesInstance out;
    out.points.reserve(in.points.size());
    out.objects.reserve(in.objects.size());
    for (const auto& p : in.points) out.points.push_back(lift_point(p));
    for (const auto& d : in.objects) out.objects.push_back(lift_disk(d));
    return out;
}

/// Number of objects containing p: the linear-scan oracle primitive.
template <class Object, class Point>
std::size_t depth(const Point& p, std::span<const Object> objects) {
    std::size_t d = 0;
    for (const auto& o : objects) d += contains(o, p) ? 1 : 0;
    return d;
}

template <class Object, class Point>
std::size_t depth(const Point& p, const std::vector<Object>& objects) {
    return depth(p, std::span<const Object>(objects));
}

/// ceil(log2(max(n, 2))): the "log n" used for every threshold.
inline std::uint32_t log2_ceil(std::uint64_t n) noexcept {
    n = std::max<std::uint64_t>(n, 2);
    std::uint32_t k = 0;
    while ((std::uint64_t{1} << k) < n) ++k;
    return k;
}

inline std::string to_string(Weight w) {
    if (w == 0) return "0";
    std::string s;
    while (w > 0) {
        s.push_back(char('0' + int(w % 10)));
        w /= 10;
    }
    std::reverse(s.begin(), s.end());
    return s;
}

/// 2^k as a Weight; throws when the multiplicity would overflow.
inline Weight pow2(std::uint32_t k) {
    GEOCOVER_CHECK(k < 126, "multiplicity overflow (depth " + std::to_string(k) + ")");
    return Weight{1} << k;
}

}  // namespace geocover
