#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "vrvo/vec2.hpp"

namespace vrvo {

// Closed half-plane {p : normal . p <= offset}, normal unit length.
struct HalfPlane {
    Vec2 normal;
    double offset = 0.0;

    double signed_dist(Vec2 p) const { return normal.dot(p) - offset; }
    bool contains(Vec2 p, double tol = 0.0) const { return signed_dist(p) <= tol; }

    // Half-plane whose boundary passes through `point` with the given
    // outward direction (not necessarily unit).
    static HalfPlane boundary_through(Vec2 point, Vec2 outward);
};

// Wedge of directions within half_angle of axis, anchored at apex.
// If `truncation` is set, points closer than that distance to the apex are
// not part of the cone (capped cone).
struct VelocityCone {
    Vec2 apex;
    Vec2 axis;  // unit
    double half_angle = 0.0;
    std::optional<double> truncation;
    bool clamped = false;  // half_angle was clamped (agents overlapping)
};

struct RayHit {
    double t = 0.0;  // ray parameter, point = origin + t * dir
    int edge = -1;
    double u = 0.0;  // parameter along the edge, in [0, 1]
    Vec2 point;
};

// Bounded convex polygon, vertices in CCW order. edge i runs from
// vertices[i] to vertices[(i+1) % n]; edge_source[i] names the input
// half-plane that produced it (index into the `planes` argument of
// intersect_halfplanes) or kBoundsEdge for edges inherited from the
// clipping bounds.
struct ConvexCell {
    static constexpr int kBoundsEdge = -1;

    std::vector<Vec2> vertices;
    std::vector<int> edge_source;
    std::vector<HalfPlane> source_halfplanes;
    bool degenerate = true;  // empty or zero-area interior

    static ConvexCell box(Vec2 lo, Vec2 hi);

    std::size_t size() const { return vertices.size(); }
    std::pair<Vec2, Vec2> edge(std::size_t i) const {
        return {vertices[i], vertices[(i + 1) % vertices.size()]};
    }

    // Membership against every source half-plane.
    bool contains(Vec2 p, double tol = 0.0) const;
    // Membership against the polygon edges (independent of the plane list).
    bool polygon_contains(Vec2 p, double tol = 0.0) const;

    double area() const;
    double boundary_length() const;
    double distance_to_boundary(Vec2 p) const;

    // First boundary crossing of the ray origin + t*dir, t > 0.
    std::optional<RayHit> ray_exit(Vec2 origin, Vec2 dir) const;
};

// Clips `bounds` by every half-plane in turn. A degenerate (empty interior)
// result is returned flagged, never thrown.
ConvexCell intersect_halfplanes(std::span<const HalfPlane> planes, const ConvexCell& bounds);

// True iff p lies inside the (possibly capped) cone. The apex itself is not
// contained: a zero offset has no direction.
bool cone_contains(const VelocityCone& cone, Vec2 p);
bool inside_any_cone(std::span<const VelocityCone> cones, Vec2 p);

// A contiguous stretch of cell boundary, as per-edge parameter intervals.
struct ArcSpan {
    int edge = 0;
    double t0 = 0.0;
    double t1 = 1.0;
};
struct BoundaryArc {
    std::vector<ArcSpan> spans;
};

// Maximal connected sections of the cell boundary lying outside every cone.
// `center` must be strictly inside the cell. Interval endpoints are the
// exact cone-edge / polygon-edge intersections.
std::vector<BoundaryArc> boundary_minus_cones(const ConvexCell& cell, Vec2 center,
                                              std::span<const VelocityCone> cones);

Vec2 rotate(Vec2 v, double angle);

}  // namespace vrvo
