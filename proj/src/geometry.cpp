#include "vrvo/geometry.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <limits>

namespace vrvo {

namespace {

constexpr double kSideEps = 1e-12;   // clip-side classification
constexpr double kMergeEps = 1e-9;   // duplicate-vertex merge distance
constexpr double kMinArea = 1e-12;

struct ClipVertex {
    Vec2 p;
    int inbound;  // source of the edge arriving at p
};

Vec2 split_edge(Vec2 s, Vec2 e, double ds, double de) {
    double den = ds - de;
    if (std::abs(den) < 1e-300) return e;
    double t = ds / den;
    return s + (e - s) * t;
}

}  // namespace

HalfPlane HalfPlane::boundary_through(Vec2 point, Vec2 outward) {
    Vec2 n = outward.normalized();
    return {n, n.dot(point)};
}

ConvexCell ConvexCell::box(Vec2 lo, Vec2 hi) {
    ConvexCell c;
    c.vertices = {{lo.x, lo.y}, {hi.x, lo.y}, {hi.x, hi.y}, {lo.x, hi.y}};
    c.edge_source = {kBoundsEdge, kBoundsEdge, kBoundsEdge, kBoundsEdge};
    c.source_halfplanes = {{{0.0, -1.0}, -lo.y},
                           {{1.0, 0.0}, hi.x},
                           {{0.0, 1.0}, hi.y},
                           {{-1.0, 0.0}, -lo.x}};
    c.degenerate = !(hi.x > lo.x && hi.y > lo.y);
    return c;
}

bool ConvexCell::contains(Vec2 p, double tol) const {
    for (const auto& hp : source_halfplanes) {
        if (hp.signed_dist(p) > tol) return false;
    }
    return true;
}

bool ConvexCell::polygon_contains(Vec2 p, double tol) const {
    std::size_t n = vertices.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        auto [a, b] = edge(i);
        Vec2 ab = b - a;
        double len = ab.norm();
        if (len < kMergeEps) continue;
        if (ab.cross(p - a) < -tol * len) return false;
    }
    return true;
}

double ConvexCell::area() const {
    double twice = 0.0;
    std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        auto [a, b] = edge(i);
        twice += a.cross(b);
    }
    return 0.5 * twice;
}

double ConvexCell::boundary_length() const {
    double len = 0.0;
    std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        auto [a, b] = edge(i);
        len += (b - a).norm();
    }
    return len;
}

double ConvexCell::distance_to_boundary(Vec2 p) const {
    double best = std::numeric_limits<double>::infinity();
    std::size_t n = vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        auto [a, b] = edge(i);
        Vec2 ab = b - a;
        double len_sq = ab.norm_sq();
        double t = len_sq > 0.0 ? std::clamp((p - a).dot(ab) / len_sq, 0.0, 1.0) : 0.0;
        best = std::min(best, distance(p, a + ab * t));
    }
    return best;
}

std::optional<RayHit> ConvexCell::ray_exit(Vec2 origin, Vec2 dir) const {
    std::size_t n = vertices.size();
    if (n < 3 || dir.norm_sq() == 0.0) return std::nullopt;
    std::optional<RayHit> best;
    for (std::size_t i = 0; i < n; ++i) {
        auto [a, b] = edge(i);
        Vec2 ab = b - a;
        double den = ab.cross(dir);
        if (std::abs(den) < 1e-15) continue;  // parallel
        double t = ab.cross(a - origin) / den;
        if (t <= 1e-12) continue;
        Vec2 q = origin + dir * t;
        double len_sq = ab.norm_sq();
        if (len_sq < kMergeEps * kMergeEps) continue;
        double u = (q - a).dot(ab) / len_sq;
        if (u < -1e-9 || u > 1.0 + 1e-9) continue;
        if (!best || t < best->t) {
            best = RayHit{t, static_cast<int>(i), std::clamp(u, 0.0, 1.0), q};
        }
    }
    return best;
}

ConvexCell intersect_halfplanes(std::span<const HalfPlane> planes, const ConvexCell& bounds) {
    std::vector<ClipVertex> poly;
    poly.reserve(bounds.vertices.size() + planes.size());
    for (const Vec2& v : bounds.vertices) poly.push_back({v, ConvexCell::kBoundsEdge});

    for (std::size_t k = 0; k < planes.size(); ++k) {
        const HalfPlane& hp = planes[k];
        std::size_t m = poly.size();
        if (m == 0) break;
        std::vector<ClipVertex> out;
        out.reserve(m + 2);
        for (std::size_t i = 0; i < m; ++i) {
            const ClipVertex& s = poly[i];
            const ClipVertex& e = poly[(i + 1) % m];
            double ds = hp.signed_dist(s.p);
            double de = hp.signed_dist(e.p);
            bool s_in = ds <= kSideEps;
            bool e_in = de <= kSideEps;
            if (s_in && e_in) {
                out.push_back({e.p, e.inbound});
            } else if (s_in && !e_in) {
                out.push_back({split_edge(s.p, e.p, ds, de), e.inbound});
            } else if (!s_in && e_in) {
                out.push_back({split_edge(s.p, e.p, ds, de), static_cast<int>(k)});
                out.push_back({e.p, e.inbound});
            }
        }
        poly = std::move(out);
    }

    // Merge vertices closer than the merge tolerance; downstream angular
    // queries need distinct points.
    std::vector<ClipVertex> merged;
    merged.reserve(poly.size());
    for (const ClipVertex& cv : poly) {
        if (!merged.empty() && distance(cv.p, merged.back().p) < kMergeEps) continue;
        merged.push_back(cv);
    }
    while (merged.size() > 1 && distance(merged.front().p, merged.back().p) < kMergeEps) {
        merged.pop_back();
    }

    ConvexCell cell;
    cell.source_halfplanes = bounds.source_halfplanes;
    cell.source_halfplanes.insert(cell.source_halfplanes.end(), planes.begin(), planes.end());
    if (merged.size() >= 3) {
        std::size_t n = merged.size();
        cell.vertices.reserve(n);
        cell.edge_source.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            cell.vertices.push_back(merged[i].p);
            cell.edge_source.push_back(merged[(i + 1) % n].inbound);
        }
        cell.degenerate = cell.area() <= kMinArea;
    }
    return cell;
}

bool cone_contains(const VelocityCone& cone, Vec2 p) {
    Vec2 d = p - cone.apex;
    double n = d.norm();
    if (n == 0.0) return false;
    if (d.dot(cone.axis) < n * std::cos(cone.half_angle)) return false;
    if (cone.truncation && n < *cone.truncation) return false;
    return true;
}

bool inside_any_cone(std::span<const VelocityCone> cones, Vec2 p) {
    for (const auto& cone : cones) {
        if (cone_contains(cone, p)) return true;
    }
    return false;
}

Vec2 rotate(Vec2 v, double angle) {
    double c = std::cos(angle);
    double s = std::sin(angle);
    return {v.x * c - v.y * s, v.x * s + v.y * c};
}

namespace {

struct Interval {
    double lo;
    double hi;
};

// t-intervals of the segment a->b that lie inside the cone. The wedge is the
// intersection of the two half-planes bounded by its edge rays, so each
// constraint is linear in t; the cap (if any) subtracts a disk interval.
void append_blocked(const VelocityCone& cone, Vec2 a, Vec2 b, std::vector<Interval>& out) {
    Vec2 d0 = a - cone.apex;
    Vec2 dd = b - a;
    Vec2 right = rotate(cone.axis, -cone.half_angle);
    Vec2 left = rotate(cone.axis, cone.half_angle);

    double lo = 0.0;
    double hi = 1.0;
    bool empty = false;
    auto keep_nonneg = [&](double c0, double slope) {  // keep c0 + slope*t >= 0
        if (empty) return;
        if (std::abs(slope) < 1e-15) {
            if (c0 < 0.0) empty = true;
            return;
        }
        double t = -c0 / slope;
        if (slope > 0.0) {
            lo = std::max(lo, t);
        } else {
            hi = std::min(hi, t);
        }
        if (lo >= hi) empty = true;
    };
    keep_nonneg(right.cross(d0), right.cross(dd));
    keep_nonneg(-left.cross(d0), -left.cross(dd));
    if (empty || lo >= hi) return;

    if (!cone.truncation) {
        out.push_back({lo, hi});
        return;
    }
    double cap = *cone.truncation;
    double qa = dd.norm_sq();
    double qb = 2.0 * d0.dot(dd);
    double qc = d0.norm_sq() - cap * cap;
    if (qa < 1e-30) {
        if (qc >= 0.0) out.push_back({lo, hi});
        return;
    }
    double disc = qb * qb - 4.0 * qa * qc;
    if (disc <= 0.0) {
        if (qc >= 0.0) out.push_back({lo, hi});
        return;
    }
    double sq = std::sqrt(disc);
    double r1 = (-qb - sq) / (2.0 * qa);
    double r2 = (-qb + sq) / (2.0 * qa);
    if (std::min(hi, r1) > lo) out.push_back({lo, std::min(hi, r1)});
    if (std::max(lo, r2) < hi) out.push_back({std::max(lo, r2), hi});
}

}  // namespace

std::vector<BoundaryArc> boundary_minus_cones(const ConvexCell& cell, Vec2 center,
                                              std::span<const VelocityCone> cones) {
    std::vector<BoundaryArc> arcs;
    std::size_t n = cell.vertices.size();
    if (n < 3) return arcs;
    assert(cell.polygon_contains(center, 1e-9));
    (void)center;

    constexpr double kParamEps = 1e-12;
    constexpr double kStitchEps = 1e-9;

    // Free intervals per edge, in boundary order.
    std::vector<ArcSpan> spans;
    for (std::size_t i = 0; i < n; ++i) {
        auto [a, b] = cell.edge(i);
        std::vector<Interval> blocked;
        for (const auto& cone : cones) append_blocked(cone, a, b, blocked);
        std::sort(blocked.begin(), blocked.end(),
                  [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
        double cursor = 0.0;
        for (const Interval& iv : blocked) {
            if (iv.lo > cursor + kParamEps) {
                spans.push_back({static_cast<int>(i), cursor, iv.lo});
            }
            cursor = std::max(cursor, iv.hi);
            if (cursor >= 1.0) break;
        }
        if (cursor < 1.0 - kParamEps) {
            spans.push_back({static_cast<int>(i), cursor, 1.0});
        }
    }
    if (spans.empty()) return arcs;

    // Stitch spans that meet at an edge junction into connected arcs.
    for (const ArcSpan& sp : spans) {
        bool extend = false;
        if (!arcs.empty()) {
            const ArcSpan& prev = arcs.back().spans.back();
            extend = prev.t1 >= 1.0 - kStitchEps && sp.t0 <= kStitchEps &&
                     (prev.edge + 1) % static_cast<int>(n) == sp.edge && prev.edge != sp.edge;
        }
        if (extend) {
            arcs.back().spans.push_back(sp);
        } else {
            arcs.push_back({{sp}});
        }
    }

    // Wrap-around: last arc ending at the boundary seam joins the first.
    if (arcs.size() > 1) {
        const ArcSpan& first = arcs.front().spans.front();
        const ArcSpan& last = arcs.back().spans.back();
        if (first.edge == 0 && first.t0 <= kStitchEps && last.edge == static_cast<int>(n) - 1 &&
            last.t1 >= 1.0 - kStitchEps) {
            arcs.back().spans.insert(arcs.back().spans.end(), arcs.front().spans.begin(),
                                     arcs.front().spans.end());
            arcs.front() = std::move(arcs.back());
            arcs.pop_back();
        }
    }
    return arcs;
}

}  // namespace vrvo
