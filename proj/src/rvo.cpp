#include "vrvo/rvo.hpp"

#include <algorithm>
#include <cmath>

namespace vrvo {

namespace {
constexpr double kHalfPi = 1.57079632679489661923;
constexpr double kTieAngle = 1e-9;  // argmin tie window [rad]
}  // namespace

std::vector<VelocityCone> build_cones(const AgentState& self, std::span<const AgentState> neighbors,
                                      double sigma, ApexMode apex_mode, double tau) {
    std::vector<VelocityCone> cones;
    cones.reserve(neighbors.size());
    for (const AgentState& nb : neighbors) {
        if (nb.id == self.id) continue;
        Vec2 d = nb.p - self.p;
        double dist = d.norm();
        if (dist < 1e-12) continue;
        double rsum = self.radius + nb.radius;

        VelocityCone cone;
        cone.axis = d / dist;
        double ratio = rsum / dist;
        if (ratio >= 1.0) {
            cone.half_angle = kHalfPi - 1e-6;
            cone.clamped = true;
        } else {
            cone.half_angle = std::asin(ratio);
        }
        cone.apex =
            apex_mode == ApexMode::Rvo ? self.p + (self.v + nb.v) * (0.5 * sigma) : self.p;
        if (std::isfinite(tau) && tau > 0.0) {
            double cap = sigma * (dist - rsum) / tau;
            if (cap > 0.0) cone.truncation = cap;
        }
        cones.push_back(cone);
    }
    return cones;
}

RvoSuperposition superimpose(const ConvexCell& cell, const AgentState& self,
                             std::span<const AgentState> neighbors, double sigma,
                             ApexMode apex_mode, double tau) {
    RvoSuperposition sup;
    sup.sigma = sigma;
    sup.cones = build_cones(self, neighbors, sigma, apex_mode, tau);
    sup.free_arcs = boundary_minus_cones(cell, self.p, sup.cones);
    return sup;
}

TargetPoint select_target(const ConvexCell& cell, const AgentState& self,
                          std::span<const VelocityCone> cones) {
    TargetPoint infeasible{self.p, 0.0, false};
    Vec2 goal_dir = self.g - self.p;
    if (cell.size() < 3 || goal_dir.norm() < 1e-12) return infeasible;

    auto arcs = boundary_minus_cones(cell, self.p, cones);
    if (arcs.empty()) return infeasible;

    struct Candidate {
        Vec2 q;
        double deviation;
        double dist;
        int edge;
    };
    std::vector<Candidate> cands;
    auto consider = [&](Vec2 q, int edge) {
        if (inside_any_cone(cones, q)) return;
        Vec2 d = q - self.p;
        double dist = d.norm();
        if (dist < 1e-12) return;
        cands.push_back({q, angle_between(d, goal_dir), dist, edge});
    };

    if (auto hit = cell.ray_exit(self.p, goal_dir)) consider(hit->point, hit->edge);
    for (const BoundaryArc& arc : arcs) {
        for (const ArcSpan& span : arc.spans) {
            auto [a, b] = cell.edge(static_cast<std::size_t>(span.edge));
            Vec2 ab = b - a;
            double len = ab.norm();
            if (len < 1e-12) continue;
            // Nudge crossing points 1e-9 m into the free interval so the
            // containment re-check cannot classify them as blocked.
            double nudge = std::min(1e-9 / len, 0.5 * (span.t1 - span.t0));
            consider(a + ab * (span.t0 + nudge), span.edge);
            consider(a + ab * (span.t1 - nudge), span.edge);
        }
    }
    for (std::size_t i = 0; i < cell.size(); ++i) {
        consider(cell.vertices[i], static_cast<int>(i));
    }
    if (cands.empty()) return infeasible;

    // Ties cascade: deviation, then distance, then a geometric preference
    // (larger |y|) that is stable under mirroring and point reflection of
    // the whole configuration, then the edge index as the final catch-all.
    const Candidate* best = &cands.front();
    for (const Candidate& c : cands) {
        if (c.deviation < best->deviation - kTieAngle) {
            best = &c;
            continue;
        }
        if (c.deviation > best->deviation + kTieAngle) continue;
        if (c.dist < best->dist - 1e-12) {
            best = &c;
            continue;
        }
        if (c.dist > best->dist + 1e-12) continue;
        double cy = std::abs(c.q.y);
        double by = std::abs(best->q.y);
        if (cy > by + 1e-12) {
            best = &c;
            continue;
        }
        if (cy < by - 1e-12) continue;
        if (c.edge < best->edge) best = &c;
    }
    return {best->q, best->deviation, true};
}

}  // namespace vrvo
