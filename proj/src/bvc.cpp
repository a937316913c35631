#include "vrvo/bvc.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vrvo {

BvcResult compute_bvc(const AgentState& self, std::span<const AgentState> neighbors,
                      const ConvexCell& workspace) {
    std::vector<HalfPlane> bisectors;
    std::vector<HalfPlane> buffered;
    std::vector<int> plane_ids;  // plane index -> neighbor id
    bisectors.reserve(neighbors.size());
    buffered.reserve(neighbors.size());

    BvcResult res;
    for (const AgentState& nb : neighbors) {
        if (nb.id == self.id) continue;
        Vec2 d = nb.p - self.p;
        double dist = d.norm();
        if (dist < 1e-12) {
            // Coincident centers admit no separating plane.
            res.center_outside = true;
            continue;
        }
        Vec2 n = d / dist;
        double mid_offset = n.dot((self.p + nb.p) * 0.5);
        bisectors.push_back({n, mid_offset});
        buffered.push_back({n, mid_offset - self.radius});
        plane_ids.push_back(nb.id);
    }

    ConvexCell voronoi = intersect_halfplanes(bisectors, workspace);
    res.cell = intersect_halfplanes(buffered, workspace);

    std::vector<char> adjacent(plane_ids.size(), 0);
    for (std::size_t e = 0; e < voronoi.size(); ++e) {
        int src = voronoi.edge_source[e];
        if (src < 0) continue;
        auto [a, b] = voronoi.edge(e);
        if (distance(a, b) > 1e-6) adjacent[static_cast<std::size_t>(src)] = 1;
    }
    for (std::size_t k = 0; k < plane_ids.size(); ++k) {
        res.neighbors.sensed.push_back(plane_ids[k]);
        if (adjacent[k]) res.neighbors.voronoi_adjacent.push_back(plane_ids[k]);
    }
    std::sort(res.neighbors.sensed.begin(), res.neighbors.sensed.end());
    std::sort(res.neighbors.voronoi_adjacent.begin(), res.neighbors.voronoi_adjacent.end());

    if (res.cell.degenerate || !res.cell.contains(self.p, 1e-9)) res.center_outside = true;
    return res;
}

ObstacleBufferResult buffer_for_obstacles(const ConvexCell& cell, const AgentState& self,
                                          std::span<const ObstacleState> obstacles,
                                          const ObstacleBufferOptions& opts) {
    ObstacleBufferResult res;
    if (obstacles.empty() || cell.degenerate) {
        res.cell = cell;
        res.d_obs.assign(obstacles.size(), 0.0);
        return res;
    }

    std::vector<HalfPlane> planes;
    planes.reserve(obstacles.size());
    for (const ObstacleState& ob : obstacles) {
        Vec2 d = ob.p - self.p;
        double dist = d.norm();
        if (dist < 1e-12) {
            res.d_obs.push_back(0.0);
            ++res.clamp_warnings;
            continue;
        }
        double gap = cell.distance_to_boundary(ob.p);
        double stop_dist =
            ob.a_max > 0.0
                ? ob.v_max * ob.v_max / (2.0 * (opts.use_agent_decel ? opts.agent_a_max : ob.a_max))
                : std::numeric_limits<double>::infinity();
        double clearance = gap - stop_dist;
        double retraction = stop_dist;
        if (clearance < 0.0) {
            clearance = 0.0;
            retraction = gap;
            ++res.clamp_warnings;
        }
        res.d_obs.push_back(clearance);

        Vec2 n = d / dist;
        double offset = n.dot((self.p + ob.p) * 0.5) - (self.radius + ob.radius) - retraction;
        // Never retract past the agent's own position.
        double at_self = n.dot(self.p);
        if (offset < at_self + 1e-9) {
            offset = at_self + 1e-9;
            ++res.clamp_warnings;
        }
        planes.push_back({n, offset});
    }
    res.cell = intersect_halfplanes(planes, cell);
    return res;
}

}  // namespace vrvo
