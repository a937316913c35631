#pragma once

#include <span>
#include <vector>

#include "vrvo/agent.hpp"
#include "vrvo/geometry.hpp"

namespace vrvo {

struct NeighborSets {
    std::vector<int> sensed;            // ids of all neighbors considered, ascending
    std::vector<int> voronoi_adjacent;  // ids whose bisector survives as a cell edge
};

struct BvcResult {
    ConvexCell cell;  // buffered Voronoi cell
    NeighborSets neighbors;
    bool center_outside = false;  // numerical drift: own position violates a buffered plane
};

// Buffered Voronoi cell of `self`: each neighbor contributes the
// perpendicular-bisector half-plane pulled toward self by self's radius.
// Adjacency is read off the unbuffered cell: a neighbor is Voronoi-adjacent
// iff its bisector contributes an edge longer than 1e-6 m.
BvcResult compute_bvc(const AgentState& self, std::span<const AgentState> neighbors,
                      const ConvexCell& workspace);

struct ObstacleBufferOptions {
    bool use_agent_decel = false;  // use the agent's own braking rate for the allowance
    double agent_a_max = 1.0;
};

struct ObstacleBufferResult {
    ConvexCell cell;
    std::vector<double> d_obs;  // residual clearance per obstacle after its stop
    int clamp_warnings = 0;
};

// Retracts the cell away from each obstacle by the obstacle's stopping
// distance v_max^2 / (2 a_max), on top of the usual bisector buffered by the
// combined radii. d_obs is the gap left between the obstacle's stop point
// and the original boundary; it is clamped at zero (with a warning) when the
// obstacle cannot stop in time, which retracts the plane maximally.
ObstacleBufferResult buffer_for_obstacles(const ConvexCell& cell, const AgentState& self,
                                          std::span<const ObstacleState> obstacles,
                                          const ObstacleBufferOptions& opts = {});

}  // namespace vrvo
