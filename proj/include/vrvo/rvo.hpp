#pragma once

#include <limits>
#include <span>
#include <vector>

#include "vrvo/agent.hpp"
#include "vrvo/geometry.hpp"

namespace vrvo {

// Where the cone apex sits when the velocity-space cones are drawn into the
// workspace. Rvo applies the reciprocal offset sigma*(v_i+v_j)/2; VoCenter
// anchors every cone at the agent's own position.
enum class ApexMode { Rvo, VoCenter };

struct TargetPoint {
    Vec2 p_rvo;
    double deviation = 0.0;  // angle to the goal direction [rad]
    bool feasible = false;
};

struct RvoSuperposition {
    std::vector<VelocityCone> cones;
    std::vector<BoundaryArc> free_arcs;
    double sigma = 1.0;  // velocity-to-displacement scale [s]
};

// One cone per neighbor: axis toward the neighbor, half-angle
// asin((Ri+Rj)/dist). Overlapping agents clamp the half-angle just below
// pi/2 and mark the cone. A finite tau caps the cone at
// sigma*(dist - Ri - Rj)/tau from the apex.
std::vector<VelocityCone> build_cones(const AgentState& self, std::span<const AgentState> neighbors,
                                      double sigma, ApexMode apex_mode,
                                      double tau = std::numeric_limits<double>::infinity());

RvoSuperposition superimpose(const ConvexCell& cell, const AgentState& self,
                             std::span<const AgentState> neighbors, double sigma,
                             ApexMode apex_mode,
                             double tau = std::numeric_limits<double>::infinity());

// Boundary point outside all cones with least angular deviation from the
// goal direction. Candidates: the goal-ray exit, every cone-edge/boundary
// crossing (nudged to its free side), and every vertex. Infeasible when no
// free boundary exists; p_rvo then reports the agent's own position.
TargetPoint select_target(const ConvexCell& cell, const AgentState& self,
                          std::span<const VelocityCone> cones);

}  // namespace vrvo
