#pragma once

#include <span>
#include <vector>

#include "vrvo/controller.hpp"

namespace vrvo {

// Permitted-velocity half-plane {v : (v - point) . normal >= 0}.
struct OrcaPlane {
    Vec2 point;   // [m/s]
    Vec2 normal;  // unit
};

// Reciprocal half-plane constraints for every sensed neighbor.
std::vector<OrcaPlane> build_orca_planes(const AgentState& self,
                                         std::span<const AgentState> others,
                                         const KinodynamicLimits& limits, double tau,
                                         double sensing_radius);

// Velocity closest to the preferred goal velocity subject to all planes and
// the speed cap. When the planes admit no velocity, falls back to the least
// violating one (minimize the maximum plane penetration) and flags it.
ControlInput orca_step(const AgentState& self, std::span<const AgentState> others,
                       const KinodynamicLimits& limits, double tau, double sensing_radius);

// Double-integrator wrapper: track the SI output velocity with a 1/dt
// proportional acceleration clamped to a_max.
ControlInput orca_step_di(const AgentState& self, std::span<const AgentState> others,
                          const KinodynamicLimits& limits, double tau, double sensing_radius);

}  // namespace vrvo
