#pragma once

#include <limits>
#include <optional>
#include <span>

#include "vrvo/braking.hpp"
#include "vrvo/bvc.hpp"
#include "vrvo/rvo.hpp"

namespace vrvo {

enum class Model { SingleIntegrator, DoubleIntegrator };

struct VrvoConfig {
    double sigma = 1.0;  // velocity-to-displacement scale for cone superposition [s]
    ApexMode apex_mode = ApexMode::Rvo;
    double tau = std::numeric_limits<double>::infinity();  // cone horizon; inf = pure cone
    double si_slow_radius = 1.0;  // below this target distance the SI law turns proportional [m]
    double eps_p = 0.05;          // goal tolerance [m]
    double eps_v = 0.01;          // rest tolerance [m/s]
    double sensing_radius = 5.0;  // only neighbors inside contribute [m]
    int deadlock_patience = 10;   // consecutive stalled ticks before deadlock
    double workspace_half_extent = 50.0;  // cells are clipped to this box [m]
    bool obstacle_decel_uses_agent = false;
    int max_th_halvings = 3;

    ConvexCell workspace() const {
        return ConvexCell::box({-workspace_half_extent, -workspace_half_extent},
                               {workspace_half_extent, workspace_half_extent});
    }
};

struct ControlInput {
    Vec2 u;  // velocity command (SI) or acceleration command (DI)
    Model model = Model::SingleIntegrator;
    TargetPoint target;
    std::optional<BrakingPlan> plan;
    double t_h_used = 0.0;
    bool fallback_used = false;  // degraded to pure braking / standstill
    bool infeasible = false;     // no admissible target or plan this tick
    bool arrived = false;
};

// Constant-acceleration rollout over the horizon followed by a braking
// rollout to rest, every dt-step position checked against the cell
// (1e-9 m tolerance). Mirrors the simulator's semi-implicit integration.
bool verify_containment(const AgentState& self, Vec2 u, const ConvexCell& cell,
                        const KinodynamicLimits& limits);

// One decision tick: buffered Voronoi cell -> cone superposition -> boundary
// target -> braking plan -> bounded control, with containment verification
// and graceful degradation to pure braking.
ControlInput step_agent(const AgentState& self, std::span<const AgentState> others,
                        std::span<const ObstacleState> obstacles, const KinodynamicLimits& limits,
                        Model model, const VrvoConfig& cfg);

}  // namespace vrvo
