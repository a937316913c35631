#include "vrvo/controller.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

namespace vrvo {

namespace {

Vec2 braking_control(const AgentState& self, const KinodynamicLimits& limits) {
    double speed = self.v.norm();
    if (speed <= 0.0) return {0.0, 0.0};
    return self.v * (-std::min(limits.a_max, speed / limits.dt) / speed);
}

}  // namespace

namespace {

constexpr double kContainTol = 1e-9;

// Braking rollout from (p, v), mirroring the simulator's integration.
bool brake_tail_contained(Vec2 p, Vec2 v, const ConvexCell& cell,
                          const KinodynamicLimits& limits) {
    int guard = static_cast<int>(limits.v_max / (limits.a_max * limits.dt)) + 4;
    while (v.norm() > 1e-12 && guard-- > 0) {
        double speed = v.norm();
        Vec2 brake = v * (-std::min(limits.a_max, speed / limits.dt) / speed);
        v += brake * limits.dt;
        p += v * limits.dt;
        if (!cell.contains(p, kContainTol)) return false;
    }
    return true;
}

}  // namespace

bool verify_containment(const AgentState& self, Vec2 u, const ConvexCell& cell,
                        const KinodynamicLimits& limits) {
    Vec2 p = self.p;
    Vec2 v = self.v;
    int steps = std::max(1, limits.horizon_steps());
    for (int i = 0; i < steps; ++i) {
        v += u * limits.dt;
        double speed = v.norm();
        if (speed > limits.v_max) v *= limits.v_max / speed;
        p += v * limits.dt;
        if (!cell.contains(p, kContainTol)) return false;
        // Every intermediate state must keep a contained stop option, so a
        // braking fallback on any later tick stays inside this cell.
        if (!brake_tail_contained(p, v, cell, limits)) return false;
    }
    return true;
}

ControlInput step_agent(const AgentState& self, std::span<const AgentState> others,
                        std::span<const ObstacleState> obstacles, const KinodynamicLimits& limits,
                        Model model, const VrvoConfig& cfg) {
    ControlInput out;
    out.model = model;
    out.t_h_used = limits.t_h;

    if (self.mode == Mode::Hold) return out;

    Vec2 to_goal = self.g - self.p;
    if (to_goal.norm() < cfg.eps_p && self.v.norm() < cfg.eps_v) {
        out.arrived = true;
        return out;
    }

    std::vector<AgentState> sensed;
    sensed.reserve(others.size());
    for (const AgentState& a : others) {
        if (a.id == self.id) continue;
        if (distance(a.p, self.p) <= cfg.sensing_radius) sensed.push_back(a);
    }

    ConvexCell workspace = cfg.workspace();
    BvcResult bvc = compute_bvc(self, sensed, workspace);
    if (bvc.center_outside) {
        // Own position drifted outside the buffered cell; brake one tick.
        out.fallback_used = true;
        out.infeasible = true;
        if (model == Model::DoubleIntegrator) out.u = braking_control(self, limits);
        return out;
    }
    ObstacleBufferResult buffered = buffer_for_obstacles(
        bvc.cell, self, obstacles, {cfg.obstacle_decel_uses_agent, limits.a_max});
    const ConvexCell& cell = buffered.cell;
    if (cell.degenerate || !cell.contains(self.p, 1e-9)) {
        out.fallback_used = true;
        out.infeasible = true;
        if (model == Model::DoubleIntegrator) out.u = braking_control(self, limits);
        return out;
    }

    std::vector<VelocityCone> cones =
        build_cones(self, sensed, cfg.sigma, cfg.apex_mode, cfg.tau);

    // A goal inside the cell and outside every cone is targeted directly;
    // otherwise the target comes off the boundary.
    if (cell.contains(self.g, 1e-9) && !inside_any_cone(cones, self.g)) {
        out.target = {self.g, 0.0, true};
    } else {
        out.target = select_target(cell, self, cones);
    }

    if (!out.target.feasible) {
        out.fallback_used = true;
        out.infeasible = true;
        if (model == Model::DoubleIntegrator) out.u = braking_control(self, limits);
        return out;
    }

    if (model == Model::SingleIntegrator) {
        Vec2 d = out.target.p_rvo - self.p;
        double dist = d.norm();
        if (dist < 1e-12) return out;
        out.u = dist <= cfg.si_slow_radius ? d : d * (limits.v_max / dist);
        return out;
    }

    int steps = std::max(1, limits.horizon_steps());
    for (int attempt = 0; attempt <= cfg.max_th_halvings; ++attempt) {
        KinodynamicLimits eff = limits;
        eff.t_h = steps * limits.dt;
        BrakingPlan plan = plan_braking(self, out.target.p_rvo, eff);
        if (plan.feasible) {
            Vec2 u = (plan.v_int - self.v) / eff.t_h;
            double mag = u.norm();
            if (mag > limits.a_max) u *= limits.a_max / mag;
            if (verify_containment(self, u, cell, eff)) {
                out.u = u;
                out.plan = plan;
                out.t_h_used = eff.t_h;
                return out;
            }
        }
        if (steps == 1) break;
        steps = std::max(1, steps / 2);
    }

    out.fallback_used = true;
    out.infeasible = true;
    out.u = braking_control(self, limits);
    return out;
}

}  // namespace vrvo
