#pragma once

#include <cmath>
#include <optional>

#include "vrvo/agent.hpp"
#include "vrvo/vec2.hpp"

namespace vrvo {

struct KinodynamicLimits {
    double v_max = 2.0;  // [m/s]
    double a_max = 1.0;  // [m/s^2]
    double t_h = 1.0;    // planning horizon [s], integer multiple of dt
    double dt = 0.1;     // simulation step [s]

    bool valid() const {
        if (!(v_max > 0.0 && a_max > 0.0 && t_h > 0.0 && dt > 0.0) || dt > t_h) return false;
        double steps = t_h / dt;
        return std::abs(steps - std::round(steps)) < 1e-9;
    }
    int horizon_steps() const { return static_cast<int>(std::round(t_h / dt)); }
};

// Two-phase motion plan: ramp linearly from the current velocity to v_int
// over the horizon, then decelerate at a_max to rest exactly at p_rvo.
struct BrakingPlan {
    Vec2 v_int;
    Vec2 p_int;
    double t_b = 0.0;  // braking time, max over axes [s]
    Vec2 p_rvo;
    bool feasible = false;
};

// Per-axis solve: travelling signed distance s from rest-to-come, the ramp
// covers t_h*(v0+v)/2 and the stop covers v^2/(2 a_max), giving
//   v^2 + (a_max t_h) v + (a_max t_h v0 - 2 a_max s) = 0
// in the frame where s >= 0. Picks the root moving toward the target
// (ties to the smaller magnitude). Profiles that must first move away from
// the target are rejected: no real root, a negative root, or a negative
// ramp displacement all return nullopt.
std::optional<double> solve_axis(double v0, double s, const KinodynamicLimits& limits);

// Axis-decoupled plan toward p_rvo; v_int rescaled isotropically to v_max.
BrakingPlan plan_braking(const AgentState& self, Vec2 p_rvo, const KinodynamicLimits& limits);

}  // namespace vrvo
