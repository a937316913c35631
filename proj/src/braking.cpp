#include "vrvo/braking.hpp"

#include <cmath>

namespace vrvo {

std::optional<double> solve_axis(double v0, double s, const KinodynamicLimits& limits) {
    double sign = 1.0;
    if (s < 0.0) {
        sign = -1.0;
        s = -s;
        v0 = -v0;
    }
    const double b = limits.a_max * limits.t_h;
    const double c = limits.a_max * limits.t_h * v0 - 2.0 * limits.a_max * s;
    const double disc = b * b - 4.0 * c;
    if (disc < 0.0) return std::nullopt;

    double v = 0.5 * (-b + std::sqrt(disc));
    if (v < -1e-12) return std::nullopt;  // both roots point away from the target
    v = std::max(v, 0.0);
    // Reject reversal profiles: the ramp must not carry the agent backward.
    if (0.5 * limits.t_h * (v0 + v) < -1e-9) return std::nullopt;
    return sign * v;
}

BrakingPlan plan_braking(const AgentState& self, Vec2 p_rvo, const KinodynamicLimits& limits) {
    BrakingPlan plan;
    plan.p_rvo = p_rvo;
    Vec2 s = p_rvo - self.p;
    auto vx = solve_axis(self.v.x, s.x, limits);
    auto vy = solve_axis(self.v.y, s.y, limits);
    if (!vx || !vy) {
        plan.v_int = {0.0, 0.0};
        plan.p_int = self.p;
        return plan;
    }
    Vec2 v{*vx, *vy};
    double n = v.norm();
    if (n > limits.v_max) v *= limits.v_max / n;
    plan.v_int = v;
    plan.p_int = self.p + (self.v + v) * (0.5 * limits.t_h);
    plan.t_b = std::max(std::abs(v.x), std::abs(v.y)) / limits.a_max;
    plan.feasible = true;
    return plan;
}

}  // namespace vrvo
