#include "vrvo/orca.hpp"

#include <algorithm>
#include <cmath>

namespace vrvo {

namespace {

// Directed-line form used by the incremental solver: feasible velocities lie
// left of the line, i.e. dir.cross(v - point) >= 0.
struct Line {
    Vec2 point;
    Vec2 dir;
};

Line to_line(const OrcaPlane& plane) {
    return {plane.point, {plane.normal.y, -plane.normal.x}};
}

bool violates(const Line& line, Vec2 v) { return line.dir.cross(line.point - v) > 0.0; }

// 1-D solve along line `i` subject to lines [0, i) and the speed disk.
bool solve_on_line(std::span<const Line> lines, std::size_t i, double radius, Vec2 opt_v,
                   bool direction_opt, Vec2& result) {
    const Line& li = lines[i];
    double along = li.point.dot(li.dir);
    double disc = along * along + radius * radius - li.point.norm_sq();
    if (disc < 0.0) return false;  // line misses the disk entirely
    double sq = std::sqrt(disc);
    double t_left = -along - sq;
    double t_right = -along + sq;

    for (std::size_t j = 0; j < i; ++j) {
        double den = li.dir.cross(lines[j].dir);
        double num = lines[j].dir.cross(li.point - lines[j].point);
        if (std::abs(den) < 1e-12) {
            if (num < 0.0) return false;  // parallel and fully excluded
            continue;
        }
        double t = num / den;
        if (den >= 0.0) {
            t_right = std::min(t_right, t);
        } else {
            t_left = std::max(t_left, t);
        }
        if (t_left > t_right) return false;
    }

    double t;
    if (direction_opt) {
        t = opt_v.dot(li.dir) > 0.0 ? t_right : t_left;
    } else {
        t = std::clamp(li.dir.dot(opt_v - li.point), t_left, t_right);
    }
    result = li.point + li.dir * t;
    return true;
}

// Incremental 2-D solve; returns the index of the first unsatisfiable line,
// or lines.size() on success.
std::size_t solve_planes(std::span<const Line> lines, double radius, Vec2 opt_v,
                         bool direction_opt, Vec2& result) {
    if (direction_opt) {
        result = opt_v * radius;
    } else if (opt_v.norm_sq() > radius * radius) {
        result = opt_v.normalized() * radius;
    } else {
        result = opt_v;
    }
    for (std::size_t i = 0; i < lines.size(); ++i) {
        if (violates(lines[i], result)) {
            Vec2 saved = result;
            if (!solve_on_line(lines, i, radius, opt_v, direction_opt, result)) {
                result = saved;
                return i;
            }
        }
    }
    return lines.size();
}

// Infeasible fallback: progressively relax from the first failed line,
// minimizing the maximum penetration across all lines.
void solve_least_violating(std::span<const Line> lines, std::size_t begin, double radius,
                           Vec2& result) {
    double dist = 0.0;
    std::vector<Line> proj;
    for (std::size_t i = begin; i < lines.size(); ++i) {
        if (lines[i].dir.cross(lines[i].point - result) <= dist) continue;
        proj.clear();
        for (std::size_t j = 0; j < i; ++j) {
            Line l;
            double den = lines[i].dir.cross(lines[j].dir);
            if (std::abs(den) < 1e-12) {
                if (lines[i].dir.dot(lines[j].dir) > 0.0) continue;  // same direction
                l.point = (lines[i].point + lines[j].point) * 0.5;
            } else {
                double t = lines[j].dir.cross(lines[i].point - lines[j].point) / den;
                l.point = lines[i].point + lines[i].dir * t;
            }
            l.dir = (lines[j].dir - lines[i].dir).normalized();
            proj.push_back(l);
        }
        Vec2 saved = result;
        Vec2 perp{-lines[i].dir.y, lines[i].dir.x};
        if (solve_planes(proj, radius, perp, true, result) < proj.size()) {
            result = saved;
        }
        dist = lines[i].dir.cross(lines[i].point - result);
    }
}

}  // namespace

std::vector<OrcaPlane> build_orca_planes(const AgentState& self,
                                         std::span<const AgentState> others,
                                         const KinodynamicLimits& limits, double tau,
                                         double sensing_radius) {
    std::vector<OrcaPlane> planes;
    const double inv_tau = 1.0 / tau;
    const double inv_dt = 1.0 / limits.dt;
    for (const AgentState& other : others) {
        if (other.id == self.id) continue;
        Vec2 rel_pos = other.p - self.p;
        if (rel_pos.norm() > sensing_radius) continue;
        Vec2 rel_vel = self.v - other.v;
        double dist_sq = rel_pos.norm_sq();
        double rsum = self.radius + other.radius;
        double rsum_sq = rsum * rsum;

        Vec2 u;
        Vec2 dir;
        if (dist_sq > rsum_sq) {
            Vec2 w = rel_vel - rel_pos * inv_tau;  // from the cutoff-disk center
            double w_sq = w.norm_sq();
            double dot1 = w.dot(rel_pos);
            if (dot1 < 0.0 && dot1 * dot1 > rsum_sq * w_sq) {
                // Closest exit through the cutoff arc.
                double w_len = std::sqrt(w_sq);
                Vec2 unit_w = w / w_len;
                dir = {unit_w.y, -unit_w.x};
                u = unit_w * (rsum * inv_tau - w_len);
            } else {
                // Closest exit through a cone leg.
                double leg = std::sqrt(dist_sq - rsum_sq);
                if (rel_pos.cross(w) > 0.0) {
                    dir = Vec2{rel_pos.x * leg - rel_pos.y * rsum,
                               rel_pos.x * rsum + rel_pos.y * leg} /
                          dist_sq;
                } else {
                    dir = Vec2{rel_pos.x * leg + rel_pos.y * rsum,
                               -rel_pos.x * rsum + rel_pos.y * leg} /
                          -dist_sq;
                }
                u = dir * rel_vel.dot(dir) - rel_vel;
            }
        } else {
            // Already overlapping: resolve over a single step.
            Vec2 w = rel_vel - rel_pos * inv_dt;
            double w_len = w.norm();
            Vec2 unit_w = w_len > 0.0 ? w / w_len : Vec2{1.0, 0.0};
            dir = {unit_w.y, -unit_w.x};
            u = unit_w * (rsum * inv_dt - w_len);
        }
        // Reciprocity: each agent takes half the correction.
        Vec2 point = self.v + u * 0.5;
        planes.push_back({point, {-dir.y, dir.x}});
    }
    return planes;
}

ControlInput orca_step(const AgentState& self, std::span<const AgentState> others,
                       const KinodynamicLimits& limits, double tau, double sensing_radius) {
    ControlInput out;
    out.model = Model::SingleIntegrator;

    Vec2 to_goal = self.g - self.p;
    double dist = to_goal.norm();
    if (dist < 1e-12 && self.v.norm() < 1e-12) {
        out.arrived = true;
        return out;
    }
    Vec2 v_pref = dist > 0.0 ? to_goal * (std::min(limits.v_max, dist / limits.dt) / dist)
                             : Vec2{0.0, 0.0};

    std::vector<OrcaPlane> planes = build_orca_planes(self, others, limits, tau, sensing_radius);
    std::vector<Line> lines;
    lines.reserve(planes.size());
    for (const OrcaPlane& p : planes) lines.push_back(to_line(p));

    Vec2 v;
    std::size_t fail = solve_planes(lines, limits.v_max, v_pref, false, v);
    if (fail < lines.size()) {
        out.infeasible = true;
        solve_least_violating(lines, fail, limits.v_max, v);
    }
    out.u = v;
    out.target = {self.p + v * limits.dt, angle_between(v, to_goal), !out.infeasible};
    return out;
}

ControlInput orca_step_di(const AgentState& self, std::span<const AgentState> others,
                          const KinodynamicLimits& limits, double tau, double sensing_radius) {
    ControlInput si = orca_step(self, others, limits, tau, sensing_radius);
    ControlInput out;
    out.model = Model::DoubleIntegrator;
    out.arrived = si.arrived;
    out.infeasible = si.infeasible;
    out.target = si.target;
    Vec2 u = (si.u - self.v) / limits.dt;
    double mag = u.norm();
    if (mag > limits.a_max) u *= limits.a_max / mag;
    out.u = u;
    return out;
}

}  // namespace vrvo
