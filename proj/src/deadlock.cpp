#include "vrvo/deadlock.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace vrvo {

namespace {
constexpr double kPi = 3.14159265358979323846;

const AgentState* find_agent(std::span<const AgentState> agents, int id) {
    for (const AgentState& a : agents) {
        if (a.id == id) return &a;
    }
    return nullptr;
}

AgentState* find_agent(std::vector<AgentState>& agents, int id) {
    for (AgentState& a : agents) {
        if (a.id == id) return &a;
    }
    return nullptr;
}

}  // namespace

bool DeadlockDetector::update(const AgentState& agent) {
    bool stalled = distance(agent.p, agent.g) >= eps_p_ && agent.v.norm() <= eps_v_;
    int& streak = streak_[agent.id];
    streak = stalled ? streak + 1 : 0;
    return streak >= patience_;
}

std::optional<int> choose_switch_partner(const AgentState& self,
                                         std::span<const AgentState> all,
                                         std::span<const int> voronoi_adjacent, double eps_v) {
    Vec2 away_from_goal = self.p - self.g;
    std::optional<int> best;
    double best_angle = std::numeric_limits<double>::infinity();
    for (int id : voronoi_adjacent) {
        const AgentState* nb = find_agent(all, id);
        if (!nb) continue;
        bool eligible = nb->mode == Mode::Deadlock ||
                        (nb->mode == Mode::Default && nb->v.norm() <= eps_v);
        if (!eligible) continue;
        double ang = angle_between(away_from_goal, self.p - nb->p);
        if (ang < best_angle - 1e-12 || (std::abs(ang - best_angle) <= 1e-12 && best && id < *best)) {
            best_angle = ang;
            best = id;
        }
    }
    return best;
}

SwitchOutcome execute_switch(SwitchManeuver& m, std::span<const AgentState> current,
                             const KinodynamicLimits& limits, double dt) {
    SwitchOutcome out;
    const AgentState* a = find_agent(current, m.agent_a);
    const AgentState* b = find_agent(current, m.agent_b);
    if (!a || !b || m.radius <= 0.0) {
        out.aborted = true;
        return out;
    }
    out.pos_a = a->p;
    out.pos_b = b->p;

    double omega = m.tangential_speed / m.radius;
    double dtheta = std::min(omega * dt, kPi - m.angular_progress);
    double theta = m.angular_progress + dtheta;
    Vec2 pa = m.pivot + rotate(m.start_a - m.pivot, theta);
    Vec2 pb = m.pivot + rotate(m.start_b - m.pivot, theta);

    // Clearance against everyone else at their tick-start positions, with
    // slack for whatever they may move this tick.
    for (const AgentState& other : current) {
        if (other.id == m.agent_a || other.id == m.agent_b) continue;
        double margin =
            other.v.norm() > 1e-9 ? (m.tangential_speed + limits.v_max) * dt : 1e-9;
        if (distance(pa, other.p) < m.radius_a + other.radius + margin ||
            distance(pb, other.p) < m.radius_b + other.radius + margin) {
            out.aborted = true;
            return out;
        }
    }
    // Stay within the pair's initiation-time territory: closer to one of the
    // initiation positions than to any bystander, up to the handover corridor.
    double corridor = m.radius_a + m.radius_b;
    auto region_ok = [&](Vec2 c) {
        double d_pair = std::min(distance(c, m.start_a), distance(c, m.start_b));
        for (const auto& [id, p0] : m.bystanders) {
            if (distance(c, p0) + corridor < d_pair) return false;
        }
        return true;
    };
    if (!region_ok(pa) || !region_ok(pb)) {
        out.aborted = true;
        return out;
    }

    m.angular_progress = theta;
    if (theta >= kPi - 1e-12) {
        out.pos_a = m.pivot * 2.0 - m.start_a;  // exact half turn
        out.pos_b = m.pivot * 2.0 - m.start_b;
        out.vel_a = {0.0, 0.0};
        out.vel_b = {0.0, 0.0};
        out.completed = true;
        m.phase = SwitchPhase::Done;
    } else {
        out.pos_a = pa;
        out.pos_b = pb;
        out.vel_a = (pa - m.pivot).perp() * omega;
        out.vel_b = (pb - m.pivot).perp() * omega;
    }
    return out;
}

bool DeadlockSupervisor::claimed(int id) const {
    for (const SwitchManeuver& m : active_) {
        if (m.agent_a == id || m.agent_b == id) return true;
        if (std::find(m.held.begin(), m.held.end(), id) != m.held.end()) return true;
    }
    return false;
}

bool DeadlockSupervisor::participates(int id) const {
    for (const SwitchManeuver& m : active_) {
        if (m.agent_a == id || m.agent_b == id) return true;
    }
    return false;
}

std::vector<MotionOverride> DeadlockSupervisor::tick(std::vector<AgentState>& agents,
                                                     const KinodynamicLimits& limits,
                                                     const VrvoConfig& cfg) {
    std::vector<MotionOverride> overrides;

    // Advance running maneuvers. Finished ones (completed or aborted) release
    // their claims one tick later, so the trace keeps the maneuver modes for
    // the tick their last motion happened.
    if (resolution_enabled_) {
        std::vector<AgentState> snapshot = agents;
        auto release = [&](const SwitchManeuver& m) {
            for (int id : m.held) {
                if (AgentState* h = find_agent(agents, id)) h->mode = Mode::Default;
                detector_.reset(id);
            }
            for (int id : {m.agent_a, m.agent_b}) {
                if (AgentState* p = find_agent(agents, id)) p->mode = Mode::Default;
                detector_.reset(id);
            }
        };
        for (auto it = active_.begin(); it != active_.end();) {
            if (it->phase == SwitchPhase::Done) {
                release(*it);
                it = active_.erase(it);
                continue;
            }
            SwitchOutcome step = execute_switch(*it, snapshot, limits, limits.dt);
            if (step.aborted) {
                // Emergency stop: both agents hold position at rest and
                // re-enter normal control next tick.
                ++stats_.aborted;
                it->phase = SwitchPhase::Done;
                overrides.push_back({it->agent_a, step.pos_a, {0.0, 0.0}});
                overrides.push_back({it->agent_b, step.pos_b, {0.0, 0.0}});
                ++it;
                continue;
            }
            overrides.push_back({it->agent_a, step.pos_a, step.vel_a});
            overrides.push_back({it->agent_b, step.pos_b, step.vel_b});
            if (step.completed) ++stats_.resolved;  // phase set by execute_switch
            ++it;
        }
    }

    // Detection runs regardless of whether resolution is enabled.
    for (AgentState& a : agents) {
        if (a.mode == Mode::Hold || participates(a.id)) {
            detector_.reset(a.id);
            continue;
        }
        if (a.mode == Mode::Default) {
            if (detector_.update(a)) {
                a.mode = Mode::Deadlock;
                ++stats_.detected;
            }
        } else if (a.mode == Mode::Deadlock) {
            // Reaching the goal negates the deadlock predicate; otherwise the
            // mode latches until a switch resolves it.
            if (distance(a.p, a.g) < cfg.eps_p) {
                a.mode = Mode::Default;
                detector_.reset(a.id);
            }
        }
    }

    if (!resolution_enabled_) return overrides;

    // New initiations, ascending initiator id. An initiation is dropped when
    // any required participant is already claimed.
    std::vector<int> ids;
    ids.reserve(agents.size());
    for (const AgentState& a : agents) ids.push_back(a.id);
    std::sort(ids.begin(), ids.end());

    ConvexCell workspace = cfg.workspace();
    auto adjacency = [&](const AgentState& self) {
        std::vector<AgentState> sensed;
        for (const AgentState& other : agents) {
            if (other.id == self.id) continue;
            if (distance(other.p, self.p) <= cfg.sensing_radius) sensed.push_back(other);
        }
        return compute_bvc(self, sensed, workspace).neighbors.voronoi_adjacent;
    };

    for (int id : ids) {
        AgentState* self = find_agent(agents, id);
        if (!self || self->mode != Mode::Deadlock || claimed(id)) continue;

        std::vector<int> adj = adjacency(*self);
        std::vector<int> candidates;
        for (int nb : adj) {
            if (!claimed(nb)) candidates.push_back(nb);
        }
        std::optional<int> partner = choose_switch_partner(*self, agents, candidates, cfg.eps_v);
        if (!partner) continue;
        AgentState* mate = find_agent(agents, *partner);

        SwitchManeuver m;
        m.agent_a = id;
        m.agent_b = *partner;
        m.pivot = (self->p + mate->p) * 0.5;
        m.radius = 0.5 * distance(self->p, mate->p);
        m.start_a = self->p;
        m.start_b = mate->p;
        m.radius_a = self->radius;
        m.radius_b = mate->radius;
        m.tangential_speed = std::min(limits.v_max, std::sqrt(limits.a_max * m.radius));

        std::vector<int> mate_adj = adjacency(*mate);
        std::vector<int> held;
        for (int nb : adj) held.push_back(nb);
        for (int nb : mate_adj) held.push_back(nb);
        std::sort(held.begin(), held.end());
        held.erase(std::unique(held.begin(), held.end()), held.end());
        std::erase(held, id);
        std::erase(held, *partner);

        bool conflict = false;
        for (int nb : held) {
            if (claimed(nb)) {
                conflict = true;
                break;
            }
        }
        if (conflict || m.radius <= 0.0) continue;

        m.held = held;
        for (const AgentState& other : agents) {
            if (other.id == id || other.id == *partner) continue;
            m.bystanders.emplace_back(other.id, other.p);
        }
        for (int nb : held) {
            AgentState* h = find_agent(agents, nb);
            h->mode = Mode::Hold;
            h->v = {0.0, 0.0};
        }
        mate->mode = Mode::Deadlock;
        active_.push_back(std::move(m));
    }
    return overrides;
}

}  // namespace vrvo
