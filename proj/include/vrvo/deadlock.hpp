#pragma once

#include <optional>
#include <span>
#include <unordered_map>
#include <vector>

#include "vrvo/controller.hpp"

namespace vrvo {

// Deadlock: stalled short of the goal. The instantaneous predicate fires
// during ordinary braking too, so it must persist for `patience` ticks.
class DeadlockDetector {
public:
    DeadlockDetector(double eps_p, double eps_v, int patience)
        : eps_p_(eps_p), eps_v_(eps_v), patience_(patience) {}

    // Call once per tick while the agent runs normally; returns true when
    // the stall has persisted long enough.
    bool update(const AgentState& agent);
    void reset(int id) { streak_[id] = 0; }

private:
    double eps_p_;
    double eps_v_;
    int patience_;
    std::unordered_map<int, int> streak_;
};

// Among Voronoi-adjacent neighbors that are deadlocked or resting, picks the
// one lying most directly between the agent and its goal (smallest angle
// between p-g and p-p_j). Ties break toward the lower id.
std::optional<int> choose_switch_partner(const AgentState& self,
                                         std::span<const AgentState> all,
                                         std::span<const int> voronoi_adjacent, double eps_v);

enum class SwitchPhase { Rotating, Done };

// Pairwise position switch: both agents ride a rigid half-turn about the
// midpoint of their initiation positions while every Voronoi neighbor of
// either is held frozen.
struct SwitchManeuver {
    int agent_a = -1;
    int agent_b = -1;
    SwitchPhase phase = SwitchPhase::Rotating;
    Vec2 pivot;
    double radius = 0.0;
    double angular_progress = 0.0;  // [0, pi]
    Vec2 start_a, start_b;
    double radius_a = 0.25, radius_b = 0.25;
    std::vector<int> held;
    std::vector<std::pair<int, Vec2>> bystanders;  // everyone else at initiation
    double tangential_speed = 0.0;
};

struct SwitchOutcome {
    Vec2 pos_a, pos_b;
    Vec2 vel_a, vel_b;
    bool completed = false;
    bool aborted = false;
};

// Advances the rotation by one tick. Aborts (leaving positions untouched)
// when the next step would crowd any other agent or sweep outside the
// pair's initiation-time territory.
SwitchOutcome execute_switch(SwitchManeuver& m, std::span<const AgentState> current,
                             const KinodynamicLimits& limits, double dt);

struct DeadlockStats {
    int detected = 0;
    int resolved = 0;
    int aborted = 0;
};

struct MotionOverride {
    int id;
    Vec2 p;
    Vec2 v;
};

// Per-tick deadlock bookkeeping for the whole swarm: detection, maneuver
// stepping, and arbitration of new initiations in ascending initiator id.
// Mutates agent modes (and zeroes held velocities); returns the motions it
// drives this tick.
class DeadlockSupervisor {
public:
    DeadlockSupervisor(bool resolution_enabled, const VrvoConfig& cfg)
        : resolution_enabled_(resolution_enabled),
          detector_(cfg.eps_p, cfg.eps_v, cfg.deadlock_patience) {}

    std::vector<MotionOverride> tick(std::vector<AgentState>& agents,
                                     const KinodynamicLimits& limits, const VrvoConfig& cfg);

    bool participates(int id) const;
    const DeadlockStats& stats() const { return stats_; }

private:
    bool claimed(int id) const;

    bool resolution_enabled_;
    DeadlockDetector detector_;
    std::vector<SwitchManeuver> active_;
    DeadlockStats stats_;
};

}  // namespace vrvo
