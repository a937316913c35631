#pragma once

#include <string>
#include <vector>

#include "vrvo/controller.hpp"
#include "vrvo/deadlock.hpp"

namespace vrvo {

enum class Method { Vrvo, Orca };

struct AgentSpec {
    Vec2 p;
    Vec2 g;
    double radius = 0.25;
};

struct Scenario {
    std::string name = "custom";
    std::vector<AgentSpec> agents;
    std::vector<ObstacleState> obstacles;
    KinodynamicLimits limits;
    Model model = Model::SingleIntegrator;
    Method method = Method::Vrvo;
    bool deadlock_enabled = true;
    int max_ticks = 3000;
    double orca_tau = 2.0;
    VrvoConfig config;

    bool valid(std::string* why = nullptr) const;
};

// One record per agent per tick: the state at tick start plus the control
// applied over that tick. A terminal row (zero control) closes the trace.
struct TraceRecord {
    int tick = 0;
    int id = 0;
    Vec2 p, v, u;
    Mode mode = Mode::Default;
    bool fallback = false;
    bool infeasible = false;
    bool arrived = false;
};

struct RunMetrics {
    int collision_count = 0;  // (tick, pair) events with separation < Ri+Rj - 1e-6
    double min_separation = 0.0;
    int makespan_ticks = 0;  // first tick with every agent arrived
    int arrived_count = 0;
    bool all_arrived = false;
    int ticks_run = 0;
    double mean_step_ms = 0.0;
    double max_step_ms = 0.0;
    long long agent_ticks = 0;
    long long infeasible_ticks = 0;
    DeadlockStats deadlock;
};

struct SimResult {
    std::vector<TraceRecord> trace;
    RunMetrics metrics;
};

// Builtin benchmark layouts.
Scenario make_circle_scenario(int n, double circle_radius = 0.0);  // 0 = default for n
Scenario make_pairs_scenario(int pairs = 4, double lane_gap = 1.5);
Scenario make_two_vs_one_scenario();
Scenario make_grid_formation_scenario();  // 16 agents, 4x4 goals 1.25 m apart
std::vector<Scenario> builtin_scenarios();

// Fixed-timestep synchronous loop. Fully deterministic: same scenario, same
// trace, regardless of the per-agent processing order.
SimResult run(const Scenario& scenario);
SimResult run(const Scenario& scenario, std::span<const int> processing_order);

// 0 clean, 2 when collisions occurred, 3 when not everyone arrived.
int exit_code_for(const RunMetrics& metrics);

const char* to_string(Mode mode);
const char* to_string(Model model);
const char* to_string(Method method);

}  // namespace vrvo
