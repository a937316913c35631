#include "vrvo/sim.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <numeric>

#include "vrvo/orca.hpp"

namespace vrvo {

namespace {
constexpr double kPi = 3.14159265358979323846;
constexpr double kDefaultRadius = 0.25;
}  // namespace

bool Scenario::valid(std::string* why) const {
    auto fail = [&](const char* msg) {
        if (why) *why = msg;
        return false;
    };
    if (agents.empty()) return fail("no agents");
    if (!limits.valid()) return fail("bad kinodynamic limits (positive, dt <= t_h, t_h multiple of dt)");
    if (max_ticks <= 0) return fail("max_ticks must be positive");
    if (config.sensing_radius <= 0.0 || config.workspace_half_extent <= 0.0)
        return fail("sensing radius and workspace extent must be positive");
    for (const AgentSpec& a : agents) {
        if (a.radius <= 0.0) return fail("agent radius must be positive");
        if (!a.p.finite() || !a.g.finite()) return fail("agent state must be finite");
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
        for (std::size_t j = i + 1; j < agents.size(); ++j) {
            if (distance(agents[i].p, agents[j].p) < agents[i].radius + agents[j].radius)
                return fail("initial configuration must be collision-free");
        }
    }
    for (const ObstacleState& ob : obstacles) {
        if (ob.radius <= 0.0 || ob.v_max < 0.0 || ob.a_max <= 0.0)
            return fail("obstacle parameters out of range");
    }
    return true;
}

Scenario make_circle_scenario(int n, double circle_radius) {
    if (circle_radius <= 0.0) {
        switch (n) {
            case 4: circle_radius = 2.0; break;
            case 10: circle_radius = 4.0; break;
            case 25: circle_radius = 8.0; break;
            case 70: circle_radius = 20.0; break;
            default: circle_radius = std::max(2.0, n * 2.0 / 7.0); break;
        }
    }
    Scenario sc;
    sc.name = "circle" + std::to_string(n);
    sc.agents.reserve(n);
    for (int k = 0; k < n; ++k) {
        double ang = 2.0 * kPi * k / n;
        Vec2 p{circle_radius * std::cos(ang), circle_radius * std::sin(ang)};
        sc.agents.push_back({p, -p, kDefaultRadius});
    }
    return sc;
}

Scenario make_pairs_scenario(int pairs, double lane_gap) {
    // Opposing lanes are interleaved by a quarter gap. Exactly co-linear
    // antagonists could only stay symmetric by meeting head-to-head, so the
    // construction is symmetric under 180-degree rotation instead: the
    // mirror partner of left agent 2k is right agent 2(pairs-1-k)+1.
    Scenario sc;
    sc.name = "pairs" + std::to_string(pairs);
    const double reach = 5.0;
    const double skew = 0.25 * lane_gap;
    for (int k = 0; k < pairs; ++k) {
        double y = (k - 0.5 * (pairs - 1)) * lane_gap;
        sc.agents.push_back({{-reach, y + skew}, {reach, y + skew}, kDefaultRadius});
        sc.agents.push_back({{reach, y - skew}, {-reach, y - skew}, kDefaultRadius});
    }
    return sc;
}

Scenario make_two_vs_one_scenario() {
    Scenario sc;
    sc.name = "two_vs_one";
    sc.agents.push_back({{-4.0, 0.0}, {4.0, 0.0}, kDefaultRadius});
    sc.agents.push_back({{4.0, 0.45}, {-4.0, 0.45}, kDefaultRadius});
    sc.agents.push_back({{4.0, -0.45}, {-4.0, -0.45}, kDefaultRadius});
    return sc;
}

Scenario make_grid_formation_scenario() {
    // Perimeter starts, 4x4 grid goals half a turn away, so the flows cross
    // the packed middle and late agents press against the occupied grid.
    // Cones carry a finite horizon here; otherwise a resting neighbor blocks
    // its whole bearing sector forever and nobody can settle next to it.
    Scenario sc;
    sc.name = "grid16";
    const int n = 16;
    const double start_radius = 3.2;
    const double spacing = 1.25;
    sc.config.tau = 2.0;
    for (int k = 0; k < n; ++k) {
        double ang = 2.0 * kPi * k / n;
        Vec2 p{start_radius * std::cos(ang), start_radius * std::sin(ang)};
        int j = (k + n / 2) % n;
        Vec2 g{-1.5 * spacing + (j % 4) * spacing, -1.5 * spacing + (j / 4) * spacing};
        sc.agents.push_back({p, g, kDefaultRadius});
    }
    return sc;
}

std::vector<Scenario> builtin_scenarios() {
    std::vector<Scenario> all;
    for (int n : {4, 10, 25, 70}) all.push_back(make_circle_scenario(n));
    all.push_back(make_pairs_scenario());
    all.push_back(make_two_vs_one_scenario());
    all.push_back(make_grid_formation_scenario());
    return all;
}

SimResult run(const Scenario& scenario) {
    std::vector<int> order(scenario.agents.size());
    std::iota(order.begin(), order.end(), 0);
    return run(scenario, order);
}

SimResult run(const Scenario& scenario, std::span<const int> processing_order) {
    const std::size_t n = scenario.agents.size();
    const KinodynamicLimits& limits = scenario.limits;
    const VrvoConfig& cfg = scenario.config;

    std::vector<AgentState> agents;
    agents.reserve(n);
    for (std::size_t i = 0; i < n; ++i) {
        const AgentSpec& spec = scenario.agents[i];
        agents.push_back({static_cast<int>(i), spec.p, {0.0, 0.0}, spec.g, spec.radius,
                          Mode::Default});
    }

    SimResult result;
    result.trace.reserve((static_cast<std::size_t>(scenario.max_ticks) + 1) * n);
    RunMetrics& metrics = result.metrics;
    metrics.min_separation = std::numeric_limits<double>::infinity();
    metrics.makespan_ticks = scenario.max_ticks;

    DeadlockSupervisor supervisor(scenario.deadlock_enabled, cfg);
    std::vector<bool> arrived(n, false);

    double total_step_ms = 0.0;

    auto scan_separation = [&](int tick) {
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double sep = distance(agents[i].p, agents[j].p);
                metrics.min_separation = std::min(metrics.min_separation, sep);
                if (sep < agents[i].radius + agents[j].radius - 1e-6) ++metrics.collision_count;
            }
        }
        (void)tick;
    };

    std::vector<ControlInput> controls(n);
    int tick = 0;
    for (; tick < scenario.max_ticks; ++tick) {
        const std::vector<AgentState> snapshot = agents;

        for (int idx : processing_order) {
            const AgentState& self = snapshot[static_cast<std::size_t>(idx)];
            controls[static_cast<std::size_t>(idx)] = ControlInput{};
            controls[static_cast<std::size_t>(idx)].model = scenario.model;
            if (self.mode == Mode::Hold || supervisor.participates(self.id)) continue;

            auto t0 = std::chrono::steady_clock::now();
            ControlInput ctl;
            if (scenario.method == Method::Vrvo) {
                ctl = step_agent(self, snapshot, scenario.obstacles, limits, scenario.model, cfg);
            } else if (scenario.model == Model::SingleIntegrator) {
                ctl = orca_step(self, snapshot, limits, scenario.orca_tau, cfg.sensing_radius);
            } else {
                ctl = orca_step_di(self, snapshot, limits, scenario.orca_tau, cfg.sensing_radius);
            }
            auto t1 = std::chrono::steady_clock::now();
            double ms = std::chrono::duration<double, std::milli>(t1 - t0).count();
            total_step_ms += ms;
            metrics.max_step_ms = std::max(metrics.max_step_ms, ms);
            ++metrics.agent_ticks;
            if (ctl.infeasible) ++metrics.infeasible_ticks;
            controls[static_cast<std::size_t>(idx)] = ctl;
        }

        std::vector<MotionOverride> overrides = supervisor.tick(agents, limits, cfg);

        scan_separation(tick);
        for (std::size_t i = 0; i < n; ++i) {
            const ControlInput& ctl = controls[i];
            result.trace.push_back({tick, agents[i].id, agents[i].p, agents[i].v, ctl.u,
                                    agents[i].mode, ctl.fallback_used, ctl.infeasible,
                                    arrived[i]});
        }

        for (std::size_t i = 0; i < n; ++i) {
            AgentState& a = agents[i];
            const MotionOverride* ov = nullptr;
            for (const MotionOverride& o : overrides) {
                if (o.id == a.id) {
                    ov = &o;
                    break;
                }
            }
            if (ov) {
                a.p = ov->p;
                a.v = ov->v;
            } else if (a.mode == Mode::Hold || supervisor.participates(a.id)) {
                a.v = {0.0, 0.0};
            } else if (scenario.model == Model::SingleIntegrator) {
                a.v = controls[i].u;
                a.p += a.v * limits.dt;
            } else {
                a.v += controls[i].u * limits.dt;
                double speed = a.v.norm();
                if (speed > limits.v_max) a.v *= limits.v_max / speed;
                a.p += a.v * limits.dt;
            }
        }

        bool all = true;
        for (std::size_t i = 0; i < n; ++i) {
            if (!arrived[i] && distance(agents[i].p, agents[i].g) < cfg.eps_p &&
                agents[i].v.norm() < cfg.eps_v) {
                arrived[i] = true;
            }
            all = all && arrived[i];
        }
        if (all) {
            metrics.makespan_ticks = tick + 1;
            ++tick;
            break;
        }
    }
    metrics.ticks_run = tick;

    scan_separation(tick);
    for (std::size_t i = 0; i < n; ++i) {
        result.trace.push_back({tick, agents[i].id, agents[i].p, agents[i].v, Vec2{0.0, 0.0},
                                agents[i].mode, false, false, arrived[i]});
    }

    metrics.arrived_count = static_cast<int>(std::count(arrived.begin(), arrived.end(), true));
    metrics.all_arrived = metrics.arrived_count == static_cast<int>(n);
    if (!metrics.all_arrived) metrics.makespan_ticks = scenario.max_ticks;
    if (metrics.agent_ticks > 0) {
        metrics.mean_step_ms = total_step_ms / static_cast<double>(metrics.agent_ticks);
    }
    metrics.deadlock = supervisor.stats();
    return result;
}

int exit_code_for(const RunMetrics& metrics) {
    if (metrics.collision_count > 0) return 2;
    if (!metrics.all_arrived) return 3;
    return 0;
}

const char* to_string(Mode mode) {
    switch (mode) {
        case Mode::Default: return "DEFAULT";
        case Mode::Hold: return "HOLD";
        case Mode::Deadlock: return "DEADLOCK";
    }
    return "DEFAULT";
}

const char* to_string(Model model) {
    return model == Model::SingleIntegrator ? "si" : "di";
}

const char* to_string(Method method) { return method == Method::Vrvo ? "vrvo" : "orca"; }

}  // namespace vrvo
