#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "vrvo/deadlock.hpp"

using namespace vrvo;

namespace {

AgentState agent(int id, Vec2 p, Vec2 v = {0.0, 0.0}, Vec2 g = {0.0, 0.0},
                 Mode mode = Mode::Default) {
    return {id, p, v, g, 0.25, mode};
}

KinodynamicLimits default_limits() { return {2.0, 1.0, 1.0, 0.1}; }

}  // namespace

TEST_CASE("detector requires persistence") {
    DeadlockDetector det(0.05, 0.01, 10);
    AgentState stuck = agent(0, {0.0, 0.0}, {0.005, 0.0}, {3.0, 0.0});
    for (int i = 0; i < 9; ++i) CHECK(!det.update(stuck));
    CHECK(det.update(stuck));
    for (int i = 0; i < 10; ++i) CHECK(det.update(stuck));  // stays latched while stalled
}

TEST_CASE("detector: reaching the goal or moving resets the streak") {
    DeadlockDetector det(0.05, 0.01, 3);
    AgentState at_goal = agent(0, {0.0, 0.0}, {0.0, 0.0}, {0.02, 0.0});
    for (int i = 0; i < 10; ++i) CHECK(!det.update(at_goal));

    AgentState moving = agent(1, {0.0, 0.0}, {0.5, 0.0}, {3.0, 0.0});
    for (int i = 0; i < 10; ++i) CHECK(!det.update(moving));

    AgentState stuck = agent(2, {0.0, 0.0}, {0.0, 0.0}, {3.0, 0.0});
    det.update(stuck);
    det.update(stuck);
    AgentState nudged = stuck;
    nudged.v = {0.5, 0.0};
    det.update(nudged);  // reset
    CHECK(!det.update(stuck));
    CHECK(!det.update(stuck));
    CHECK(det.update(stuck));
}

TEST_CASE("partner choice: the neighbor toward the goal wins") {
    AgentState self = agent(0, {0.0, 0.0}, {0.0, 0.0}, {0.0, -5.0}, Mode::Deadlock);
    std::vector<AgentState> all{self, agent(1, {0.0, -1.0}), agent(2, {1.0, 0.0})};
    std::vector<int> adjacent{1, 2};
    auto partner = choose_switch_partner(self, all, adjacent, 0.01);
    REQUIRE(partner.has_value());
    CHECK(*partner == 1);
}

TEST_CASE("partner choice: single eligible neighbor") {
    AgentState self = agent(0, {0.0, 0.0}, {0.0, 0.0}, {0.0, -5.0}, Mode::Deadlock);
    std::vector<AgentState> all{self, agent(7, {1.0, 1.0})};
    std::vector<int> adjacent{7};
    auto partner = choose_switch_partner(self, all, adjacent, 0.01);
    REQUIRE(partner.has_value());
    CHECK(*partner == 7);
}

TEST_CASE("partner choice: symmetric tie breaks to the lower id") {
    AgentState self = agent(5, {0.0, 0.0}, {0.0, 0.0}, {0.0, -5.0}, Mode::Deadlock);
    std::vector<AgentState> all{self, agent(9, {1.0, -1.0}), agent(3, {-1.0, -1.0})};
    std::vector<int> adjacent{9, 3};
    auto partner = choose_switch_partner(self, all, adjacent, 0.01);
    REQUIRE(partner.has_value());
    CHECK(*partner == 3);
}

TEST_CASE("partner choice: moving or held neighbors are ineligible") {
    AgentState self = agent(0, {0.0, 0.0}, {0.0, 0.0}, {0.0, -5.0}, Mode::Deadlock);
    std::vector<AgentState> all{self, agent(1, {0.0, -1.0}, {0.8, 0.0}),
                                agent(2, {1.0, 0.0}, {0.0, 0.0}, {0.0, 0.0}, Mode::Hold)};
    std::vector<int> adjacent{1, 2};
    CHECK(!choose_switch_partner(self, all, adjacent, 0.01).has_value());
}

TEST_CASE("switch rotation preserves the pair distance and swaps exactly") {
    std::vector<AgentState> agents{agent(0, {-1.0, 0.0}, {0, 0}, {5, 0}, Mode::Deadlock),
                                   agent(1, {1.0, 0.0}, {0, 0}, {-5, 0}, Mode::Deadlock)};
    SwitchManeuver m;
    m.agent_a = 0;
    m.agent_b = 1;
    m.pivot = {0.0, 0.0};
    m.radius = 1.0;
    m.start_a = {-1.0, 0.0};
    m.start_b = {1.0, 0.0};
    m.tangential_speed = std::min(2.0, std::sqrt(1.0 * 1.0));

    KinodynamicLimits lim = default_limits();
    bool completed = false;
    Vec2 pa = m.start_a;
    Vec2 pb = m.start_b;
    for (int tick = 0; tick < 500 && !completed; ++tick) {
        std::vector<AgentState> cur = agents;
        cur[0].p = pa;
        cur[1].p = pb;
        SwitchOutcome out = execute_switch(m, cur, lim, lim.dt);
        REQUIRE(!out.aborted);
        pa = out.pos_a;
        pb = out.pos_b;
        CHECK(std::abs(distance(pa, pb) - 2.0) <= 1e-9);
        completed = out.completed;
    }
    REQUIRE(completed);
    CHECK(pa.x == doctest::Approx(1.0));
    CHECK(pa.y == doctest::Approx(0.0));
    CHECK(pb.x == doctest::Approx(-1.0));
    CHECK(pb.y == doctest::Approx(0.0));
}

TEST_CASE("switch aborts when a third agent blocks the sweep") {
    std::vector<AgentState> agents{agent(0, {-0.5, 0.0}, {0, 0}, {5, 0}, Mode::Deadlock),
                                   agent(1, {0.5, 0.0}, {0, 0}, {-5, 0}, Mode::Deadlock),
                                   agent(2, {0.0, 0.55})};  // sits right on the sweep circle
    SwitchManeuver m;
    m.agent_a = 0;
    m.agent_b = 1;
    m.pivot = {0.0, 0.0};
    m.radius = 0.5;
    m.start_a = {-0.5, 0.0};
    m.start_b = {0.5, 0.0};
    m.radius_a = m.radius_b = 0.25;
    m.tangential_speed = std::sqrt(1.0 * 0.5);
    m.bystanders = {{2, {0.0, 0.55}}};

    KinodynamicLimits lim = default_limits();
    bool aborted = false;
    for (int tick = 0; tick < 200 && !aborted; ++tick) {
        std::vector<AgentState> cur = agents;
        SwitchOutcome out = execute_switch(m, cur, lim, lim.dt);
        aborted = out.aborted;
        REQUIRE(!out.completed);
        if (!aborted) {
            agents[0].p = out.pos_a;
            agents[1].p = out.pos_b;
        }
    }
    CHECK(aborted);
}

TEST_CASE("supervisor: detection marks deadlock without resolution") {
    VrvoConfig cfg;
    cfg.deadlock_patience = 3;
    DeadlockSupervisor sup(false, cfg);
    std::vector<AgentState> agents{agent(0, {0.0, 0.0}, {0.0, 0.0}, {5.0, 0.0})};
    KinodynamicLimits lim = default_limits();
    for (int i = 0; i < 5; ++i) sup.tick(agents, lim, cfg);
    CHECK(agents[0].mode == Mode::Deadlock);
    CHECK(sup.stats().detected == 1);
    CHECK(sup.stats().resolved == 0);
}

TEST_CASE("supervisor: a stalled pair swaps and releases its holds") {
    VrvoConfig cfg;
    cfg.deadlock_patience = 2;
    DeadlockSupervisor sup(true, cfg);
    // Two agents blocking each other, a third Voronoi neighbor nearby at rest.
    std::vector<AgentState> agents{agent(0, {0.0, 0.0}, {0.0, 0.0}, {2.0, 0.0}),
                                   agent(1, {1.0, 0.0}, {0.0, 0.0}, {-1.0, 0.0}),
                                   agent(2, {0.5, 2.2}, {0.0, 0.0}, {0.5, 2.2})};
    KinodynamicLimits lim = default_limits();

    bool resolved = false;
    Vec2 held_home = agents[2].p;
    for (int tick = 0; tick < 300 && !resolved; ++tick) {
        std::vector<MotionOverride> moves = sup.tick(agents, lim, cfg);
        for (const MotionOverride& mv : moves) {
            for (AgentState& a : agents) {
                if (a.id == mv.id) {
                    a.p = mv.p;
                    a.v = mv.v;
                }
            }
        }
        if (agents[2].mode == Mode::Hold) {
            CHECK(distance(agents[2].p, held_home) == doctest::Approx(0.0));
        }
        resolved = sup.stats().resolved > 0;
    }
    REQUIRE(resolved);
    CHECK(agents[0].p.x == doctest::Approx(1.0));
    CHECK(agents[1].p.x == doctest::Approx(0.0));
    sup.tick(agents, lim, cfg);  // claims release on the following tick
    for (const AgentState& a : agents) CHECK(a.mode == Mode::Default);
    CHECK(distance(agents[2].p, held_home) == doctest::Approx(0.0));
}
