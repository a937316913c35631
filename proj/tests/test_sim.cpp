#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "vrvo/sim.hpp"

using namespace vrvo;

namespace {

bool traces_equal(const std::vector<TraceRecord>& a, const std::vector<TraceRecord>& b) {
    if (a.size() != b.size()) return false;
    for (std::size_t i = 0; i < a.size(); ++i) {
        const TraceRecord& x = a[i];
        const TraceRecord& y = b[i];
        if (x.tick != y.tick || x.id != y.id || x.p != y.p || x.v != y.v || x.u != y.u ||
            x.mode != y.mode || x.fallback != y.fallback || x.infeasible != y.infeasible ||
            x.arrived != y.arrived) {
            return false;
        }
    }
    return true;
}

}  // namespace

TEST_CASE("builtin scenarios are valid and collision-free at start") {
    for (const Scenario& sc : builtin_scenarios()) {
        std::string why;
        CHECK_MESSAGE(sc.valid(&why), sc.name, ": ", why);
    }
    CHECK(make_circle_scenario(4, 2.0).valid());
    // Chord between adjacent agents on the circle must clear 2R.
    Scenario c4 = make_circle_scenario(4, 2.0);
    double chord = distance(c4.agents[0].p, c4.agents[1].p);
    CHECK(chord >= 4.0 * 0.25);
}

TEST_CASE("single agent drives straight to its goal") {
    Scenario sc;
    sc.name = "solo";
    sc.agents.push_back({{0.0, 0.0}, {5.0, 0.0}, 0.25});
    sc.max_ticks = 200;
    SimResult result = run(sc);
    CHECK(result.metrics.all_arrived);
    CHECK(result.metrics.collision_count == 0);
    // 25 ticks of full speed plus a proportional settle tail.
    CHECK(result.metrics.makespan_ticks < 100);
    CHECK(result.metrics.makespan_ticks >= 25);
}

TEST_CASE("circle(4) single integrator: clean run") {
    Scenario sc = make_circle_scenario(4);
    sc.max_ticks = 1200;
    SimResult result = run(sc);
    CHECK(result.metrics.collision_count == 0);
    CHECK(result.metrics.all_arrived);
    CHECK(result.metrics.min_separation >= 0.5 - 1e-6);
}

TEST_CASE("circle(4) double integrator: clean run") {
    Scenario sc = make_circle_scenario(4);
    sc.model = Model::DoubleIntegrator;
    sc.max_ticks = 1200;
    SimResult result = run(sc);
    CHECK(result.metrics.collision_count == 0);
    CHECK(result.metrics.all_arrived);
    CHECK(result.metrics.min_separation >= 0.5 - 1e-6);
}

TEST_CASE("repeated runs are identical") {
    Scenario sc = make_circle_scenario(10);
    sc.max_ticks = 400;
    SimResult a = run(sc);
    SimResult b = run(sc);
    CHECK(traces_equal(a.trace, b.trace));
}

TEST_CASE("processing order does not change the trace") {
    Scenario sc = make_circle_scenario(10);
    sc.max_ticks = 400;
    SimResult base = run(sc);

    std::vector<int> order(sc.agents.size());
    std::iota(order.begin(), order.end(), 0);
    std::reverse(order.begin(), order.end());
    SimResult reversed = run(sc, order);
    CHECK(traces_equal(base.trace, reversed.trace));

    std::mt19937 rng(3);
    std::shuffle(order.begin(), order.end(), rng);
    SimResult shuffled = run(sc, order);
    CHECK(traces_equal(base.trace, shuffled.trace));
}

TEST_CASE("DI speed stays clamped in the trace") {
    Scenario sc = make_circle_scenario(10);
    sc.model = Model::DoubleIntegrator;
    sc.max_ticks = 600;
    SimResult result = run(sc);
    for (const TraceRecord& r : result.trace) {
        CHECK(r.v.norm() <= sc.limits.v_max + 1e-9);
    }
}

TEST_CASE("metrics agree with the trace") {
    Scenario sc = make_circle_scenario(10);
    sc.max_ticks = 400;
    SimResult result = run(sc);

    double min_sep = std::numeric_limits<double>::infinity();
    int collisions = 0;
    int max_tick = 0;
    for (const TraceRecord& a : result.trace) max_tick = std::max(max_tick, a.tick);
    for (int tick = 0; tick <= max_tick; ++tick) {
        std::vector<const TraceRecord*> now;
        for (const TraceRecord& r : result.trace) {
            if (r.tick == tick) now.push_back(&r);
        }
        for (std::size_t i = 0; i < now.size(); ++i) {
            for (std::size_t j = i + 1; j < now.size(); ++j) {
                double sep = distance(now[i]->p, now[j]->p);
                min_sep = std::min(min_sep, sep);
                if (sep < 0.5 - 1e-6) ++collisions;
            }
        }
    }
    CHECK(result.metrics.min_separation == doctest::Approx(min_sep));
    CHECK(result.metrics.collision_count == collisions);
}

TEST_CASE("trace shape: contiguous ticks, one record per agent") {
    Scenario sc = make_circle_scenario(4);
    sc.max_ticks = 300;
    SimResult result = run(sc);
    const std::size_t n = sc.agents.size();
    REQUIRE(result.trace.size() % n == 0);
    std::size_t ticks = result.trace.size() / n;
    for (std::size_t t = 0; t < ticks; ++t) {
        for (std::size_t i = 0; i < n; ++i) {
            const TraceRecord& r = result.trace[t * n + i];
            CHECK(r.tick == static_cast<int>(t));
            CHECK(r.id == static_cast<int>(i));
        }
    }
}

TEST_CASE("exit codes cover the whole outcome space") {
    for (int collisions : {0, 3}) {
        for (bool all_arrived : {false, true}) {
            for (int deadlocks : {0, 2}) {
                RunMetrics m;
                m.collision_count = collisions;
                m.all_arrived = all_arrived;
                m.deadlock.detected = deadlocks;
                int code = exit_code_for(m);
                if (collisions > 0) {
                    CHECK(code == 2);
                } else if (!all_arrived) {
                    CHECK(code == 3);
                } else {
                    CHECK(code == 0);
                }
            }
        }
    }
}

TEST_CASE("head-on pair resolves without contact") {
    Scenario sc = make_pairs_scenario(1);
    sc.max_ticks = 800;
    SimResult result = run(sc);
    CHECK(result.metrics.collision_count == 0);
    CHECK(result.metrics.all_arrived);
}

TEST_CASE("orca method runs through the simulator") {
    // An offset crossing, where orca has room to resolve.
    Scenario sc;
    sc.name = "orca_cross";
    sc.method = Method::Orca;
    sc.agents.push_back({{-4.0, 0.1}, {4.0, 0.1}, 0.25});
    sc.agents.push_back({{4.0, -0.1}, {-4.0, -0.1}, 0.25});
    sc.max_ticks = 800;
    SimResult result = run(sc);
    CHECK(result.metrics.collision_count == 0);
    CHECK(result.metrics.all_arrived);

    // The perfectly symmetric antipodal ring wedges orca agents at contact
    // distance; it must still never collide.
    Scenario ring = make_circle_scenario(4);
    ring.method = Method::Orca;
    ring.max_ticks = 400;
    SimResult wedged = run(ring);
    CHECK(wedged.metrics.collision_count == 0);
    CHECK(wedged.metrics.min_separation >= 0.5 - 1e-6);
}

TEST_CASE("orca DI at 25 agents degrades: collision or non-arrival") {
    Scenario sc = make_circle_scenario(25);
    sc.model = Model::DoubleIntegrator;
    sc.method = Method::Orca;
    sc.max_ticks = 1500;
    SimResult result = run(sc);
    CHECK((result.metrics.collision_count > 0 || !result.metrics.all_arrived));
    MESSAGE("orca di circle25: collisions ", result.metrics.collision_count, ", arrived ",
            result.metrics.arrived_count, "/25, first ", result.metrics.ticks_run, " ticks");
}

TEST_CASE("obstacle clear of the corridor: agent passes and arrives") {
    Scenario sc;
    sc.name = "obstacle_pass";
    sc.agents.push_back({{-3.0, 0.0}, {3.0, 0.0}, 0.25});
    sc.obstacles.push_back({{0.0, -2.0}, 0.4, 0.0, 1.0});
    sc.max_ticks = 600;
    SimResult result = run(sc);
    CHECK(result.metrics.all_arrived);
    CHECK(result.metrics.collision_count == 0);
    for (const TraceRecord& r : result.trace) {
        CHECK(distance(r.p, {0.0, -2.0}) >= 0.4 + 0.25 - 1e-6);
    }
}

TEST_CASE("blocking obstacle: agent stalls at the buffered bisector, never closer") {
    // Obstacles contribute a generator bisector but cast no velocity cones,
    // so a blocking obstacle stalls the agent at twice the combined radius.
    Scenario sc;
    sc.name = "obstacle_stall";
    sc.agents.push_back({{-3.0, 0.0}, {3.0, 0.0}, 0.25});
    sc.obstacles.push_back({{0.0, -0.2}, 0.4, 0.0, 1.0});
    sc.max_ticks = 400;
    SimResult result = run(sc);
    CHECK(!result.metrics.all_arrived);
    CHECK(result.metrics.collision_count == 0);
    double closest = 1e9;
    for (const TraceRecord& r : result.trace) closest = std::min(closest, distance(r.p, {0.0, -0.2}));
    CHECK(closest >= 2.0 * (0.4 + 0.25) - 1e-3);  // stall distance, not contact distance
    // The stall registers as a deadlock with no partner to switch with.
    int final_tick = result.metrics.ticks_run;
    for (const TraceRecord& r : result.trace) {
        if (r.tick == final_tick) CHECK(r.mode == Mode::Deadlock);
    }
}
