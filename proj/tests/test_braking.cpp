#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "vrvo/braking.hpp"

using namespace vrvo;

namespace {

// Independent check: integrate the two-phase profile (constant-acceleration
// ramp to v_int over t_h, then brake at a_max) with trapezoidal steps and
// report the terminal position.
double integrate_profile(double v0, double v_int, const KinodynamicLimits& lim,
                         double step = 1e-4) {
    double x = 0.0;
    double v = v0;
    double a1 = (v_int - v0) / lim.t_h;
    for (double t = 0.0; t < lim.t_h - 1e-12; t += step) {
        double h = std::min(step, lim.t_h - t);
        double v_next = v + a1 * h;
        x += 0.5 * (v + v_next) * h;
        v = v_next;
    }
    double brake = -lim.a_max * (v >= 0.0 ? 1.0 : -1.0);
    int guard = 400000;
    while (std::abs(v) > 1e-12 && guard-- > 0) {
        double h = std::min(step, std::abs(v / brake));
        double v_next = v + brake * h;
        if (v * v_next < 0.0) v_next = 0.0;
        x += 0.5 * (v + v_next) * h;
        v = v_next;
    }
    return x;
}

KinodynamicLimits default_limits() { return {2.0, 1.0, 1.0, 0.1}; }

}  // namespace

TEST_CASE("limits validity") {
    CHECK(default_limits().valid());
    CHECK(!KinodynamicLimits{2.0, 1.0, 1.0, 0.3}.valid());  // t_h not a multiple of dt
    CHECK(!KinodynamicLimits{2.0, 1.0, 0.05, 0.1}.valid());  // dt > t_h
    CHECK(!KinodynamicLimits{0.0, 1.0, 1.0, 0.1}.valid());
    CHECK(default_limits().horizon_steps() == 10);
}

TEST_CASE("rest start, 2 m ahead") {
    auto v = solve_axis(0.0, 2.0, default_limits());
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx((-1.0 + std::sqrt(17.0)) / 2.0));
    double s_int = 0.5 * (0.0 + *v);
    double s_stop = (*v) * (*v) / 2.0;
    CHECK(s_int == doctest::Approx(0.7807764064));
    CHECK(s_stop == doctest::Approx(1.2192235936));
    CHECK(s_int + s_stop == doctest::Approx(2.0));
    CHECK(integrate_profile(0.0, *v, default_limits()) == doctest::Approx(2.0).epsilon(1e-3));
}

TEST_CASE("already moving at exactly the stopping distance") {
    auto v = solve_axis(1.0, 0.5, default_limits());
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(0.0));  // roots {0, -1}; the toward-target root is 0
}

TEST_CASE("at the target, at rest") {
    auto v = solve_axis(0.0, 0.0, default_limits());
    REQUIRE(v.has_value());
    CHECK(*v == doctest::Approx(0.0));
}

TEST_CASE("negative targets mirror positive ones") {
    auto fwd = solve_axis(0.3, 1.7, default_limits());
    auto bwd = solve_axis(-0.3, -1.7, default_limits());
    REQUIRE(fwd.has_value());
    REQUIRE(bwd.has_value());
    CHECK(*fwd == doctest::Approx(-*bwd));
}

TEST_CASE("overshoot within the horizon is infeasible") {
    // Moving at 2 m/s toward a target 0.05 m away: even braking flat out
    // travels farther than that during the horizon.
    auto v = solve_axis(2.0, 0.05, default_limits());
    CHECK(!v.has_value());
}

TEST_CASE("reversal profiles are rejected") {
    // Moving away from the target fast; the ramp would carry the agent
    // backward before any progress is made.
    auto v = solve_axis(-1.0, 0.1, default_limits());
    CHECK(!v.has_value());
}

TEST_CASE("quadratic residual of the returned root") {
    std::mt19937 rng(11);
    std::uniform_real_distribution<double> vel(-2.0, 2.0);
    std::uniform_real_distribution<double> dist(-4.0, 4.0);
    KinodynamicLimits lim = default_limits();
    for (int i = 0; i < 2000; ++i) {
        double v0 = vel(rng);
        double s = dist(rng);
        auto v = solve_axis(v0, s, lim);
        if (!v.has_value()) continue;
        double sf = s < 0.0 ? -s : s;
        double v0f = s < 0.0 ? -v0 : v0;
        double vf = s < 0.0 ? -*v : *v;
        double residual =
            vf * vf + lim.a_max * lim.t_h * vf + (lim.a_max * lim.t_h * v0f - 2.0 * lim.a_max * sf);
        CHECK(std::abs(residual) <= 1e-9);
    }
}

TEST_CASE("feasible roots land on the target under forward integration") {
    std::mt19937 rng(77);
    std::uniform_real_distribution<double> vel(-2.0, 2.0);
    std::uniform_real_distribution<double> dist(-5.0, 5.0);
    std::uniform_real_distribution<double> horizon_steps(1.0, 20.0);
    std::uniform_real_distribution<double> accel(0.5, 3.0);
    int feasible = 0;
    for (int i = 0; i < 200; ++i) {
        KinodynamicLimits lim{10.0, accel(rng), 0.1 * std::floor(horizon_steps(rng)), 0.1};
        double v0 = vel(rng);
        double s = dist(rng);
        auto v = solve_axis(v0, s, lim);
        if (!v.has_value()) continue;
        ++feasible;
        double landed = integrate_profile(v0, *v, lim);
        CHECK(std::abs(landed - s) <= 1e-3);

        // Magnitude composition: ramp and stop distances add up to |s|.
        double s_int = 0.5 * lim.t_h * (v0 + *v);
        double s_stop = (*v) * (*v) / (2.0 * lim.a_max) * (*v >= 0.0 ? 1.0 : -1.0);
        CHECK(std::abs(s_int) + std::abs(s_stop) == doctest::Approx(std::abs(s)).epsilon(1e-6));
    }
    CHECK(feasible > 50);
}

TEST_CASE("plan from rest toward (2, 0)") {
    AgentState self{0, {0.0, 0.0}, {0.0, 0.0}, {5.0, 0.0}, 0.25, Mode::Default};
    BrakingPlan plan = plan_braking(self, {2.0, 0.0}, default_limits());
    REQUIRE(plan.feasible);
    CHECK(plan.v_int.x == doctest::Approx(1.5615528128));
    CHECK(plan.v_int.y == doctest::Approx(0.0));
    CHECK(plan.p_int.x == doctest::Approx(0.7807764064));
    CHECK(plan.t_b == doctest::Approx(1.5615528128));
}

TEST_CASE("plan at the target, at rest") {
    AgentState self{0, {1.0, -1.0}, {0.0, 0.0}, {1.0, -1.0}, 0.25, Mode::Default};
    BrakingPlan plan = plan_braking(self, self.p, default_limits());
    REQUIRE(plan.feasible);
    CHECK(plan.v_int.x == doctest::Approx(0.0));
    CHECK(plan.v_int.y == doctest::Approx(0.0));
    CHECK(plan.p_int.x == doctest::Approx(self.p.x));
    CHECK(plan.p_int.y == doctest::Approx(self.p.y));
    CHECK(plan.t_b == doctest::Approx(0.0));
}

TEST_CASE("diagonal symmetry: both axes solve identically") {
    KinodynamicLimits lim{10.0, 1.0, 1.0, 0.1};  // v_max high enough not to clamp
    AgentState self{0, {0.0, 0.0}, {0.0, 0.0}, {5.0, 5.0}, 0.25, Mode::Default};
    BrakingPlan plan = plan_braking(self, {2.0, 2.0}, lim);
    REQUIRE(plan.feasible);
    CHECK(std::abs(plan.v_int.x - plan.v_int.y) <= 1e-12);
}

TEST_CASE("speed clamp rescales isotropically, direction unchanged") {
    AgentState self{0, {0.0, 0.0}, {0.0, 0.0}, {5.0, 5.0}, 0.25, Mode::Default};
    KinodynamicLimits lim = default_limits();  // v_max = 2
    BrakingPlan plan = plan_braking(self, {4.0, 3.0}, lim);
    REQUIRE(plan.feasible);
    CHECK(plan.v_int.norm() == doctest::Approx(2.0));
    KinodynamicLimits wide = lim;
    wide.v_max = 100.0;
    BrakingPlan raw = plan_braking(self, {4.0, 3.0}, wide);
    CHECK(angle_between(plan.v_int, raw.v_int) <= 1e-12);
}

TEST_CASE("infeasible axis marks the whole plan infeasible") {
    AgentState self{0, {0.0, 0.0}, {2.0, 0.0}, {5.0, 0.0}, 0.25, Mode::Default};
    BrakingPlan plan = plan_braking(self, {0.05, 1.0}, default_limits());
    CHECK(!plan.feasible);
    CHECK(plan.v_int.x == doctest::Approx(0.0));
    CHECK(plan.v_int.y == doctest::Approx(0.0));
}
