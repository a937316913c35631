#pragma once

#include "vrvo/vec2.hpp"

namespace vrvo {

enum class Mode { Default, Hold, Deadlock };

struct AgentState {
    int id = 0;
    Vec2 p;  // position [m]
    Vec2 v;  // velocity [m/s]
    Vec2 g;  // goal [m]
    double radius = 0.25;
    Mode mode = Mode::Default;
};

// Circular moving obstacle. Only worst-case motion bounds are known;
// no trajectory assumptions are made.
struct ObstacleState {
    Vec2 p;
    double radius = 0.25;
    double v_max = 0.0;  // top speed the obstacle may reach [m/s]
    double a_max = 1.0;  // deceleration available to the obstacle [m/s^2]
};

}  // namespace vrvo
