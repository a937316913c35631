#pragma once

#include <algorithm>
#include <cmath>

namespace vrvo {

// 2-D vector, doubles throughout. Used for positions [m], velocities [m/s]
// and accelerations [m/s^2] alike.
struct Vec2 {
    double x = 0.0;
    double y = 0.0;

    constexpr Vec2() = default;
    constexpr Vec2(double x_, double y_) : x(x_), y(y_) {}

    constexpr Vec2 operator+(Vec2 r) const { return {x + r.x, y + r.y}; }
    constexpr Vec2 operator-(Vec2 r) const { return {x - r.x, y - r.y}; }
    constexpr Vec2 operator-() const { return {-x, -y}; }
    constexpr Vec2 operator*(double s) const { return {x * s, y * s}; }
    constexpr Vec2 operator/(double s) const { return {x / s, y / s}; }
    friend constexpr Vec2 operator*(double s, Vec2 v) { return {v.x * s, v.y * s}; }

    Vec2& operator+=(Vec2 r) {
        x += r.x;
        y += r.y;
        return *this;
    }
    Vec2& operator-=(Vec2 r) {
        x -= r.x;
        y -= r.y;
        return *this;
    }
    Vec2& operator*=(double s) {
        x *= s;
        y *= s;
        return *this;
    }

    constexpr bool operator==(const Vec2&) const = default;

    constexpr double dot(Vec2 r) const { return x * r.x + y * r.y; }
    constexpr double cross(Vec2 r) const { return x * r.y - y * r.x; }
    constexpr double norm_sq() const { return x * x + y * y; }
    double norm() const { return std::sqrt(x * x + y * y); }

    // Counter-clockwise quarter turn.
    constexpr Vec2 perp() const { return {-y, x}; }

    Vec2 normalized(double eps = 1e-12) const {
        double n = norm();
        if (n <= eps) return {0.0, 0.0};
        return {x / n, y / n};
    }

    bool finite() const { return std::isfinite(x) && std::isfinite(y); }
};

inline double distance(Vec2 a, Vec2 b) { return (a - b).norm(); }

// Angle in [0, pi] between two nonzero vectors; 0 if either is zero.
inline double angle_between(Vec2 a, Vec2 b) {
    double na = a.norm();
    double nb = b.norm();
    if (na == 0.0 || nb == 0.0) return 0.0;
    double c = a.dot(b) / (na * nb);
    return std::acos(std::clamp(c, -1.0, 1.0));
}

}  // namespace vrvo
