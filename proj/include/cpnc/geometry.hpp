#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>

namespace cpnc {

// All lengths are centimeters, all angles radians.
struct Point2 {
    double x = 0.0;
    double y = 0.0;

    friend bool operator==(const Point2&, const Point2&) = default;
};

inline Point2 operator+(Point2 a, Point2 b) { return {a.x + b.x, a.y + b.y}; }
inline Point2 operator-(Point2 a, Point2 b) { return {a.x - b.x, a.y - b.y}; }
inline Point2 operator*(double s, Point2 a) { return {s * a.x, s * a.y}; }

inline double dot(Point2 a, Point2 b) { return a.x * b.x + a.y * b.y; }
inline double cross(Point2 a, Point2 b) { return a.x * b.y - a.y * b.x; }
inline double norm(Point2 a) { return std::hypot(a.x, a.y); }
inline double distance(Point2 a, Point2 b) { return norm(a - b); }

struct Segment {
    Point2 a;
    Point2 b;

    friend bool operator==(const Segment&, const Segment&) = default;
};

// Heading is measured counter-clockwise from +x.
struct Pose {
    Point2 position;
    double heading = 0.0;

    friend bool operator==(const Pose&, const Pose&) = default;
};

/// Maps any finite angle into (-pi, pi]. Values already in range are returned unchanged.
inline double normalize_angle(double angle)
{
    constexpr double two_pi = 2.0 * std::numbers::pi;
    double r = std::remainder(angle, two_pi);
    if (r <= -std::numbers::pi) {
        r += two_pi;
    }
    return r;
}

inline double point_segment_distance(Point2 p, const Segment& s)
{
    const Point2 e = s.b - s.a;
    const double len2 = dot(e, e);
    double t = len2 > 0.0 ? dot(p - s.a, e) / len2 : 0.0;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, s.a + t * e);
}

/// Distance along a unit-direction ray from `origin` to `s`, if the ray meets it.
/// A ray running along a collinear segment reports the nearest point of overlap.
inline std::optional<double> ray_segment_distance(Point2 origin, Point2 dir, const Segment& s)
{
    constexpr double eps = 1e-12;
    const Point2 e = s.b - s.a;
    const Point2 ao = s.a - origin;
    const double denom = cross(dir, e);
    if (std::abs(denom) < eps * norm(e)) {
        if (std::abs(cross(ao, dir)) > eps * (1.0 + norm(ao))) {
            return std::nullopt;
        }
        const double ta = dot(ao, dir);
        const double tb = dot(s.b - origin, dir);
        if (ta >= 0.0 && tb >= 0.0) {
            return std::min(ta, tb);
        }
        if (ta < 0.0 && tb < 0.0) {
            return std::nullopt;
        }
        return 0.0;
    }
    const double t = cross(ao, e) / denom;
    const double u = cross(ao, dir) / denom;
    if (t < 0.0 || u < 0.0 || u > 1.0) {
        return std::nullopt;
    }
    return t;
}

} // namespace cpnc
