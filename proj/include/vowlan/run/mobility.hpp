// Copyright (c) 2026 vowlansim contributors
// SPDX-License-Identifier: Apache-2.0

#ifndef VOWLAN_RUN_MOBILITY_HPP
#define VOWLAN_RUN_MOBILITY_HPP

#include <cmath>
#include <vector>

#include "vowlan/sim/error.hpp"
#include "vowlan/sim/time.hpp"

namespace vowlan::run {

struct Position {
    double x = 0;
    double y = 0;

    bool operator==(const Position&) const = default;
};

inline double distance_m(Position a, Position b) {
    return std::hypot(a.x - b.x, a.y - b.y);
}

enum class SpeedClass { Slow, Fast };

inline const char* speed_class_name(SpeedClass s) {
    return s == SpeedClass::Slow ? "slow" : "fast";
}

inline constexpr double kSlowSpeedMps = 1.0;
inline constexpr double kFastSpeedMps = 5.0;

inline double speed_mps(SpeedClass s) {
    return s == SpeedClass::Slow ? kSlowSpeedMps : kFastSpeedMps;
}

// Piecewise-linear movement. The first point is the node's position at t=0;
// arrival times are derived from leg lengths and the per-leg speed class.
// Past the last waypoint the node holds position. A static node is a path
// with a single point.
struct WaypointPath {
    struct Point {
        Position pos;
        SimTime arrival{};
    };

    std::vector<Point> points;
    std::vector<SpeedClass> leg_speeds; // size == points.size() - 1

    static WaypointPath fixed(Position p) {
        WaypointPath path;
        path.points.push_back({p, SimTime{}});
        return path;
    }

    void append_leg(Position to, SpeedClass speed) {
        if (points.empty())
            throw MisuseError("WaypointPath: append_leg before a start point");
        const Point& last = points.back();
        const double dist = distance_m(last.pos, to);
        const double leg_seconds = dist / speed_mps(speed);
        points.push_back({to, last.arrival + SimTime::from_seconds(leg_seconds)});
        leg_speeds.push_back(speed);
    }

    void validate() const {
        if (points.empty())
            throw ConfigError("mobility: empty waypoint path");
        for (std::size_t i = 1; i < points.size(); ++i)
            if (!(points[i].arrival > points[i - 1].arrival))
                throw ConfigError("mobility: waypoint arrival times must strictly increase");
    }
};

inline Position position_at(const WaypointPath& path, SimTime t) {
    if (t.ticks < 0)
        throw MisuseError("position_at: negative time");
    if (path.points.empty())
        throw MisuseError("position_at: empty path");
    if (t <= path.points.front().arrival)
        return path.points.front().pos;
    for (std::size_t i = 1; i < path.points.size(); ++i) {
        const auto& a = path.points[i - 1];
        const auto& b = path.points[i];
        if (t <= b.arrival) {
            const double span = static_cast<double>((b.arrival - a.arrival).ticks);
            const double f = static_cast<double>((t - a.arrival).ticks) / span;
            return {a.pos.x + f * (b.pos.x - a.pos.x), a.pos.y + f * (b.pos.y - a.pos.y)};
        }
    }
    return path.points.back().pos; // clamp after the path ends
}

} // namespace vowlan::run

#endif
