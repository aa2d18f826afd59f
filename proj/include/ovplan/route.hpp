#pragma once

#include <vector>

#include "ovplan/geometry.hpp"

namespace ovplan {

struct RouteWaypoint {
    LocalPoint position;
    double eta = 0.0;  // seconds since scenario epoch
};

/// Planned cruise-phase polyline between two vertiports.
struct Route {
    std::vector<RouteWaypoint> waypoints;
    double total_length = 0.0;    // meters
    double departure_time = 0.0;  // seconds since scenario epoch
    double cruise_speed = 15.0;   // m/s

    /// Checks waypoint count, length consistency, eta monotonicity and the
    /// eta = departure + cumulative_length / cruise_speed relation.
    void validate() const;
};

}  // namespace ovplan
