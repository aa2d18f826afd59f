#pragma once

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "ovplan/airspace.hpp"
#include "ovplan/route.hpp"

namespace ovplan {

struct RouterConfig {
    double arc_radius = 500.0;            // r, meters
    double arc_angle = kPi / 2.0;         // alpha, radians
    int arc_children = 7;                 // candidates per expansion
    double dedup_radius = 200.0;          // meters
    double heuristic_weight = 1.2;        // omega, in [1.1, 1.5]
    double conflict_penalty = 500.0;      // beta, meters
    double cruise_speed = 15.0;           // V_cruise, m/s
    double ov_margin = 200.0;             // d_min, meters
    double nfz_clearance = 50.0;          // meters
    int conflict_samples = 16;            // K
    bool disable_heuristic_cache = false; // recompute h on every pop (testing aid)

    void validate() const;
};

enum class NodeStatus { Open, Closed, InvalidConnection };

struct SearchNode {
    LocalPoint position;
    double g = 0.0;      // path cost from the origin, meters
    double h = 0.0;      // cached heuristic, meters
    double delta = 0.0;  // conflict probability of the edge reaching this node
    double eta = 0.0;    // departure_time + g / cruise_speed
    int parent = -1;     // index into the node arena, -1 for the root
    NodeStatus status = NodeStatus::Open;
};

enum class ConnectionResult { Valid, InvalidConnection, InvalidNode };

class NoRouteFound : public std::runtime_error {
public:
    NoRouteFound(const std::string& msg, std::size_t expanded)
        : std::runtime_error(msg + " (nodes expanded: " + std::to_string(expanded) + ")"),
          nodes_expanded(expanded) {}
    std::size_t nodes_expanded;
};

/// Candidate points at arc_radius spread regularly across arc_angle about the
/// given heading; a full 360-degree fan at the same spacing when the heading is
/// unset (root expansion).
std::vector<LocalPoint> arc_candidates(LocalPoint position, std::optional<double> heading,
                                       const RouterConfig& cfg);

/// Signed angle of each polygon vertex relative to the n -> goal ray,
/// normalized to (-pi, pi]; positive to the right of the ray.
std::vector<double> angle_set(LocalPoint n, LocalPoint goal, const Polygon& poly);

/// Weighted detour heuristic: omega * d(n, goal) with a clear line of sight,
/// otherwise omega * (d(n, v) + d(v, goal)) through the extreme vertex of the
/// nearest blocking no-fly zone with the smaller absolute angle.
double heuristic(LocalPoint n, LocalPoint goal, const AirspaceModel& airspace,
                 const RouterConfig& cfg);

/// Peak-normalized maximum conflict probability of the segment a -> b against
/// every time-aligned region of every registered contract, in [0, 1].
double conflict_delta(LocalPoint a, double eta_a, LocalPoint b, double eta_b,
                      const ContractStore& store, const RouterConfig& cfg);

/// Classifies the connection a -> b against bounds, no-fly zones and
/// time-aligned operational volumes.
ConnectionResult classify_connection(LocalPoint a, double eta_a, LocalPoint b,
                                     double eta_b, const AirspaceModel& airspace,
                                     const ContractStore& store, const RouterConfig& cfg);

/// Arc-expansion weighted A* between two vertiports. Throws NoRouteFound when
/// the open list exhausts.
Route plan(const AirspaceModel& airspace, const ContractStore& store,
           const std::string& from_id, const std::string& to_id, double departure_time,
           const RouterConfig& cfg);

}  // namespace ovplan
