#pragma once

// Independent test oracles. These deliberately use different algorithms than
// the library (winding numbers, quadratic discriminants, dense sampling, grid
// Dijkstra) so they can arbitrate its results.

#include <string>
#include <vector>

#include "ovplan/airspace.hpp"
#include "ovplan/geometry.hpp"
#include "ovplan/rng.hpp"

namespace ovplan::testing {

/// Winding-number point-in-polygon (angle summation). Unreliable only within
/// ~1e-9 of the boundary.
bool winding_point_in_polygon(LocalPoint p, const Polygon& poly);

/// Random simple polygon: star-shaped around its center with sorted random
/// angles and random radii, frequently concave.
Polygon random_star_polygon(Rng& rng, LocalPoint center, double scale, int min_vertices = 5,
                            int max_vertices = 12);

/// Quadratic-discriminant test of segment-vs-disc in the ellipse's unit-circle
/// frame, mirroring the margin convention of segment_intersects_ellipse.
bool disc_segment_oracle(LocalPoint a, LocalPoint b, const Ellipse& e, double margin);
/// Signed distance-to-threshold in the unit-circle frame, for excluding
/// near-tangent cases from exact-agreement sweeps.
double disc_segment_margin_gap(LocalPoint a, LocalPoint b, const Ellipse& e, double margin);

/// Min distance from ab to the polygon boundary by dense sampling of both.
double dense_clearance_oracle(LocalPoint a, LocalPoint b, const Polygon& poly, int samples);

/// Dijkstra over a `spacing`-meter 8-connected grid augmented with offset NFZ
/// vertices and the two endpoints (visibility edges between augmented nodes).
/// Returns the shortest path length honoring the clearance, or infinity.
double grid_shortest_path(const AirspaceModel& airspace, LocalPoint start, LocalPoint goal,
                          double clearance, double spacing);

std::string fixture_path(const std::string& name);

}  // namespace ovplan::testing
