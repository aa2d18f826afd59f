#pragma once

#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

namespace ovplan {

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kEarthRadiusM = 6371000.0;

/// Normalize an angle to (-pi, pi].
double normalize_angle(double a);

struct GeoPoint {
    double lat = 0.0;  // degrees WGS84
    double lon = 0.0;  // degrees WGS84
    double alt = 0.0;  // meters above reference

    void validate() const;
};

struct LocalPoint {
    double x = 0.0;  // meters east of projection origin
    double y = 0.0;  // meters north of projection origin

    LocalPoint operator+(LocalPoint o) const { return {x + o.x, y + o.y}; }
    LocalPoint operator-(LocalPoint o) const { return {x - o.x, y - o.y}; }
    LocalPoint operator*(double s) const { return {x * s, y * s}; }
    double norm() const { return std::hypot(x, y); }
};

inline double distance(LocalPoint a, LocalPoint b) { return (a - b).norm(); }
inline double dot(LocalPoint a, LocalPoint b) { return a.x * b.x + a.y * b.y; }
inline double cross(LocalPoint a, LocalPoint b) { return a.x * b.y - a.y * b.x; }

/// Simple polygon, counter-clockwise, implicitly closed (first vertex != last).
struct Polygon {
    std::vector<LocalPoint> vertices;

    /// >= 3 vertices, no repeated closing vertex, no self-intersection.
    bool is_simple() const;
    double signed_area() const;
    /// Reverses the vertex order if the ring is clockwise.
    void ensure_ccw();
    void validate() const;
};

struct Ellipse {
    LocalPoint center;
    double semi_major = 1.0;  // meters
    double semi_minor = 1.0;  // meters
    double rotation = 0.0;    // radians, major axis from +x, in (-pi, pi]

    void validate() const;
};

// -- projection ---------------------------------------------------------

/// Equirectangular local tangent-plane projection about `origin`.
LocalPoint project(const GeoPoint& p, const GeoPoint& origin);
/// Exact inverse of project (altitude is carried through unchanged).
GeoPoint unproject(LocalPoint p, const GeoPoint& origin, double alt = 0.0);

// -- segment primitives --------------------------------------------------

double point_segment_distance(LocalPoint p, LocalPoint a, LocalPoint b);
/// True if segments ab and cd share any point (touching counts).
bool segments_intersect(LocalPoint a, LocalPoint b, LocalPoint c, LocalPoint d);
double segment_segment_distance(LocalPoint a, LocalPoint b, LocalPoint c, LocalPoint d);

// -- polygon predicates ----------------------------------------------------

/// Boundary counts as inside.
bool point_in_polygon(LocalPoint p, const Polygon& poly);
/// True if ab crosses any edge, touches the boundary, or an endpoint is inside.
bool segment_intersects_polygon(LocalPoint a, LocalPoint b, const Polygon& poly);
/// Minimum distance from ab to the polygon boundary. Throws std::invalid_argument
/// if the segment intersects the polygon.
double segment_polygon_clearance(LocalPoint a, LocalPoint b, const Polygon& poly);
double point_polygon_distance(LocalPoint p, const Polygon& poly);

// -- ellipse predicates -----------------------------------------------------

/// Boundary counts as inside.
bool point_in_ellipse(LocalPoint p, const Ellipse& e);
/// True if ab comes within `margin` meters of e. The margin is scaled into the
/// unit-circle frame by the smaller semi-axis, which over-approximates it.
bool segment_intersects_ellipse(LocalPoint a, LocalPoint b, const Ellipse& e,
                                double margin = 0.0);
/// Uniformly parameterized boundary polyline of the ellipse.
std::vector<LocalPoint> ellipse_boundary(const Ellipse& e, int samples = 64);
/// Conservative overlap test via center containment plus 64-point boundary
/// sampling; a slight under-approximation of exact conic intersection.
bool ellipses_overlap(const Ellipse& e1, const Ellipse& e2);

}  // namespace ovplan
