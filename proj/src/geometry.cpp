#include "ovplan/geometry.hpp"

#include <algorithm>
#include <limits>

namespace ovplan {

namespace {

constexpr double kBoundaryEps = 1e-9;

// Sign of the cross product (r - p) x (q - p): >0 left turn, <0 right turn.
int orientation(LocalPoint p, LocalPoint q, LocalPoint r) {
    double v = cross(q - p, r - p);
    if (v > 0.0) return 1;
    if (v < 0.0) return -1;
    return 0;
}

bool on_segment_collinear(LocalPoint p, LocalPoint a, LocalPoint b) {
    return std::min(a.x, b.x) <= p.x && p.x <= std::max(a.x, b.x) &&
           std::min(a.y, b.y) <= p.y && p.y <= std::max(a.y, b.y);
}

}  // namespace

double normalize_angle(double a) {
    a = std::fmod(a, 2.0 * kPi);
    if (a > kPi) a -= 2.0 * kPi;
    if (a <= -kPi) a += 2.0 * kPi;
    return a;
}

void GeoPoint::validate() const {
    if (!(lat >= -90.0 && lat <= 90.0))
        throw std::invalid_argument("GeoPoint: lat out of [-90, 90]: " + std::to_string(lat));
    if (!(lon >= -180.0 && lon <= 180.0))
        throw std::invalid_argument("GeoPoint: lon out of [-180, 180]: " + std::to_string(lon));
}

double Polygon::signed_area() const {
    double s = 0.0;
    for (std::size_t i = 0; i < vertices.size(); ++i) {
        const LocalPoint& a = vertices[i];
        const LocalPoint& b = vertices[(i + 1) % vertices.size()];
        s += cross(a, b);
    }
    return 0.5 * s;
}

void Polygon::ensure_ccw() {
    if (signed_area() < 0.0) std::reverse(vertices.begin(), vertices.end());
}

bool Polygon::is_simple() const {
    const std::size_t n = vertices.size();
    if (n < 3) return false;
    for (std::size_t i = 0; i < n; ++i) {
        const LocalPoint a = vertices[i];
        const LocalPoint b = vertices[(i + 1) % n];
        if (distance(a, b) < kBoundaryEps) return false;
        for (std::size_t j = i + 1; j < n; ++j) {
            // Skip edges adjacent to edge i.
            if (j == i || (j + 1) % n == i || (i + 1) % n == j) continue;
            const LocalPoint c = vertices[j];
            const LocalPoint d = vertices[(j + 1) % n];
            if (segments_intersect(a, b, c, d)) return false;
        }
    }
    return true;
}

void Polygon::validate() const {
    if (vertices.size() < 3)
        throw std::invalid_argument("Polygon: needs at least 3 vertices");
    if (distance(vertices.front(), vertices.back()) < kBoundaryEps)
        throw std::invalid_argument("Polygon: first vertex must not repeat as last");
    if (!is_simple())
        throw std::invalid_argument("Polygon: self-intersecting or degenerate ring");
}

void Ellipse::validate() const {
    if (!(semi_minor > 0.0) || !(semi_major >= semi_minor))
        throw std::invalid_argument("Ellipse: requires semi_major >= semi_minor > 0");
    if (!(rotation > -kPi - 1e-12 && rotation <= kPi + 1e-12))
        throw std::invalid_argument("Ellipse: rotation not normalized to (-pi, pi]");
}

LocalPoint project(const GeoPoint& p, const GeoPoint& origin) {
    p.validate();
    origin.validate();
    const double dlat = (p.lat - origin.lat) * kPi / 180.0;
    const double dlon = (p.lon - origin.lon) * kPi / 180.0;
    return {kEarthRadiusM * std::cos(origin.lat * kPi / 180.0) * dlon,
            kEarthRadiusM * dlat};
}

GeoPoint unproject(LocalPoint p, const GeoPoint& origin, double alt) {
    origin.validate();
    GeoPoint g;
    g.lat = origin.lat + (p.y / kEarthRadiusM) * 180.0 / kPi;
    g.lon = origin.lon +
            (p.x / (kEarthRadiusM * std::cos(origin.lat * kPi / 180.0))) * 180.0 / kPi;
    g.alt = alt;
    return g;
}

double point_segment_distance(LocalPoint p, LocalPoint a, LocalPoint b) {
    const LocalPoint ab = b - a;
    const double len2 = dot(ab, ab);
    if (len2 == 0.0) return distance(p, a);
    double t = dot(p - a, ab) / len2;
    t = std::clamp(t, 0.0, 1.0);
    return distance(p, a + ab * t);
}

bool segments_intersect(LocalPoint a, LocalPoint b, LocalPoint c, LocalPoint d) {
    const int o1 = orientation(a, b, c);
    const int o2 = orientation(a, b, d);
    const int o3 = orientation(c, d, a);
    const int o4 = orientation(c, d, b);
    if (o1 != o2 && o3 != o4) return true;
    if (o1 == 0 && on_segment_collinear(c, a, b)) return true;
    if (o2 == 0 && on_segment_collinear(d, a, b)) return true;
    if (o3 == 0 && on_segment_collinear(a, c, d)) return true;
    if (o4 == 0 && on_segment_collinear(b, c, d)) return true;
    return false;
}

double segment_segment_distance(LocalPoint a, LocalPoint b, LocalPoint c, LocalPoint d) {
    if (segments_intersect(a, b, c, d)) return 0.0;
    return std::min(std::min(point_segment_distance(a, c, d), point_segment_distance(b, c, d)),
                    std::min(point_segment_distance(c, a, b), point_segment_distance(d, a, b)));
}

bool point_in_polygon(LocalPoint p, const Polygon& poly) {
    const std::size_t n = poly.vertices.size();
    // Boundary counts as inside.
    for (std::size_t i = 0; i < n; ++i) {
        if (point_segment_distance(p, poly.vertices[i], poly.vertices[(i + 1) % n]) <=
            kBoundaryEps)
            return true;
    }
    // Crossing-number test with the half-open edge rule.
    bool inside = false;
    for (std::size_t i = 0; i < n; ++i) {
        const LocalPoint a = poly.vertices[i];
        const LocalPoint b = poly.vertices[(i + 1) % n];
        if ((a.y > p.y) != (b.y > p.y)) {
            const double xint = a.x + (p.y - a.y) * (b.x - a.x) / (b.y - a.y);
            if (p.x < xint) inside = !inside;
        }
    }
    return inside;
}

bool segment_intersects_polygon(LocalPoint a, LocalPoint b, const Polygon& poly) {
    if (point_in_polygon(a, poly) || point_in_polygon(b, poly)) return true;
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        if (segments_intersect(a, b, poly.vertices[i], poly.vertices[(i + 1) % n]))
            return true;
    }
    return false;
}

double segment_polygon_clearance(LocalPoint a, LocalPoint b, const Polygon& poly) {
    if (segment_intersects_polygon(a, b, poly))
        throw std::invalid_argument("segment_polygon_clearance: segment intersects polygon");
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best, segment_segment_distance(a, b, poly.vertices[i],
                                                       poly.vertices[(i + 1) % n]));
    }
    return best;
}

double point_polygon_distance(LocalPoint p, const Polygon& poly) {
    double best = std::numeric_limits<double>::infinity();
    const std::size_t n = poly.vertices.size();
    for (std::size_t i = 0; i < n; ++i) {
        best = std::min(best,
                        point_segment_distance(p, poly.vertices[i], poly.vertices[(i + 1) % n]));
    }
    return best;
}

namespace {

// Map p into the frame where the ellipse is the unit circle at the origin.
LocalPoint to_unit_circle_frame(LocalPoint p, const Ellipse& e) {
    const LocalPoint d = p - e.center;
    const double c = std::cos(e.rotation);
    const double s = std::sin(e.rotation);
    return {(d.x * c + d.y * s) / e.semi_major, (-d.x * s + d.y * c) / e.semi_minor};
}

}  // namespace

bool point_in_ellipse(LocalPoint p, const Ellipse& e) {
    const LocalPoint u = to_unit_circle_frame(p, e);
    return dot(u, u) <= 1.0 + 1e-12;
}

bool segment_intersects_ellipse(LocalPoint a, LocalPoint b, const Ellipse& e, double margin) {
    const LocalPoint ua = to_unit_circle_frame(a, e);
    const LocalPoint ub = to_unit_circle_frame(b, e);
    const double reach = 1.0 + std::max(margin, 0.0) / e.semi_minor;
    return point_segment_distance({0.0, 0.0}, ua, ub) <= reach + 1e-12;
}

std::vector<LocalPoint> ellipse_boundary(const Ellipse& e, int samples) {
    std::vector<LocalPoint> pts;
    pts.reserve(static_cast<std::size_t>(samples));
    const double c = std::cos(e.rotation);
    const double s = std::sin(e.rotation);
    for (int k = 0; k < samples; ++k) {
        const double t = 2.0 * kPi * k / samples;
        const double px = e.semi_major * std::cos(t);
        const double py = e.semi_minor * std::sin(t);
        pts.push_back({e.center.x + px * c - py * s, e.center.y + px * s + py * c});
    }
    return pts;
}

bool ellipses_overlap(const Ellipse& e1, const Ellipse& e2) {
    if (point_in_ellipse(e1.center, e2) || point_in_ellipse(e2.center, e1)) return true;
    for (const LocalPoint& p : ellipse_boundary(e1, 64))
        if (point_in_ellipse(p, e2)) return true;
    for (const LocalPoint& p : ellipse_boundary(e2, 64))
        if (point_in_ellipse(p, e1)) return true;
    return false;
}

}  // namespace ovplan
