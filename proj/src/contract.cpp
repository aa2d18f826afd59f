#include "ovplan/contract.hpp"

#include <cmath>
#include <stdexcept>

namespace ovplan {

void Route::validate() const {
    if (waypoints.size() < 2)
        throw std::invalid_argument("Route: needs at least 2 waypoints");
    if (!(cruise_speed > 0.0))
        throw std::invalid_argument("Route: cruise_speed must be positive");
    double cum = 0.0;
    for (std::size_t i = 0; i < waypoints.size(); ++i) {
        if (i > 0) {
            cum += distance(waypoints[i - 1].position, waypoints[i].position);
            if (!(waypoints[i].eta > waypoints[i - 1].eta))
                throw std::invalid_argument("Route: etas must be strictly increasing");
        }
        const double expected = departure_time + cum / cruise_speed;
        if (std::abs(waypoints[i].eta - expected) > 1e-6 * std::max(1.0, expected))
            throw std::invalid_argument("Route: eta inconsistent with cumulative length");
    }
    if (std::abs(cum - total_length) > 1e-6 * std::max(1.0, total_length))
        throw std::invalid_argument("Route: total_length inconsistent with waypoints");
}

EigenPair eigen_symmetric_2x2(double xx, double xy, double yy) {
    EigenPair out;
    const double tr = xx + yy;
    const double det = xx * yy - xy * xy;
    const double disc = std::sqrt(std::max(0.0, tr * tr * 0.25 - det));
    out.lambda1 = tr * 0.5 + disc;
    out.lambda2 = tr * 0.5 - disc;
    if (std::abs(xy) > 1e-30) {
        out.v1 = {out.lambda1 - yy, xy};
    } else {
        out.v1 = (xx >= yy) ? LocalPoint{1.0, 0.0} : LocalPoint{0.0, 1.0};
    }
    const double n = out.v1.norm();
    if (n > 0.0) out.v1 = out.v1 * (1.0 / n);
    return out;
}

Ellipse EllipseRegion::derived_ellipse() const {
    const EigenPair eig = eigen_symmetric_2x2(cov_xx, cov_xy, cov_yy);
    Ellipse e;
    e.center = mean;
    e.semi_major = z * std::sqrt(std::max(0.0, eig.lambda1));
    e.semi_minor = z * std::sqrt(std::max(0.0, eig.lambda2));
    e.rotation = normalize_angle(std::atan2(eig.v1.y, eig.v1.x));
    return e;
}

double EllipseRegion::mahalanobis(LocalPoint y) const {
    const double det = cov_xx * cov_yy - cov_xy * cov_xy;
    if (!(det > 0.0))
        throw std::domain_error("EllipseRegion: singular covariance");
    const LocalPoint d = y - mean;
    const double q =
        (cov_yy * d.x * d.x - 2.0 * cov_xy * d.x * d.y + cov_xx * d.y * d.y) / det;
    return std::sqrt(std::max(0.0, q));
}

void EllipseRegion::validate() const {
    const double det = cov_xx * cov_yy - cov_xy * cov_xy;
    if (!(cov_xx > 0.0 && cov_yy > 0.0 && det > 0.0))
        throw std::invalid_argument("EllipseRegion: covariance not positive-definite");
    if (!(z > 0.0)) throw std::invalid_argument("EllipseRegion: z must be positive");
    if (!(t_start < t_end))
        throw std::invalid_argument("EllipseRegion: requires t_start < t_end");
}

void OperationalVolume::validate() const {
    if (regions.empty())
        throw std::invalid_argument("OperationalVolume: no regions");
    if (!(start < end))
        throw std::invalid_argument("OperationalVolume: requires start < end");
    for (std::size_t i = 0; i < regions.size(); ++i) {
        regions[i].validate();
        if (i > 0 && std::abs(regions[i].t_start - regions[i - 1].t_end) > 1e-9)
            throw std::invalid_argument("OperationalVolume: regions not time-contiguous");
    }
    if (std::abs(regions.front().t_start - start) > 1e-9 ||
        std::abs(regions.back().t_end - end) > 1e-9)
        throw std::invalid_argument("OperationalVolume: regions do not tile [start, end]");
}

double Contract::start_time() const {
    return ovs.empty() ? departure_time : ovs.front().start;
}

double Contract::end_time() const {
    return ovs.empty() ? departure_time : ovs.back().end;
}

void Contract::validate() const {
    route.validate();
    if (ovs.empty()) throw std::invalid_argument("Contract: no operational volumes");
    for (std::size_t i = 0; i < ovs.size(); ++i) {
        ovs[i].validate();
        if (i > 0 && std::abs(ovs[i].start - ovs[i - 1].end) > 1e-9)
            throw std::invalid_argument("Contract: OVs not contiguous");
    }
    for (const RouteWaypoint& w : route.waypoints) {
        if (w.eta < start_time() - 1e-9 || w.eta > end_time() + 1e-9)
            throw std::invalid_argument("Contract: waypoint ETA outside OV coverage");
    }
}

}  // namespace ovplan
