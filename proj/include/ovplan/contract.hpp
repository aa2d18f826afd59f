#pragma once

#include <string>
#include <vector>

#include "ovplan/geometry.hpp"
#include "ovplan/route.hpp"

namespace ovplan {

/// One timed confidence region: mean, 2x2 covariance, confidence scalar and
/// the time interval it covers.
struct EllipseRegion {
    LocalPoint mean;
    double cov_xx = 1.0;  // m^2
    double cov_xy = 0.0;  // m^2
    double cov_yy = 1.0;  // m^2
    double z = 1.0;       // confidence scalar, > 0
    double t_start = 0.0;
    double t_end = 0.0;
    bool regularized = false;  // set when the covariance needed diagonal loading

    /// Geometric realization: semi-axes z * sqrt(lambda_i) of the covariance
    /// eigenvalues, rotated to the dominant eigenvector.
    Ellipse derived_ellipse() const;
    double mahalanobis(LocalPoint y) const;
    void validate() const;
};

/// Symmetric 2x2 eigendecomposition, eigenvalues sorted descending; the
/// returned vector is the unit eigenvector of the larger eigenvalue.
struct EigenPair {
    double lambda1 = 0.0;
    double lambda2 = 0.0;
    LocalPoint v1{1.0, 0.0};
};
EigenPair eigen_symmetric_2x2(double xx, double xy, double yy);

/// Ordered, time-contiguous regions covering one simulation segment.
struct OperationalVolume {
    std::vector<EllipseRegion> regions;
    double start = 0.0;
    double end = 0.0;

    void validate() const;
};

struct Contract {
    std::string id;
    Route route;
    std::vector<OperationalVolume> ovs;
    double departure_time = 0.0;
    // Uncertainty band the generating simulation drew its speeds from; reused
    // by accuracy verification.
    double speed_low = 13.0;
    double speed_high = 17.0;

    double start_time() const;
    double end_time() const;
    void validate() const;
};

}  // namespace ovplan
