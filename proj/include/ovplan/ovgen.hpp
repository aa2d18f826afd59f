#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "ovplan/contract.hpp"
#include "ovplan/flightsim.hpp"
#include "ovplan/rng.hpp"

namespace ovplan {

struct OvGenConfig {
    double inclusion = 0.95;       // x, desired minimum inclusion in (0, 1)
    double bloat_init = 1.5;       // initial bloat alpha
    double bloat_step = 0.1;       // bloat increment per retry
    int bloat_max_iters = 50;
    double region_duration = 10.0; // t_e, seconds per ellipse interval
    // Isotropic variance floor added to the fitted covariance. Sampled slices
    // can be needle-thin across track; the floor keeps a minimum lateral
    // footprint so an independent realization cannot slip past the narrow axis.
    double cov_floor = 625.0;      // m^2 (25 m standard deviation)
    int min_fit_sample = 15;       // |S_t^M| floor
    // Independent simulation realizations pooled before fitting (see
    // simulate_route_ensemble); used by the pipeline callers, not by
    // build_contract itself.
    int ensemble_runs = 8;

    void validate() const;
};

/// Random disjoint split: |fit| = ceil(n/2) >= min_fit_sample, holdout the
/// remainder. Throws when n < 2 * min_fit_sample.
std::pair<std::vector<AircraftState>, std::vector<AircraftState>> split_sample(
    std::span<const AircraftState> states, const OvGenConfig& cfg, Rng& rng);

/// Mean + sample covariance fit; z = |PPF((1-x)/2)| + bloat. Time interval is
/// left for the caller to fill. Near-singular covariances get diagonal loading
/// and a regularized flag.
EllipseRegion fit_ellipse(std::span<const AircraftState> fit, const OvGenConfig& cfg,
                          double bloat);

struct ValidationResult {
    bool passed = false;
    double fraction = 0.0;   // holdout fraction within the threshold distance
    double threshold = 0.0;  // x-th percentile of fit Mahalanobis distances
};

/// Holdout check: threshold = x-th percentile (linear interpolation) of the
/// fit set's Mahalanobis distances; passes when the holdout fraction at or
/// under the threshold reaches x.
ValidationResult validate_region(const EllipseRegion& region,
                                 std::span<const AircraftState> fit,
                                 std::span<const AircraftState> holdout,
                                 const OvGenConfig& cfg);

/// Split, fit, validate; escalates the bloat by bloat_step on failure. Throws
/// after bloat_max_iters failed attempts.
EllipseRegion build_region(std::span<const AircraftState> states, const OvGenConfig& cfg,
                           Rng& rng);

/// One OV per simulation segment, one region per t_e sub-interval; region k is
/// fitted on the pooled state slices covering its sub-interval so the region
/// describes the fleet through the whole interval, not a single instant.
/// Region RNG streams derive from (seed, segment, interval), so parallel and
/// sequential builds agree bit-exactly.
Contract build_contract(const Route& route, const std::vector<SegmentRecord>& records,
                        const OvGenConfig& cfg, std::uint64_t seed,
                        const std::string& contract_id = "");

}  // namespace ovplan
