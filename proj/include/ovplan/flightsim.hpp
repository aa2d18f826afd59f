#pragma once

#include <cstdint>
#include <vector>

#include "ovplan/rng.hpp"
#include "ovplan/route.hpp"

namespace ovplan {

struct SimConfig {
    int fleet_size = 100;           // N
    double dt = 1.0;                // seconds per recorded state
    double segment_duration = 60.0; // t_d, seconds per segment
    double init_radius = 50.0;      // r0, meters around waypoint 0
    double speed_low = 13.0;        // m/s
    double speed_high = 17.0;       // m/s
    double capture_radius = 100.0;  // waypoint-switch distance, meters
    double jitter_sigma = 10.0;     // re-injection noise, meters
    double cruise_alt = 100.0;      // meters
    std::uint64_t seed = 0;

    void validate() const;
};

struct AircraftState {
    LocalPoint position;
    double alt = 0.0;
    int active_waypoint = 1;  // index into the route waypoints, non-decreasing
    double speed = 15.0;      // m/s, > 0
};

/// States of the whole fleet at every dt multiple of one segment, endpoints
/// inclusive. slices[i] is the fleet at start_time + i * dt.
struct SegmentRecord {
    int segment_index = 0;
    double start_time = 0.0;
    double dt = 1.0;
    std::vector<std::vector<AircraftState>> slices;

    double time_at(std::size_t i) const { return start_time + static_cast<double>(i) * dt; }
    double end_time() const {
        return slices.empty() ? start_time : time_at(slices.size() - 1);
    }
};

using Fleet = std::vector<AircraftState>;

/// True once the aircraft holds at the final waypoint.
bool reached_destination(const AircraftState& s, const Route& route, const SimConfig& cfg);

/// N aircraft uniform in the r0 disc about waypoint 0, speeds uniform in the
/// configured band, targeting waypoint 1.
Fleet init_fleet(const Route& route, const SimConfig& cfg, Rng& rng);

/// One dt step of constant-speed point-mass motion toward the active waypoint.
void step(Fleet& fleet, const Route& route, const SimConfig& cfg);

/// Advances the fleet through one segment, recording every dt slice
/// (inclusive endpoints: t_d/dt + 1 slices).
SegmentRecord run_segment(Fleet& fleet, const Route& route, const SimConfig& cfg,
                          int segment_index, double start_time);

/// Fresh fleet whose waypoint assignment reproduces the final slice's
/// active-waypoint histogram (largest-remainder rounding); each aircraft spawns
/// at a bootstrap-resampled same-waypoint position plus isotropic Gaussian
/// jitter, with speeds redrawn.
Fleet reinject(const SegmentRecord& record, const Route& route, const SimConfig& cfg,
               Rng& rng);

/// Full pipeline: segments until every aircraft in a final slice has reached
/// the last waypoint. Aborts after 4x the nominal flight duration.
std::vector<SegmentRecord> simulate_route(const Route& route, const SimConfig& cfg);

/// Pools `runs` independent realizations (seeds derived from cfg.seed) into
/// one record set: slice i of segment s holds every run's fleet at that time.
/// Runs that finish early are extended with their terminal holding pattern, so
/// each pooled slice has exactly runs * fleet_size states. Fitting volumes on
/// the pool covers run-to-run spread, not just one realization's.
std::vector<SegmentRecord> simulate_route_ensemble(const Route& route, const SimConfig& cfg,
                                                   int runs);

}  // namespace ovplan
