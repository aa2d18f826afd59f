#include "ovplan/flightsim.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace ovplan {

void SimConfig::validate() const {
    if (fleet_size < 2) throw std::invalid_argument("SimConfig: fleet_size must be >= 2");
    if (!(dt > 0.0 && dt <= segment_duration))
        throw std::invalid_argument("SimConfig: requires 0 < dt <= segment_duration");
    if (!(speed_low > 0.0 && speed_low <= speed_high))
        throw std::invalid_argument("SimConfig: requires 0 < speed_low <= speed_high");
    if (!(init_radius >= 0.0))
        throw std::invalid_argument("SimConfig: init_radius must be >= 0");
    if (!(capture_radius > 0.0))
        throw std::invalid_argument("SimConfig: capture_radius must be positive");
    if (!(jitter_sigma >= 0.0))
        throw std::invalid_argument("SimConfig: jitter_sigma must be >= 0");
    const double steps = segment_duration / dt;
    if (std::abs(steps - std::round(steps)) > 1e-9)
        throw std::invalid_argument("SimConfig: dt must divide segment_duration");
}

bool reached_destination(const AircraftState& s, const Route& route, const SimConfig& cfg) {
    const int last = static_cast<int>(route.waypoints.size()) - 1;
    return s.active_waypoint >= last &&
           distance(s.position, route.waypoints.back().position) <= cfg.capture_radius;
}

Fleet init_fleet(const Route& route, const SimConfig& cfg, Rng& rng) {
    route.validate();
    cfg.validate();
    Fleet fleet;
    fleet.reserve(static_cast<std::size_t>(cfg.fleet_size));
    for (int i = 0; i < cfg.fleet_size; ++i) {
        AircraftState s;
        s.position = rng.in_disc(route.waypoints.front().position, cfg.init_radius);
        s.alt = cfg.cruise_alt;
        s.active_waypoint = 1;
        s.speed = rng.uniform(cfg.speed_low, cfg.speed_high);
        fleet.push_back(s);
    }
    return fleet;
}

void step(Fleet& fleet, const Route& route, const SimConfig& cfg) {
    const int last = static_cast<int>(route.waypoints.size()) - 1;
    for (AircraftState& s : fleet) {
        // Capture check first so the move targets the current leg.
        while (s.active_waypoint < last &&
               distance(s.position, route.waypoints[static_cast<std::size_t>(s.active_waypoint)]
                                        .position) <= cfg.capture_radius)
            ++s.active_waypoint;
        if (reached_destination(s, route, cfg)) continue;  // terminal hold
        const LocalPoint target =
            route.waypoints[static_cast<std::size_t>(s.active_waypoint)].position;
        const LocalPoint d = target - s.position;
        const double dist = d.norm();
        if (dist < 1e-12) continue;
        s.position = s.position + d * (s.speed * cfg.dt / dist);
    }
}

SegmentRecord run_segment(Fleet& fleet, const Route& route, const SimConfig& cfg,
                          int segment_index, double start_time) {
    SegmentRecord rec;
    rec.segment_index = segment_index;
    rec.start_time = start_time;
    rec.dt = cfg.dt;
    const int steps = static_cast<int>(std::llround(cfg.segment_duration / cfg.dt));
    rec.slices.reserve(static_cast<std::size_t>(steps) + 1);
    rec.slices.push_back(fleet);
    for (int i = 0; i < steps; ++i) {
        step(fleet, route, cfg);
        rec.slices.push_back(fleet);
    }
    return rec;
}

Fleet reinject(const SegmentRecord& record, const Route& route, const SimConfig& cfg,
               Rng& rng) {
    if (record.slices.empty())
        throw std::invalid_argument("reinject: empty segment record");
    const Fleet& final_slice = record.slices.back();
    const std::size_t n_wp = route.waypoints.size();

    // Active-waypoint histogram of the final slice.
    std::vector<std::size_t> histogram(n_wp, 0);
    std::vector<std::vector<std::size_t>> by_waypoint(n_wp);
    for (std::size_t i = 0; i < final_slice.size(); ++i) {
        const std::size_t w = static_cast<std::size_t>(final_slice[i].active_waypoint);
        ++histogram[w];
        by_waypoint[w].push_back(i);
    }

    // Largest-remainder allocation of fleet_size spawns across the histogram.
    const double total = static_cast<double>(final_slice.size());
    std::vector<std::size_t> counts(n_wp, 0);
    std::vector<std::pair<double, std::size_t>> remainders;
    std::size_t assigned = 0;
    for (std::size_t w = 0; w < n_wp; ++w) {
        const double share = cfg.fleet_size * static_cast<double>(histogram[w]) / total;
        counts[w] = static_cast<std::size_t>(std::floor(share));
        assigned += counts[w];
        remainders.emplace_back(share - std::floor(share), w);
    }
    std::stable_sort(remainders.begin(), remainders.end(),
                     [](const auto& a, const auto& b) { return a.first > b.first; });
    for (std::size_t k = 0; assigned < static_cast<std::size_t>(cfg.fleet_size); ++k) {
        const std::size_t w = remainders[k % remainders.size()].second;
        if (histogram[w] == 0) continue;
        ++counts[w];
        ++assigned;
    }

    Fleet fleet;
    fleet.reserve(static_cast<std::size_t>(cfg.fleet_size));
    for (std::size_t w = 0; w < n_wp; ++w) {
        for (std::size_t k = 0; k < counts[w]; ++k) {
            const AircraftState& donor =
                final_slice[by_waypoint[w][rng.index(by_waypoint[w].size())]];
            AircraftState s;
            s.position = {donor.position.x + cfg.jitter_sigma * rng.gaussian(),
                          donor.position.y + cfg.jitter_sigma * rng.gaussian()};
            s.alt = cfg.cruise_alt;
            s.active_waypoint = static_cast<int>(w);
            s.speed = rng.uniform(cfg.speed_low, cfg.speed_high);
            fleet.push_back(s);
        }
    }
    return fleet;
}

std::vector<SegmentRecord> simulate_route(const Route& route, const SimConfig& cfg) {
    route.validate();
    cfg.validate();
    Rng rng(cfg.seed);
    Fleet fleet = init_fleet(route, cfg, rng);

    const double mean_speed = 0.5 * (cfg.speed_low + cfg.speed_high);
    const double nominal = route.total_length / mean_speed;
    const double limit = 4.0 * std::max(nominal, cfg.segment_duration);

    std::vector<SegmentRecord> records;
    double t = route.departure_time;
    int segment = 0;
    while (true) {
        records.push_back(run_segment(fleet, route, cfg, segment, t));
        t += cfg.segment_duration;
        ++segment;
        const Fleet& last = records.back().slices.back();
        const bool done = std::all_of(last.begin(), last.end(), [&](const AircraftState& s) {
            return reached_destination(s, route, cfg);
        });
        if (done) break;
        if (t - route.departure_time > limit)
            throw std::runtime_error("simulate_route: exceeded 4x nominal flight duration");
        fleet = reinject(records.back(), route, cfg, rng);
    }
    return records;
}

std::vector<SegmentRecord> simulate_route_ensemble(const Route& route, const SimConfig& cfg,
                                                   int runs) {
    if (runs < 1) throw std::invalid_argument("simulate_route_ensemble: runs must be >= 1");
    std::vector<std::vector<SegmentRecord>> all;
    all.reserve(static_cast<std::size_t>(runs));
    std::size_t segments = 0;
    for (int k = 0; k < runs; ++k) {
        SimConfig run_cfg = cfg;
        run_cfg.seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(k));
        all.push_back(simulate_route(route, run_cfg));
        segments = std::max(segments, all.back().size());
    }

    const std::size_t slices = all.front().front().slices.size();
    std::vector<SegmentRecord> pooled(segments);
    for (std::size_t s = 0; s < segments; ++s) {
        pooled[s].segment_index = static_cast<int>(s);
        pooled[s].start_time = route.departure_time + cfg.segment_duration * static_cast<double>(s);
        pooled[s].dt = cfg.dt;
        pooled[s].slices.resize(slices);
        for (const std::vector<SegmentRecord>& run : all) {
            for (std::size_t i = 0; i < slices; ++i) {
                // A run that finished earlier holds its final fleet in place.
                const Fleet& slice =
                    s < run.size() ? run[s].slices[i] : run.back().slices.back();
                pooled[s].slices[i].insert(pooled[s].slices[i].end(), slice.begin(),
                                           slice.end());
            }
        }
    }
    return pooled;
}

}  // namespace ovplan
